#ifndef PCENS_EXPONENTS_HPP
#define PCENS_EXPONENTS_HPP

// Asymptotic (large-n) quantities: the decoding-failure exponents for list
// size q^ell, the classical random-coding comparison exponent for a fixed
// list size L, the variance exponent with its kappa0 root, and the
// concentration margin. Each closed form has an independent numeric
// maximizer next to it (coarse grid, then golden-section refinement) so the
// branch algebra can be validated without re-deriving it.
//
// Everything here is double precision and measured in base-q logarithms.
// Inputs within 1e-6 of the degenerate rates/erasure levels {0, 1} are
// rejected; the formulas are well-conditioned away from those corners.

#include <pcens/qcomb.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pcens {

enum class Branch { zero_region, middle_region, low_rate_region };

struct ExponentResult {
    double value;
    Branch branch;
    double boundary_low;   // low_rate_region applies at or below this rate
    double boundary_high;  // exponent vanishes at or above this rate (1-eps)
};

namespace detail {

constexpr double kEdgeMargin = 1e-6;

inline void require_open_unit(double x, const char* what) {
    if (!(x >= kEdgeMargin && x <= 1.0 - kEdgeMargin))
        throw std::invalid_argument(std::string(what) + " must lie in (0,1), away from the ends");
}

inline double logq(double x, unsigned q) { return std::log(x) / std::log(static_cast<double>(q)); }

// log_q((1-eps) + q^k * eps), written so that huge k cannot overflow.
inline double logq_mix(unsigned q, double k, double eps) {
    const double lq = std::log(static_cast<double>(q));
    return k + std::log(eps + std::exp(-k * lq) * (1.0 - eps)) / lq;
}

// Golden-section maximization of a unimodal function on [a, b].
// Stops when the bracket is narrower than tol; returns the best argument.
template <typename F>
double golden_max(F&& f, double a, double b, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 < f2 ? x2 : x1;
}

}  // namespace detail

struct RatePoint {
    unsigned q;
    double R;
    double epsilon;
    long ell;  // list size is q^ell

    RatePoint(unsigned q_, double rate, double eps, long ell_ = 0)
        : q(q_), R(rate), epsilon(eps), ell(ell_) {
        qcomb::require_q(q_);
        detail::require_open_unit(rate, "rate");
        detail::require_open_unit(eps, "erasure probability");
        if (ell_ < 0) throw std::invalid_argument("list exponent must be >= 0");
    }
};

// Failure exponent of list decoding with list size q^ell. Three branches:
// zero at and above capacity, a list-independent middle branch, and a
// low-rate branch where the list size actually bites. The breakpoint is
// assigned to the low-rate branch.
inline ExponentResult t_ld(const RatePoint& pt) {
    const double eps = pt.epsilon;
    const double k = static_cast<double>(pt.ell + 1);
    const double lq = std::log(static_cast<double>(pt.q));
    const double b1 = (1.0 - eps) / ((1.0 - eps) + std::exp(k * lq) * eps);
    ExponentResult res{0.0, Branch::zero_region, b1, 1.0 - eps};
    if (pt.R >= 1.0 - eps) return res;
    if (pt.R <= b1) {
        res.branch = Branch::low_rate_region;
        res.value = k * (1.0 - pt.R) - detail::logq_mix(pt.q, k, eps);
    } else {
        res.branch = Branch::middle_region;
        res.value = (1.0 - pt.R) * detail::logq((1.0 - pt.R) / eps, pt.q) +
                    pt.R * detail::logq(pt.R / (1.0 - eps), pt.q);
    }
    return res;
}

// Unique decoding and maximum-likelihood decoding share one exponent: the
// list exponent with ell = 0.
inline ExponentResult t_ud(unsigned q, double rate, double eps) {
    return t_ld(RatePoint(q, rate, eps, 0));
}

inline ExponentResult t_mld(unsigned q, double rate, double eps) { return t_ud(q, rate, eps); }

// Random-coding exponent for list decoding with a fixed list size L
// (not necessarily a power of q). Same middle branch as t_ld; the low-rate
// branch saturates at slope L instead of ell + 1.
inline double t_ld_star(unsigned q, long list_size, double rate, double eps) {
    qcomb::require_q(q);
    if (list_size < 1) throw std::invalid_argument("list size must be >= 1");
    detail::require_open_unit(rate, "rate");
    detail::require_open_unit(eps, "erasure probability");
    if (rate >= 1.0 - eps) return 0.0;
    const double l = static_cast<double>(list_size);
    const double lq = std::log(static_cast<double>(q));
    const double bl = (1.0 - eps) / ((1.0 - eps) + std::exp(l * lq) * eps);
    if (rate <= bl) return l * (1.0 - rate) - detail::logq_mix(q, l, eps);
    return (1.0 - rate) * detail::logq((1.0 - rate) / eps, q) +
           rate * detail::logq(rate / (1.0 - eps), q);
}

// The root of the variance-exponent stationarity condition
// q (1-R-k)^2 = k (2R-1+k), taken on the side with (1-R)^2 < k < 1-R.
inline double kappa0(unsigned q, double rate) {
    qcomb::require_q(q);
    detail::require_open_unit(rate, "rate");
    const double qm1 = static_cast<double>(q) - 1.0;
    return (1.0 - rate) - (std::sqrt(4.0 * rate * (1.0 - rate) * qm1 + 1.0) - 1.0) / (2.0 * qm1);
}

// Exponent of the ensemble variance of the unique-decoding failure
// probability. Two branches; unlike the failure exponents it stays positive
// all the way up to rate 1, so there is no zero region and the upper
// boundary is reported as 1.
inline ExponentResult s_ud(unsigned q, double rate, double eps) {
    qcomb::require_q(q);
    detail::require_open_unit(rate, "rate");
    detail::require_open_unit(eps, "erasure probability");
    const double d = 1.0 + (static_cast<double>(q) - 1.0) * eps * eps;
    const double rb = (1.0 - eps) / d;
    ExponentResult res{0.0, Branch::low_rate_region, rb, 1.0};
    if (rate <= rb) {
        res.value = (1.0 - rate) - detail::logq(d, q);
    } else {
        res.branch = Branch::middle_region;
        const double k0 = kappa0(q, rate);
        res.value = (1.0 - rate) * detail::logq(k0 / (eps * eps), q) +
                    rate * detail::logq((2.0 * rate - 1.0 + k0) / ((1.0 - eps) * (1.0 - eps)), q);
    }
    return res;
}

// S_ud - 2 T_ud: positive exactly where the failure probability concentrates
// around its ensemble mean.
inline double concentration_margin(unsigned q, double rate, double eps) {
    return s_ud(q, rate, eps).value - 2.0 * t_ud(q, rate, eps).value;
}

// ---------------- independent numeric maximizers ----------------

struct SupF {
    double value;
    double t;  // argmax erased fraction
};

struct SupG {
    double value;
    double t, t2, kappa;  // argmax of the three-variable objective
};

namespace detail {

// Objective whose negated supremum over t in (0,1] is the list-decoding
// failure exponent: a linear penalty below the kink at t = 1-R plus the
// erasure-pattern entropy/probability trade-off.
inline double failure_objective(unsigned q, long ell, double rate, double eps, double t) {
    const double le = logq(eps, q), lc = logq(1.0 - eps, q);
    double f = qcomb::entropy(t, q) + t * le + (1.0 - t) * lc;
    const double slack = 1.0 - rate - t;
    if (slack > 0.0) f -= static_cast<double>(ell + 1) * slack;
    return f;
}

// Objective for the variance exponent: four-part composition entropy of the
// overlap pattern (kappa shared, t-kappa and t2-kappa private, rest intact)
// plus the pattern-probability terms.
inline double variance_objective(unsigned q, double rate, double eps, double t, double t2,
                                 double kappa) {
    const double le = logq(eps, q), lc = logq(1.0 - eps, q);
    const double h = qcomb::multi_entropy(
        {kappa, t - kappa, t2 - kappa, 1.0 - t - t2 + kappa}, q);
    return (kappa - 1.0 + rate) + h + (t + t2) * le + (2.0 - t - t2) * lc;
}

}  // namespace detail

// Maximize the one-variable failure objective by a step-1/200 grid sweep and
// golden-section refinement around the best cell. Deliberately ignorant of
// the closed-form branch algebra so it can serve as a check on it.
inline SupF sup_f_numeric(unsigned q, double rate, double eps, long ell) {
    qcomb::require_q(q);
    detail::require_open_unit(rate, "rate");
    detail::require_open_unit(eps, "erasure probability");
    if (ell < 0) throw std::invalid_argument("list exponent must be >= 0");
    const auto f = [&](double t) { return detail::failure_objective(q, ell, rate, eps, t); };
    constexpr int kSteps = 200;
    double best_t = 1.0, best = f(1.0);
    for (int k = 1; k < kSteps; ++k) {
        const double t = static_cast<double>(k) / kSteps;
        const double v = f(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    // The objective is concave, so the true argmax lies within one grid step.
    const double lo = std::max(1e-12, best_t - 1.0 / kSteps);
    const double hi = std::min(1.0, best_t + 1.0 / kSteps);
    const double t_star = detail::golden_max(f, lo, hi, 1e-10);
    const double v_star = f(t_star);
    if (v_star > best) return {v_star, t_star};
    return {best, best_t};
}

// Maximize the three-variable variance objective over the constraint set
// 0 < t, t2 <= 1-R, max(0, t+t2-1) <= kappa <= min(t, t2): coarse lattice
// sweep at step 1/200 (entropy terms come from a lookup table, since every
// lattice part is a multiple of the step), then coordinate-wise
// golden-section ascent. Concavity makes both stages safe.
inline SupG sup_g_numeric(unsigned q, double rate, double eps) {
    qcomb::require_q(q);
    detail::require_open_unit(rate, "rate");
    detail::require_open_unit(eps, "erasure probability");
    constexpr int kSteps = 200;
    const double step = 1.0 / kSteps;
    const double le = detail::logq(eps, q), lc = detail::logq(1.0 - eps, q);

    std::vector<double> xt(kSteps + 1);
    for (int k = 0; k <= kSteps; ++k) xt[k] = qcomb::xlogq(static_cast<double>(k) * step, q);

    const int tmax = static_cast<int>(std::floor((1.0 - rate) * kSteps));
    int bt = 1, bt2 = 1, bk = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= tmax; ++it) {
        for (int it2 = it; it2 <= tmax; ++it2) {  // symmetric in (t, t2)
            const int klo = std::max(0, it + it2 - kSteps);
            for (int ik = klo; ik <= it; ++ik) {
                const double h =
                    -(xt[ik] + xt[it - ik] + xt[it2 - ik] + xt[kSteps - it - it2 + ik]);
                const double v = (static_cast<double>(ik) * step - 1.0 + rate) + h +
                                 static_cast<double>(it + it2) * step * le +
                                 (2.0 - static_cast<double>(it + it2) * step) * lc;
                if (v > best) {
                    best = v;
                    bt = it;
                    bt2 = it2;
                    bk = ik;
                }
            }
        }
    }

    double t = static_cast<double>(bt) * step;
    double t2 = static_cast<double>(bt2) * step;
    double kappa = static_cast<double>(bk) * step;
    const double tcap = 1.0 - rate;
    const auto g = [&](double a, double b, double c) {
        return detail::variance_objective(q, rate, eps, a, b, c);
    };
    double prev = -std::numeric_limits<double>::infinity();
    for (int round = 0; round < 200; ++round) {
        kappa = detail::golden_max([&](double x) { return g(t, t2, x); },
                                   std::max(0.0, t + t2 - 1.0), std::min(t, t2), 1e-10);
        t = detail::golden_max([&](double x) { return g(x, t2, kappa); },
                               std::max(kappa, 1e-12), std::min(tcap, 1.0 + kappa - t2), 1e-10);
        t2 = detail::golden_max([&](double x) { return g(t, x, kappa); },
                                std::max(kappa, 1e-12), std::min(tcap, 1.0 + kappa - t), 1e-10);
        const double cur = g(t, t2, kappa);
        if (cur - prev < 1e-13 && round >= 3) break;
        prev = cur;
    }
    return {g(t, t2, kappa), t, t2, kappa};
}

// ---------------- finite-n trend reporting ----------------

struct ExponentSample {
    unsigned long n;
    double logq_prob;  // base-q log of the observed/evaluated probability
};

struct EmpiricalExponent {
    std::vector<double> per_point;  // -log_q(P)/n, one per sample
    double final_estimate;          // value at the largest block length
};

// Turns a series of (n, log_q P) points into normalized exponent estimates.
// No extrapolation: convergence speed of the finite-n correction is unknown,
// so only the raw trend and its last point are reported.
inline EmpiricalExponent empirical_exponent(std::span<const ExponentSample> points) {
    if (points.size() < 3)
        throw std::invalid_argument("need at least 3 block lengths to report a trend");
    EmpiricalExponent out;
    out.per_point.reserve(points.size());
    unsigned long prev_n = 0;
    for (const auto& pt : points) {
        if (pt.n == 0 || pt.n <= prev_n)
            throw std::invalid_argument("block lengths must be strictly increasing");
        if (!std::isfinite(pt.logq_prob) || pt.logq_prob > 0.0)
            throw std::invalid_argument("log-probabilities must be finite and <= 0");
        prev_n = pt.n;
        out.per_point.push_back(-pt.logq_prob / static_cast<double>(pt.n));
    }
    out.final_estimate = out.per_point.back();
    return out;
}

inline EmpiricalExponent empirical_exponent(std::initializer_list<ExponentSample> points) {
    return empirical_exponent(std::span<const ExponentSample>(points.begin(), points.size()));
}

}  // namespace pcens

#endif
