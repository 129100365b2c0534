#ifndef PCENS_FORMULAS_HPP
#define PCENS_FORMULAS_HPP

// Closed-form ensemble statistics for uniformly random m x n parity-check
// matrices over F_q, transmitted over the q-ary erasure channel with erasure
// probability eps.
//
// Every quantity is available in two flavors that are never mixed silently:
//   * exact: Rational in, Rational out;
//   * log-space: double in, natural-log double out, for block lengths where
//     the exact representation would be astronomically wide.
// The log-space forms accumulate each inner sum with its own max shift and
// only then combine the outer terms, so cancellation never enters: all
// summands are positive.

#include <pcens/qcomb.hpp>
#include <pcens/rational.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pcens {

struct EnsembleParams {
    unsigned q;
    unsigned m;  // parity-check rows
    unsigned n;  // code length (columns)

    EnsembleParams(unsigned q_, unsigned m_, unsigned n_) : q(q_), m(m_), n(n_) {
        qcomb::require_q(q_);
        if (m_ == 0 || n_ == 0) throw std::invalid_argument("m and n must be positive");
    }
};

namespace detail {

inline void require_eps(const Rational& eps) {
    if (eps < 0 || eps > 1) throw std::invalid_argument("erasure probability outside [0,1]");
}

inline void require_eps(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("erasure probability outside [0,1]");
}

// eps^i (1-eps)^(n-i) for i = 0..n, computed once per evaluation.
struct ErasurePowers {
    std::vector<Rational> eps_pow, co_pow;

    ErasurePowers(const Rational& eps, unsigned n) : eps_pow(n + 1), co_pow(n + 1) {
        eps_pow[0] = 1;
        co_pow[0] = 1;
        const Rational co = Rational(1) - eps;
        for (unsigned i = 1; i <= n; ++i) {
            eps_pow[i] = eps_pow[i - 1] * eps;
            co_pow[i] = co_pow[i - 1] * co;
        }
    }

    Rational weight(unsigned i, unsigned n) const { return eps_pow[i] * co_pow[n - i]; }
};

}  // namespace detail

// P(rk(H) = j) for H uniform over all m x n matrices.
inline Rational prob_rank(const EnsembleParams& p, long j) {
    const Rational coeff =
        qcomb::psi(p.m, j, p.q) * Rational(qcomb::gaussian_binomial(p.n, j, p.q));
    if (coeff == 0) return 0;
    return qpow(p.q, -static_cast<long long>(p.m) * (static_cast<long long>(p.n) - j)) * coeff;
}

// P(rk(H) = j and rk(H_A) = r) for any fixed column subset A of size s.
inline Rational prob_rank_joint(const EnsembleParams& p, long s, long j, long r) {
    if (s < 0 || s > static_cast<long>(p.n)) throw std::invalid_argument("subset size out of range");
    const Rational coeff = qcomb::psi(p.m, j, p.q) *
                           Rational(qcomb::gaussian_binomial(s, r, p.q)) *
                           Rational(qcomb::gaussian_binomial(p.n - s, j - r, p.q));
    if (coeff == 0) return 0;
    const long long n = p.n, m = p.m;
    const long long e = -m * (n - j) + r * (n - j - s + r);
    return qpow(p.q, e) * coeff;
}

// P(rk(H_E) = #E and rk(H_E') = #E') for fixed subsets with #E = i,
// #E' = i2 and #(E intersect E') = s. Undefined when s exceeds m.
inline Rational prob_two_full_ranks(const EnsembleParams& p, long i, long i2, long s) {
    if (s < 0 || s > std::min(i, i2) || std::max(i, i2) > static_cast<long>(p.n))
        throw std::invalid_argument("need 0 <= s <= min(i, i2) <= n");
    if (s > static_cast<long>(p.m))
        throw std::domain_error("overlap larger than the row count: denominator vanishes");
    return qcomb::psi(p.m, i, p.q) * qcomb::psi(p.m, i2, p.q) / qcomb::psi(p.m, s, p.q);
}

// E[lambda_i^(l)]: expected number of erasure sets of size i whose
// unresolved-solution space has dimension exactly l.
inline Rational expected_lambda(const EnsembleParams& p, long i, long ell) {
    if (i < 0 || i > static_cast<long>(p.n) || ell < 0 || ell > i) return 0;
    const Rational coeff = qcomb::psi(p.m, i - ell, p.q) *
                           Rational(qcomb::gaussian_binomial(i, ell, p.q)) *
                           Rational(qcomb::binomial(p.n, i));
    if (coeff == 0) return 0;
    return qpow(p.q, -static_cast<long long>(p.m) * ell) * coeff;
}

// E[I_i]: expected number of incorrigible sets of size i.
inline Rational expected_incorrigible(const EnsembleParams& p, long i) {
    if (i < 0 || i > static_cast<long>(p.n)) return 0;
    return (Rational(1) - qcomb::psi(p.m, i, p.q)) * Rational(qcomb::binomial(p.n, i));
}

// E[I_i^(l)]: expected number of size-i sets left unresolved by list
// decoding with list size q^l.
inline Rational expected_incorrigible_list(const EnsembleParams& p, long i, long ell) {
    if (ell < 0) throw std::invalid_argument("list exponent must be >= 0");
    if (i < 0 || i > static_cast<long>(p.n)) return 0;
    Rational sum = 0;
    for (long j = ell + 1; j <= i; ++j) {
        const Rational coeff =
            qcomb::psi(p.m, i - j, p.q) * Rational(qcomb::gaussian_binomial(i, j, p.q));
        if (coeff == 0) continue;
        sum += qpow(p.q, -static_cast<long long>(p.m) * j) * coeff;
    }
    return sum * Rational(qcomb::binomial(p.n, i));
}

// Ensemble-average unsuccessful-decoding probability.
inline Rational p_ud(const EnsembleParams& p, const Rational& eps) {
    detail::require_eps(eps);
    const detail::ErasurePowers pw(eps, p.n);
    Rational sum = 0;
    for (unsigned i = 1; i <= p.n; ++i) sum += expected_incorrigible(p, i) * pw.weight(i, p.n);
    return sum;
}

// Ensemble-average list-decoding failure probability, list size q^ell.
inline Rational p_ld(const EnsembleParams& p, long ell, const Rational& eps) {
    detail::require_eps(eps);
    if (ell < 0) throw std::invalid_argument("list exponent must be >= 0");
    const detail::ErasurePowers pw(eps, p.n);
    Rational sum = 0;
    for (unsigned i = 1; i <= p.n; ++i)
        sum += expected_incorrigible_list(p, i, ell) * pw.weight(i, p.n);
    return sum;
}

// Ensemble-average maximum-likelihood decoding error probability.
inline Rational p_mld(const EnsembleParams& p, const Rational& eps) {
    detail::require_eps(eps);
    const detail::ErasurePowers pw(eps, p.n);
    Rational sum = 0;
    for (unsigned i = 1; i <= p.n; ++i) {
        Rational inner = 0;
        for (long ell = 1; ell <= static_cast<long>(i); ++ell) {
            const Rational coeff = qcomb::psi(p.m, i - ell, p.q) *
                                   Rational(qcomb::gaussian_binomial(i, ell, p.q));
            if (coeff == 0) continue;
            inner += qpow(p.q, -static_cast<long long>(p.m) * ell) *
                     (Rational(1) - qpow(p.q, -ell)) * coeff;
        }
        sum += inner * Rational(qcomb::binomial(p.n, i)) * pw.weight(i, p.n);
    }
    return sum;
}

// Cov(I_i, I_i2) over the matrix ensemble. Zero whenever either index is
// outside [1, min(m, n)]; both vanishing factors fall out of the formula.
inline Rational covariance_incorrigible(const EnsembleParams& p, long i, long i2) {
    const Rational outer = qcomb::psi(p.m, i, p.q) * qcomb::psi(p.m, i2, p.q);
    if (outer == 0) return 0;
    const long n = p.n;
    Rational sum = 0;
    const long lo = std::max(1L, i + i2 - n);
    const long hi = std::min(i, i2);
    for (long s = lo; s <= hi; ++s) {
        const Integer ways = qcomb::multinomial(n, {s, i - s, i2 - s, n - i - i2 + s});
        sum += (Rational(1) / qcomb::psi(p.m, s, p.q) - 1) * Rational(ways);
    }
    return outer * sum;
}

// Var[P_ud(H, eps)] over the ensemble, as a single triple sum.
inline Rational variance_ud(const EnsembleParams& p, const Rational& eps) {
    detail::require_eps(eps);
    const long n = p.n;
    const long top = std::min<long>(p.m, n);
    const detail::ErasurePowers pw(eps, p.n);
    Rational total = 0;
    for (long i = 1; i <= top; ++i) {
        for (long i2 = 1; i2 <= top; ++i2) {
            const Rational outer = qcomb::psi(p.m, i, p.q) * qcomb::psi(p.m, i2, p.q);
            Rational inner = 0;
            for (long s = std::max(1L, i + i2 - n); s <= std::min(i, i2); ++s) {
                const Integer ways = qcomb::multinomial(n, {s, i - s, i2 - s, n - i - i2 + s});
                inner += (Rational(1) / qcomb::psi(p.m, s, p.q) - 1) * Rational(ways);
            }
            total += outer * inner * pw.eps_pow[i] * pw.eps_pow[i2] * pw.co_pow[n - i] *
                     pw.co_pow[n - i2];
        }
    }
    return total;
}

// ---------------- log-space (natural log) evaluation ----------------

inline double log_p_ud(const EnsembleParams& p, double eps) {
    detail::require_eps(eps);
    const double le = std::log(eps), lc = std::log1p(-eps);
    std::vector<double> terms;
    terms.reserve(p.n);
    for (long i = 1; i <= static_cast<long>(p.n); ++i)
        terms.push_back(qcomb::log_one_minus_psi(p.m, i, p.q) + qcomb::log_binomial(p.n, i) +
                        static_cast<double>(i) * le + static_cast<double>(p.n - i) * lc);
    return qcomb::log_sum_exp(terms);
}

inline double log_p_ld(const EnsembleParams& p, long ell, double eps) {
    detail::require_eps(eps);
    if (ell < 0) throw std::invalid_argument("list exponent must be >= 0");
    const double le = std::log(eps), lc = std::log1p(-eps);
    const double lq = std::log(static_cast<double>(p.q));
    const auto& lpsi = qcomb::log_psi_table(p.m, p.q);
    std::vector<double> outer, inner;
    outer.reserve(p.n);
    for (long i = 1; i <= static_cast<long>(p.n); ++i) {
        inner.clear();
        for (long j = ell + 1; j <= i; ++j) {
            if (i - j > static_cast<long>(p.m)) continue;  // psi factor is zero
            inner.push_back(-static_cast<double>(p.m) * static_cast<double>(j) * lq +
                            lpsi[static_cast<std::size_t>(i - j)] +
                            qcomb::log_gaussian_binomial(i, j, p.q));
        }
        if (inner.empty()) continue;
        outer.push_back(qcomb::log_sum_exp(inner) + qcomb::log_binomial(p.n, i) +
                        static_cast<double>(i) * le + static_cast<double>(p.n - i) * lc);
    }
    return qcomb::log_sum_exp(outer);
}

inline double log_p_mld(const EnsembleParams& p, double eps) {
    detail::require_eps(eps);
    const double le = std::log(eps), lc = std::log1p(-eps);
    const double lq = std::log(static_cast<double>(p.q));
    const auto& lpsi = qcomb::log_psi_table(p.m, p.q);
    std::vector<double> outer, inner;
    outer.reserve(p.n);
    for (long i = 1; i <= static_cast<long>(p.n); ++i) {
        inner.clear();
        for (long ell = 1; ell <= i; ++ell) {
            if (i - ell > static_cast<long>(p.m)) continue;
            const double lq_ml = -static_cast<double>(p.m) * static_cast<double>(ell) * lq;
            // log(1 - q^-ell) without cancellation
            const double l1mq = std::log1p(-std::exp(-static_cast<double>(ell) * lq));
            inner.push_back(lq_ml + l1mq + lpsi[static_cast<std::size_t>(i - ell)] +
                            qcomb::log_gaussian_binomial(i, ell, p.q));
        }
        if (inner.empty()) continue;
        outer.push_back(qcomb::log_sum_exp(inner) + qcomb::log_binomial(p.n, i) +
                        static_cast<double>(i) * le + static_cast<double>(p.n - i) * lc);
    }
    return qcomb::log_sum_exp(outer);
}

inline double log_variance_ud(const EnsembleParams& p, double eps) {
    detail::require_eps(eps);
    const double le = std::log(eps), lc = std::log1p(-eps);
    const long n = p.n;
    const long top = std::min<long>(p.m, n);
    const auto& lpsi = qcomb::log_psi_table(p.m, p.q);
    const auto lmultinom = [&](long a, long b, long c, long d) {
        return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(a + 1.0) -
               std::lgamma(b + 1.0) - std::lgamma(c + 1.0) - std::lgamma(d + 1.0);
    };
    std::vector<double> outer, inner;
    for (long i = 1; i <= top; ++i) {
        for (long i2 = 1; i2 <= top; ++i2) {
            inner.clear();
            for (long s = std::max(1L, i + i2 - n); s <= std::min(i, i2); ++s) {
                // log(1/psi(s) - 1) = log(1 - psi(s)) - log psi(s)
                const double lg = std::log(-std::expm1(lpsi[s])) - lpsi[s];
                inner.push_back(lg + lmultinom(s, i - s, i2 - s, n - i - i2 + s));
            }
            if (inner.empty()) continue;
            outer.push_back(lpsi[i] + lpsi[i2] + qcomb::log_sum_exp(inner) +
                            static_cast<double>(i + i2) * le +
                            static_cast<double>(2 * n - i - i2) * lc);
        }
    }
    return qcomb::log_sum_exp(outer);
}

}  // namespace pcens

#endif
