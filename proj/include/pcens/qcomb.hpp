#ifndef PCENS_QCOMB_HPP
#define PCENS_QCOMB_HPP

// q-analog combinatorics: Gaussian binomials, the rank-fraction product
// psi, ordinary binomials/multinomials and q-ary entropy. Everything here
// is exact except the entropy helpers, which are double-valued by nature.
//
// Caches are thread_local so concurrent simulation workers never contend
// or share partially built tables.

#include <pcens/rational.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pcens::qcomb {

inline void require_q(unsigned q) {
    if (q < 2) throw std::invalid_argument("q must be >= 2");
}

namespace detail {

// Rows of the q-Pascal triangle, grown on demand:
//   [n k]_q = [n-1 k-1]_q + q^k [n-1 k]_q.
struct QPascal {
    unsigned q;
    std::vector<std::vector<Integer>> rows;  // rows[n][k], 0 <= k <= n

    explicit QPascal(unsigned qq) : q(qq) { rows.push_back({Integer(1)}); }

    const Integer& at(std::size_t n, std::size_t k) {
        while (rows.size() <= n) {
            const auto& prev = rows.back();
            const std::size_t r = rows.size();
            std::vector<Integer> row(r + 1);
            row[0] = 1;
            row[r] = 1;
            Integer qk = q;  // q^k, k starting at 1
            for (std::size_t k2 = 1; k2 < r; ++k2) {
                row[k2] = prev[k2 - 1] + qk * prev[k2];
                qk *= q;
            }
            rows.push_back(std::move(row));
        }
        return rows[n][k];
    }
};

inline QPascal& qpascal(unsigned q) {
    thread_local std::map<unsigned, QPascal> tables;
    auto it = tables.find(q);
    if (it == tables.end()) it = tables.emplace(q, QPascal(q)).first;
    return it->second;
}

// Scaling knob for the verification self-test: when enabled, psi(m, 1, q)
// is multiplied by 1 + 1e-9 so that every downstream identity check must
// notice the discrepancy. Never set outside `verify --perturb`.
inline bool& psi_perturbation() {
    thread_local bool enabled = false;
    return enabled;
}

}  // namespace detail

// Number of k-dimensional subspaces of F_q^n. Zero outside 0 <= k <= n.
inline Integer gaussian_binomial(long n, long k, unsigned q) {
    require_q(q);
    if (k < 0 || n < 0 || k > n) return 0;
    return detail::qpascal(q).at(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
}

// prod_{k=1..n} (q^k - 1); the positive-sign q-Pochhammer variant.
inline Integer qpochhammer(long n, unsigned q) {
    require_q(q);
    if (n < 0) throw std::invalid_argument("qpochhammer: negative index");
    Integer acc = 1;
    Integer qk = 1;
    for (long k = 1; k <= n; ++k) {
        qk *= q;
        acc *= qk - 1;
    }
    return acc;
}

// psi_m(i) = prod_{k=0..i-1} (1 - q^(k-m)): the probability that i uniform
// vectors in F_q^m are linearly independent. 1 at i=0, 0 outside [0, m].
inline Rational psi(long m, long i, unsigned q) {
    require_q(q);
    if (m < 0) throw std::invalid_argument("psi: m must be >= 0");
    if (i < 0 || i > m) return 0;
    thread_local std::map<std::pair<unsigned, long>, std::vector<Rational>> cache;
    auto& prefix = cache[{q, m}];
    if (prefix.empty()) {
        prefix.reserve(static_cast<std::size_t>(m) + 1);
        prefix.push_back(Rational(1));
        for (long k = 0; k < m; ++k)
            prefix.push_back(prefix.back() * (Rational(1) - qpow(q, k - m)));
    }
    Rational value = prefix[static_cast<std::size_t>(i)];
    if (detail::psi_perturbation() && i == 1) value *= Rational(1000000001, 1000000000);
    return value;
}

// Checks psi_m(i) == q^(-mi + i(i-1)/2) * qpochhammer(i) * [m i]_q exactly.
inline bool psi_identity_check(long m, long i, unsigned q) {
    require_q(q);
    if (m < 0 || i < 0 || i > m) throw std::invalid_argument("psi_identity_check: need 0 <= i <= m");
    const Rational lhs = psi(m, i, q);
    const Rational rhs = qpow(q, -m * i + i * (i - 1) / 2) * Rational(qpochhammer(i, q)) *
                         Rational(gaussian_binomial(m, i, q));
    return lhs == rhs;
}

inline Integer binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    Integer acc = 1;
    for (long j = 1; j <= k; ++j) {
        acc *= n - k + j;
        acc /= j;  // exact at every step: acc is C(n-k+j, j)
    }
    return acc;
}

// n! / prod(parts!) with parts nonnegative and summing to n.
inline Integer multinomial(long n, std::span<const long> parts) {
    if (n < 0) throw std::invalid_argument("multinomial: negative n");
    long sum = 0;
    for (long p : parts) {
        if (p < 0) throw std::invalid_argument("multinomial: negative part");
        sum += p;
    }
    if (sum != n) throw std::invalid_argument("multinomial: parts must sum to n");
    Integer acc = 1;
    long consumed = 0;
    for (long p : parts) {
        consumed += p;
        acc *= binomial(consumed, p);
    }
    return acc;
}

inline Integer multinomial(long n, std::initializer_list<long> parts) {
    return multinomial(n, std::span<const long>(parts.begin(), parts.size()));
}

// x log_q x with the continuous extension 0 at x = 0.
inline double xlogq(double x, unsigned q) {
    require_q(q);
    if (x < 0.0) {
        if (x > -1e-12) return 0.0;  // tolerate roundoff from callers
        throw std::invalid_argument("xlogq: negative argument");
    }
    if (x == 0.0) return 0.0;
    return x * std::log(x) / std::log(static_cast<double>(q));
}

// Binary q-ary entropy h(t) = -t log_q t - (1-t) log_q(1-t) on [0, 1].
inline double entropy(double t, unsigned q) {
    require_q(q);
    if (t < -1e-12 || t > 1.0 + 1e-12) throw std::invalid_argument("entropy: t outside [0,1]");
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return -xlogq(t, q) - xlogq(1.0 - t, q);
}

// Multivariate extension: -sum t_j log_q t_j for a probability vector.
inline double multi_entropy(std::span<const double> parts, unsigned q) {
    require_q(q);
    double sum = 0.0;
    double h = 0.0;
    for (double t : parts) {
        if (t < -1e-12) throw std::invalid_argument("multi_entropy: negative part");
        sum += t;
        h -= xlogq(t, q);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("multi_entropy: parts must sum to 1");
    return h;
}

inline double multi_entropy(std::initializer_list<double> parts, unsigned q) {
    return multi_entropy(std::span<const double>(parts.begin(), parts.size()), q);
}

// ---- log-space companions (natural log), for sizes where exact rationals
// ---- would be pointless. These back the large-n evaluation paths.

// log C(n, k) via lgamma; exact -inf outside the triangle.
inline double log_binomial(double n, double k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Prefix sums of log(1 - q^(k-m)) so that log psi_m(i) is one lookup.
// Returns S with S[i] = log psi_m(i) for 0 <= i <= m.
inline const std::vector<double>& log_psi_table(long m, unsigned q) {
    require_q(q);
    if (m < 0) throw std::invalid_argument("log_psi_table: m must be >= 0");
    thread_local std::map<std::pair<unsigned, long>, std::vector<double>> cache;
    auto& tab = cache[{q, m}];
    if (tab.empty()) {
        tab.reserve(static_cast<std::size_t>(m) + 1);
        tab.push_back(0.0);
        const double lq = std::log(static_cast<double>(q));
        for (long k = 0; k < m; ++k)
            tab.push_back(tab.back() + std::log1p(-std::exp(lq * static_cast<double>(k - m))));
    }
    return tab;
}

// log(1 - psi_m(i)), computed as log(-expm1(log psi)) so it stays accurate
// when psi is within a few ulp of 1 (small i, large m).
inline double log_one_minus_psi(long m, long i, unsigned q) {
    if (i > m) return 0.0;  // psi is 0 there
    if (i <= 0) return -std::numeric_limits<double>::infinity();
    const double lp = log_psi_table(m, q)[static_cast<std::size_t>(i)];
    return std::log(-std::expm1(lp));
}

// Correction sums c[a] = sum_{k=1..a} log(1 - q^-k), so that
// log [n k]_q = k(n-k) log q + c[n] - c[k] - c[n-k].
inline const std::vector<double>& log_qbinom_correction(long n, unsigned q) {
    require_q(q);
    if (n < 0) throw std::invalid_argument("log_qbinom_correction: negative n");
    thread_local std::map<unsigned, std::vector<double>> cache;
    auto& tab = cache[q];
    if (tab.empty()) tab.push_back(0.0);
    const double lq = std::log(static_cast<double>(q));
    while (static_cast<long>(tab.size()) <= n) {
        const long k = static_cast<long>(tab.size());
        tab.push_back(tab.back() + std::log1p(-std::exp(-lq * static_cast<double>(k))));
    }
    return tab;
}

inline double log_gaussian_binomial(long n, long k, unsigned q) {
    if (k < 0 || n < 0 || k > n) return -std::numeric_limits<double>::infinity();
    const auto& c = log_qbinom_correction(n, q);
    const double lq = std::log(static_cast<double>(q));
    return static_cast<double>(k) * static_cast<double>(n - k) * lq + c[n] - c[k] - c[n - k];
}

// Stable log-sum-exp; -inf entries are ignored, empty input gives -inf.
inline double log_sum_exp(std::span<const double> logs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : logs)
        if (v > mx) mx = v;
    if (!std::isfinite(mx)) return mx;
    double acc = 0.0;
    for (double v : logs)
        if (std::isfinite(v)) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

}  // namespace pcens::qcomb

#endif
