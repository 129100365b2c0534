#include <catch2/catch_amalgamated.hpp>

#include <pcens/formulas.hpp>
#include <pcens/gf.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

using pcens::EnsembleParams;
using pcens::GFMatrix;
using pcens::Integer;
using pcens::Rational;

namespace {

// Independent oracle: the full lambda profile of one matrix, found by ranking
// every erasure pattern directly. lam[i][l] counts size-i column sets whose
// submatrix has rank i - l.
std::vector<std::vector<Integer>> lambda_by_subsets(const GFMatrix& h) {
    const std::size_t n = h.cols();
    std::vector<std::vector<Integer>> lam(n + 1);
    for (std::size_t i = 0; i <= n; ++i) lam[i].assign(i + 1, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        pcens::ColumnSet cols;
        for (std::size_t c = 0; c < n; ++c)
            if ((mask >> c) & 1U) cols.push_back(c);
        const std::size_t r = pcens::submatrix_rank(h, cols);
        lam[cols.size()][cols.size() - r] += 1;
    }
    return lam;
}

struct EnsembleAverages {
    Rational p_ud, p_mld, var_ud;
    std::vector<Rational> p_ld;                      // index = list exponent
    std::vector<std::vector<Rational>> mean_lambda;  // [i][l]
    std::vector<std::vector<Rational>> cov;          // [i][i2], 1-based data at those slots
};

// Averages every decoding statistic over the whole matrix ensemble by
// enumeration. Only the rank routine is shared with the library under test.
EnsembleAverages enumerate_ensemble(unsigned q, unsigned m, unsigned n, const Rational& eps,
                                    long max_ell) {
    const pcens::FieldParam field(q);
    pcens::MatrixEnumeration all(m, n, field);
    const Rational co = Rational(1) - eps;
    std::vector<Rational> w(n + 1);  // eps^i (1-eps)^(n-i)
    for (unsigned i = 0; i <= n; ++i) {
        w[i] = 1;
        for (unsigned k = 0; k < i; ++k) w[i] *= eps;
        for (unsigned k = i; k < n; ++k) w[i] *= co;
    }

    EnsembleAverages out;
    out.p_ld.assign(static_cast<std::size_t>(max_ell) + 1, 0);
    out.mean_lambda.assign(n + 1, {});
    for (unsigned i = 0; i <= n; ++i) out.mean_lambda[i].assign(i + 1, 0);
    out.cov.assign(n + 1, std::vector<Rational>(n + 1, 0));

    Rational sum_p = 0, sum_p2 = 0, sum_mld = 0;
    std::vector<Rational> sum_ld(static_cast<std::size_t>(max_ell) + 1, 0);
    std::vector<std::vector<Integer>> sum_ii(n + 1, std::vector<Integer>(n + 1, 0));
    std::vector<Integer> sum_i(n + 1, 0);
    Integer count = 0;

    for (const GFMatrix& h : all) {
        const auto lam = lambda_by_subsets(h);
        std::vector<Integer> inc(n + 1, 0);  // I_i for this matrix
        Rational pud = 0, pmld = 0;
        std::vector<Rational> pld(static_cast<std::size_t>(max_ell) + 1, 0);
        for (unsigned i = 1; i <= n; ++i) {
            for (unsigned l = 1; l <= i; ++l) {
                if (lam[i][l] == 0) continue;
                inc[i] += lam[i][l];
                const Rational lw = Rational(lam[i][l]) * w[i];
                pud += lw;
                pmld += lw * (Rational(1) - Rational(1, pcens::ipow(q, l)));
                for (long e = 0; e <= max_ell && e < static_cast<long>(l); ++e) pld[e] += lw;
                out.mean_lambda[i][l] += Rational(lam[i][l]);
            }
            out.mean_lambda[i][0] += Rational(lam[i][0]);
        }
        out.mean_lambda[0][0] += Rational(lam[0][0]);
        sum_p += pud;
        sum_p2 += pud * pud;
        sum_mld += pmld;
        for (long e = 0; e <= max_ell; ++e) sum_ld[e] += pld[e];
        for (unsigned i = 1; i <= n; ++i) {
            sum_i[i] += inc[i];
            for (unsigned i2 = 1; i2 <= n; ++i2) sum_ii[i][i2] += inc[i] * inc[i2];
        }
        count += 1;
    }

    const Rational rc(count);
    out.p_ud = sum_p / rc;
    out.p_mld = sum_mld / rc;
    out.var_ud = sum_p2 / rc - out.p_ud * out.p_ud;
    for (long e = 0; e <= max_ell; ++e) out.p_ld[e] = sum_ld[e] / rc;
    for (unsigned i = 0; i <= n; ++i)
        for (unsigned l = 0; l < out.mean_lambda[i].size(); ++l) out.mean_lambda[i][l] /= rc;
    for (unsigned i = 1; i <= n; ++i)
        for (unsigned i2 = 1; i2 <= n; ++i2)
            out.cov[i][i2] =
                Rational(sum_ii[i][i2]) / rc - Rational(sum_i[i]) * Rational(sum_i[i2]) / (rc * rc);
    return out;
}

double log_of(const Rational& x) { return std::log(pcens::to_double(x)); }

}  // namespace

TEST_CASE("rank distribution: pinned values and normalization", "[formulas]") {
    const EnsembleParams p222(2, 2, 2);
    CHECK(pcens::prob_rank(p222, 2) == Rational(3, 8));
    CHECK(pcens::prob_rank(p222, 1) == Rational(9, 16));
    CHECK(pcens::prob_rank(p222, 0) == Rational(1, 16));
    CHECK(pcens::prob_rank(p222, 3) == 0);
    CHECK(pcens::prob_rank(p222, -1) == 0);

    for (unsigned q : {2u, 3u}) {
        for (unsigned m = 1; m <= 4; ++m) {
            for (unsigned n = 1; n <= 5; ++n) {
                const EnsembleParams p(q, m, n);
                Rational total = 0;
                for (long j = 0; j <= static_cast<long>(std::min(m, n)); ++j)
                    total += pcens::prob_rank(p, j);
                CHECK(total == 1);
            }
        }
    }
}

TEST_CASE("rank distribution matches exhaustive enumeration", "[formulas]") {
    for (auto [q, m, n] : {std::array<unsigned, 3>{2, 2, 2}, {3, 1, 2}, {2, 3, 2}}) {
        const pcens::FieldParam field(q);
        std::vector<Integer> by_rank(std::min(m, n) + 1, 0);
        Integer total = 0;
        for (const GFMatrix& h : pcens::MatrixEnumeration(m, n, field)) {
            by_rank[pcens::rank(h)] += 1;
            total += 1;
        }
        const EnsembleParams p(q, m, n);
        for (long j = 0; j < static_cast<long>(by_rank.size()); ++j)
            CHECK(pcens::prob_rank(p, j) == Rational(by_rank[j]) / Rational(total));
    }
}

TEST_CASE("joint rank law: pinned values, marginals, enumeration", "[formulas]") {
    CHECK(pcens::prob_rank_joint(EnsembleParams(2, 2, 2), 1, 2, 1) == Rational(3, 8));
    CHECK(pcens::prob_rank_joint(EnsembleParams(2, 1, 2), 1, 1, 0) == Rational(1, 4));
    CHECK_THROWS_AS(pcens::prob_rank_joint(EnsembleParams(2, 2, 2), 3, 1, 1),
                    std::invalid_argument);

    // Summing the submatrix rank away recovers the plain rank distribution.
    for (unsigned q : {2u, 3u}) {
        const EnsembleParams p(q, 2, 3);
        for (long s = 0; s <= 3; ++s) {
            for (long j = 0; j <= 2; ++j) {
                Rational marg = 0;
                for (long r = 0; r <= j; ++r) marg += pcens::prob_rank_joint(p, s, j, r);
                CHECK(marg == pcens::prob_rank(p, j));
            }
        }
    }

    // Direct count with A = the first s columns.
    const unsigned q = 2, m = 2, n = 3;
    const pcens::FieldParam field(q);
    const EnsembleParams p(q, m, n);
    for (std::size_t s = 0; s <= n; ++s) {
        pcens::ColumnSet a(s);
        for (std::size_t c = 0; c < s; ++c) a[c] = c;
        std::vector<std::vector<Integer>> hits(m + 1, std::vector<Integer>(m + 1, 0));
        Integer total = 0;
        for (const GFMatrix& h : pcens::MatrixEnumeration(m, n, field)) {
            hits[pcens::rank(h)][pcens::submatrix_rank(h, a)] += 1;
            total += 1;
        }
        for (long j = 0; j <= m; ++j)
            for (long r = 0; r <= m; ++r)
                CHECK(pcens::prob_rank_joint(p, static_cast<long>(s), j, r) ==
                      Rational(hits[j][r]) / Rational(total));
    }
}

TEST_CASE("pairwise full-rank law", "[formulas]") {
    const EnsembleParams p(2, 3, 3);
    CHECK(pcens::prob_two_full_ranks(p, 2, 2, 1) == Rational(63, 128));

    // Disjoint supports factor into a product of single-set probabilities.
    CHECK(pcens::prob_two_full_ranks(p, 2, 1, 0) ==
          pcens::qcomb::psi(3, 2, 2) * pcens::qcomb::psi(3, 1, 2));

    // Identical supports collapse to one event.
    CHECK(pcens::prob_two_full_ranks(p, 2, 2, 2) == pcens::qcomb::psi(3, 2, 2));

    // A set bigger than m can never have full column rank.
    CHECK(pcens::prob_two_full_ranks(EnsembleParams(2, 1, 3), 2, 1, 1) == 0);

    CHECK_THROWS_AS(pcens::prob_two_full_ranks(EnsembleParams(2, 1, 3), 2, 2, 2),
                    std::domain_error);
    CHECK_THROWS_AS(pcens::prob_two_full_ranks(p, 2, 2, 3), std::invalid_argument);
    CHECK_THROWS_AS(pcens::prob_two_full_ranks(p, 4, 2, 1), std::invalid_argument);

    // Enumeration check: columns {0,1} and {1,2} of a random 3x3 matrix.
    Integer both = 0, total = 0;
    for (const GFMatrix& h : pcens::MatrixEnumeration(3, 3, pcens::FieldParam(2))) {
        if (pcens::submatrix_rank(h, {0, 1}) == 2 && pcens::submatrix_rank(h, {1, 2}) == 2)
            both += 1;
        total += 1;
    }
    CHECK(Rational(both) / Rational(total) == Rational(63, 128));
}

TEST_CASE("expected unresolved-set counts", "[formulas]") {
    const EnsembleParams p(2, 1, 2);
    CHECK(pcens::expected_lambda(p, 1, 1) == 1);
    CHECK(pcens::expected_incorrigible(p, 1) == 1);
    CHECK(pcens::expected_incorrigible(p, 2) == 1);
    CHECK(pcens::expected_incorrigible(p, 0) == 0);
    CHECK(pcens::expected_incorrigible(p, 3) == 0);

    for (unsigned q : {2u, 3u}) {
        for (unsigned m = 1; m <= 3; ++m) {
            for (unsigned n = 1; n <= 6; ++n) {
                const EnsembleParams pr(q, m, n);
                for (long i = 0; i <= static_cast<long>(n); ++i) {
                    // The dimension split is a partition of all size-i sets.
                    Rational total = 0;
                    for (long l = 0; l <= i; ++l) total += pcens::expected_lambda(pr, i, l);
                    CHECK(total == Rational(pcens::qcomb::binomial(n, i)));

                    // List exponent 0 means plain unique decoding.
                    CHECK(pcens::expected_incorrigible_list(pr, i, 0) ==
                          pcens::expected_incorrigible(pr, i));

                    // Tail sums of the split reproduce the list counts.
                    for (long ell = 0; ell <= i; ++ell) {
                        Rational tail = 0;
                        for (long l = ell + 1; l <= i; ++l)
                            tail += pcens::expected_lambda(pr, i, l);
                        CHECK(pcens::expected_incorrigible_list(pr, i, ell) == tail);
                    }
                }
            }
        }
    }
}

TEST_CASE("decoding failure probabilities: pinned values", "[formulas]") {
    const EnsembleParams p(2, 1, 2);
    const Rational half(1, 2);
    CHECK(pcens::p_ud(p, half) == half);
    CHECK(pcens::p_mld(p, half) == Rational(17, 64));
    CHECK(pcens::p_ld(p, 0, half) == pcens::p_ud(p, half));

    CHECK(pcens::p_ud(p, Rational(0)) == 0);
    CHECK(pcens::p_ud(p, Rational(1)) == 1);  // n > m: full erasure is fatal
    CHECK_THROWS_AS(pcens::p_ud(p, Rational(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(pcens::p_ud(p, Rational(-1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(pcens::p_ld(p, -1, half), std::invalid_argument);
    CHECK(pcens::p_ld(p, 5, half) == 0);  // list huge enough to cover everything
}

TEST_CASE("decoding failure probabilities: structural relations", "[formulas]") {
    const std::vector<Rational> grid = {Rational(1, 10), Rational(1, 4), Rational(1, 2),
                                        Rational(3, 4), Rational(9, 10)};
    for (unsigned q : {2u, 3u}) {
        for (unsigned m : {1u, 2u, 3u}) {
            for (unsigned n : {2u, 4u, 6u}) {
                const EnsembleParams p(q, m, n);
                Rational prev_ud = 0;
                for (const Rational& eps : grid) {
                    const Rational ud = pcens::p_ud(p, eps);
                    const Rational mld = pcens::p_mld(p, eps);
                    CHECK(ud >= prev_ud);  // more erasures never help
                    prev_ud = ud;
                    CHECK(mld <= ud);
                    CHECK(2 * mld >= ud);  // ML failure is at least half of UD failure
                    Rational prev = ud;
                    for (long ell = 0; ell <= 4; ++ell) {
                        const Rational ld = pcens::p_ld(p, ell, eps);
                        CHECK(ld <= prev);  // larger lists only remove failures
                        prev = ld;
                    }
                }
            }
        }
    }
}

TEST_CASE("second moments: pinned values and symmetry", "[formulas]") {
    const EnsembleParams p(2, 1, 2);
    CHECK(pcens::covariance_incorrigible(p, 1, 1) == Rational(1, 2));
    CHECK(pcens::variance_ud(p, Rational(1, 2)) == Rational(1, 32));
    CHECK(pcens::covariance_incorrigible(p, 0, 1) == 0);
    CHECK(pcens::covariance_incorrigible(p, 2, 1) == 0);  // I_2 is constant here

    for (unsigned q : {2u, 3u}) {
        const EnsembleParams pr(q, 2, 5);
        for (long i = 1; i <= 5; ++i)
            for (long i2 = 1; i2 <= 5; ++i2)
                CHECK(pcens::covariance_incorrigible(pr, i, i2) ==
                      pcens::covariance_incorrigible(pr, i2, i));
    }
}

TEST_CASE("variance agrees with the covariance expansion", "[formulas]") {
    for (unsigned q : {2u, 3u}) {
        for (unsigned m : {1u, 2u, 3u}) {
            for (unsigned n : {2u, 3u, 5u}) {
                const EnsembleParams p(q, m, n);
                for (const Rational& eps : {Rational(1, 4), Rational(1, 2)}) {
                    Rational byc = 0;
                    const Rational co = Rational(1) - eps;
                    for (long i = 1; i <= static_cast<long>(n); ++i) {
                        for (long i2 = 1; i2 <= static_cast<long>(n); ++i2) {
                            Rational w = 1;
                            for (long k = 0; k < i + i2; ++k) w *= eps;
                            for (long k = 0; k < 2 * static_cast<long>(n) - i - i2; ++k) w *= co;
                            byc += pcens::covariance_incorrigible(p, i, i2) * w;
                        }
                    }
                    const Rational direct = pcens::variance_ud(p, eps);
                    CHECK(direct == byc);
                    CHECK(direct >= 0);
                }
            }
        }
    }
}

TEST_CASE("every closed form matches the ensemble enumeration", "[formulas]") {
    struct Case {
        unsigned q, m, n;
    };
    for (const Case c : {Case{2, 1, 2}, Case{2, 2, 2}, Case{2, 2, 3}, Case{3, 1, 2}}) {
        const EnsembleParams p(c.q, c.m, c.n);
        for (const Rational& eps : {Rational(1, 4), Rational(1, 2)}) {
            const auto avg = enumerate_ensemble(c.q, c.m, c.n, eps, 2);
            CHECK(pcens::p_ud(p, eps) == avg.p_ud);
            CHECK(pcens::p_mld(p, eps) == avg.p_mld);
            CHECK(pcens::variance_ud(p, eps) == avg.var_ud);
            for (long ell = 0; ell <= 2; ++ell) CHECK(pcens::p_ld(p, ell, eps) == avg.p_ld[ell]);
            for (long i = 0; i <= static_cast<long>(c.n); ++i)
                for (long l = 0; l <= i; ++l)
                    CHECK(pcens::expected_lambda(p, i, l) == avg.mean_lambda[i][l]);
            for (long i = 1; i <= static_cast<long>(c.n); ++i)
                for (long i2 = 1; i2 <= static_cast<long>(c.n); ++i2)
                    CHECK(pcens::covariance_incorrigible(p, i, i2) == avg.cov[i][i2]);
        }
    }
}

TEST_CASE("log-space evaluation tracks the exact values", "[formulas]") {
    const std::vector<std::pair<Rational, double>> eps_pairs = {
        {Rational(1, 4), 0.25}, {Rational(1, 2), 0.5}, {Rational(3, 4), 0.75}};
    for (unsigned q : {2u, 3u}) {
        for (unsigned m : {1u, 2u, 4u, 8u}) {
            for (unsigned n : {2u, 8u, 16u}) {
                if (n < m) continue;
                const EnsembleParams p(q, m, n);
                for (const auto& [er, ed] : eps_pairs) {
                    CHECK(std::abs(pcens::log_p_ud(p, ed) - log_of(pcens::p_ud(p, er))) < 1e-9);
                    CHECK(std::abs(pcens::log_p_mld(p, ed) - log_of(pcens::p_mld(p, er))) < 1e-9);
                    CHECK(std::abs(pcens::log_variance_ud(p, ed) -
                                   log_of(pcens::variance_ud(p, er))) < 1e-9);
                    for (long ell : {0L, 1L, 2L}) {
                        const Rational exact = pcens::p_ld(p, ell, er);
                        const double lg = pcens::log_p_ld(p, ell, ed);
                        if (exact == 0) {
                            CHECK(std::isinf(lg));
                            CHECK(lg < 0);
                        } else {
                            CHECK(std::abs(lg - log_of(exact)) < 1e-9);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("log-space handles block lengths far beyond exact reach", "[formulas]") {
    const EnsembleParams p(2, 200, 400);
    const double v400 = pcens::log_p_ud(p, 0.25);
    CHECK(std::isfinite(v400));
    CHECK(v400 < 0.0);

    // Doubling the block length at fixed rate must tighten the bound.
    const double v200 = pcens::log_p_ud(EnsembleParams(2, 100, 200), 0.25);
    CHECK(v400 < v200);

    // Very long blocks still evaluate without overflow or NaN.
    const double v10k = pcens::log_p_ud(EnsembleParams(2, 5000, 10000), 0.25);
    CHECK(std::isfinite(v10k));
    CHECK(v10k < v400);
}

TEST_CASE("parameter validation", "[formulas]") {
    CHECK_THROWS_AS(EnsembleParams(1, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(EnsembleParams(2, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(EnsembleParams(2, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(pcens::log_p_ud(EnsembleParams(2, 2, 2), -0.1), std::invalid_argument);
    CHECK_THROWS_AS(pcens::log_p_ud(EnsembleParams(2, 2, 2), 1.5), std::invalid_argument);
}
