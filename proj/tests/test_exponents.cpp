#include <catch2/catch_amalgamated.hpp>

#include <pcens/exponents.hpp>
#include <pcens/formulas.hpp>

#include <cmath>
#include <vector>

using pcens::Branch;
using pcens::RatePoint;

namespace {

std::vector<double> rate_grid(int points) {
    std::vector<double> out;
    for (int k = 1; k < points; ++k) out.push_back(static_cast<double>(k) / points);
    return out;
}

}  // namespace

TEST_CASE("list-decoding exponent: pinned branch values", "[exponents]") {
    // Low-rate branch: 1*(0.75) - log2(1.25).
    const auto low = pcens::t_ld(RatePoint(2, 0.25, 0.25, 0));
    CHECK(low.branch == Branch::low_rate_region);
    CHECK(low.value == Catch::Approx(0.75 - std::log2(1.25)).epsilon(0).margin(1e-12));
    CHECK(low.value == Catch::Approx(0.4280719051).margin(1e-9));
    CHECK(low.boundary_low == Catch::Approx(0.6).margin(1e-12));
    CHECK(low.boundary_high == Catch::Approx(0.75).margin(1e-12));

    // Middle branch: 0.35 log2(1.4) + 0.65 log2(13/15).
    const auto mid = pcens::t_ud(2, 0.65, 0.25);
    CHECK(mid.branch == Branch::middle_region);
    CHECK(mid.value == Catch::Approx(0.0357063211).margin(1e-9));

    // Zero region, including the boundary rate itself.
    CHECK(pcens::t_ud(2, 0.8, 0.25).value == 0.0);
    CHECK(pcens::t_ud(2, 0.8, 0.25).branch == Branch::zero_region);
    CHECK(pcens::t_ud(2, 0.75, 0.25).value == 0.0);
    CHECK(pcens::t_ud(2, 0.75, 0.25).branch == Branch::zero_region);
    CHECK(pcens::t_ud(2, 0.7499, 0.25).value > 0.0);

    // The exact breakpoint belongs to the low-rate branch.
    CHECK(pcens::t_ud(2, 0.6, 0.25).branch == Branch::low_rate_region);
    CHECK(pcens::t_ud(2, 0.6 + 1e-12, 0.25).branch == Branch::middle_region);
}

TEST_CASE("list-decoding exponent: continuity and monotonicity", "[exponents]") {
    for (unsigned q : {2u, 3u, 4u}) {
        for (double eps : {0.1, 0.25, 0.5}) {
            for (long ell : {0L, 1L, 2L, 3L}) {
                const auto probe = pcens::t_ld(RatePoint(q, 0.5, eps, ell));
                const double b1 = probe.boundary_low;
                const double b2 = probe.boundary_high;
                CHECK(0.0 < b1);
                CHECK(b1 < b2);
                CHECK(b2 == Catch::Approx(1.0 - eps).margin(1e-15));

                // Continuity across both breakpoints.
                for (double b : {b1, b2}) {
                    if (b <= 1e-6 || b >= 1.0 - 1e-6) continue;
                    const double lo = pcens::t_ld(RatePoint(q, b - 1e-9, eps, ell)).value;
                    const double hi = pcens::t_ld(RatePoint(q, b + 1e-9, eps, ell)).value;
                    CHECK(std::abs(hi - lo) < 1e-6);
                }

                // Nonincreasing in rate.
                double prev = std::numeric_limits<double>::infinity();
                for (double r : rate_grid(100)) {
                    const double v = pcens::t_ld(RatePoint(q, r, eps, ell)).value;
                    CHECK(v <= prev + 1e-12);
                    CHECK(v >= 0.0);
                    prev = v;
                }

                // Nondecreasing in list exponent.
                for (double r : {0.05, 0.2, 0.4, 0.6}) {
                    const double small = pcens::t_ld(RatePoint(q, r, eps, ell)).value;
                    const double large = pcens::t_ld(RatePoint(q, r, eps, ell + 1)).value;
                    CHECK(large >= small - 1e-12);
                }
            }
        }
    }

    // t_mld and t_ud are the same map.
    for (double r : rate_grid(50))
        CHECK(pcens::t_mld(3, r, 0.3).value == pcens::t_ud(3, r, 0.3).value);
}

TEST_CASE("fixed-list comparison exponent", "[exponents]") {
    // L = 1 coincides with the ell = 0 exponent everywhere.
    for (double r : rate_grid(100))
        CHECK(pcens::t_ld_star(2, 1, r, 0.25) ==
              Catch::Approx(pcens::t_ud(2, r, 0.25).value).margin(1e-12));

    // L = q^ell: equal on the high-rate side, strictly larger below when
    // the list size exceeds 2.
    CHECK(pcens::t_ld_star(2, 4, 0.7, 0.25) ==
          Catch::Approx(pcens::t_ld(RatePoint(2, 0.7, 0.25, 2)).value).margin(1e-12));
    const double star = pcens::t_ld_star(2, 4, 0.1, 0.25);
    const double plain = pcens::t_ld(RatePoint(2, 0.1, 0.25, 2)).value;
    CHECK(star == Catch::Approx(3.6 - std::log2(4.75)).margin(1e-12));
    CHECK(plain == Catch::Approx(2.7 - std::log2(2.75)).margin(1e-12));
    CHECK(star > plain);
    CHECK(plain > 0.0);

    // Dominance with equality on the high-rate region, for several ell.
    for (long ell : {1L, 2L, 3L}) {
        const long list = 1L << ell;  // q = 2
        for (double r : rate_grid(100)) {
            const auto res = pcens::t_ld(RatePoint(2, r, 0.25, ell));
            const double s = pcens::t_ld_star(2, list, r, 0.25);
            CHECK(s >= res.value - 1e-12);
            if (r >= res.boundary_low) CHECK(s == Catch::Approx(res.value).margin(1e-12));
        }
    }
}

TEST_CASE("variance exponent: kappa0 root", "[exponents]") {
    CHECK(pcens::kappa0(2, 0.5) == Catch::Approx(1.0 - std::sqrt(0.5)).margin(1e-15));
    CHECK(pcens::kappa0(2, 0.5) == Catch::Approx(0.2928932188).margin(1e-9));

    for (unsigned q : {2u, 3u, 4u, 5u}) {
        for (double r : rate_grid(100)) {
            const double k0 = pcens::kappa0(q, r);
            CHECK(k0 > (1.0 - r) * (1.0 - r));
            CHECK(k0 < 1.0 - r);
            // Stationarity: q (1-R-k)^2 = k (2R-1+k).
            const double lhs = q * (1.0 - r - k0) * (1.0 - r - k0);
            const double rhs = k0 * (2.0 * r - 1.0 + k0);
            CHECK(lhs == Catch::Approx(rhs).margin(1e-12));
        }
    }
}

TEST_CASE("variance exponent: branches, continuity, positivity", "[exponents]") {
    const auto low = pcens::s_ud(2, 0.3, 0.25);
    CHECK(low.branch == Branch::low_rate_region);
    CHECK(low.value == Catch::Approx(0.7 - std::log2(1.0625)).margin(1e-12));
    CHECK(low.value == Catch::Approx(0.6125372).margin(1e-7));
    CHECK(low.boundary_low == Catch::Approx(0.75 / 1.0625).margin(1e-12));

    for (unsigned q : {2u, 3u, 4u, 5u}) {
        for (double eps : {0.1, 0.25, 0.5, 0.75}) {
            const double rb = (1.0 - eps) / (1.0 + (q - 1.0) * eps * eps);
            const double lo = pcens::s_ud(q, rb - 1e-11, eps).value;
            const double hi = pcens::s_ud(q, rb + 1e-11, eps).value;
            CHECK(std::abs(hi - lo) < 1e-9);
        }
        for (double eps : {0.05, 0.3, 0.6, 0.9})
            for (double r : rate_grid(50)) CHECK(pcens::s_ud(q, r, eps).value > 0.0);
    }
}

TEST_CASE("numeric maximizer agrees with the failure exponent", "[exponents]") {
    for (unsigned q : {2u, 3u, 4u}) {
        for (double eps : {0.1, 0.25, 0.5}) {
            for (long ell : {0L, 1L, 2L, 3L}) {
                for (double r : {0.05, 0.2, 0.4, 0.6, 0.8, 0.9}) {
                    const double closed = pcens::t_ld(RatePoint(q, r, eps, ell)).value;
                    const auto sup = pcens::sup_f_numeric(q, r, eps, ell);
                    CHECK(std::abs(-sup.value - closed) < 1e-8);
                }
            }
        }
    }

    // Argmax lands at eps in the zero region, and at the interior
    // stationary point q^(ell+1) eps / (1 + (q^(ell+1) - 1) eps) at low rate.
    const auto z = pcens::sup_f_numeric(2, 0.8, 0.25, 0);
    CHECK(z.t == Catch::Approx(0.25).margin(1e-4));
    const auto l = pcens::sup_f_numeric(2, 0.25, 0.25, 0);
    CHECK(l.t == Catch::Approx(2.0 * 0.25 / (1.0 + 0.25)).margin(1e-4));
    const auto l2 = pcens::sup_f_numeric(2, 0.1, 0.25, 2);
    CHECK(l2.t == Catch::Approx(8.0 * 0.25 / (1.0 + 7.0 * 0.25)).margin(1e-4));
}

TEST_CASE("numeric maximizer agrees with the variance exponent", "[exponents]") {
    for (unsigned q : {2u, 3u}) {
        for (double eps : {0.25, 0.5}) {
            for (double r : {0.2, 0.5, 0.8}) {
                const double closed = pcens::s_ud(q, r, eps).value;
                const auto sup = pcens::sup_g_numeric(q, r, eps);
                CHECK(std::abs(-sup.value - closed) < 1e-7);
            }
        }
    }

    // Low-branch argmax: kappa = q eps^2 / (1 + (q-1) eps^2), t = t2.
    const auto low = pcens::sup_g_numeric(2, 0.3, 0.25);
    CHECK(low.kappa == Catch::Approx(2.0 * 0.0625 / 1.0625).margin(1e-4));
    CHECK(low.t == Catch::Approx(low.t2).margin(1e-4));

    // High-branch argmax: t = t2 = 1-R, kappa = kappa0.
    const auto high = pcens::sup_g_numeric(2, 0.8, 0.25);
    CHECK(high.t == Catch::Approx(0.2).margin(1e-4));
    CHECK(high.t2 == Catch::Approx(0.2).margin(1e-4));
    CHECK(high.kappa == Catch::Approx(pcens::kappa0(2, 0.8)).margin(1e-4));
}

TEST_CASE("concentration margin", "[exponents]") {
    // Definition.
    for (double r : {0.3, 0.5, 0.7})
        CHECK(pcens::concentration_margin(2, r, 0.25) ==
              Catch::Approx(pcens::s_ud(2, r, 0.25).value - 2.0 * pcens::t_ud(2, r, 0.25).value)
                  .margin(1e-15));

    // In the region above the variance breakpoint the erasure terms cancel:
    // margin = (1-R) log_q(k0/(1-R)^2) + R log_q((2R-1+k0)/R^2), eps-free.
    for (unsigned q : {2u, 3u, 4u, 5u}) {
        for (double eps : {0.1, 0.25, 0.4}) {
            const double rb = (1.0 - eps) / (1.0 + (q - 1.0) * eps * eps);
            for (double f : {0.0, 0.3, 0.7, 0.999}) {
                const double r = rb + f * (1.0 - eps - rb);
                if (r <= 1e-6 || r >= 1.0 - 1e-6) continue;
                const double k0 = pcens::kappa0(q, r);
                const double lq = std::log(static_cast<double>(q));
                const double algebraic =
                    (1.0 - r) * std::log(k0 / ((1.0 - r) * (1.0 - r))) / lq +
                    r * std::log((2.0 * r - 1.0 + k0) / (r * r)) / lq;
                const double margin = pcens::concentration_margin(q, r, eps);
                CHECK(margin == Catch::Approx(algebraic).margin(1e-10));
                CHECK(margin > 0.0);
            }
        }
    }

    // At R = (1-eps)/(1+(q-1)eps), both exponents sit on their low branches
    // and the margin collapses to a closed expression in eps alone.
    for (unsigned q : {2u, 3u, 4u}) {
        for (double eps : {0.1, 0.25, 0.5, 0.75}) {
            const double r = (1.0 - eps) / (1.0 + (q - 1.0) * eps);
            const double lq = std::log(static_cast<double>(q));
            const double expect = r - 1.0 - std::log(1.0 + (q - 1.0) * eps * eps) / lq +
                                  2.0 * std::log(1.0 + (q - 1.0) * eps) / lq;
            CHECK(pcens::concentration_margin(q, r, eps) ==
                  Catch::Approx(expect).margin(1e-12));
            CHECK(pcens::concentration_margin(q, r, eps) > 0.0);
        }
    }
}

TEST_CASE("finite-length exponent trend", "[exponents]") {
    // Exact geometric input recovers the constant.
    const double lq2 = std::log(2.0);
    std::vector<pcens::ExponentSample> pts;
    for (unsigned long n : {10ul, 20ul, 40ul, 80ul}) pts.push_back({n, -0.37 * n});
    const auto fit = pcens::empirical_exponent(pts);
    REQUIRE(fit.per_point.size() == 4);
    for (double v : fit.per_point) CHECK(v == Catch::Approx(0.37).margin(1e-12));
    CHECK(fit.final_estimate == Catch::Approx(0.37).margin(1e-12));

    // Closed-form finite-n failure probabilities drift toward the exponent.
    std::vector<pcens::ExponentSample> series;
    for (unsigned n : {50u, 100u, 200u, 400u}) {
        const double lnp = pcens::log_p_ud(pcens::EnsembleParams(2, n / 2, n), 0.25);
        series.push_back({n, lnp / lq2});
    }
    const auto trend = pcens::empirical_exponent(series);
    const double target = pcens::t_ud(2, 0.5, 0.25).value;
    for (std::size_t k = 1; k < trend.per_point.size(); ++k) {
        const double before = std::abs(trend.per_point[k - 1] - target);
        const double after = std::abs(trend.per_point[k] - target);
        CHECK(after < before);
    }
    CHECK(std::abs(trend.final_estimate - target) < 0.05);

    // Input validation.
    CHECK_THROWS_AS(pcens::empirical_exponent({{10, -1.0}, {20, -2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(pcens::empirical_exponent({{10, -1.0}, {10, -2.0}, {30, -3.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(pcens::empirical_exponent({{10, -1.0}, {20, 0.5}, {30, -3.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        pcens::empirical_exponent(
            {{10, -1.0}, {20, -std::numeric_limits<double>::infinity()}, {30, -3.0}}),
        std::invalid_argument);
}

TEST_CASE("exponent input validation", "[exponents]") {
    CHECK_THROWS_AS(RatePoint(2, 0.0, 0.25, 0), std::invalid_argument);
    CHECK_THROWS_AS(RatePoint(2, 1.0 - 1e-9, 0.25, 0), std::invalid_argument);
    CHECK_THROWS_AS(RatePoint(2, 0.5, 1e-9, 0), std::invalid_argument);
    CHECK_THROWS_AS(RatePoint(2, 0.5, 0.25, -1), std::invalid_argument);
    CHECK_THROWS_AS(RatePoint(1, 0.5, 0.25, 0), std::invalid_argument);
    CHECK_THROWS_AS(pcens::t_ld_star(2, 0, 0.5, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(pcens::kappa0(2, -0.5), std::invalid_argument);
}
