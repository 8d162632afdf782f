#include <bit>
#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "doctest.h"

#include "rbsp/photon_sources.hpp"

using namespace rbsp;

namespace {

HeraldingDetector det(int stages, double eta, double dark = 0.0) {
    return HeraldingDetector{stages, eta, dark};
}

// Brute-force oracle for the detector response: enumerate every photon fate
// (lost, or detected in one of X modes) and accumulate the probability of
// each distinct-mode count. Exact for small m, X.
double tmd_enumerated(int clicks, int photons, const HeraldingDetector& d) {
    const int X = d.modes();
    const double eta = d.efficiency;
    double total = 0.0;
    std::vector<int> fate(photons, 0);  // 0 = lost, 1..X = detected in mode
    while (true) {
        double prob = 1.0;
        unsigned mask = 0;
        for (int i = 0; i < photons; ++i) {
            if (fate[i] == 0) {
                prob *= 1.0 - eta;
            } else {
                prob *= eta / X;
                mask |= 1u << (fate[i] - 1);
            }
        }
        if (std::popcount(mask) == clicks) total += prob;
        int pos = 0;
        while (pos < photons && fate[pos] == X) fate[pos++] = 0;
        if (pos == photons) break;
        ++fate[pos];
    }
    return total;
}

}  // namespace

TEST_CASE("poisson pmf matches closed forms") {
    CHECK(poisson_pmf(0.0, 0) == 1.0);
    CHECK(poisson_pmf(0.0, 3) == 0.0);
    // recomputed oracle value for 0.625 e^{-0.625}
    CHECK(poisson_pmf(0.625, 1) == doctest::Approx(0.33453839282436887).epsilon(1e-12));
    CHECK(poisson_pmf(1.0, 0) == doctest::Approx(poisson_pmf(1.0, 1)).epsilon(1e-15));
    CHECK_THROWS_AS(poisson_pmf(-0.1, 0), std::domain_error);
    CHECK_THROWS_AS(poisson_pmf(0.5, -1), std::domain_error);
}

TEST_CASE("thermal pmf matches closed forms") {
    CHECK(thermal_pmf(0.0, 0) == 1.0);
    CHECK(thermal_pmf(1.0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(thermal_pmf(0.605, 2) ==
          doctest::Approx(0.605 * 0.605 / std::pow(1.605, 3)).epsilon(1e-14));
    CHECK(thermal_pmf(0.605, 2) == doctest::Approx(0.08852901641154788).epsilon(1e-12));
    CHECK_THROWS_AS(thermal_pmf(-1.0, 0), std::domain_error);
}

TEST_CASE("pmf normalization under the series truncation rule") {
    for (double mu : {0.0, 0.1, 0.605, 0.625, 1.0, 2.0, 5.0}) {
        double poisson_sum = 0.0, thermal_sum = 0.0;
        for (int n = 0; n <= detail::kSeriesCap; ++n) {
            const double pp = poisson_pmf(mu, n);
            const double tp = thermal_pmf(mu, n);
            poisson_sum += pp;
            thermal_sum += tp;
            if (n > 2 && pp < detail::kSeriesRelTol * poisson_sum &&
                tp < detail::kSeriesRelTol * thermal_sum)
                break;
        }
        CHECK(poisson_sum == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(thermal_sum == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("tmd response closed-form anchors") {
    CHECK(tmd_response(0, 0, det(2, 0.85)) == 1.0);
    CHECK(tmd_response(1, 1, det(2, 0.85)) == doctest::Approx(0.85).epsilon(1e-14));
    CHECK(tmd_response(1, 1, det(4, 0.30)) == doctest::Approx(0.30).epsilon(1e-14));
    // two photons collapse to one click iff they share the surviving mode
    CHECK(tmd_response(1, 2, det(1, 1.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tmd_response(2, 2, det(2, 0.85)) ==
          doctest::Approx(0.85 * 0.85 * 0.75).epsilon(1e-13));
    CHECK_THROWS_AS(tmd_response(5, 3, det(2, 0.85)), std::domain_error);
    CHECK_THROWS_AS(tmd_response(-1, 3, det(2, 0.85)), std::domain_error);
}

TEST_CASE("tmd response agrees with enumeration and inclusion-exclusion") {
    for (int stages : {0, 1, 2, 3}) {
        for (double eta : {0.0, 0.04, 0.5, 0.85, 1.0}) {
            const auto d = det(stages, eta);
            for (int m = 0; m <= 5; ++m) {
                for (int l = 0; l <= d.modes(); ++l) {
                    const double dp = tmd_response(l, m, d);
                    const double brute = tmd_enumerated(l, m, d);
                    CHECK(dp == doctest::Approx(brute).epsilon(1e-12).scale(1.0));
                    const double series = detail::tmd_response_series(l, m, d);
                    CHECK(dp == doctest::Approx(series).epsilon(1e-10).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("tmd response properties") {
    SUBCASE("rows sum to one for m <= 50") {
        for (int stages : {0, 2, 5, 10}) {
            for (double eta : {0.04, 0.5, 0.85, 1.0}) {
                const auto d = det(stages, eta);
                for (int m : {0, 1, 3, 10, 50}) {
                    double sum = 0.0;
                    for (int l = 0; l <= d.modes(); ++l) sum += tmd_response(l, m, d);
                    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
                }
            }
        }
    }
    SUBCASE("dead detector always reports zero clicks") {
        const auto d = det(3, 0.0);
        for (int m : {0, 1, 7, 30}) CHECK(tmd_response(0, m, d) == 1.0);
    }
    SUBCASE("no dark counts: never more clicks than photons") {
        const auto d = det(3, 0.9);
        for (int m = 0; m < 4; ++m)
            for (int l = m + 1; l <= d.modes(); ++l)
                CHECK(tmd_response(l, m, d) == 0.0);
    }
    SUBCASE("large mode count stays exact") {
        const auto d = det(10, 0.85);  // X = 1024
        for (int m : {1, 2, 5, 10, 50}) {
            double sum = 0.0;
            for (int l = 0; l <= m; ++l) sum += tmd_response(l, m, d);
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
        // the alternating form agrees where it has precision left (small m);
        // by m = 10 it has cancelled to garbage, which is why the recursion
        // is the evaluation route
        for (int m : {1, 2}) {
            for (int l = 0; l <= m; ++l)
                CHECK(tmd_response(l, m, d) ==
                      doctest::Approx(detail::tmd_response_series(l, m, d))
                          .epsilon(1e-9)
                          .scale(1e-12));
        }
        CHECK(std::abs(detail::tmd_response_series(10, 10, d) - tmd_response(10, 10, d)) >
              1e-3);
    }
}

TEST_CASE("heralded single mean") {
    const auto hsps = SourceModel::hsps(0.605, det(2, 0.85, 1e-8));
    SUBCASE("frozen reference value") {
        CHECK(heralded_single_mean(hsps) ==
              doctest::Approx(0.24508200168103678).epsilon(1e-12));
    }
    SUBCASE("independent partial summation to a 1e-12 tail") {
        long double direct = 0.0L;
        for (int i = 0; i <= 400; ++i) {
            direct += static_cast<long double>(thermal_pmf(0.605, i)) *
                      tmd_response(1, i, *hsps.detector);
            if (i > 50 && thermal_pmf(0.605, i) < 1e-14) break;
        }
        CHECK(heralded_single_mean(hsps) ==
              doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
    }
    SUBCASE("vanishes at zero intensity") {
        auto weak = hsps.at_intensity(1e-300);
        CHECK(heralded_single_mean(weak) < 1e-290);
    }
    SUBCASE("many modes at unit efficiency: only single pairs herald") {
        // P(1|i) falls like X^(1-i) at eta = 1, so the herald probability
        // approaches the single-pair weight
        const auto wide = SourceModel::hsps(0.605, det(10, 1.0));
        CHECK(heralded_single_mean(wide) ==
              doctest::Approx(thermal_pmf(0.605, 1)).epsilon(2e-3));
    }
    SUBCASE("monotone in the detector efficiency") {
        double prev = 0.0;
        for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
            const double cur =
                heralded_single_mean(SourceModel::hsps(0.605, det(2, eta)));
            CHECK(cur > prev);
            prev = cur;
        }
    }
    SUBCASE("rejects WCP sources") {
        CHECK_THROWS_AS(heralded_single_mean(SourceModel::wcp(0.5)),
                        std::invalid_argument);
    }
}

TEST_CASE("heralded photon-number distribution") {
    SUBCASE("normalized") {
        const auto src = SourceModel::hsps(0.605, det(2, 0.85, 1e-8));
        double sum = 0.0;
        for (int n = 0; n <= 60; ++n) sum += heralded_pnd(src, n);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no dark counts: vacuum never heralds") {
        const auto src = SourceModel::hsps(0.605, det(10, 1.0, 0.0));
        CHECK(heralded_pnd(src, 0) == 0.0);
    }
    SUBCASE("vanishing intensity: only dark heralds remain") {
        const auto src = SourceModel::hsps(1e-9, det(2, 0.85, 1e-6));
        CHECK(heralded_pnd(src, 0) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("frozen reference point") {
        const auto src = SourceModel::hsps(0.605, det(2, 0.85, 1e-8));
        CHECK(heralded_pnd(src, 1) == doctest::Approx(0.8145406521689494).epsilon(1e-10));
        CHECK(heralded_pnd(src, 2) == doctest::Approx(0.1573573277028878).epsilon(1e-10));
    }
}

TEST_CASE("heralded pnd matches a Monte-Carlo detector simulation") {
    // Physical simulation: thermal pair number, per-photon loss, uniform mode
    // assignment, independent dark clicks; condition on exactly one click.
    const double mu = 0.605, eta = 0.85, dark = 1e-3;
    const auto src = SourceModel::hsps(mu, det(2, eta, dark));
    const int X = 4;
    std::mt19937_64 rng(20240811);
    std::geometric_distribution<int> pairs(1.0 / (1.0 + mu));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> mode(0, X - 1);

    const int samples = 1'000'000;
    std::vector<long long> heralded_counts(64, 0);
    long long heralded = 0;
    for (int s = 0; s < samples; ++s) {
        const int n = pairs(rng);
        unsigned clicks = 0;
        for (int i = 0; i < n; ++i)
            if (unit(rng) < eta) clicks |= 1u << mode(rng);
        for (int d = 0; d < X; ++d)
            if (unit(rng) < dark) clicks |= 1u << d;
        if (std::popcount(clicks) == 1) {
            ++heralded;
            if (n < 64) ++heralded_counts[n];
        }
    }
    REQUIRE(heralded > 100'000);
    for (int n = 0; n <= 6; ++n) {
        const double empirical = static_cast<double>(heralded_counts[n]) / heralded;
        const double sigma =
            std::sqrt(std::max(empirical * (1.0 - empirical), 1e-9) / heralded);
        // 5 sigma statistical window plus the neglected multi-dark cross terms
        const double tolerance = 5.0 * sigma + 4.0 * dark * dark + 2.0 * dark * empirical;
        CHECK(std::abs(heralded_pnd(src, n) - empirical) < tolerance);
    }
}
