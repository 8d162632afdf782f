#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "rbsp/channel_model.hpp"
#include "rbsp/decoy_bounds.hpp"
#include "synthetic_channels.hpp"

using namespace rbsp;

namespace {

const ChannelParams kReference{0.2, 25.0, 0.45, 0.1, 6e-6};
const DecoyProtocol kWcpProto{0.625, 0.125, 0.0, 0.9, 1e-3};
const DecoyProtocol kHspsProto{0.605, 0.125, 0.0, 0.9, 1e-3};

SourceModel reference_hsps(double eta = 0.85, double dark = 1e-8) {
    return SourceModel::hsps(0.605, HeraldingDetector{2, eta, dark});
}

}  // namespace

TEST_CASE("protocol validation") {
    CHECK(validate_protocol(kWcpProto).empty());
    CHECK(validate_protocol(DecoyProtocol{0.1, 0.125, 0.0, 0.9, 1e-3}).size() == 1);
    CHECK(validate_protocol(DecoyProtocol{0.625, 0.05, 0.05, 0.9, 1e-3}).size() == 1);
    CHECK(validate_protocol(DecoyProtocol{0.625, 0.125, 0.0, 0.0, 1e-3}).size() == 1);
    CHECK(validate_protocol(DecoyProtocol{0.625, 0.125, 0.0, 0.9, 1.5}).size() == 1);
    CHECK(validate_protocol(DecoyProtocol{0.1, 0.05, 0.07, 0.9, 1e-3}).size() == 2);
}

TEST_CASE("wcp vacuum-yield bound") {
    SUBCASE("vacuum decoy reads the bound directly") {
        CHECK(wcp_y0_lower(3e-3, 7e-6, 0.125, 0.0) == doctest::Approx(7e-6).epsilon(1e-14));
    }
    SUBCASE("round trip through exact gains recovers Y0") {
        const auto g = gain_decoys(kWcpProto, SourceModel::wcp(0.625), kReference,
                                   GainModel::Exact);
        CHECK(wcp_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0) ==
              doctest::Approx(6e-6).epsilon(1e-12));
    }
    SUBCASE("negative numerator clamps to zero") {
        CHECK(wcp_y0_lower(1e-2, 1e-9, 0.125, 0.1) == 0.0);
    }
    SUBCASE("degenerate intensities throw") {
        CHECK_THROWS_AS(wcp_y0_lower(1e-3, 1e-4, 0.1, 0.1), std::domain_error);
    }
}

TEST_CASE("wcp single-photon fraction bound") {
    SUBCASE("frozen reference value at L = 25, mu = 0.625") {
        const auto g = gain_decoys(kWcpProto, SourceModel::wcp(0.625), kReference,
                                   GainModel::Exact);
        const double y0l = wcp_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0);
        const double p1 = wcp_p1_lower(g.signal, g.decoy1, g.decoy2, kWcpProto, y0l);
        CHECK(p1 == doctest::Approx(0.5107399500339772).epsilon(1e-10));
    }
    SUBCASE("lossless channel: bound sits just below the true conditional fraction") {
        ChannelParams lossless{0.0, 0.0, 1.0, 1.0, 0.0};
        const auto g = gain_decoys(kWcpProto, SourceModel::wcp(0.625), lossless,
                                   GainModel::Exact);
        const double y0l = wcp_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0);
        const double p1 = wcp_p1_lower(g.signal, g.decoy1, g.decoy2, kWcpProto, y0l);
        const double truth =
            0.625 * std::exp(-0.625) / (1.0 - std::exp(-0.625));
        CHECK(p1 <= truth);
        CHECK(p1 > 0.95 * truth);
        CHECK(p1 == doctest::Approx(0.7084586309261639).epsilon(1e-10));
    }
    SUBCASE("monotone in the input gains") {
        const auto g = gain_decoys(kWcpProto, SourceModel::wcp(0.625), kReference,
                                   GainModel::Exact);
        const double y0l = wcp_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0);
        const double base = wcp_p1_lower(g.signal, g.decoy1, g.decoy2, kWcpProto, y0l);
        // Q_v1 enters with a positive coefficient, Q_mu with a negative one.
        CHECK(wcp_p1_lower(g.signal, g.decoy1 * 1.01, g.decoy2, kWcpProto, y0l) > base);
        CHECK(wcp_p1_lower(g.signal * 1.01, g.decoy1, g.decoy2, kWcpProto, y0l) < base);
    }
    SUBCASE("zero signal gain throws") {
        CHECK_THROWS_AS(wcp_p1_lower(0.0, 1e-3, 1e-6, kWcpProto, 1e-6), std::domain_error);
    }
}

TEST_CASE("hsps dark-coincidence bound") {
    SUBCASE("vacuum decoy reads the bound directly") {
        CHECK(hsps_y0_lower(2e-3, 2.4e-13, 0.125, 0.0) ==
              doctest::Approx(2.4e-13).epsilon(1e-14));
    }
    SUBCASE("round trip through exact gains is tight at v2 = 0") {
        const auto g =
            gain_decoys(kHspsProto, reference_hsps(), kReference, GainModel::Exact);
        CHECK(hsps_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0) ==
              doctest::Approx(6e-6 * 4 * 1e-8).epsilon(1e-12));
    }
    SUBCASE("negative numerator clamps to zero") {
        CHECK(hsps_y0_lower(1.0, 1e-12, 0.125, 0.05) == 0.0);
    }
    SUBCASE("degenerate denominator throws") {
        CHECK_THROWS_AS(hsps_y0_lower(1e-3, 1e-4, 0.1, 0.1), std::domain_error);
    }
}

TEST_CASE("hsps single-photon yield bound") {
    SUBCASE("exact on a channel transmitting only single photons") {
        // Gains assembled with Y1 = 0.37 the only nonzero yield.
        const double y1_eta = 0.37 * 0.85;
        auto q = [&](double v) { return y1_eta * thermal_pmf(v, 1); };
        const double got =
            hsps_y1_lower(q(0.605), q(0.125), q(0.0), kHspsProto, 0.0);
        CHECK(got == doctest::Approx(y1_eta).epsilon(1e-12));
    }
    SUBCASE("all gains zero gives zero") {
        CHECK(hsps_y1_lower(0.0, 0.0, 0.0, kHspsProto, 0.0) == 0.0);
    }
    SUBCASE("rescaled-intensity condition is enforced") {
        // mu > v1 + v2 holds, but mu/(1+mu) < v1/(1+v1) + v2/(1+v2) does not
        const DecoyProtocol cramped{0.18, 0.125, 0.05, 0.9, 1e-3};
        CHECK(validate_protocol(cramped).empty());
        CHECK_THROWS_AS(hsps_y1_lower(1e-3, 5e-4, 1e-4, cramped, 0.0),
                        std::domain_error);
    }
    SUBCASE("frozen reference value at L = 25") {
        const auto g =
            gain_decoys(kHspsProto, reference_hsps(), kReference, GainModel::Exact);
        const double y0x = hsps_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0);
        CHECK(hsps_y1_lower(g.signal, g.decoy1, g.decoy2, kHspsProto, y0x) ==
              doctest::Approx(0.011690428487810824).epsilon(1e-10));
    }
}

TEST_CASE("hsps single-photon fraction bound") {
    SUBCASE("reference points reproduce p1 = 0.65 and 0.81") {
        const auto g =
            gain_decoys(kHspsProto, reference_hsps(), kReference, GainModel::Exact);
        const double y0x = hsps_y0_lower(g.decoy1, g.decoy2, 0.125, 0.0);
        const double y1e = hsps_y1_lower(g.signal, g.decoy1, g.decoy2, kHspsProto, y0x);
        const double p1 = hsps_p1_lower(g.signal, y1e, 0.605);
        CHECK(p1 == doctest::Approx(0.6481748340530771).epsilon(1e-10));
        CHECK(p1 == doctest::Approx(0.65).epsilon(0.05));

        const auto gu = gain_decoys(kHspsProto, reference_hsps(1.0), kReference,
                                    GainModel::Exact);
        const double y0xu = hsps_y0_lower(gu.decoy1, gu.decoy2, 0.125, 0.0);
        const double y1eu = hsps_y1_lower(gu.signal, gu.decoy1, gu.decoy2, kHspsProto, y0xu);
        CHECK(hsps_p1_lower(gu.signal, y1eu, 0.605) == doctest::Approx(0.81).epsilon(0.05));
    }
    SUBCASE("zero single-photon bound gives zero") {
        CHECK(hsps_p1_lower(1e-3, 0.0, 0.605) == 0.0);
    }
    SUBCASE("zero gain throws") {
        CHECK_THROWS_AS(hsps_p1_lower(0.0, 0.01, 0.605), std::domain_error);
    }
}

TEST_CASE("soundness of every lower bound on the synthetic grid") {
    const auto grid = testing::soundness_grid();
    REQUIRE(grid.size() >= 500);
    const auto outcome = testing::check_soundness(grid);
    CHECK(outcome.points == static_cast<long long>(grid.size()));
    CHECK(outcome.violations == 0);
}

TEST_CASE("thermal-tail inequality behind the dark-coincidence bound") {
    // v1 Qv2 (1+v2)^2 - v2 Qv1 (1+v1)^2 =
    //   [v1(1+v2) - v2(1+v1)] Y0 X dA - v1 v2 * tail,  tail >= 0.
    for (double t : {1e-3, 0.01, 0.1})
        for (double mu : {0.4, 1.0, 2.0})
            for (double eta : {0.5, 1.0}) {
                const double v1 = 0.125, v2 = 0.02, y0 = 1e-5, dark = 1e-3;
                const HeraldingDetector d{2, eta, dark};
                testing::SyntheticPoint pt;
                pt.kind = SourceKind::Hsps;
                pt.t = t;
                pt.y0 = y0;
                pt.detector = d;
                pt.protocol = DecoyProtocol{mu, v1, v2, 0.9, 1e-3};
                const double qv1 = testing::synthetic_gain(pt, v1);
                const double qv2 = testing::synthetic_gain(pt, v2);
                const double lhs = v1 * qv2 * (1 + v2) * (1 + v2) -
                                   v2 * qv1 * (1 + v1) * (1 + v1);
                const double dark_part =
                    (v1 * (1 + v2) - v2 * (1 + v1)) * y0 * d.modes() * dark;
                double tail = 0.0;
                const double w1 = v1 / (1 + v1), w2 = v2 / (1 + v2);
                for (int i = 2; i <= 200; ++i)
                    tail += (std::pow(w1, i - 1) - std::pow(w2, i - 1)) *
                            yield_n(i, t, y0) * tmd_response(1, i, d);
                CHECK(tail >= 0.0);
                CHECK(lhs == doctest::Approx(dark_part - v1 * v2 * tail).epsilon(1e-9));
                CHECK(lhs <= dark_part * (1 + 1e-12) + 1e-300);
            }
}

TEST_CASE("multi-photon tail identity assembled from exact components") {
    // sum_{i>=2} Yi P(1|i) (mu/(1+mu))^i
    //   = Q_mu (1+mu) - Y0 X dA - Y1 eta_A mu/(1+mu)
    for (double t : {1e-3, 0.1})
        for (double mu : {0.4, 0.605, 1.5}) {
            const double y0 = 1e-5, dark = 1e-3;
            const HeraldingDetector d{2, 0.85, dark};
            testing::SyntheticPoint pt;
            pt.kind = SourceKind::Hsps;
            pt.t = t;
            pt.y0 = y0;
            pt.detector = d;
            pt.protocol = DecoyProtocol{mu, 0.125, 0.0, 0.9, 1e-3};
            const double q_mu = testing::synthetic_gain(pt, mu);
            const double u = mu / (1 + mu);
            double lhs = 0.0;
            for (int i = 2; i <= 200; ++i)
                lhs += yield_n(i, t, y0) * tmd_response(1, i, d) * std::pow(u, i);
            const double rhs = q_mu * (1 + mu) - y0 * d.modes() * dark -
                               yield_n(1, t, y0) * d.efficiency * u;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
}

TEST_CASE("bundled bounds clamp to [0,1]") {
    const DecoyGains absurd{1.0, 1.0, 1.0};
    const auto b = decoy_lower_bounds(SourceKind::Wcp, absurd, kWcpProto);
    CHECK(b.y0_lower <= 1.0);
    CHECK(b.y1_lower <= 1.0);
    CHECK(b.p1_lower <= 1.0);
}
