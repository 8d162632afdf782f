#pragma once

#include <string>
#include <vector>

#include "rbsp/photon_sources.hpp"

namespace rbsp {

/// Two-decoy protocol parameters. Intensities must satisfy
/// 0 <= decoy2 < decoy1 and decoy1 + decoy2 < signal.
struct DecoyProtocol {
    double signal = 0.625;      // mu
    double decoy1 = 0.125;      // v1
    double decoy2 = 0.0;        // v2
    double signal_fraction = 0.9;  // p_mu, share of signal pulses in N
    double eps_over_s = 1e-3;      // security rate eps/S
};

/// Measured (or modeled) gains at the three intensities.
struct DecoyGains {
    double signal = 0.0;
    double decoy1 = 0.0;
    double decoy2 = 0.0;
};

/// Lower bounds estimated from the decoy statistics, clamped to [0,1].
/// For WCP, y0/y1 bound the vacuum and single-photon yields; for HSPS,
/// y0 bounds Y0*X*d_A and y1 bounds Y1*eta_A.
struct BoundsResult {
    double y0_lower = 0.0;
    double y1_lower = 0.0;
    double p1_lower = 0.0;
};

/// Returns one message per violated protocol constraint; empty means valid.
std::vector<std::string> validate_protocol(const DecoyProtocol& p);

/// Vacuum-yield lower bound for Poissonian decoys,
/// max{(v1 Qv2 e^v2 - v2 Qv1 e^v1)/(v1 - v2), 0}.
double wcp_y0_lower(double q_v1, double q_v2, double v1, double v2);

/// Single-photon fraction lower bound for Poissonian decoys.
double wcp_p1_lower(double q_mu, double q_v1, double q_v2,
                    const DecoyProtocol& p, double y0_lower);

/// Lower bound on the dark-coincidence constant Y0*X*d_A from thermal decoys,
/// max{[v1 Qv2 (1+v2)^2 - v2 Qv1 (1+v1)^2] / [v1(1+v2) - v2(1+v1)], 0}.
double hsps_y0_lower(double q_v1, double q_v2, double v1, double v2);

/// Lower bound on Y1*eta_A from thermal decoys. Works in the rescaled
/// variables w = v/(1+v), u = mu/(1+mu); the multi-photon tail is eliminated
/// through Q_mu*(1+mu) - Y0^L*X*d_A, which makes the bound exact on a channel
/// where only single photons are transmitted. Requires u > w1 + w2 (stricter
/// than v1 + v2 < mu) and throws otherwise.
double hsps_y1_lower(double q_mu, double q_v1, double q_v2,
                     const DecoyProtocol& p, double y0_xda_lower);

/// p1 >= Y1^L eta_A * [mu/(1+mu)^2] / Q_mu, clamped to [0,1].
double hsps_p1_lower(double q_mu, double y1_eta_lower, double mean);

/// Convenience: run the full bound chain for either source family.
BoundsResult decoy_lower_bounds(SourceKind kind, const DecoyGains& gains,
                                const DecoyProtocol& p);

}  // namespace rbsp
