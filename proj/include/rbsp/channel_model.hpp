#pragma once

#include "rbsp/decoy_bounds.hpp"
#include "rbsp/photon_sources.hpp"

namespace rbsp {

/// Fiber + server detection chain.
struct ChannelParams {
    double loss_db_per_km = 0.2;      // alpha
    double length_km = 25.0;          // L
    double server_transmittance = 0.45;  // t_s
    double server_efficiency = 0.1;      // eta_s
    double dark_count = 6e-6;            // Y0, per gate
};

/// Linearized mode uses the first-order gains Q ≈ Y0 + T*mu_eff;
/// Exact evaluates the full photon-number sums.
enum class GainModel { Linearized, Exact };

struct ErrorModel {
    double vacuum_error = 0.5;     // e0
    double detection_error = 0.0;  // e_d, per photon-number term i >= 1
};

/// End-to-end transmittance T = 10^(-alpha L / 10) t_s eta_s.
double transmittance(const ChannelParams& ch);

/// n-photon yield 1 - (1 - y0)(1 - t)^n; yield_n(0, ...) = y0.
double yield_n(int n, double t, double y0);

/// WCP gain. Exact mode sums Poisson photon numbers against yield_n, which
/// closes to 1 - (1 - Y0) e^(-T mu).
double gain_wcp(double mean, const ChannelParams& ch, GainModel mode);

/// Heralded-source gain. Exact mode evaluates
///   Q = Y0 X d_A / (1+mu) + sum_{i>=1} [1-(1-T)^i] P(1|i) mu^i/(1+mu)^(i+1);
/// server dark counts enter only through the vacuum dark-coincidence term,
/// so the long-distance floor is Y0 X d_A/(1+mu). Linearized mode returns
/// Y0 + T * heralded_single_mean.
double gain_hsps(const SourceModel& source, const ChannelParams& ch, GainModel mode);

/// Gain of `source` run at decoy intensity `intensity` (HSPS keeps its detector).
double gain_at_intensity(const SourceModel& source, double intensity,
                         const ChannelParams& ch, GainModel mode);

/// E_mu from the heralded-gain decomposition; throws on zero gain.
double error_rate_hsps(const SourceModel& source, const ChannelParams& ch,
                       const ErrorModel& err, GainModel mode);

/// Gains at the protocol's signal and decoy intensities.
DecoyGains gain_decoys(const DecoyProtocol& p, const SourceModel& source,
                       const ChannelParams& ch, GainModel mode);

/// T -> 0 limit of the exact gain at the given intensity: Y0 for WCP,
/// Y0 X d_A / (1+intensity) for HSPS.
double dark_floor_gain(const SourceModel& source, double intensity, double y0);

}  // namespace rbsp
