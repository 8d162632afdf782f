#pragma once

#include <span>
#include <vector>

#include "rbsp/channel_model.hpp"
#include "rbsp/decoy_bounds.hpp"

namespace rbsp {

/// Resource plan for one (source, channel, protocol) operating point.
/// m_real is the asymptotic group size ln(eps/S)/ln(1-p1); m_min is its
/// operational ceiling. efficiency = S/N = p_mu Q_mu / m_real, so
/// n_min * efficiency = S exactly.
struct PlanResult {
    double p1 = 0.0;
    double m_real = 0.0;
    int m_min = 1;
    double n_min = 0.0;
    double efficiency = 0.0;
    double p_fail_group = 0.0;
    double p_fail_total_bound = 0.0;
    DecoyGains gains;
    BoundsResult bounds;
    double channel_transmittance = 0.0;
};

/// Smallest integer m with S (1-p1)^m <= eps, i.e. ceil(ln(eps/S)/ln(1-p1)).
/// p1 = 1 returns 1; p1 = 0 is degenerate and throws.
int group_size_min(double p1, double eps_over_s);

/// (1 - p1)^m, the probability that a group contains no single-photon pulse.
double group_fail_prob(double p1, double m);

/// S (1 - p1)^m, clamped to [0,1].
double overall_fail_bound(double computation_size, double p1, double m);

/// Minimum pulse count N = S m / (p_mu Q_mu) with the real-valued m.
double pulse_count_min(double computation_size, const DecoyProtocol& p,
                       double q_mu, double p1);

/// Abort/leak probability bound of the original (non-decoy) protocol,
/// exp(-N T^4 / 18).
double original_rbsp_bound(double pulses, double t);

/// Inverse of the above: pulses needed for a target bound,
/// 18 ln(1/eps) / T^4.
double original_rbsp_pulses(double eps, double t);

/// Full chain: gains -> decoy bounds -> group size -> pulse count.
/// Throws on zero signal gain or a vanishing p1 bound.
PlanResult plan_rbsp(const SourceModel& source, const ChannelParams& ch,
                     const DecoyProtocol& p, GainModel mode,
                     double computation_size);

/// Signal-intensity search grid: coarse scan then golden-section refinement.
struct MuGrid {
    double lo = 0.126;
    double hi = 2.0;
    double step = 0.005;
    double refine_tol = 1e-4;

    static MuGrid standard(const DecoyProtocol& p);
};

struct MuOptimum {
    double mu = 0.0;
    PlanResult plan;
};

/// argmax over mu of the efficiency S/N. Deterministic for a fixed grid;
/// the argmax is invariant under eps/S because ln(eps/S) multiplies every
/// candidate equally.
MuOptimum optimize_mu(const SourceModel& family, const ChannelParams& ch,
                      const DecoyProtocol& p, GainModel mode,
                      double computation_size, const MuGrid& grid);

struct SweepRow {
    double length_km = 0.0;
    double mu = 0.0;
    double p1 = 0.0;
    double efficiency = 0.0;
    bool plateau_flag = false;
    PlanResult plan;
};

/// Per-distance mu optimization. plateau_flag marks rows whose efficiency
/// moved by < 0.1% relative to the previous row while the signal gain sits
/// within 1% of its dark-count floor. Rows evaluate in parallel;
/// threads = 0 picks the hardware count.
std::vector<SweepRow> sweep_distance(const SourceModel& family, ChannelParams ch,
                                     const DecoyProtocol& p, GainModel mode,
                                     double computation_size,
                                     std::span<const double> lengths_km,
                                     const MuGrid& grid, unsigned threads = 0);

/// Distance at which the photonic part of the signal gain equals its
/// dark-count part, with mu re-optimized at every probe — the knee where the
/// efficiency curve starts to flatten. Bisection to 0.05 km; [lo_km, hi_km]
/// must bracket the crossing.
double dark_dominance_knee_km(const SourceModel& family, ChannelParams ch,
                              const DecoyProtocol& p, GainModel mode,
                              const MuGrid& grid, double lo_km, double hi_km);

}  // namespace rbsp
