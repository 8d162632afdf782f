#pragma once

#include <optional>
#include <vector>

namespace rbsp {

/// Time-multiplexed heralding detector: a cascade of `stages` 50/50 fiber
/// couplers fans the idler out over modes() = 2^stages output ports, each
/// terminated by a non-number-resolving single-photon detector.
struct HeraldingDetector {
    int stages = 2;            // coupler depth x
    double efficiency = 0.85;  // per-detector quantum efficiency eta_A
    double dark_rate = 1e-8;   // dark-count probability per detector per window

    int modes() const { return 1 << stages; }
};

enum class SourceKind { Wcp, Hsps };

/// Client-side photon source. WCP emits Poissonian pulses of mean `mean`;
/// HSPS emits thermal photon pairs of mean `mean` with the idler monitored
/// by `detector`.
struct SourceModel {
    SourceKind kind = SourceKind::Wcp;
    double mean = 0.5;
    std::optional<HeraldingDetector> detector;

    static SourceModel wcp(double mean);
    static SourceModel hsps(double mean, const HeraldingDetector& det);

    /// Same source run at a different pulse intensity (decoy setting).
    SourceModel at_intensity(double intensity) const;

    bool is_hsps() const { return kind == SourceKind::Hsps; }
};

/// exp(-mean) mean^n / n!
double poisson_pmf(double mean, int n);

/// mean^n / (1+mean)^(n+1)
double thermal_pmf(double mean, int n);

/// Probability that `photons` incident photons register as exactly `clicks`
/// clicks on the time-multiplexed detector. Pure loss + mode-occupancy model;
/// dark counts are excluded here and enter only the yield formulas.
double tmd_response(int clicks, int photons, const HeraldingDetector& det);

/// P(1|i) for i = 0..max_photons. Cached per (stages, efficiency); this row
/// is the hot input of every heralded-gain series.
std::vector<double> tmd_single_click_row(const HeraldingDetector& det, int max_photons);

/// Effective mean photon number of the heralded source,
/// sum_i thermal(mean,i) P(1|i) — the single-click herald probability.
double heralded_single_mean(const SourceModel& source);

/// Photon-number distribution conditioned on a single-click herald,
/// P(n|herald) ∝ thermal(mean,n) P(1|n) + [n=0] thermal(mean,0) X d_A.
double heralded_pnd(const SourceModel& source, int n);

namespace detail {

// Series truncation used by all photon-number sums: stop once a term falls
// below kSeriesRelTol of the running sum, hard cap at kSeriesCap terms.
inline constexpr int kSeriesCap = 200;
inline constexpr double kSeriesRelTol = 1e-18;

/// Literal inclusion-exclusion form of the detector response, positive and
/// negative terms accumulated separately. Unstable for large mode counts
/// combined with large photon numbers; retained as a cross-check of the
/// occupancy recursion used by tmd_response.
double tmd_response_series(int clicks, int photons, const HeraldingDetector& det);

}  // namespace detail

}  // namespace rbsp
