#include "rbsp/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbsp {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

void check_channel(const ChannelParams& ch) {
    if (ch.loss_db_per_km < 0.0 || ch.length_km < 0.0)
        throw std::domain_error("channel: loss and length must be non-negative");
    if (ch.server_transmittance < 0.0 || ch.server_transmittance > 1.0 ||
        ch.server_efficiency < 0.0 || ch.server_efficiency > 1.0 ||
        ch.dark_count < 0.0 || ch.dark_count > 1.0)
        throw std::domain_error("channel: t_s, eta_s, Y0 must lie in [0,1]");
}

}  // namespace

double transmittance(const ChannelParams& ch) {
    check_channel(ch);
    return std::pow(10.0, -ch.loss_db_per_km * ch.length_km / 10.0) *
           ch.server_transmittance * ch.server_efficiency;
}

double yield_n(int n, double t, double y0) {
    if (n < 0) throw std::domain_error("yield_n: negative photon number");
    if (n == 0) return y0;
    if (t >= 1.0) return 1.0;
    // 1 - (1-y0)(1-t)^n = y0 - (1-y0) expm1(n log1p(-t)); the expm1 form keeps
    // yields exact down to n*t near the underflow limit.
    return y0 - (1.0 - y0) * std::expm1(n * std::log1p(-t));
}

double gain_wcp(double mean, const ChannelParams& ch, GainModel mode) {
    if (mean < 0.0) throw std::domain_error("gain_wcp: negative mean");
    const double t = transmittance(ch);
    if (mode == GainModel::Linearized) return clamp01(ch.dark_count + t * mean);
    return clamp01(ch.dark_count - (1.0 - ch.dark_count) * std::expm1(-t * mean));
}

double gain_hsps(const SourceModel& source, const ChannelParams& ch, GainModel mode) {
    if (!source.is_hsps())
        throw std::invalid_argument("gain_hsps: source is not heralded");
    if (source.mean < 0.0) throw std::domain_error("gain_hsps: negative mean");
    const auto& det = *source.detector;
    const double t = transmittance(ch);

    if (mode == GainModel::Linearized)
        return clamp01(ch.dark_count + t * heralded_single_mean(source));

    // Dark counts contribute only through the vacuum coincidence term; the
    // photon terms carry pure transmission yields, which leaves the
    // long-distance floor at Y0 X d_A / (1+mu).
    const double dark = ch.dark_count * det.modes() * det.dark_rate / (1.0 + source.mean);
    const auto row = tmd_single_click_row(det, detail::kSeriesCap);
    double sum = 0.0;
    for (int i = 1; i <= detail::kSeriesCap; ++i) {
        const double term = yield_n(i, t, 0.0) * row[i] * thermal_pmf(source.mean, i);
        sum += term;
        if (i > 2 && sum > 0.0 && term < detail::kSeriesRelTol * sum) break;
    }
    return clamp01(dark + sum);
}

double gain_at_intensity(const SourceModel& source, double intensity,
                         const ChannelParams& ch, GainModel mode) {
    if (source.is_hsps() && intensity == 0.0) {
        // Thermal vacuum decoy: only the dark-coincidence term remains.
        const auto& det = *source.detector;
        return mode == GainModel::Linearized
                   ? ch.dark_count
                   : clamp01(ch.dark_count * det.modes() * det.dark_rate);
    }
    if (source.is_hsps()) return gain_hsps(source.at_intensity(intensity), ch, mode);
    return gain_wcp(intensity, ch, mode);
}

double error_rate_hsps(const SourceModel& source, const ChannelParams& ch,
                       const ErrorModel& err, GainModel mode) {
    if (!source.is_hsps())
        throw std::invalid_argument("error_rate_hsps: source is not heralded");
    const double q = gain_hsps(source, ch, mode);
    if (q <= 0.0) throw std::domain_error("error_rate_hsps: zero gain, rate undefined");

    const auto& det = *source.detector;
    const double t = transmittance(ch);
    const double dark = ch.dark_count * det.modes() * det.dark_rate / (1.0 + source.mean);
    const auto row = tmd_single_click_row(det, detail::kSeriesCap);
    double weighted = err.vacuum_error * dark;
    double sum = dark;
    for (int i = 1; i <= detail::kSeriesCap; ++i) {
        const double term = yield_n(i, t, 0.0) * row[i] * thermal_pmf(source.mean, i);
        weighted += err.detection_error * term;
        sum += term;
        if (i > 2 && sum > 0.0 && term < detail::kSeriesRelTol * sum) break;
    }
    return clamp01(weighted / q);
}

DecoyGains gain_decoys(const DecoyProtocol& p, const SourceModel& source,
                       const ChannelParams& ch, GainModel mode) {
    DecoyGains g;
    g.signal = gain_at_intensity(source, p.signal, ch, mode);
    g.decoy1 = gain_at_intensity(source, p.decoy1, ch, mode);
    g.decoy2 = gain_at_intensity(source, p.decoy2, ch, mode);
    return g;
}

double dark_floor_gain(const SourceModel& source, double intensity, double y0) {
    if (!source.is_hsps()) return y0;
    const auto& det = *source.detector;
    return y0 * det.modes() * det.dark_rate / (1.0 + intensity);
}

}  // namespace rbsp
