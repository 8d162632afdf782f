#include "rbsp/decoy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rbsp {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::vector<std::string> validate_protocol(const DecoyProtocol& p) {
    std::vector<std::string> violations;
    if (!(p.decoy2 >= 0.0)) violations.push_back("decoy intensity v2 must be >= 0");
    if (!(p.decoy2 < p.decoy1)) violations.push_back("decoy intensities must satisfy v2 < v1");
    if (!(p.decoy1 + p.decoy2 < p.signal))
        violations.push_back("intensities must satisfy v1 + v2 < mu");
    if (!(p.signal_fraction > 0.0 && p.signal_fraction <= 1.0))
        violations.push_back("signal fraction p_mu must lie in (0,1]");
    if (!(p.eps_over_s > 0.0 && p.eps_over_s < 1.0))
        violations.push_back("security rate eps/S must lie in (0,1)");
    return violations;
}

double wcp_y0_lower(double q_v1, double q_v2, double v1, double v2) {
    if (v1 == v2) throw std::domain_error("wcp_y0_lower: degenerate protocol v1 == v2");
    const double num = v1 * q_v2 * std::exp(v2) - v2 * q_v1 * std::exp(v1);
    return std::max(num / (v1 - v2), 0.0);
}

double wcp_p1_lower(double q_mu, double q_v1, double q_v2,
                    const DecoyProtocol& p, double y0_lower) {
    if (!validate_protocol(p).empty())
        throw std::domain_error("wcp_p1_lower: invalid decoy protocol");
    if (q_mu <= 0.0) throw std::domain_error("wcp_p1_lower: zero signal gain");
    const double mu = p.signal, v1 = p.decoy1, v2 = p.decoy2;
    const double den = mu * v1 - mu * v2 - v1 * v1 + v2 * v2;
    const double y1 = std::max(
        mu / den *
            (q_v1 * std::exp(v1) - q_v2 * std::exp(v2) -
             (v1 * v1 - v2 * v2) / (mu * mu) * (q_mu * std::exp(mu) - y0_lower)),
        0.0);
    return clamp01(y1 * mu * std::exp(-mu) / q_mu);
}

double hsps_y0_lower(double q_v1, double q_v2, double v1, double v2) {
    const double den = v1 * (1.0 + v2) - v2 * (1.0 + v1);
    if (den == 0.0) throw std::domain_error("hsps_y0_lower: degenerate protocol v1 == v2");
    const double num =
        v1 * q_v2 * (1.0 + v2) * (1.0 + v2) - v2 * q_v1 * (1.0 + v1) * (1.0 + v1);
    return std::max(num / den, 0.0);
}

double hsps_y1_lower(double q_mu, double q_v1, double q_v2,
                     const DecoyProtocol& p, double y0_xda_lower) {
    if (!validate_protocol(p).empty())
        throw std::domain_error("hsps_y1_lower: invalid decoy protocol");
    const double u = p.signal / (1.0 + p.signal);
    const double w1 = p.decoy1 / (1.0 + p.decoy1);
    const double w2 = p.decoy2 / (1.0 + p.decoy2);
    // den = (w1 - w2)(u - w1 - w2); the derivation needs it positive, which
    // is stricter than v1 + v2 < mu for thermal statistics.
    const double den = w1 * u - w2 * u - w1 * w1 + w2 * w2;
    if (den <= 0.0)
        throw std::domain_error(
            "hsps_y1_lower: rescaled intensities must satisfy "
            "mu/(1+mu) > v1/(1+v1) + v2/(1+v2)");
    const double bracket =
        q_v1 * (1.0 + p.decoy1) - q_v2 * (1.0 + p.decoy2) -
        (w1 * w1 - w2 * w2) / (u * u) * (q_mu * (1.0 + p.signal) - y0_xda_lower);
    return std::max(u / den * bracket, 0.0);
}

double hsps_p1_lower(double q_mu, double y1_eta_lower, double mean) {
    if (q_mu <= 0.0) throw std::domain_error("hsps_p1_lower: zero signal gain");
    const double single = mean / ((1.0 + mean) * (1.0 + mean));
    return clamp01(y1_eta_lower * single / q_mu);
}

BoundsResult decoy_lower_bounds(SourceKind kind, const DecoyGains& gains,
                                const DecoyProtocol& p) {
    BoundsResult out;
    if (kind == SourceKind::Wcp) {
        out.y0_lower = clamp01(wcp_y0_lower(gains.decoy1, gains.decoy2, p.decoy1, p.decoy2));
        out.p1_lower = wcp_p1_lower(gains.signal, gains.decoy1, gains.decoy2, p, out.y0_lower);
        // back out the clamped single-photon yield for reporting
        const double single = p.signal * std::exp(-p.signal);
        out.y1_lower = clamp01(out.p1_lower * gains.signal / single);
    } else {
        out.y0_lower = clamp01(hsps_y0_lower(gains.decoy1, gains.decoy2, p.decoy1, p.decoy2));
        out.y1_lower = clamp01(
            hsps_y1_lower(gains.signal, gains.decoy1, gains.decoy2, p, out.y0_lower));
        out.p1_lower = hsps_p1_lower(gains.signal, out.y1_lower, p.signal);
    }
    return out;
}

}  // namespace rbsp
