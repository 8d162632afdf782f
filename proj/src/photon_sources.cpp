#include "rbsp/photon_sources.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rbsp {

SourceModel SourceModel::wcp(double mean) {
    if (!(mean > 0.0)) throw std::domain_error("source mean must be positive");
    return SourceModel{SourceKind::Wcp, mean, std::nullopt};
}

SourceModel SourceModel::hsps(double mean, const HeraldingDetector& det) {
    if (!(mean > 0.0)) throw std::domain_error("source mean must be positive");
    if (det.stages < 0) throw std::domain_error("detector stages must be >= 0");
    if (det.efficiency < 0.0 || det.efficiency > 1.0)
        throw std::domain_error("detector efficiency outside [0,1]");
    if (det.dark_rate < 0.0 || det.dark_rate > 1.0)
        throw std::domain_error("detector dark rate outside [0,1]");
    return SourceModel{SourceKind::Hsps, mean, det};
}

SourceModel SourceModel::at_intensity(double intensity) const {
    SourceModel copy = *this;
    copy.mean = intensity;
    return copy;
}

double poisson_pmf(double mean, int n) {
    if (mean < 0.0) throw std::domain_error("poisson_pmf: negative mean");
    if (n < 0) throw std::domain_error("poisson_pmf: negative photon number");
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

double thermal_pmf(double mean, int n) {
    if (mean < 0.0) throw std::domain_error("thermal_pmf: negative mean");
    if (n < 0) throw std::domain_error("thermal_pmf: negative photon number");
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(mean) - (n + 1) * std::log1p(mean));
}

namespace {

void check_detector_args(int clicks, int photons, const HeraldingDetector& det) {
    if (photons < 0) throw std::domain_error("tmd_response: negative photon number");
    if (clicks < 0 || clicks > det.modes())
        throw std::domain_error("tmd_response: click count outside [0, modes]");
}

// Distribution of the number of occupied (clicking) modes after `photons`
// photons, each surviving with probability eta and landing uniformly on one
// of X modes. All-positive recursion, exact to roundoff at any (X, photons).
std::vector<double> occupancy_distribution(int photons, double eta, int modes) {
    const int max_occ = std::min(photons, modes);
    std::vector<double> occ(max_occ + 1, 0.0), next(max_occ + 1, 0.0);
    occ[0] = 1.0;
    for (int step = 0; step < photons; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int o = 0; o <= max_occ; ++o) {
            const double p = occ[o];
            if (p == 0.0) continue;
            next[o] += p * (1.0 - eta + eta * o / modes);
            if (o + 1 <= max_occ) next[o + 1] += p * (eta * (modes - o) / modes);
        }
        occ.swap(next);
    }
    return occ;
}

struct RowKey {
    int stages;
    double efficiency;
    auto operator<=>(const RowKey&) const = default;
};

}  // namespace

double tmd_response(int clicks, int photons, const HeraldingDetector& det) {
    check_detector_args(clicks, photons, det);
    if (clicks > photons) return 0.0;
    const auto occ = occupancy_distribution(photons, det.efficiency, det.modes());
    return clicks < static_cast<int>(occ.size()) ? occ[clicks] : 0.0;
}

double detail::tmd_response_series(int clicks, int photons, const HeraldingDetector& det) {
    check_detector_args(clicks, photons, det);
    const int X = det.modes();
    const double eta = det.efficiency;
    double positive = 0.0, negative = 0.0;
    double binom_lj = 1.0;  // C(clicks, j)
    for (int j = 0; j <= clicks; ++j) {
        const double base = (1.0 - eta) + (clicks - j) * eta / X;
        const double term = binom_lj * std::pow(base, photons);
        if (j % 2 == 0) positive += term; else negative += term;
        binom_lj = binom_lj * (clicks - j) / (j + 1);
    }
    double binom_xl = 1.0;  // C(X, clicks)
    for (int j = 0; j < clicks; ++j) binom_xl = binom_xl * (X - j) / (j + 1);
    return binom_xl * (positive - negative);
}

std::vector<double> tmd_single_click_row(const HeraldingDetector& det, int max_photons) {
    if (max_photons < 0) throw std::domain_error("tmd_single_click_row: negative length");

    static std::mutex cache_mutex;
    static std::map<RowKey, std::vector<double>> cache;

    const RowKey key{det.stages, det.efficiency};
    {
        std::scoped_lock lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end() && static_cast<int>(it->second.size()) > max_photons)
            return {it->second.begin(), it->second.begin() + max_photons + 1};
    }

    const int len = std::max(max_photons, detail::kSeriesCap);
    const int modes = det.modes();
    const int max_occ = std::min(len, modes);
    std::vector<double> row(len + 1, 0.0);
    std::vector<double> occ(max_occ + 1, 0.0), next(max_occ + 1, 0.0);
    occ[0] = 1.0;
    for (int i = 1; i <= len; ++i) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int o = 0; o <= max_occ; ++o) {
            const double p = occ[o];
            if (p == 0.0) continue;
            next[o] += p * (1.0 - det.efficiency + det.efficiency * o / modes);
            if (o + 1 <= max_occ) next[o + 1] += p * (det.efficiency * (modes - o) / modes);
        }
        occ.swap(next);
        if (max_occ >= 1) row[i] = occ[1];
    }

    {
        std::scoped_lock lock(cache_mutex);
        cache[key] = row;
    }
    return {row.begin(), row.begin() + max_photons + 1};
}

double heralded_single_mean(const SourceModel& source) {
    if (!source.is_hsps())
        throw std::invalid_argument("heralded_single_mean: WCP source has no heralding detector");
    const auto row = tmd_single_click_row(*source.detector, detail::kSeriesCap);
    double sum = 0.0;
    for (int i = 0; i <= detail::kSeriesCap; ++i) {
        const double term = thermal_pmf(source.mean, i) * row[i];
        sum += term;
        if (i > 2 && sum > 0.0 && term < detail::kSeriesRelTol * sum) break;
    }
    return sum;
}

double heralded_pnd(const SourceModel& source, int n) {
    if (!source.is_hsps())
        throw std::invalid_argument("heralded_pnd: WCP source has no heralding detector");
    if (n < 0) throw std::domain_error("heralded_pnd: negative photon number");
    const auto& det = *source.detector;
    const auto row = tmd_single_click_row(det, detail::kSeriesCap);
    auto weight = [&](int i) {
        double w = thermal_pmf(source.mean, i) * row[i];
        if (i == 0) w += thermal_pmf(source.mean, 0) * det.modes() * det.dark_rate;
        return w;
    };
    double total = 0.0;
    for (int i = 0; i <= detail::kSeriesCap; ++i) {
        const double term = weight(i);
        total += term;
        if (i > 2 && total > 0.0 && term < detail::kSeriesRelTol * total) break;
    }
    if (total <= 0.0) throw std::domain_error("heralded_pnd: herald probability is zero");
    return n <= detail::kSeriesCap ? weight(n) / total : 0.0;
}

}  // namespace rbsp
