#include "rbsp/planner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

namespace rbsp {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned hw = threads ? threads : std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(count, hw ? hw : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// Full chain with precise errors; feeds both plan_rbsp and the optimizers.
PlanResult plan_impl(const SourceModel& source, const ChannelParams& ch,
                     const DecoyProtocol& p, GainModel mode,
                     double computation_size) {
    PlanResult out;
    out.channel_transmittance = transmittance(ch);
    out.gains = gain_decoys(p, source, ch, mode);
    if (out.gains.signal <= 0.0)
        throw std::domain_error("plan: signal gain is zero");
    out.bounds = decoy_lower_bounds(source.kind, out.gains, p);
    out.p1 = out.bounds.p1_lower;
    if (out.p1 <= 0.0)
        throw std::domain_error("plan: single-photon bound vanished");

    if (out.p1 >= 1.0) {
        out.p1 = 1.0;
        out.m_real = 1.0;  // certain single photon, one pulse per group
    } else {
        out.m_real = std::log(p.eps_over_s) / std::log1p(-out.p1);
    }
    out.m_min = std::max(1, static_cast<int>(std::ceil(out.m_real - 1e-12)));
    out.n_min = computation_size * out.m_real / (p.signal_fraction * out.gains.signal);
    out.efficiency = p.signal_fraction * out.gains.signal / out.m_real;
    out.p_fail_group = group_fail_prob(out.p1, out.m_min);
    out.p_fail_total_bound = overall_fail_bound(computation_size, out.p1, out.m_min);
    return out;
}

// Infeasible operating points (collapsed bounds, zero gains, intensities the
// thermal bound cannot handle) become empty optionals; optimizers skip them.
std::optional<PlanResult> try_plan(const SourceModel& source, const ChannelParams& ch,
                                   const DecoyProtocol& p, GainModel mode,
                                   double computation_size) {
    try {
        return plan_impl(source, ch, p, mode, computation_size);
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
}

}  // namespace

int group_size_min(double p1, double eps_over_s) {
    if (!(eps_over_s > 0.0 && eps_over_s < 1.0))
        throw std::domain_error("group_size_min: eps/S must lie in (0,1)");
    if (p1 >= 1.0) return 1;
    if (!(p1 > 0.0)) throw std::domain_error("group_size_min: degenerate p1 = 0");
    const double m = std::log(eps_over_s) / std::log1p(-p1);
    return std::max(1, static_cast<int>(std::ceil(m - 1e-12)));
}

double group_fail_prob(double p1, double m) {
    if (p1 < 0.0 || p1 > 1.0) throw std::domain_error("group_fail_prob: p1 outside [0,1]");
    if (m < 1.0) throw std::domain_error("group_fail_prob: group size below 1");
    if (p1 >= 1.0) return 0.0;
    return std::exp(m * std::log1p(-p1));
}

double overall_fail_bound(double computation_size, double p1, double m) {
    if (computation_size < 1.0)
        throw std::domain_error("overall_fail_bound: computation size below 1");
    return std::clamp(computation_size * group_fail_prob(p1, m), 0.0, 1.0);
}

double pulse_count_min(double computation_size, const DecoyProtocol& p,
                       double q_mu, double p1) {
    if (q_mu <= 0.0) throw std::domain_error("pulse_count_min: zero signal gain");
    if (!(p1 > 0.0 && p1 < 1.0))
        throw std::domain_error("pulse_count_min: p1 must lie in (0,1)");
    const double m = std::log(p.eps_over_s) / std::log1p(-p1);
    return computation_size * m / (p.signal_fraction * q_mu);
}

double original_rbsp_bound(double pulses, double t) {
    if (pulses < 0.0) throw std::domain_error("original_rbsp_bound: negative pulse count");
    if (!(t > 0.0 && t <= 1.0))
        throw std::domain_error("original_rbsp_bound: transmittance must lie in (0,1]");
    return std::exp(-pulses * t * t * t * t / 18.0);
}

double original_rbsp_pulses(double eps, double t) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("original_rbsp_pulses: eps must lie in (0,1)");
    if (!(t > 0.0 && t <= 1.0))
        throw std::domain_error("original_rbsp_pulses: transmittance must lie in (0,1]");
    return 18.0 * std::log(1.0 / eps) / (t * t * t * t);
}

PlanResult plan_rbsp(const SourceModel& source, const ChannelParams& ch,
                     const DecoyProtocol& p, GainModel mode, double computation_size) {
    if (auto violations = validate_protocol(p); !violations.empty())
        throw std::domain_error("plan_rbsp: invalid protocol: " + violations.front());
    if (computation_size < 1.0)
        throw std::domain_error("plan_rbsp: computation size below 1");
    return plan_impl(source, ch, p, mode, computation_size);
}

MuGrid MuGrid::standard(const DecoyProtocol& p) {
    MuGrid g;
    g.lo = std::max(p.decoy1 + p.decoy2 + 1e-3, 0.01);
    return g;
}

MuOptimum optimize_mu(const SourceModel& family, const ChannelParams& ch,
                      const DecoyProtocol& p, GainModel mode,
                      double computation_size, const MuGrid& grid) {
    if (!(p.decoy1 + p.decoy2 < grid.lo))
        throw std::domain_error("optimize_mu: grid must start above v1 + v2");
    if (!(grid.lo < grid.hi) || !(grid.step > 0.0))
        throw std::domain_error("optimize_mu: malformed grid");

    auto efficiency_at = [&](double mu) {
        DecoyProtocol trial = p;
        trial.signal = mu;
        auto plan = try_plan(family.at_intensity(mu), ch, trial, mode, computation_size);
        return plan ? plan->efficiency : 0.0;
    };

    double best_mu = grid.lo, best = -1.0;
    for (double mu = grid.lo; mu <= grid.hi + 1e-12; mu += grid.step) {
        const double eff = efficiency_at(mu);
        if (eff > best) {
            best = eff;
            best_mu = mu;
        }
    }
    if (best <= 0.0) throw std::domain_error("optimize_mu: no feasible grid point");

    // Golden-section refinement around the coarse winner.
    double a = std::max(grid.lo, best_mu - grid.step);
    double b = std::min(grid.hi, best_mu + grid.step);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a), d = a + ratio * (b - a);
    double fc = efficiency_at(c), fd = efficiency_at(d);
    while (b - a > grid.refine_tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = efficiency_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = efficiency_at(d);
        }
    }
    const double mid = 0.5 * (a + b);
    double final_mu = mid;
    if (efficiency_at(mid) < best) final_mu = best_mu;  // refinement never regresses

    DecoyProtocol chosen = p;
    chosen.signal = final_mu;
    MuOptimum out;
    out.mu = final_mu;
    out.plan = plan_rbsp(family.at_intensity(final_mu), ch, chosen, mode, computation_size);
    return out;
}

std::vector<SweepRow> sweep_distance(const SourceModel& family, ChannelParams ch,
                                     const DecoyProtocol& p, GainModel mode,
                                     double computation_size,
                                     std::span<const double> lengths_km,
                                     const MuGrid& grid, unsigned threads) {
    if (lengths_km.empty()) throw std::domain_error("sweep_distance: empty length list");
    std::vector<SweepRow> rows(lengths_km.size());
    parallel_for(lengths_km.size(), threads, [&](std::size_t i) {
        ChannelParams local = ch;
        local.length_km = lengths_km[i];
        const MuOptimum opt = optimize_mu(family, local, p, mode, computation_size, grid);
        rows[i] = SweepRow{lengths_km[i], opt.mu, opt.plan.p1, opt.plan.efficiency,
                           false, opt.plan};
    });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double prev = rows[i - 1].efficiency;
        if (prev <= 0.0) continue;
        const bool flat = std::abs(rows[i].efficiency - prev) / prev < 1e-3;
        const double floor = dark_floor_gain(family, rows[i].mu, ch.dark_count);
        const bool dark_dominated = rows[i].plan.gains.signal <= 1.01 * floor;
        rows[i].plateau_flag = flat && dark_dominated;
    }
    return rows;
}

double dark_dominance_knee_km(const SourceModel& family, ChannelParams ch,
                              const DecoyProtocol& p, GainModel mode,
                              const MuGrid& grid, double lo_km, double hi_km) {
    auto photon_excess = [&](double length) {
        ChannelParams local = ch;
        local.length_km = length;
        const MuOptimum opt = optimize_mu(family, local, p, mode, 1.0, grid);
        const double dark = dark_floor_gain(family, opt.mu, ch.dark_count);
        return (opt.plan.gains.signal - dark) - dark;
    };
    if (!(photon_excess(lo_km) > 0.0) || !(photon_excess(hi_km) < 0.0))
        throw std::domain_error("dark_dominance_knee_km: range does not bracket the knee");
    double lo = lo_km, hi = hi_km;
    while (hi - lo > 0.05) {
        const double mid = 0.5 * (lo + hi);
        (photon_excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace rbsp
