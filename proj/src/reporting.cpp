#include "rbsp/reporting.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace rbsp {

std::string format_g9(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const auto& row : rows) {
        const auto& plan = row.plan;
        out += format_g9(row.length_km);
        out += ',';
        out += format_g9(row.mu);
        out += ',';
        out += format_g9(plan.channel_transmittance);
        out += ',';
        out += format_g9(plan.gains.signal);
        out += ',';
        out += format_g9(plan.gains.decoy1);
        out += ',';
        out += format_g9(plan.gains.decoy2);
        out += ',';
        out += format_g9(row.p1);
        out += ',';
        out += format_g9(plan.m_real);
        out += ',';
        out += format_g9(plan.n_min);
        out += ',';
        out += format_g9(row.efficiency);
        out += ',';
        out += row.plateau_flag ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::vector<SweepRow> run_mu_sweep(const RunConfig& cfg) {
    std::vector<SweepRow> rows;
    for (double mu : cfg.mu_values()) {
        DecoyProtocol proto = cfg.protocol;
        proto.signal = mu;
        SweepRow row;
        row.length_km = cfg.channel.length_km;
        row.mu = mu;
        try {
            row.plan = plan_rbsp(cfg.source_model_at(mu), cfg.channel, proto, cfg.mode,
                                 cfg.computation_size);
            row.p1 = row.plan.p1;
            row.efficiency = row.plan.efficiency;
        } catch (const std::domain_error&) {
            // infeasible grid point: report a zero-efficiency row
            row.plan.channel_transmittance = transmittance(cfg.channel);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SweepRow> run_distance_sweep(const RunConfig& cfg) {
    MuGrid grid = MuGrid::standard(cfg.protocol);
    grid.lo = std::max(grid.lo, cfg.mu_min);
    grid.hi = cfg.mu_max;
    grid.step = cfg.mu_step;
    return sweep_distance(cfg.source_model(), cfg.channel, cfg.protocol, cfg.mode,
                          cfg.computation_size, cfg.lengths_km, grid);
}

namespace {

const char* source_name(SourceKind kind) {
    return kind == SourceKind::Wcp ? "wcp" : "hsps";
}

const char* mode_name(GainModel mode) {
    return mode == GainModel::Exact ? "exact" : "linearized";
}

void append_kv(std::string& out, const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
}

}  // namespace

std::string estimate_text(const RunConfig& cfg, const PlanResult& plan,
                          bool include_other_mode) {
    std::string out;
    append_kv(out, "source", source_name(cfg.source));
    append_kv(out, "mode", mode_name(cfg.mode));
    append_kv(out, "length_km", format_g9(cfg.channel.length_km));
    append_kv(out, "transmittance", format_g9(plan.channel_transmittance));
    append_kv(out, "mu", format_g9(cfg.protocol.signal));
    if (cfg.source == SourceKind::Hsps) {
        append_kv(out, "eta_a", format_g9(cfg.detector.efficiency));
        append_kv(out, "d_a", format_g9(cfg.detector.dark_rate));
        append_kv(out, "modes", std::to_string(cfg.detector.modes()));
    }
    append_kv(out, "q_mu", format_g9(plan.gains.signal));
    append_kv(out, "q_v1", format_g9(plan.gains.decoy1));
    append_kv(out, "q_v2", format_g9(plan.gains.decoy2));
    append_kv(out, "y0_lower", format_g9(plan.bounds.y0_lower));
    append_kv(out, "y1_lower", format_g9(plan.bounds.y1_lower));
    append_kv(out, "p1", format_g9(plan.p1));
    append_kv(out, "m_real", format_g9(plan.m_real));
    append_kv(out, "m_min", std::to_string(plan.m_min));
    append_kv(out, "n_min", format_g9(plan.n_min));
    append_kv(out, "s_over_n", format_g9(plan.efficiency));
    append_kv(out, "p_fail_group", format_g9(plan.p_fail_group));
    append_kv(out, "p_fail_total_bound", format_g9(plan.p_fail_total_bound));
    if (include_other_mode) {
        RunConfig other = cfg;
        other.mode = cfg.mode == GainModel::Exact ? GainModel::Linearized : GainModel::Exact;
        const PlanResult alt = plan_rbsp(other.source_model(), other.channel, other.protocol,
                                         other.mode, other.computation_size);
        out += '\n';
        out += "# ";
        out += mode_name(other.mode);
        out += " mode\n";
        out += estimate_text(other, alt, false);
    }
    return out;
}

std::string estimate_json(const RunConfig& cfg, const PlanResult& plan) {
    nlohmann::ordered_json j;
    j["source"] = source_name(cfg.source);
    j["mode"] = mode_name(cfg.mode);
    j["length_km"] = cfg.channel.length_km;
    j["transmittance"] = plan.channel_transmittance;
    j["mu"] = cfg.protocol.signal;
    j["v1"] = cfg.protocol.decoy1;
    j["v2"] = cfg.protocol.decoy2;
    j["p_mu"] = cfg.protocol.signal_fraction;
    j["eps_over_s"] = cfg.protocol.eps_over_s;
    j["s"] = cfg.computation_size;
    if (cfg.source == SourceKind::Hsps) {
        j["eta_a"] = cfg.detector.efficiency;
        j["d_a"] = cfg.detector.dark_rate;
        j["modes"] = cfg.detector.modes();
    }
    j["q_mu"] = plan.gains.signal;
    j["q_v1"] = plan.gains.decoy1;
    j["q_v2"] = plan.gains.decoy2;
    j["y0_lower"] = plan.bounds.y0_lower;
    j["y1_lower"] = plan.bounds.y1_lower;
    j["p1"] = plan.p1;
    j["m_real"] = plan.m_real;
    j["m_min"] = plan.m_min;
    j["n_min"] = plan.n_min;
    j["s_over_n"] = plan.efficiency;
    j["p_fail_group"] = plan.p_fail_group;
    j["p_fail_total_bound"] = plan.p_fail_total_bound;
    return j.dump(2) + "\n";
}

}  // namespace rbsp
