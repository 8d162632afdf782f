#include "rbsp/run_config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

namespace rbsp {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + value + "'");
    }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    return out;
}

}  // namespace

SourceModel RunConfig::source_model() const { return source_model_at(protocol.signal); }

SourceModel RunConfig::source_model_at(double intensity) const {
    return source == SourceKind::Wcp ? SourceModel::wcp(intensity)
                                     : SourceModel::hsps(intensity, detector);
}

std::vector<double> RunConfig::mu_values() const {
    if (!(mu_min < mu_max) || !(mu_step > 0.0))
        throw ConfigError("mu grid: need mu_min < mu_max and mu_step > 0");
    std::vector<double> out;
    for (double mu = mu_min; mu <= mu_max + 1e-12; mu += mu_step) out.push_back(mu);
    return out;
}

std::vector<std::string> RunConfig::validate() const {
    auto violations = validate_protocol(protocol);
    if (detector.stages < 0) violations.push_back("detector stages x must be >= 0");
    if (detector.efficiency < 0.0 || detector.efficiency > 1.0)
        violations.push_back("detector efficiency eta_a outside [0,1]");
    if (detector.dark_rate < 0.0 || detector.dark_rate > 1.0)
        violations.push_back("detector dark rate d_a outside [0,1]");
    if (channel.loss_db_per_km < 0.0) violations.push_back("fiber loss alpha must be >= 0");
    if (channel.length_km < 0.0) violations.push_back("fiber length must be >= 0");
    if (channel.server_transmittance < 0.0 || channel.server_transmittance > 1.0)
        violations.push_back("server transmittance t_s outside [0,1]");
    if (channel.server_efficiency < 0.0 || channel.server_efficiency > 1.0)
        violations.push_back("server efficiency eta_s outside [0,1]");
    if (channel.dark_count < 0.0 || channel.dark_count > 1.0)
        violations.push_back("server dark count y0 outside [0,1]");
    if (computation_size < 1.0) violations.push_back("computation size s must be >= 1");
    return violations;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "source") {
        if (value == "wcp") cfg.source = SourceKind::Wcp;
        else if (value == "hsps") cfg.source = SourceKind::Hsps;
        else throw ConfigError("config key 'source': expected wcp or hsps, got '" + value + "'");
    } else if (key == "mode") {
        if (value == "exact") cfg.mode = GainModel::Exact;
        else if (value == "linearized" || value == "approx") cfg.mode = GainModel::Linearized;
        else throw ConfigError("config key 'mode': expected exact or linearized");
    } else if (key == "mu") {
        cfg.protocol.signal = parse_double(key, value);
    } else if (key == "v1") {
        cfg.protocol.decoy1 = parse_double(key, value);
    } else if (key == "v2") {
        cfg.protocol.decoy2 = parse_double(key, value);
    } else if (key == "p_mu") {
        cfg.protocol.signal_fraction = parse_double(key, value);
    } else if (key == "eps_over_s") {
        cfg.protocol.eps_over_s = parse_double(key, value);
    } else if (key == "s") {
        cfg.computation_size = parse_double(key, value);
    } else if (key == "eta_a") {
        cfg.detector.efficiency = parse_double(key, value);
    } else if (key == "d_a") {
        cfg.detector.dark_rate = parse_double(key, value);
    } else if (key == "x") {
        cfg.detector.stages = static_cast<int>(parse_double(key, value));
    } else if (key == "alpha") {
        cfg.channel.loss_db_per_km = parse_double(key, value);
    } else if (key == "length") {
        cfg.channel.length_km = parse_double(key, value);
    } else if (key == "t_s") {
        cfg.channel.server_transmittance = parse_double(key, value);
    } else if (key == "eta_s") {
        cfg.channel.server_efficiency = parse_double(key, value);
    } else if (key == "y0") {
        cfg.channel.dark_count = parse_double(key, value);
    } else if (key == "lengths") {
        cfg.lengths_km = parse_double_list(key, value);
    } else if (key == "mu_min") {
        cfg.mu_min = parse_double(key, value);
    } else if (key == "mu_max") {
        cfg.mu_max = parse_double(key, value);
    } else if (key == "mu_step") {
        cfg.mu_step = parse_double(key, value);
    } else if (key == "output") {
        cfg.output = value;
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string key, value;
        if (auto eq = line.find('='); eq != std::string::npos) {
            key = trim(line.substr(0, eq));
            value = trim(line.substr(eq + 1));
        } else if (auto ws = line.find_first_of(" \t"); ws != std::string::npos) {
            key = trim(line.substr(0, ws));
            value = trim(line.substr(ws + 1));
        } else {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        try {
            apply_config_entry(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

namespace {

std::vector<double> length_grid(double lo, double hi, double step) {
    std::vector<double> out;
    for (double l = lo; l <= hi + 1e-9; l += step) out.push_back(l);
    return out;
}

RunConfig reference_base() {
    RunConfig cfg;
    cfg.channel = ChannelParams{0.2, 25.0, 0.45, 0.1, 6e-6};
    cfg.protocol = DecoyProtocol{0.625, 0.125, 0.0, 0.9, 1e-3};
    cfg.detector = HeraldingDetector{2, 0.85, 1e-8};
    cfg.mode = GainModel::Exact;
    cfg.mu_min = 0.126;
    cfg.mu_max = 2.0;
    cfg.mu_step = 0.005;
    return cfg;
}

PresetRun make_run(std::string stem, SweepAxis axis, SourceKind kind,
                   double eta_a, double d_a, std::vector<double> lengths) {
    RunConfig cfg = reference_base();
    cfg.source = kind;
    cfg.detector.efficiency = eta_a;
    cfg.detector.dark_rate = d_a;
    cfg.lengths_km = std::move(lengths);
    return PresetRun{std::move(stem), axis, std::move(cfg)};
}

}  // namespace

std::vector<std::string> figure_preset_ids() {
    return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6"};
}

std::vector<PresetRun> figure_preset(const std::string& id) {
    const auto near = length_grid(5, 100, 5);
    const auto far = length_grid(25, 1000, 25);
    if (id == "fig1")
        return {make_run("fig1_wcp", SweepAxis::Mu, SourceKind::Wcp, 0.85, 1e-8, {}),
                make_run("fig1_hsps", SweepAxis::Mu, SourceKind::Hsps, 0.85, 1e-8, {})};
    if (id == "fig2")
        return {make_run("fig2_wcp", SweepAxis::Mu, SourceKind::Wcp, 0.04, 1e-12, {}),
                make_run("fig2_hsps", SweepAxis::Mu, SourceKind::Hsps, 0.04, 1e-12, {})};
    if (id == "fig3")
        return {make_run("fig3_wcp", SweepAxis::Distance, SourceKind::Wcp, 0.85, 1e-8, near),
                make_run("fig3_hsps", SweepAxis::Distance, SourceKind::Hsps, 0.85, 1e-8, near)};
    if (id == "fig4")
        return {make_run("fig4_wcp", SweepAxis::Distance, SourceKind::Wcp, 0.85, 1e-8, far),
                make_run("fig4_hsps", SweepAxis::Distance, SourceKind::Hsps, 0.85, 1e-8, far)};
    if (id == "fig5")
        return {make_run("fig5_wcp", SweepAxis::Distance, SourceKind::Wcp, 1.0, 1e-8, far),
                make_run("fig5_hsps", SweepAxis::Distance, SourceKind::Hsps, 1.0, 1e-8, far)};
    if (id == "fig6")
        return {make_run("fig6_wcp", SweepAxis::Distance, SourceKind::Wcp, 1.0, 1e-8, far),
                make_run("fig6_hsps_da1e-8", SweepAxis::Distance, SourceKind::Hsps, 1.0, 1e-8, far),
                make_run("fig6_hsps_da1e-12", SweepAxis::Distance, SourceKind::Hsps, 1.0, 1e-12, far)};
    throw ConfigError("unknown preset '" + id + "' (expected fig1..fig6)");
}

}  // namespace rbsp
