#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "rbsp/i1dc.hpp"
#include "rbsp/reporting.hpp"
#include "rbsp/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct Overrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> entries;
};

void add_common_options(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "flat key = value config file");
    auto opt = [&ov, cmd](const std::string& flag, const std::string& key,
                          const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&ov, key](const std::string& v) { ov.entries.emplace_back(key, v); }, help);
    };
    opt("--source", "source", "photon source: wcp or hsps");
    opt("--mu", "mu", "signal intensity");
    opt("--v1", "v1", "first decoy intensity");
    opt("--v2", "v2", "second decoy intensity");
    opt("--p-mu", "p_mu", "signal pulse fraction");
    opt("--eps-over-s", "eps_over_s", "security rate eps/S");
    opt("--s", "s", "computation size S");
    opt("--mode", "mode", "gain model: exact or linearized");
    opt("--eta-a", "eta_a", "heralding detector efficiency");
    opt("--d-a", "d_a", "heralding detector dark rate");
    opt("--x", "x", "heralding coupler depth (modes = 2^x)");
    opt("--alpha", "alpha", "fiber loss in dB/km");
    opt("--length", "length", "fiber length in km");
    opt("--t-s", "t_s", "server internal transmittance");
    opt("--eta-s", "eta_s", "server detector efficiency");
    opt("--y0", "y0", "server dark count per gate");
    opt("--lengths", "lengths", "comma-separated distance list in km");
    opt("--mu-min", "mu_min", "mu sweep lower bound");
    opt("--mu-max", "mu_max", "mu sweep upper bound");
    opt("--mu-step", "mu_step", "mu sweep step");
    opt("--output", "output", "output file (default: stdout)");
    opt("--seed", "seed", "random seed");
}

rbsp::RunConfig build_config(const Overrides& ov) {
    rbsp::RunConfig cfg;
    if (!ov.config_path.empty()) cfg = rbsp::parse_config_file(ov.config_path);
    for (const auto& [key, value] : ov.entries) rbsp::apply_config_entry(cfg, key, value);
    return cfg;
}

void require_valid(const rbsp::RunConfig& cfg) {
    const auto violations = cfg.validate();
    if (violations.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& v : violations) msg += "\n  - " + v;
    throw rbsp::ConfigError(msg);
}

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << payload;
}

int cmd_estimate(const Overrides& ov, const std::string& json_path, bool both_modes) {
    rbsp::RunConfig cfg = build_config(ov);
    require_valid(cfg);
    const rbsp::PlanResult plan = rbsp::plan_rbsp(cfg.source_model(), cfg.channel,
                                                  cfg.protocol, cfg.mode,
                                                  cfg.computation_size);
    write_output(cfg.output, rbsp::estimate_text(cfg, plan, both_modes));
    if (!json_path.empty()) {
        std::ofstream out(json_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open json file '" + json_path + "'");
        out << rbsp::estimate_json(cfg, plan);
    }
    return kExitOk;
}

int cmd_sweep_mu(const Overrides& ov) {
    rbsp::RunConfig cfg = build_config(ov);
    // the grid replaces the configured signal intensity; validate against its top
    rbsp::RunConfig probe = cfg;
    probe.protocol.signal = cfg.mu_max;
    require_valid(probe);
    write_output(cfg.output, rbsp::sweep_csv(rbsp::run_mu_sweep(cfg)));
    return kExitOk;
}

int cmd_sweep_distance(const Overrides& ov) {
    rbsp::RunConfig cfg = build_config(ov);
    require_valid(cfg);
    if (cfg.lengths_km.empty())
        throw rbsp::ConfigError("sweep-distance needs a non-empty --lengths list");
    write_output(cfg.output, rbsp::sweep_csv(rbsp::run_distance_sweep(cfg)));
    return kExitOk;
}

int cmd_verify_i1dc(int k, int trials, std::uint64_t seed, bool wrong_rule) {
    const auto rule = wrong_rule ? rbsp::i1dc::ThetaRule::PreviousOutcome
                                 : rbsp::i1dc::ThetaRule::SuffixParity;
    const auto report = rbsp::i1dc::verify(k, trials, seed, rule);
    std::cout << "chain length          = " << k << "\n"
              << "trials                = " << trials << "\n"
              << "cases checked         = " << report.cases << "\n"
              << "failures              = " << report.failures << "\n"
              << "max fidelity error    = " << rbsp::format_g9(report.max_fidelity_error) << "\n"
              << "max probability error = " << rbsp::format_g9(report.max_probability_error)
              << "\n";
    for (const auto& sample : report.failure_samples)
        std::cout << "failure: " << sample << "\n";
    std::cout << (report.passed() ? "verdict = pass" : "verdict = FAIL") << "\n";
    return report.passed() ? kExitOk : kExitNumerical;
}

int cmd_preset(const std::string& id, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const auto runs = rbsp::figure_preset(id);
    fs::create_directories(out_dir);
    for (const auto& run : runs) {
        const auto rows = run.axis == rbsp::SweepAxis::Mu
                              ? rbsp::run_mu_sweep(run.config)
                              : rbsp::run_distance_sweep(run.config);
        const fs::path path = fs::path(out_dir) / (run.file_stem + ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
        out << rbsp::sweep_csv(rows);
        std::cout << "wrote " << path.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blind-state preparation resource estimator for decoy-state "
                 "WCP and heralded single-photon sources"};
    app.require_subcommand(1);

    Overrides est_ov, mu_ov, dist_ov;
    std::string json_path;
    bool both_modes = false;
    auto* estimate = app.add_subcommand("estimate", "single operating point report");
    add_common_options(estimate, est_ov);
    estimate->add_option("--json", json_path, "also write a JSON record to this path");
    estimate->add_flag("--both-modes", both_modes, "append the other gain model's figures");

    auto* sweep_mu = app.add_subcommand("sweep-mu", "CSV of the mu grid at fixed distance");
    add_common_options(sweep_mu, mu_ov);

    auto* sweep_dist =
        app.add_subcommand("sweep-distance", "CSV of per-distance optimized operating points");
    add_common_options(sweep_dist, dist_ov);

    int k = 8, trials = 200;
    std::uint64_t seed = 1;
    bool wrong_rule = false;
    auto* verify = app.add_subcommand("verify-i1dc",
                                      "exhaustive chain-simulator self-check");
    verify->add_option("--k", k, "chain length (1..14)");
    verify->add_option("--trials", trials, "random phase tuples per run");
    verify->add_option("--seed", seed, "random seed");
    verify->add_flag("--wrong-rule", wrong_rule,
                     "use the deliberately wrong phase rule (must fail)");

    std::string preset_id, out_dir = ".";
    auto* preset = app.add_subcommand("preset", "run a frozen figure-reproduction preset");
    preset->add_option("id", preset_id, "fig1..fig6")->required();
    preset->add_option("--out-dir", out_dir, "directory for the CSV files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (estimate->parsed()) return cmd_estimate(est_ov, json_path, both_modes);
        if (sweep_mu->parsed()) return cmd_sweep_mu(mu_ov);
        if (sweep_dist->parsed()) return cmd_sweep_distance(dist_ov);
        if (verify->parsed()) return cmd_verify_i1dc(k, trials, seed, wrong_rule);
        if (preset->parsed()) return cmd_preset(preset_id, out_dir);
    } catch (const rbsp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
