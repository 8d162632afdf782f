#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbsp/channel_model.hpp"
#include "rbsp/planner.hpp"

namespace rbsp {

/// Raised on malformed config files or out-of-range parameter values.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepAxis { Mu, Distance };

/// Everything a run needs: source, channel, protocol, sweep grids, output.
struct RunConfig {
    SourceKind source = SourceKind::Wcp;
    HeraldingDetector detector;
    ChannelParams channel;
    DecoyProtocol protocol;
    GainModel mode = GainModel::Exact;
    double computation_size = 1.0;

    // sweep-mu grid
    double mu_min = 0.126;
    double mu_max = 2.0;
    double mu_step = 0.005;

    // sweep-distance grid
    std::vector<double> lengths_km;

    std::string output;  // empty = stdout
    std::uint64_t seed = 1;

    SourceModel source_model() const;
    SourceModel source_model_at(double intensity) const;
    std::vector<double> mu_values() const;
    /// Protocol violations plus any out-of-range source/channel field.
    std::vector<std::string> validate() const;
};

/// Flat key-value config file: one `key = value` (or `key value`) per line,
/// `#` starts a comment. Unknown keys are an error.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

/// Applies a single `key`/`value` pair; shared by the file parser and the
/// command-line override path.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

/// One materialized run of a figure preset.
struct PresetRun {
    std::string file_stem;
    SweepAxis axis = SweepAxis::Mu;
    RunConfig config;
};

/// Frozen parameter sets reproducing the six reference figures
/// (fig1..fig6); throws ConfigError on an unknown id.
std::vector<PresetRun> figure_preset(const std::string& id);

std::vector<std::string> figure_preset_ids();

}  // namespace rbsp
