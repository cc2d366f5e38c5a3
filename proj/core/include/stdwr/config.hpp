#pragma once

#include "stdwr/adaptivity.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace stdwr {

/// One experiment. Fields left out of the config file take preset defaults.
struct RunConfig {
    Preset preset = Preset::RotatingHill;
    double epsilon = 1.0;
    double delta0 = 0.0;
    double omega = 1.5;
    double theta_tau = 0.3;
    double theta_h = 0.3;
    int p = 1;
    int r = 0;
    int q = 2;
    int s = 0;
    TemporalMode mode = TemporalMode::hoRe;
    GoalKind goal = GoalKind::L2L2;
    int N = 25;
    int nx = 4;
    int ny = 4;
    int max_loops = 8;
    std::size_t max_dofs = 0;
    std::string out = "out";
    bool dump = false;

    [[nodiscard]] AdaptConfig adapt_config() const;
    [[nodiscard]] ProblemData problem() const;
    [[nodiscard]] SpaceTimeMesh initial_mesh() const;
    /// File stem identifying preset, epsilon and mode, e.g. "ex1_eps1e+00_hoRe".
    [[nodiscard]] std::string stem() const;
    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
};

/// Parse flat "key = value" text ('#' starts a comment). Unknown keys, repeated
/// keys and malformed values are errors; `preset` is required.
[[nodiscard]] RunConfig parse_config(const std::string& text);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// `text` with the lines of every key in `values` removed and "key = value" lines
/// appended; empty values only remove the key.
[[nodiscard]] std::string override_config(const std::string& text,
                                          const std::vector<std::pair<std::string, std::string>>& values);

/// Config text that parses back to `config`.
[[nodiscard]] std::string format_config(const RunConfig& config);

}  // namespace stdwr
