#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "wvlab/grid.hpp"
#include "wvlab/interferometer.hpp"
#include "wvlab/pointer.hpp"

namespace wvlab {

/// Pointer ensemble settings. Either `target` names a region of the composed
/// selection (g, h, f+, f-) whose presence weak value the probe reproduces, or
/// `selection` gives the probe amplitudes directly.
struct PointerRun {
    PointerConfig pointer;
    std::uint64_t samples = 0;
    std::string target;
    std::optional<ProbeSelection> selection;

    void validate() const;
    bool operator==(const PointerRun&) const = default;
};

/// Sampling lattice for the weak-trace map.
struct TraceRun {
    double t_min = 0.0, t_max = 0.0;
    std::size_t nt = 0;
    double x_min = 0.0, x_max = 0.0;
    std::size_t nx = 0;
    std::string detector = "d2";

    std::vector<double> times() const;
    std::vector<double> positions() const;

    void validate() const;
    bool operator==(const TraceRun&) const = default;
};

struct RunConfig {
    PacketRecipe recipe;
    PhysicalConstants consts;
    std::optional<GridSpec> grid;
    std::string scenario_file;  // resolved against the config file directory
    std::string out_dir;
    std::uint64_t seed = 1;
    bool labeled = false;
    std::optional<PointerRun> pointer;
    std::optional<TraceRun> trace;

    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Sections [recipe], [constants] are mandatory with every key present.
/// Optional: [grid], [scenario], [run], [pointer], [trace].
/// Errors carry the offending line number.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical echo; parse_run_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& config);

struct ScenarioFile {
    Scenario scenario;
    bool tune = false;
};

/// One [scenario] block followed by repeated [element] blocks. Recipe and
/// constants are supplied by the run configuration.
ScenarioFile parse_scenario(std::string_view text, const PacketRecipe& recipe, const PhysicalConstants& consts);
ScenarioFile load_scenario(const std::filesystem::path& path, const PacketRecipe& recipe,
                           const PhysicalConstants& consts);
std::string to_scenario_text(const ScenarioFile& file);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace wvlab
