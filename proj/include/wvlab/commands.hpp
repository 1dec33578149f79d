#pragma once

#include <string>
#include <vector>

#include "wvlab/config.hpp"

namespace wvlab {

struct Artifact {
    std::string filename;
    std::string content;
};

struct CommandResult {
    std::vector<Artifact> artifacts;
    int status = 0;  // nonzero when validation checks failed
};

struct WeakValueRow {
    std::string observable;
    std::string region;
    cplx analytic;
    cplx grid;
    double abs_diff() const { return std::abs(analytic - grid); }
};

/// Presence, momentum and kinetic energy for regions g, h, the full line, the
/// packets f+ and f-, and the f+ + f- sums. Analytic values use idealized packet
/// projectors; grid values use sharp spatial intervals around each region
/// ([x0/2, 3x0/2] for g, [-x0/2, x0/2] for h). Packet rows are skipped when
/// f+ and f- overlap and carry no labels.
std::vector<WeakValueRow> weak_value_table(const RunConfig& config);

/// Scenario named in the config, tuned when the file asks for it.
ScenarioFile resolve_scenario(const RunConfig& config);

/// Probe selection for the pointer run: explicit amplitudes, or the two-state
/// probe reproducing the presence weak value of the target region.
ProbeSelection pointer_selection(const RunConfig& config);

CommandResult cmd_weak_values(const RunConfig& config);    // weak_values.csv
CommandResult cmd_interferometer(const RunConfig& config);  // interferometer.json
CommandResult cmd_trace_map(const RunConfig& config);      // trace_map.csv
CommandResult cmd_pointer(const RunConfig& config);        // pointer.json
CommandResult cmd_validate(const RunConfig& config);       // validate.json

}  // namespace wvlab
