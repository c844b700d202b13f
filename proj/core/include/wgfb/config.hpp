#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wgfb/experiments.hpp"
#include "wgfb/params.hpp"
#include "wgfb/pulse.hpp"
#include "wgfb/timegrid.hpp"
#include "wgfb/types.hpp"

namespace wgfb {

enum class Mode { run, sweep, benchmark, oracle_compare };
enum class OutputFormat { csv, json };

std::string to_string(Mode m);

struct ConfigDiagnostic {
    std::size_t line = 0;  // 1-based; 0 when the key was not in the file
    std::string key;       // e.g. "system.nPhotons"
    std::string message;
    std::string str() const;
};

/// All violations found in one config, in file order.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigDiagnostic> d);
    const std::vector<ConfigDiagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<ConfigDiagnostic> diags_;
};

struct RunConfig {
    Mode mode = Mode::run;
    SystemParams system;
    PulseSpec pulse = RectangularPulse{0.0, 2.0};
    bool has_pulse = false;
    double dt = 0.01;
    double horizon = 10.0;
    TimeGrid grid;  // built from dt, horizon, tau (not for sweeps)
    RunOptions run;
    SweepSpec sweep;
    std::vector<std::size_t> oracle_bins{200};
    std::string output_path;  // empty: derived from the config name
    OutputFormat format = OutputFormat::csv;
    std::vector<ConfigDiagnostic> warnings;
};

/// Parses `key = value` lines, optionally grouped under `[section]`
/// headers or written as `section.key = value`. `#` and `;` start
/// comments. Relative `pulse.file` paths resolve against `base_dir`.
/// Throws ConfigError listing every violation.
RunConfig parse_config(std::string_view text, Mode mode = Mode::run,
                       const std::filesystem::path& base_dir = {});

/// Reads a file and parses it relative to its directory.
RunConfig load_config(const std::filesystem::path& path, Mode mode = Mode::run);

/// Two or three whitespace- or comma-separated columns: time, re[, im].
TabulatedPulse read_pulse_table(std::istream& in);

}  // namespace wgfb
