#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wgfb/config.hpp"
#include "wgfb/experiments.hpp"
#include "wgfb/trajectory.hpp"

namespace wgfb {

using Meta = std::vector<std::pair<std::string, std::string>>;

/// Shortest form of printf("%.12g"): 12 significant digits, '.' decimal
/// point, exponent form only below 1e-4 or from 1e12.
std::string format_number(double v);

/// Provenance of a trajectory: parameters, pulse, adjusted grid, store size.
Meta trajectory_meta(const Trajectory& t);
Meta sweep_meta(const SweepResult& s);

/// `# meta: key=value` lines, then `t,population`, one row per sample,
/// LF line endings.
void write_trajectory_csv(std::ostream& os, const Trajectory& t, const Meta& extra = {});
/// {"meta": {...}, "t": [...], "population": [...]}
void write_trajectory_json(std::ostream& os, const Trajectory& t, const Meta& extra = {});

/// `# meta:` lines, then `width,tau,steady_state,converged` in row-major
/// cell order. steady_state is the final-window mean; converged is 0 or 1.
void write_sweep_csv(std::ostream& os, const SweepResult& s, const Meta& extra = {});
void write_sweep_json(std::ostream& os, const SweepResult& s, const Meta& extra = {});

/// Writes to `path` in the given format, creating parent directories.
/// Throws wgfb::Error when the file cannot be written.
void emit(const std::filesystem::path& path, const Trajectory& t, OutputFormat f, const Meta& extra = {});
void emit(const std::filesystem::path& path, const SweepResult& s, OutputFormat f, const Meta& extra = {});

}  // namespace wgfb
