#include "wgfb/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <variant>

#include "json.hpp"

namespace wgfb {

std::string format_number(double v) {
    if (v == 0.0) return "0";  // also folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

// Value rounded to what the CSV shows, so JSON and CSV carry the same numbers.
double rounded(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

std::string yes_no(bool b) { return b ? "true" : "false"; }

void pulse_meta(Meta& m, const PulseSpec& spec) {
    m.emplace_back("pulse.kind", pulse_kind(spec));
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RectangularPulse>) {
                m.emplace_back("pulse.t0", format_number(p.t0));
                m.emplace_back("pulse.tD", format_number(p.duration));
            } else if constexpr (std::is_same_v<P, GaussianPulse>) {
                m.emplace_back("pulse.mu", format_number(p.mu));
                m.emplace_back("pulse.sigma", format_number(p.sigma));
            } else if constexpr (std::is_same_v<P, ExponentialPulse>) {
                m.emplace_back("pulse.t0", format_number(p.t0));
                m.emplace_back("pulse.gammaPulse", format_number(p.rate));
            } else {
                m.emplace_back("pulse.samples", std::to_string(p.samples.size()));
            }
        },
        spec);
}

void system_meta(Meta& m, const SystemParams& p) {
    m.emplace_back("system.gamma", format_number(p.gamma));
    m.emplace_back("system.tau", format_number(p.tau));
    m.emplace_back("system.phi", format_number(p.phi));
    m.emplace_back("system.gammaPD", format_number(p.gamma_pd));
    m.emplace_back("system.nPhotons", std::to_string(p.n_photons));
    m.emplace_back("system.initial", to_string(p.initial));
    m.emplace_back("system.feedback", yes_no(p.feedback));
}

void write_meta_lines(std::ostream& os, const Meta& m) {
    for (const auto& [k, v] : m) os << "# meta: " << k << '=' << v << '\n';
}

nlohmann::ordered_json meta_json(const Meta& m) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

Meta joined(Meta a, const Meta& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

template <class W>
void write_file(const std::filesystem::path& path, W&& writer) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    writer(out);
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

Meta trajectory_meta(const Trajectory& t) {
    Meta m;
    m.emplace_back("format", "wgfb-trajectory-1");
    m.emplace_back("source", to_string(t.source));
    m.emplace_back("integrator", t.integrator);
    system_meta(m, t.params);
    if (t.params.initial == InitialState::ground_with_pulse) pulse_meta(m, t.pulse);
    m.emplace_back("grid.dt", format_number(t.grid.dt));
    m.emplace_back("grid.dtRequested", format_number(t.grid.requested_dt));
    m.emplace_back("grid.dtAdjusted", yes_no(t.grid.dt_adjusted()));
    m.emplace_back("grid.horizon", format_number(t.grid.horizon()));
    m.emplace_back("grid.steps", std::to_string(t.grid.n_steps));
    m.emplace_back("store.families", std::to_string(t.store.families));
    m.emplace_back("store.elementsPerStep", std::to_string(t.store.elements_per_step));
    m.emplace_back("store.bytes", std::to_string(t.store.bytes));
    m.emplace_back("steadyState", t.steady_state ? format_number(*t.steady_state) : "none");
    m.emplace_back("rows", std::to_string(t.times.size()));
    return m;
}

Meta sweep_meta(const SweepResult& s) {
    Meta m;
    m.emplace_back("format", "wgfb-sweep-1");
    m.emplace_back("sweep.family", to_string(s.spec.family));
    m.emplace_back("sweep.widthAxis", s.spec.family == PulseFamily::rectangular ? "tD"
                                      : s.spec.family == PulseFamily::gaussian  ? "sigma"
                                                                                : "Gamma/GammaPulse");
    m.emplace_back("sweep.widths", std::to_string(s.spec.widths.size()));
    m.emplace_back("sweep.taus", std::to_string(s.spec.taus.size()));
    m.emplace_back("sweep.settle", format_number(s.spec.settle));
    m.emplace_back("sweep.maxDt", format_number(s.spec.max_dt));
    m.emplace_back("sweep.stepsPerTau", format_number(s.spec.steps_per_tau));
    m.emplace_back("sweep.relTol", format_number(s.spec.rel_tol));
    m.emplace_back("sweep.window", "5tau");
    SystemParams p = s.spec.base;
    system_meta(m, p);
    m.erase(std::remove_if(m.begin(), m.end(), [](const auto& kv) { return kv.first == "system.tau"; }), m.end());
    std::size_t converged = 0;
    for (const auto& c : s.cells) converged += c.converged;
    m.emplace_back("cells", std::to_string(s.cells.size()));
    m.emplace_back("cellsConverged", std::to_string(converged));
    return m;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t, const Meta& extra) {
    write_meta_lines(os, joined(trajectory_meta(t), extra));
    os << "t,population\n";
    for (std::size_t i = 0; i < t.times.size(); ++i)
        os << format_number(t.times[i]) << ',' << format_number(t.population[i]) << '\n';
}

void write_trajectory_json(std::ostream& os, const Trajectory& t, const Meta& extra) {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(joined(trajectory_meta(t), extra));
    std::vector<double> ts, ps;
    for (double v : t.times) ts.push_back(rounded(v));
    for (double v : t.population) ps.push_back(rounded(v));
    j["t"] = ts;
    j["population"] = ps;
    os << j.dump(1) << '\n';
}

void write_sweep_csv(std::ostream& os, const SweepResult& s, const Meta& extra) {
    write_meta_lines(os, joined(sweep_meta(s), extra));
    os << "width,tau,steady_state,converged\n";
    for (const auto& c : s.cells)
        os << format_number(c.width) << ',' << format_number(c.tau) << ',' << format_number(c.value) << ','
           << (c.converged ? 1 : 0) << '\n';
}

void write_sweep_json(std::ostream& os, const SweepResult& s, const Meta& extra) {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(joined(sweep_meta(s), extra));
    auto cells = nlohmann::ordered_json::array();
    for (const auto& c : s.cells) {
        nlohmann::ordered_json x;
        x["width"] = rounded(c.width);
        x["tau"] = rounded(c.tau);
        x["steady_state"] = rounded(c.value);
        x["converged"] = c.converged;
        x["dt"] = rounded(c.dt);
        x["horizon"] = rounded(c.horizon);
        cells.push_back(x);
    }
    j["cells"] = cells;
    os << j.dump(1) << '\n';
}

void emit(const std::filesystem::path& path, const Trajectory& t, OutputFormat f, const Meta& extra) {
    write_file(path, [&](std::ostream& os) {
        if (f == OutputFormat::json)
            write_trajectory_json(os, t, extra);
        else
            write_trajectory_csv(os, t, extra);
    });
}

void emit(const std::filesystem::path& path, const SweepResult& s, OutputFormat f, const Meta& extra) {
    write_file(path, [&](std::ostream& os) {
        if (f == OutputFormat::json)
            write_sweep_json(os, s, extra);
        else
            write_sweep_csv(os, s, extra);
    });
}

}  // namespace wgfb
