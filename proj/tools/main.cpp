// wgfb: emitter in front of a mirror driven by few-photon pulses.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wgfb/config.hpp"
#include "wgfb/experiments.hpp"
#include "wgfb/numeric.hpp"
#include "wgfb/oracle.hpp"
#include "wgfb/output.hpp"

namespace fs = std::filesystem;
using namespace wgfb;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Output location: config output.path, else <config stem>.<ext> next to the
// config. WGFB_OUTPUT_DIR replaces the directory part.
fs::path output_path(const RunConfig& cfg, const fs::path& config_path, const std::string& suffix = "") {
    const std::string ext = cfg.format == OutputFormat::json ? ".json" : ".csv";
    fs::path p = cfg.output_path.empty() ? config_path.parent_path() / (config_path.stem().string() + ext)
                                         : fs::path(cfg.output_path);
    if (!cfg.output_path.empty() && p.is_relative()) p = config_path.parent_path() / p;
    if (!suffix.empty()) p = p.parent_path() / (p.stem().string() + suffix + p.extension().string());
    if (const char* dir = std::getenv("WGFB_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p.filename();
    return p;
}

void print_warnings(const RunConfig& cfg) {
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w.str() << '\n';
}

void print_store(const StoreReport& r) {
    std::cout << "  families " << r.families << ", elements/step " << r.elements_per_step << ", memory "
              << format_number(static_cast<double>(r.bytes) / (1024.0 * 1024.0)) << " MiB\n";
}

Trajectory hierarchy_run(const RunConfig& cfg) {
    return run_scenario(cfg.system, Pulse(cfg.pulse), cfg.grid, cfg.run);
}

Trajectory oracle_run(const RunConfig& cfg, std::size_t bins) {
    oracle::TimeBinOptions o;
    o.horizon = cfg.grid.horizon();
    o.n_bins = bins;
    return oracle::brute_force_timebin(cfg.system, Pulse(cfg.pulse), o);
}

int cmd_run(const fs::path& path) {
    const RunConfig cfg = load_config(path, Mode::run);
    print_warnings(cfg);
    const auto t0 = Clock::now();
    const Trajectory tr = hierarchy_run(cfg);
    const double secs = seconds_since(t0);
    const fs::path out = output_path(cfg, path);
    emit(out, tr, cfg.format);
    std::cout << "run: " << tr.integrator << ", " << tr.grid.n_steps << " steps of dt " << format_number(tr.grid.dt)
              << " in " << format_number(secs) << " s\n";
    print_store(tr.store);
    std::cout << "  P(T) = " << format_number(tr.population.back()) << ", steady state "
              << (tr.steady_state ? format_number(*tr.steady_state) : std::string("not detected")) << '\n'
              << "  wrote " << out.string() << '\n';
    return 0;
}

int cmd_sweep(const fs::path& path) {
    const RunConfig cfg = load_config(path, Mode::sweep);
    print_warnings(cfg);
    const auto t0 = Clock::now();
    const SweepResult r = sweep_steady_state(cfg.sweep);
    const double secs = seconds_since(t0);
    const fs::path out = output_path(cfg, path);
    emit(out, r, cfg.format);
    std::size_t conv = 0;
    for (const auto& c : r.cells) conv += c.converged;
    std::cout << "sweep: " << r.spec.widths.size() << " x " << r.spec.taus.size() << " cells (" << conv
              << " converged) in " << format_number(secs) << " s\n  wrote " << out.string() << '\n';
    return 0;
}

nlohmann::ordered_json discrepancy_json(const Discrepancy& d) {
    nlohmann::ordered_json j;
    j["sup"] = d.sup;
    j["l2"] = d.l2;
    j["peak"] = d.peak;
    j["supRelativeToPeak"] = d.peak > 0 ? d.sup / d.peak : 0.0;
    j["tMax"] = d.t_max;
    j["points"] = d.points;
    return j;
}

void print_discrepancy(const std::string& what, const Discrepancy& d) {
    std::cout << "  " << what << ": sup " << format_number(d.sup) << " (" << format_number(100.0 * d.sup / d.peak)
              << "% of peak), L2 " << format_number(d.l2) << '\n';
}

void write_summary(const fs::path& p, const nlohmann::ordered_json& j) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << j.dump(1) << '\n';
}

int cmd_benchmark(const fs::path& path) {
    const RunConfig cfg = load_config(path, Mode::benchmark);
    print_warnings(cfg);
    const std::size_t bins = cfg.oracle_bins.front();
    auto t0 = Clock::now();
    const Trajectory h = hierarchy_run(cfg);
    const double th = seconds_since(t0);
    t0 = Clock::now();
    const Trajectory o = oracle_run(cfg, bins);
    const double to = seconds_since(t0);
    const Discrepancy d = compare_trajectories(h, o);

    const fs::path ph = output_path(cfg, path, "_hierarchy"), po = output_path(cfg, path, "_oracle");
    emit(ph, h, cfg.format);
    emit(po, o, cfg.format, {{"oracle.nBins", std::to_string(bins)}});
    nlohmann::ordered_json j;
    j["hierarchy"] = {{"integrator", h.integrator}, {"dt", h.grid.dt}, {"seconds", th}, {"file", ph.filename().string()}};
    j["oracle"] = {{"nBins", bins}, {"binDt", o.grid.dt}, {"seconds", to}, {"file", po.filename().string()}};
    j["discrepancy"] = discrepancy_json(d);
    const fs::path ps = output_path(cfg, path, "_summary").replace_extension(".json");
    write_summary(ps, j);

    std::cout << "benchmark: hierarchy " << h.integrator << " dt " << format_number(h.grid.dt) << " ("
              << format_number(th) << " s), oracle " << bins << " bins of " << format_number(o.grid.dt) << " ("
              << format_number(to) << " s)\n";
    print_store(h.store);
    print_discrepancy("hierarchy vs oracle", d);
    std::cout << "  wrote " << ph.string() << ", " << po.string() << ", " << ps.string() << '\n';
    return 0;
}

int cmd_oracle_compare(const fs::path& path) {
    const RunConfig cfg = load_config(path, Mode::oracle_compare);
    print_warnings(cfg);
    const Trajectory h = hierarchy_run(cfg);
    const fs::path ph = output_path(cfg, path, "_hierarchy");
    emit(ph, h, cfg.format);
    std::cout << "oracle-compare: hierarchy " << h.integrator << " dt " << format_number(h.grid.dt) << '\n';
    nlohmann::ordered_json j;
    j["hierarchy"] = {{"integrator", h.integrator}, {"dt", h.grid.dt}, {"file", ph.filename().string()}};
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t bins : cfg.oracle_bins) {
        const Trajectory o = oracle_run(cfg, bins);
        const Discrepancy d = compare_trajectories(h, o);
        const fs::path po = output_path(cfg, path, "_oracle" + std::to_string(bins));
        emit(po, o, cfg.format, {{"oracle.nBins", std::to_string(bins)}});
        print_discrepancy(std::to_string(bins) + " bins (binDt " + format_number(o.grid.dt) + ")", d);
        nlohmann::ordered_json r = discrepancy_json(d);
        r["nBins"] = bins;
        r["binDt"] = o.grid.dt;
        r["file"] = po.filename().string();
        rows.push_back(r);
    }
    j["oracle"] = rows;
    if (cfg.system.initial == InitialState::excited_vacuum) {
        // closed forms for the bare emitter
        Trajectory exact = h;
        exact.source = Source::oracle;
        for (std::size_t i = 0; i < exact.times.size(); ++i) {
            const double t = exact.times[i];
            exact.population[i] = cfg.system.feedback
                                      ? std::norm(oracle::vacuum_feedback_exact(cfg.system.gamma, cfg.system.tau,
                                                                                cfg.system.phi, t))
                                      : oracle::ww_decay(cfg.system.gamma, t);
        }
        const Discrepancy d = compare_trajectories(exact, h);
        print_discrepancy("hierarchy vs closed form", d);
        j["closedForm"] = discrepancy_json(d);
    }
    const fs::path ps = output_path(cfg, path, "_summary").replace_extension(".json");
    write_summary(ps, j);
    std::cout << "  wrote " << ps.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emitter in a semi-infinite waveguide with delayed feedback, driven by n-photon pulses"};
    app.require_subcommand(1);
    unsigned threads = 1;
    app.add_option("--threads", threads, "worker threads for the integrators")->check(CLI::PositiveNumber);

    fs::path run_cfg, sweep_cfg, bench_cfg, cmp_cfg;
    auto* run = app.add_subcommand("run", "integrate one configuration and write its trajectory");
    run->add_option("config", run_cfg)->required()->check(CLI::ExistingFile);
    auto* sweep = app.add_subcommand("sweep", "steady-state map over pulse width and delay");
    sweep->add_option("config", sweep_cfg)->required()->check(CLI::ExistingFile);
    auto* bench = app.add_subcommand("benchmark", "hierarchy vs time-bin oracle on one scenario, with timings");
    bench->add_option("config", bench_cfg)->required()->check(CLI::ExistingFile);
    auto* cmp = app.add_subcommand("oracle-compare", "hierarchy vs oracle over several bin counts");
    cmp->add_option("config", cmp_cfg)->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);
    set_thread_count(threads);
    try {
        if (*run) return cmd_run(run_cfg);
        if (*sweep) return cmd_sweep(sweep_cfg);
        if (*bench) return cmd_benchmark(bench_cfg);
        return cmd_oracle_compare(cmp_cfg);
    } catch (const ConfigError& e) {
        for (const auto& d : e.diagnostics()) std::cerr << "error: " << d.str() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
