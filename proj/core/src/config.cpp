#include "wgfb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace wgfb {

std::string to_string(Mode m) {
    switch (m) {
    case Mode::sweep: return "sweep";
    case Mode::benchmark: return "benchmark";
    case Mode::oracle_compare: return "oracle-compare";
    default: return "run";
    }
}

std::string ConfigDiagnostic::str() const {
    std::ostringstream os;
    if (line > 0)
        os << "line " << line << ": ";
    else
        os << "config: ";
    if (!key.empty()) os << key << ": ";
    os << message;
    return os.str();
}

namespace {

std::string join(const std::vector<ConfigDiagnostic>& d) {
    std::string s;
    for (const auto& x : d) {
        if (!s.empty()) s += '\n';
        s += x.str();
    }
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigDiagnostic> d) : Error(join(d)), diags_(std::move(d)) {}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end) return std::nullopt;
    return v;
}

// A number, optionally times pi: "0.5", "pi", "2pi", "2*pi", "-1.5 * pi".
std::optional<double> parse_angle(std::string s) {
    std::erase(s, ' ');
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        std::string f = s.substr(0, s.size() - 2);
        if (!f.empty() && f.back() == '*') f.pop_back();
        double k = 1.0;
        if (f == "-") {
            k = -1.0;
        } else if (!f.empty()) {
            auto v = parse_double(f);
            if (!v) return std::nullopt;
            k = *v;
        }
        return k * std::numbers::pi;
    }
    return parse_double(s);
}

std::optional<long long> parse_int(const std::string& s) {
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(const std::string& s) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    return std::nullopt;
}

std::optional<std::vector<double>> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_double(trim(item));
        if (!v) return std::nullopt;
        out.push_back(*v);
    }
    if (out.empty()) return std::nullopt;
    return out;
}

struct Entry {
    std::string value;
    std::size_t line;
};

class Parser {
public:
    Parser(Mode mode, std::filesystem::path base) : base_(std::move(base)) { cfg_.mode = mode; }

    RunConfig parse(std::string_view text) {
        read_lines(text);
        apply_keys();
        // constraint checks still run; keys that already failed are not reported twice
        std::set<std::string> failed;
        for (const auto& d : diags_) failed.insert(d.key);
        const std::size_t first = diags_.size();
        validate();
        diags_.erase(std::remove_if(diags_.begin() + static_cast<std::ptrdiff_t>(first), diags_.end(),
                                    [&](const ConfigDiagnostic& d) { return failed.count(d.key) > 0; }),
                     diags_.end());
        if (!diags_.empty()) {
            std::stable_sort(diags_.begin(), diags_.end(),
                             [](const ConfigDiagnostic& a, const ConfigDiagnostic& b) { return a.line < b.line; });
            throw ConfigError(diags_);
        }
        return cfg_;
    }

private:
    void error(std::size_t line, std::string key, std::string msg) {
        diags_.push_back({line, std::move(key), std::move(msg)});
    }
    std::size_t line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }
    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    void read_lines(std::string_view text) {
        std::string section;
        std::size_t ln = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++ln;
            std::string line = trim(raw);
            if (ln == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line = trim(line.substr(3));
            for (std::size_t i = 0; i < line.size(); ++i) {
                const bool starts = i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t';
                if ((line[i] == '#' || line[i] == ';') && starts) {
                    line = trim(line.substr(0, i));
                    break;
                }
            }
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    error(ln, "", "malformed section header");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) error(ln, "", "empty section name");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                error(ln, "", "expected key = value");
                continue;
            }
            std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                error(ln, "", "missing key before '='");
                continue;
            }
            if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
            if (auto it = entries_.find(key); it != entries_.end()) {
                error(ln, key, "duplicate key (first set on line " + std::to_string(it->second.line) + ")");
                continue;
            }
            entries_[key] = {value, ln};
        }
    }

    using Setter = std::function<std::optional<std::string>(const std::string&)>;

    static Setter number(double& dst) {
        return [&dst](const std::string& v) -> std::optional<std::string> {
            auto x = parse_double(v);
            if (!x || !std::isfinite(*x)) return "expected a number, got '" + v + "'";
            dst = *x;
            return std::nullopt;
        };
    }

    void apply_keys() {
        auto& s = cfg_.system;
        auto& sw = cfg_.sweep;
        std::optional<std::string> initial, kind, family, pulse_file;
        std::optional<double> t0, tD, mu, sigma, gp;
        std::optional<double> wmin, wmax, tmin, tmax;
        std::optional<long long> wcount, tcount;

        auto opt_number = [](std::optional<double>& o) -> Setter {
            return [&o](const std::string& v) -> std::optional<std::string> {
                auto x = parse_double(v);
                if (!x || !std::isfinite(*x)) return "expected a number, got '" + v + "'";
                o = *x;
                return std::nullopt;
            };
        };
        auto count = [](std::optional<long long>& o) -> Setter {
            return [&o](const std::string& v) -> std::optional<std::string> {
                auto x = parse_int(v);
                if (!x) return "expected an integer, got '" + v + "'";
                if (*x < 1) return "must be at least 1";
                o = *x;
                return std::nullopt;
            };
        };
        auto word = [](std::optional<std::string>& o) -> Setter {
            return [&o](const std::string& v) -> std::optional<std::string> {
                if (v.empty()) return "empty value";
                o = v;
                return std::nullopt;
            };
        };
        auto boolean = [](bool& dst) -> Setter {
            return [&dst](const std::string& v) -> std::optional<std::string> {
                auto b = parse_bool(v);
                if (!b) return "expected true or false, got '" + v + "'";
                dst = *b;
                return std::nullopt;
            };
        };

        bool markov = false, force_deph = false;
        std::optional<std::string> integrator, contraction, format, mode;

        const std::map<std::string, Setter> table = {
            {"mode", word(mode)},
            {"system.gamma", number(s.gamma)},
            {"system.tau", number(s.tau)},
            {"system.phi",
             [&](const std::string& v) -> std::optional<std::string> {
                 auto x = parse_angle(v);
                 if (!x || !std::isfinite(*x)) return "expected a number or a multiple of pi, got '" + v + "'";
                 s.phi = *x;
                 return std::nullopt;
             }},
            {"system.gammaPD", number(s.gamma_pd)},
            {"system.nPhotons",
             [&](const std::string& v) -> std::optional<std::string> {
                 auto x = parse_int(v);
                 if (!x) return "expected an integer, got '" + v + "'";
                 s.n_photons = static_cast<int>(std::clamp<long long>(*x, -1, 1000));
                 return std::nullopt;
             }},
            {"system.initial", word(initial)},
            {"system.feedback", boolean(s.feedback)},
            {"pulse.kind", word(kind)},
            {"pulse.t0", opt_number(t0)},
            {"pulse.tD", opt_number(tD)},
            {"pulse.mu", opt_number(mu)},
            {"pulse.sigma", opt_number(sigma)},
            {"pulse.gammaPulse", opt_number(gp)},
            {"pulse.file", word(pulse_file)},
            {"grid.dt", number(cfg_.dt)},
            {"grid.horizon", number(cfg_.horizon)},
            {"run.integrator", word(integrator)},
            {"run.contraction", word(contraction)},
            {"run.dephasingPath", boolean(force_deph)},
            {"run.steadyWindow", number(cfg_.run.steady_window)},
            {"run.steadyRelTol", number(cfg_.run.steady_rel_tol)},
            {"sweep.family", word(family)},
            {"sweep.widths",
             [&](const std::string& v) -> std::optional<std::string> {
                 auto l = parse_list(v);
                 if (!l) return "expected a comma-separated list of numbers";
                 sw.widths = *l;
                 return std::nullopt;
             }},
            {"sweep.taus",
             [&](const std::string& v) -> std::optional<std::string> {
                 auto l = parse_list(v);
                 if (!l) return "expected a comma-separated list of numbers";
                 sw.taus = *l;
                 return std::nullopt;
             }},
            {"sweep.widthMin", opt_number(wmin)},
            {"sweep.widthMax", opt_number(wmax)},
            {"sweep.widthCount", count(wcount)},
            {"sweep.tauMin", opt_number(tmin)},
            {"sweep.tauMax", opt_number(tmax)},
            {"sweep.tauCount", count(tcount)},
            {"sweep.settle", number(sw.settle)},
            {"sweep.maxDt", number(sw.max_dt)},
            {"sweep.stepsPerTau", number(sw.steps_per_tau)},
            {"sweep.relTol", number(sw.rel_tol)},
            {"oracle.nBins",
             [&](const std::string& v) -> std::optional<std::string> {
                 auto l = parse_list(v);
                 if (!l) return "expected an integer or a comma-separated list";
                 cfg_.oracle_bins.clear();
                 for (double b : *l) {
                     if (b != std::floor(b) || b < 4) return "bin counts must be integers >= 4";
                     cfg_.oracle_bins.push_back(static_cast<std::size_t>(b));
                 }
                 return std::nullopt;
             }},
            {"output.path", [&](const std::string& v) -> std::optional<std::string> {
                 cfg_.output_path = v;
                 return std::nullopt;
             }},
            {"output.format", word(format)},
        };

        for (const auto& [key, e] : entries_) {
            auto it = table.find(key);
            if (it == table.end()) {
                error(e.line, key, "unknown key");
                continue;
            }
            if (auto msg = it->second(e.value)) error(e.line, key, *msg);
        }

        auto choice = [&](const std::optional<std::string>& v, const std::string& key,
                          std::initializer_list<const char*> allowed) -> int {
            if (!v) return -1;
            int i = 0;
            std::string list;
            for (const char* a : allowed) {
                if (*v == a) return i;
                list += (i ? ", " : "") + std::string(a);
                ++i;
            }
            error(line_of(key), key, "expected one of " + list + ", got '" + *v + "'");
            return -2;
        };

        if (int m = choice(mode, "mode", {"run", "sweep", "benchmark", "oracle-compare"}); m >= 0) {
            const Mode from_file = static_cast<Mode>(m);
            if (from_file != cfg_.mode)
                error(line_of("mode"), "mode",
                      "config is for '" + *mode + "' but was given to '" + to_string(cfg_.mode) + "'");
        }
        const int ini = choice(initial, "system.initial", {"excited_vacuum", "ground_with_pulse"});
        if (ini >= 0) s.initial = static_cast<InitialState>(ini == 0 ? 1 : 0);
        if (ini == -1) s.initial = s.n_photons == 0 ? InitialState::excited_vacuum : InitialState::ground_with_pulse;
        if (int i = choice(integrator, "run.integrator", {"hierarchy", "markov"}); i >= 0) markov = i == 1;
        if (int c = choice(contraction, "run.contraction", {"factored", "direct"}); c >= 0)
            cfg_.run.hierarchy.contraction = c == 0 ? Contraction::factored : Contraction::direct;
        if (int f = choice(format, "output.format", {"csv", "json"}); f >= 0)
            cfg_.format = f == 0 ? OutputFormat::csv : OutputFormat::json;
        cfg_.run.markov = markov;
        cfg_.run.hierarchy.force_dephasing_path = force_deph;

        // pulse
        const int k = choice(kind, "pulse.kind", {"rectangular", "gaussian", "exponential", "tabulated", "none"});
        auto unused = [&](const std::optional<double>& o, const char* key) {
            if (o) error(line_of(key), key, "not used by pulse.kind = " + *kind);
        };
        switch (k) {
        case 0:
            cfg_.pulse = RectangularPulse{t0.value_or(0.0), tD.value_or(2.0)};
            unused(mu, "pulse.mu");
            unused(sigma, "pulse.sigma");
            unused(gp, "pulse.gammaPulse");
            break;
        case 1:
            cfg_.pulse = GaussianPulse{mu.value_or(4.0), sigma.value_or(1.0)};
            unused(t0, "pulse.t0");
            unused(tD, "pulse.tD");
            unused(gp, "pulse.gammaPulse");
            break;
        case 2:
            cfg_.pulse = ExponentialPulse{t0.value_or(0.0), gp.value_or(1.0)};
            unused(mu, "pulse.mu");
            unused(sigma, "pulse.sigma");
            unused(tD, "pulse.tD");
            break;
        case 3:
            if (!pulse_file) {
                error(line_of("pulse.kind"), "pulse.file", "required for pulse.kind = tabulated");
            } else {
                const std::filesystem::path path = base_.empty() ? std::filesystem::path(*pulse_file)
                                                                 : base_ / *pulse_file;
                std::ifstream in(path);
                if (!in) {
                    error(line_of("pulse.file"), "pulse.file", "cannot open '" + path.string() + "'");
                } else {
                    try {
                        cfg_.pulse = read_pulse_table(in);
                    } catch (const Error& ex) {
                        error(line_of("pulse.file"), "pulse.file", ex.what());
                    }
                }
            }
            break;
        default: break;
        }
        cfg_.has_pulse = k >= 0 && k <= 3;
        if (pulse_file && k != 3) error(line_of("pulse.file"), "pulse.file", "only used with pulse.kind = tabulated");

        // sweep axes
        auto axis = [&](std::vector<double>& dst, const char* list_key, std::optional<double> lo,
                        std::optional<double> hi, std::optional<long long> n, const char* lo_key) {
            if (!lo && !hi && !n) return;
            if (has(list_key)) {
                error(line_of(lo_key), lo_key, std::string("conflicts with ") + list_key);
                return;
            }
            if (!lo || !hi || !n) {
                error(line_of(lo_key), lo_key, "range needs Min, Max and Count");
                return;
            }
            dst = linspace(*lo, *hi, static_cast<std::size_t>(*n));
        };
        axis(sw.widths, "sweep.widths", wmin, wmax, wcount, wmin ? "sweep.widthMin" : "sweep.widthCount");
        axis(sw.taus, "sweep.taus", tmin, tmax, tcount, tmin ? "sweep.tauMin" : "sweep.tauCount");
        if (int f = choice(family, "sweep.family", {"rectangular", "gaussian", "exponential"}); f >= 0)
            sw.family = static_cast<PulseFamily>(f);
    }

    void validate() {
        auto& s = cfg_.system;
        for (const auto& v : s.violations()) {
            std::size_t ln = line_of(v.key);
            if (ln == 0 && v.key == "system.initial") ln = line_of("system.nPhotons");
            if (ln == 0 && v.key == "system.feedback") ln = line_of("system.tau");
            error(ln, v.key, v.message);
        }
        const bool needs_pulse = s.initial == InitialState::ground_with_pulse && cfg_.mode != Mode::sweep;
        if (needs_pulse && !cfg_.has_pulse)
            error(line_of("pulse.kind"), "pulse.kind", "a pulse is required when the emitter starts in the ground state");
        if (cfg_.has_pulse) {
            try {
                Pulse p(cfg_.pulse);
            } catch (const Error& ex) {
                const std::string msg = ex.what();
                std::string key = "pulse.kind";
                if (msg.find("duration") != std::string::npos) key = "pulse.tD";
                if (msg.find("sigma") != std::string::npos) key = "pulse.sigma";
                if (msg.find("rate") != std::string::npos) key = "pulse.gammaPulse";
                if (msg.find("tabulated") != std::string::npos) key = "pulse.file";
                error(line_of(key), key, msg);
            }
        }
        if (!(cfg_.run.steady_rel_tol > 0.0)) error(line_of("run.steadyRelTol"), "run.steadyRelTol", "must be > 0");
        if (cfg_.run.steady_window < 0.0) error(line_of("run.steadyWindow"), "run.steadyWindow", "must be >= 0");
        if (cfg_.run.steady_window > 0.0 && s.feedback && cfg_.run.steady_window < 2.0 * s.tau)
            error(line_of("run.steadyWindow"), "run.steadyWindow", "must be at least 2 tau");
        if (cfg_.run.markov && s.gamma_pd > 0.0)
            error(line_of("run.integrator"), "run.integrator", "the Markov reference does not model dephasing");

        if (cfg_.mode == Mode::sweep) {
            validate_sweep();
        } else {
            try {
                cfg_.grid = build_grid(cfg_.dt, cfg_.horizon, s.tau);
                if (cfg_.grid.dt_adjusted()) {
                    std::ostringstream os;
                    os.precision(12);
                    os << "adjusted from " << cfg_.dt << " to " << cfg_.grid.dt
                       << " so that tau/2 is a whole number of steps";
                    cfg_.warnings.push_back({line_of("grid.dt"), "grid.dt", os.str()});
                }
            } catch (const Error& ex) {
                const std::string msg = ex.what();
                std::string key = "grid.dt";
                if (msg.find("horizon") != std::string::npos) key = "grid.horizon";
                if (msg.find("system.tau") != std::string::npos) key = "system.tau";
                if (key != "system.tau") error(line_of(key), key, msg);
            }
        }
        if (cfg_.mode == Mode::benchmark || cfg_.mode == Mode::oracle_compare) {
            if (s.gamma_pd > 0.0)
                error(line_of("system.gammaPD"), "system.gammaPD", "the time-bin oracle does not model dephasing");
            if (!s.feedback && s.initial != InitialState::excited_vacuum)
                error(line_of("system.feedback"), "system.feedback",
                      "without a mirror the oracle only models the excited emitter");
        }
    }

    void validate_sweep() {
        auto& sw = cfg_.sweep;
        const auto& s = cfg_.system;
        if (sw.widths.empty())
            error(0, "sweep.widths", "missing (give sweep.widths or widthMin/widthMax/widthCount)");
        if (sw.taus.empty()) error(0, "sweep.taus", "missing (give sweep.taus or tauMin/tauMax/tauCount)");
        const std::string tkey = has("sweep.taus") ? "sweep.taus" : "sweep.tauMin";
        const std::string wkey = has("sweep.widths") ? "sweep.widths" : "sweep.widthMin";
        for (double t : sw.taus)
            if (!(t > 0.0)) {
                error(line_of(tkey), tkey, "every tau must be positive");
                break;
            }
        for (double w : sw.widths)
            if (!(w > 0.0)) {
                error(line_of(wkey), wkey, "every width must be positive");
                break;
            }
        if (s.n_photons == 3) error(line_of("system.nPhotons"), "system.nPhotons", "sweeps support nPhotons <= 2");
        if (!s.feedback) error(line_of("system.feedback"), "system.feedback", "sweeps need the mirror");
        if (!(sw.max_dt > 0.0)) error(line_of("sweep.maxDt"), "sweep.maxDt", "must be > 0");
        if (!(sw.steps_per_tau >= 2.0)) error(line_of("sweep.stepsPerTau"), "sweep.stepsPerTau", "must be >= 2");
        if (!(sw.settle > 0.0)) error(line_of("sweep.settle"), "sweep.settle", "must be > 0");
        if (!(sw.rel_tol > 0.0)) error(line_of("sweep.relTol"), "sweep.relTol", "must be > 0");
        const double m = s.phi / (2.0 * std::numbers::pi);
        if (std::abs(m - std::round(m)) > 1e-9)
            cfg_.warnings.push_back({line_of("system.phi"), "system.phi",
                                     "steady-state maps assume phi = 2 pi m; other phases decay"});
        sw.base = s;
    }

    std::filesystem::path base_;
    RunConfig cfg_;
    std::map<std::string, Entry> entries_;
    std::vector<ConfigDiagnostic> diags_;
};

}  // namespace

RunConfig parse_config(std::string_view text, Mode mode, const std::filesystem::path& base_dir) {
    return Parser(mode, base_dir).parse(text);
}

RunConfig load_config(const std::filesystem::path& path, Mode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), mode, path.parent_path());
}

TabulatedPulse read_pulse_table(std::istream& in) {
    TabulatedPulse t;
    std::string line;
    std::size_t ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream is(s);
        double time = 0, re = 0, im = 0;
        if (!(is >> time >> re)) throw Error("pulse table line " + std::to_string(ln) + ": expected time and re");
        if (!(is >> im)) im = 0.0;
        std::string rest;
        if (is >> rest) throw Error("pulse table line " + std::to_string(ln) + ": too many columns");
        t.samples.emplace_back(time, cplx(re, im));
    }
    return t;
}

}  // namespace wgfb
