#pragma once

#include <gausscomb/config.hpp>
#include <gausscomb/scenario.hpp>
#include <gausscomb/seeding.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace gausscomb::sweep {

inline constexpr const char* kVersion = "0.1.0";

enum class PhaseMode { zero, random };

inline const char* to_string(PhaseMode p) { return p == PhaseMode::zero ? "zero" : "random"; }

/// One named family of sweep points. Rows are the cartesian product of
/// `n_pumps` and `added_amplitudes` in that nesting order.
struct ScenarioConfig {
    std::string id;
    Topology topology = Topology::symmetric;
    std::vector<int> n_pumps{1};
    double first_amplitude = 0.0;
    std::vector<double> added_amplitudes{0.0};
    PhaseMode phases = PhaseMode::zero;
    std::optional<std::uint64_t> seed;
    double theta = 0.0;
    double n_bar = 1.0;
    bool monitored = true;
    std::pair<int, int> pair{-1, 1};
    RiccatiOptions solver{};
    std::optional<double> experiment_ratio;  ///< α_E / α, metadata only
    int line = 0;
};

struct GridConfig {
    std::string scenario;
    std::string value = "log_negativity";  ///< or "purity"
    std::optional<double> equipower_power;  ///< default: first_amplitude²
    int line = 0;
};

struct RunConfig {
    std::string name;
    std::string source;
    std::vector<ScenarioConfig> scenarios;
    std::optional<GridConfig> grid;
};

// ---- parsing -------------------------------------------------------------

/// Angle as a number or as text like "pi/8", "2pi/7", "2*pi/7".
inline double parse_angle(const config::Value& v) {
    if (v.is_number()) return v.number();
    std::string s;
    for (char c : v.string())
        if (c != ' ' && c != '*') s += c;
    const auto pi_at = s.find("pi");
    if (pi_at == std::string::npos) {
        try {
            return parse_double(s);
        } catch (const std::exception&) {
            throw config::ConfigError(v.line, "cannot parse angle '" + v.string() + "'");
        }
    }
    try {
        const std::string num = s.substr(0, pi_at);
        const std::string rest = s.substr(pi_at + 2);
        double value = std::numbers::pi * (num.empty() ? 1.0 : parse_double(num));
        if (!rest.empty()) {
            if (rest[0] != '/') throw std::invalid_argument("bad");
            value /= parse_double(rest.substr(1));
        }
        return value;
    } catch (const std::exception&) {
        throw config::ConfigError(v.line, "cannot parse angle '" + v.string() + "'");
    }
}

/// Integer, or "a..b" inclusive range.
inline std::vector<int> parse_int_range(const config::Value& v) {
    if (v.is_number()) return {static_cast<int>(v.integer())};
    const std::string& s = v.string();
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw config::ConfigError(v.line, "expected an integer or \"a..b\"");
    try {
        const int a = std::stoi(s.substr(0, dots));
        const int b = std::stoi(s.substr(dots + 2));
        if (b < a) throw config::ConfigError(v.line, "empty range '" + s + "'");
        std::vector<int> out;
        for (int i = a; i <= b; ++i) out.push_back(i);
        return out;
    } catch (const config::ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw config::ConfigError(v.line, "malformed range '" + s + "'");
    }
}

/// Number, or "start:stop:count" inclusive linear grid.
inline std::vector<double> parse_real_range(const config::Value& v) {
    if (v.is_number()) return {v.number()};
    const std::string& s = v.string();
    std::vector<std::string> parts;
    std::size_t from = 0;
    for (;;) {
        const auto c = s.find(':', from);
        parts.push_back(s.substr(from, c == std::string::npos ? std::string::npos : c - from));
        if (c == std::string::npos) break;
        from = c + 1;
    }
    if (parts.size() != 3) throw config::ConfigError(v.line, "expected a number or \"start:stop:count\"");
    try {
        const double a = parse_double(parts[0]);
        const double b = parse_double(parts[1]);
        const long n = std::stol(parts[2]);
        if (n < 1) throw config::ConfigError(v.line, "range count must be positive");
        std::vector<double> out;
        for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
        return out;
    } catch (const config::ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw config::ConfigError(v.line, "malformed range '" + s + "'");
    }
}

namespace detail {

inline const std::set<std::string>& scenario_keys() {
    static const std::set<std::string> keys{
        "topology", "n_pumps", "first_amplitude", "added_amplitude", "phases", "seed", "theta", "n_bar",
        "monitored", "pair", "method", "tol", "hold", "time_budget", "max_steps", "experiment_ratio"};
    return keys;
}

inline void apply_scenario_keys(const config::Table& t, ScenarioConfig& s) {
    for (const auto& [key, v] : t.values)
        if (!scenario_keys().count(key)) throw config::ConfigError(v.line, "unknown key '" + key + "'");

    if (auto v = t.find("topology")) {
        if (v->string() == "symmetric")
            s.topology = Topology::symmetric;
        else if (v->string() == "asymmetric")
            s.topology = Topology::asymmetric;
        else
            throw config::ConfigError(v->line, "topology must be \"symmetric\" or \"asymmetric\"");
    }
    if (auto v = t.find("n_pumps")) s.n_pumps = parse_int_range(*v);
    if (auto v = t.find("first_amplitude")) s.first_amplitude = v->number();
    if (auto v = t.find("added_amplitude")) s.added_amplitudes = parse_real_range(*v);
    if (auto v = t.find("phases")) {
        if (v->string() == "zero")
            s.phases = PhaseMode::zero;
        else if (v->string() == "random")
            s.phases = PhaseMode::random;
        else
            throw config::ConfigError(v->line, "phases must be \"zero\" or \"random\"");
    }
    if (auto v = t.find("seed")) {
        if (v->integer() < 0) throw config::ConfigError(v->line, "seed must be nonnegative");
        s.seed = static_cast<std::uint64_t>(v->integer());
    }
    if (auto v = t.find("theta")) s.theta = parse_angle(*v);
    if (auto v = t.find("n_bar")) s.n_bar = v->number();
    if (auto v = t.find("monitored")) s.monitored = v->boolean();
    if (auto v = t.find("pair")) {
        const auto& a = v->array();
        if (a.size() != 2) throw config::ConfigError(v->line, "pair needs two mode labels");
        s.pair = {static_cast<int>(a[0].integer()), static_cast<int>(a[1].integer())};
    }
    if (auto v = t.find("method")) {
        const auto& m = v->string();
        if (m == "integrate")
            s.solver.method = RiccatiOptions::Method::integrate;
        else if (m == "newton")
            s.solver.method = RiccatiOptions::Method::newton;
        else if (m == "both")
            s.solver.method = RiccatiOptions::Method::both;
        else
            throw config::ConfigError(v->line, "method must be \"integrate\", \"newton\" or \"both\"");
    }
    if (auto v = t.find("tol")) s.solver.tol = v->number();
    if (auto v = t.find("hold")) s.solver.hold = static_cast<int>(v->integer());
    if (auto v = t.find("time_budget")) s.solver.time_budget = v->number();
    if (auto v = t.find("max_steps")) s.solver.max_steps = v->integer();
    if (auto v = t.find("experiment_ratio")) s.experiment_ratio = v->number();
}

inline int key_line(const config::Table& t, const char* key, int fallback) {
    auto v = t.find(key);
    return v ? v->line : fallback;
}

inline void validate_scenario(const ScenarioConfig& s, const config::Table& t) {
    const int max_pumps = kMaxSymmetricPumps;
    for (int n : s.n_pumps)
        if (n < 1 || n > max_pumps)
            throw config::ConfigError(key_line(t, "n_pumps", s.line), "n_pumps must lie in [1, 15]");
    auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
    if (!finite_nonneg(s.first_amplitude))
        throw config::ConfigError(key_line(t, "first_amplitude", s.line), "first_amplitude must be >= 0");
    for (double a : s.added_amplitudes)
        if (!finite_nonneg(a))
            throw config::ConfigError(key_line(t, "added_amplitude", s.line), "added_amplitude must be >= 0");
    if (!std::isfinite(s.theta) || s.theta < 0.0 || s.theta >= std::numbers::pi / 2)
        throw config::ConfigError(key_line(t, "theta", s.line), "theta must lie in [0, pi/2)");
    if (!(s.n_bar >= 1.0) || !std::isfinite(s.n_bar))
        throw config::ConfigError(key_line(t, "n_bar", s.line), "n_bar must be >= 1");
    if (s.phases == PhaseMode::random && !s.seed)
        throw config::ConfigError(key_line(t, "phases", s.line), "random phases need a seed");
    const ModeSet universe = universe_mode_set();
    if (s.pair.first == s.pair.second || !universe.contains(s.pair.first) || !universe.contains(s.pair.second))
        throw config::ConfigError(key_line(t, "pair", s.line), "pair must name two distinct modes in ±1..±43");
    if (!(s.solver.tol > 0.0)) throw config::ConfigError(key_line(t, "tol", s.line), "tol must be positive");
    if (s.solver.hold < 1) throw config::ConfigError(key_line(t, "hold", s.line), "hold must be >= 1");
    if (!(s.solver.time_budget > 0.0))
        throw config::ConfigError(key_line(t, "time_budget", s.line), "time_budget must be positive");
}

}  // namespace detail

/// Builds and validates a RunConfig. Every failure is a ConfigError carrying a line.
inline RunConfig load_config(const config::Document& doc, std::string source = {}) {
    RunConfig rc;
    rc.source = std::move(source);
    const config::Table* root = doc.table("");
    for (const auto& [key, v] : root->values) {
        if (key == "name")
            rc.name = v.string();
        else if (key != "description")
            throw config::ConfigError(v.line, "unknown top-level key '" + key + "'");
    }

    ScenarioConfig defaults;
    const config::Table* defaults_table = doc.table("defaults");
    if (defaults_table) detail::apply_scenario_keys(*defaults_table, defaults);

    for (const auto& [name, table] : doc.tables) {
        if (name.empty() || name == "defaults") continue;
        if (name == "grid") {
            GridConfig g;
            g.line = table.line;
            for (const auto& [key, v] : table.values) {
                if (key == "scenario")
                    g.scenario = v.string();
                else if (key == "value") {
                    g.value = v.string();
                    if (g.value != "log_negativity" && g.value != "purity")
                        throw config::ConfigError(v.line, "grid value must be \"log_negativity\" or \"purity\"");
                } else if (key == "equipower_power") {
                    g.equipower_power = v.number();
                    if (!(*g.equipower_power >= 0.0)) throw config::ConfigError(v.line, "equipower_power must be >= 0");
                } else
                    throw config::ConfigError(v.line, "unknown grid key '" + key + "'");
            }
            rc.grid = g;
            continue;
        }
        if (name.rfind("scenario.", 0) != 0)
            throw config::ConfigError(table.line, "unknown table [" + name + "]");
        ScenarioConfig s = defaults;
        s.id = name.substr(9);
        s.line = table.line;
        if (s.id.empty()) throw config::ConfigError(table.line, "scenario needs a name");
        detail::apply_scenario_keys(table, s);
        config::Table merged = defaults_table ? *defaults_table : config::Table{};
        for (const auto& kv : table.values) merged.values.insert_or_assign(kv.first, kv.second);
        merged.line = table.line;
        detail::validate_scenario(s, merged);
        rc.scenarios.push_back(std::move(s));
    }
    if (rc.scenarios.empty()) throw config::ConfigError(0, "config defines no [scenario.<name>] tables");
    if (rc.grid) {
        const bool found = std::any_of(rc.scenarios.begin(), rc.scenarios.end(),
                                       [&](const ScenarioConfig& s) { return s.id == rc.grid->scenario; });
        if (!found) throw config::ConfigError(rc.grid->line, "grid refers to unknown scenario '" + rc.grid->scenario + "'");
    }
    return rc;
}

inline RunConfig load_config_file(const std::string& path) { return load_config(config::parse_file(path), path); }

/// Replaces every scenario seed (random-phase scenarios only need one).
inline void override_seed(RunConfig& rc, std::uint64_t seed) {
    for (auto& s : rc.scenarios) s.seed = seed;
}

// ---- points --------------------------------------------------------------

struct SweepPoint {
    std::size_t scenario = 0;
    std::size_t index = 0;  ///< within the scenario
    int n_pumps = 1;
    double added_amplitude = 0.0;
    std::optional<std::uint64_t> seed;
    Scenario scenario_input;
};

/// Asymmetric pumps beyond the second carry a nominal half position that is
/// metadata only; the block model does not depend on it.
inline double asymmetric_offset(int pump_index) { return 2.0 + std::numbers::sqrt2 * (pump_index - 1); }

inline Scenario make_scenario(const ScenarioConfig& s, int n_pumps, double added_amplitude,
                              std::optional<std::uint64_t> seed) {
    Scenario out;
    out.topology = s.topology;
    out.theta = s.theta;
    out.n_bar = s.n_bar;
    out.monitored = s.monitored;
    out.pair = s.pair;
    out.solver = s.solver;
    std::vector<double> phases(static_cast<std::size_t>(n_pumps), 0.0);
    if (s.phases == PhaseMode::random) phases = random_phases(seed.value(), phases.size());
    const auto positions = standard_pump_positions(n_pumps);
    for (int k = 0; k < n_pumps; ++k) {
        double position = positions[static_cast<std::size_t>(k)];
        if (s.topology == Topology::asymmetric && k >= 2) position = asymmetric_offset(k);
        out.pumps.push_back({position, k == 0 ? s.first_amplitude : added_amplitude, phases[static_cast<std::size_t>(k)]});
    }
    return out;
}

inline std::vector<SweepPoint> expand_points(const RunConfig& rc) {
    std::vector<SweepPoint> points;
    for (std::size_t si = 0; si < rc.scenarios.size(); ++si) {
        const auto& s = rc.scenarios[si];
        std::size_t index = 0;
        for (int n : s.n_pumps)
            for (double a : s.added_amplitudes) {
                SweepPoint p;
                p.scenario = si;
                p.index = index;
                p.n_pumps = n;
                p.added_amplitude = a;
                if (s.phases == PhaseMode::random) p.seed = point_seed(*s.seed, index);
                p.scenario_input = make_scenario(s, n, a, p.seed);
                points.push_back(std::move(p));
                ++index;
            }
    }
    return points;
}

// ---- execution -----------------------------------------------------------

struct SweepResultRow {
    std::string scenario;
    std::size_t point = 0;
    Topology topology = Topology::symmetric;
    PhaseMode phase_mode = PhaseMode::zero;
    double theta = 0.0;
    double n_bar = 1.0;
    bool monitored = true;
    int n_pumps = 1;
    double first_amplitude = 0.0;
    double added_amplitude = 0.0;
    std::vector<double> alphas;
    std::vector<double> phases;
    std::optional<std::uint64_t> seed;
    ScenarioMetrics metrics;
    double wall_time_s = 0.0;
};

inline SweepResultRow evaluate_point(const RunConfig& rc, const SweepPoint& p) {
    const auto& s = rc.scenarios[p.scenario];
    SweepResultRow row;
    row.scenario = s.id;
    row.point = p.index;
    row.topology = s.topology;
    row.phase_mode = s.phases;
    row.theta = s.theta;
    row.n_bar = s.n_bar;
    row.monitored = s.monitored;
    row.n_pumps = p.n_pumps;
    row.first_amplitude = s.first_amplitude;
    row.added_amplitude = p.added_amplitude;
    row.seed = p.seed;
    for (const auto& pump : p.scenario_input.pumps) {
        row.alphas.push_back(pump.amplitude);
        row.phases.push_back(pump.phase);
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
        row.metrics = scenario_metrics(p.scenario_input);
    } catch (const std::exception& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.metrics = ScenarioMetrics{nan, nan, nan, nan, false, nan, SteadyStateMethod::lyapunov, e.what()};
        if (p.scenario_input.monitored) row.metrics.method = SteadyStateMethod::riccati_integrated;
    }
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

/// Evaluates points on `threads` workers pulling from a shared counter; the
/// output order is the input order.
inline std::vector<SweepResultRow> evaluate_points(const RunConfig& rc, const std::vector<SweepPoint>& points,
                                                   unsigned threads) {
    std::vector<SweepResultRow> rows(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) rows[i] = evaluate_point(rc, points[i]);
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(points.size(), 1))));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return rows;
}

// ---- output --------------------------------------------------------------

/// %.17g
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<double>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += fmt17(v[i]);
    }
    return s;
}

inline const char* kResultsHeader =
    "scenario,point,topology,phase_mode,theta,n_bar,monitored,n_pumps,first_amplitude,added_amplitude,alphas,seed,"
    "log_negativity,purity_pair,purity_full,nu_tilde_minus,converged,residual,method";

inline std::string results_csv(const std::vector<SweepResultRow>& rows) {
    std::string out = std::string(kResultsHeader) + "\n";
    for (const auto& r : rows) {
        out += r.scenario + ',' + std::to_string(r.point) + ',' + to_string(r.topology) + ',' + to_string(r.phase_mode) +
               ',' + fmt17(r.theta) + ',' + fmt17(r.n_bar) + ',' + (r.monitored ? "true" : "false") + ',' +
               std::to_string(r.n_pumps) + ',' + fmt17(r.first_amplitude) + ',' + fmt17(r.added_amplitude) + ',' +
               join(r.alphas, ';') + ',' + (r.seed ? std::to_string(*r.seed) : std::string()) + ',' +
               fmt17(r.metrics.log_negativity) + ',' + fmt17(r.metrics.purity_pair) + ',' +
               fmt17(r.metrics.purity_full) + ',' + fmt17(r.metrics.nu_tilde_minus) + ',' +
               (r.metrics.converged ? "true" : "false") + ',' + fmt17(r.metrics.residual) + ',' +
               gausscomb::to_string(r.metrics.method) + '\n';
    }
    return out;
}

inline std::string timings_csv(const std::vector<SweepResultRow>& rows) {
    std::string out = "scenario,point,wall_time_s\n";
    for (const auto& r : rows) out += r.scenario + ',' + std::to_string(r.point) + ',' + fmt17(r.wall_time_s) + '\n';
    return out;
}

inline nlohmann::json scenario_json(const ScenarioConfig& s) {
    nlohmann::json j;
    j["id"] = s.id;
    j["topology"] = to_string(s.topology);
    j["n_pumps"] = s.n_pumps;
    j["first_amplitude"] = s.first_amplitude;
    j["added_amplitudes"] = s.added_amplitudes;
    j["phases"] = to_string(s.phases);
    j["seed"] = s.seed ? nlohmann::json(*s.seed) : nlohmann::json(nullptr);
    j["theta"] = s.theta;
    j["n_bar"] = s.n_bar;
    j["monitored"] = s.monitored;
    j["pair"] = {s.pair.first, s.pair.second};
    j["solver"] = {{"method", to_string(s.solver.method)},   {"tol", s.solver.tol},
                   {"hold", s.solver.hold},                  {"time_budget", s.solver.time_budget},
                   {"max_steps", s.solver.max_steps},        {"rtol", s.solver.rtol},
                   {"atol", s.solver.atol},                  {"agreement_tol", s.solver.agreement_tol}};
    j["experiment_ratio"] = s.experiment_ratio ? nlohmann::json(*s.experiment_ratio) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json run_json(const RunConfig& rc, const std::vector<SweepResultRow>& rows, unsigned threads) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION);
    j["name"] = rc.name;
    j["source"] = rc.source;
    j["threads"] = threads;
    j["seed_scheme"] = "splitmix64: point seed = SplitMix64(master + index*0x9E3779B97F4A7C15).next()";
    j["scenarios"] = nlohmann::json::array();
    for (const auto& s : rc.scenarios) j["scenarios"].push_back(scenario_json(s));
    if (rc.grid) {
        j["grid"] = {{"scenario", rc.grid->scenario}, {"value", rc.grid->value}};
        j["grid"]["equipower_power"] =
            rc.grid->equipower_power ? nlohmann::json(*rc.grid->equipower_power) : nlohmann::json(nullptr);
    }
    j["points"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json p = {{"scenario", r.scenario}, {"point", r.point}, {"n_pumps", r.n_pumps},
                            {"alphas", r.alphas},     {"phases", r.phases}, {"converged", r.metrics.converged}};
        p["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
        if (!r.metrics.diagnostic.empty()) p["diagnostic"] = r.metrics.diagnostic;
        j["points"].push_back(std::move(p));
    }
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

inline bool all_converged(const std::vector<SweepResultRow>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const SweepResultRow& r) { return r.metrics.converged; });
}

/// Writes results.csv, timings.csv and run.json. Returns 0 when every point
/// converged, 1 otherwise.
inline int run(const RunConfig& rc, const std::filesystem::path& out_dir, unsigned threads) {
    std::filesystem::create_directories(out_dir);
    const auto rows = evaluate_points(rc, expand_points(rc), threads);
    write_text(out_dir / "results.csv", results_csv(rows));
    write_text(out_dir / "timings.csv", timings_csv(rows));
    write_text(out_dir / "run.json", run_json(rc, rows, threads).dump(2) + "\n");
    return all_converged(rows) ? 0 : 1;
}

// ---- grid ----------------------------------------------------------------

/// Added-pump amplitude keeping P = Σ|α_k|²/N fixed with the first pump at α₁:
/// α(N) = √((N P − α₁²) / (N − 1)). Empty when no real solution exists.
inline std::optional<double> equipower_amplitude(int n_pumps, double first_amplitude, double power) {
    if (n_pumps < 2) return std::nullopt;
    const double rad = (n_pumps * power - first_amplitude * first_amplitude) / (n_pumps - 1);
    if (rad < 0.0) return std::nullopt;
    return std::sqrt(rad);
}

struct GridOutput {
    std::vector<SweepResultRow> grid_rows;
    std::vector<SweepResultRow> equipower_rows;
    std::string grid_csv;
    std::string equipower_csv;
};

inline GridOutput compute_grid(const RunConfig& rc, unsigned threads) {
    if (!rc.grid) throw config::ConfigError(0, "run-grid needs a [grid] table");
    const auto& g = *rc.grid;
    std::size_t si = 0;
    while (rc.scenarios[si].id != g.scenario) ++si;
    const ScenarioConfig& s = rc.scenarios[si];

    RunConfig single = rc;
    single.scenarios = {s};
    auto points = expand_points(single);
    const std::size_t grid_count = points.size();

    const double power = g.equipower_power.value_or(s.first_amplitude * s.first_amplitude);
    for (int n : s.n_pumps) {
        std::optional<double> a = n == 1 ? std::optional<double>(0.0) : equipower_amplitude(n, s.first_amplitude, power);
        if (!a) continue;
        SweepPoint p;
        p.scenario = 0;
        p.index = points.size();
        p.n_pumps = n;
        p.added_amplitude = *a;
        if (s.phases == PhaseMode::random) p.seed = point_seed(*s.seed, p.index);
        p.scenario_input = make_scenario(s, n, *a, p.seed);
        points.push_back(std::move(p));
    }

    auto rows = evaluate_points(single, points, threads);
    GridOutput out;
    out.grid_rows.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(grid_count));
    out.equipower_rows.assign(rows.begin() + static_cast<std::ptrdiff_t>(grid_count), rows.end());

    auto value_of = [&](const SweepResultRow& r) {
        return g.value == "purity" ? r.metrics.purity_pair : r.metrics.log_negativity;
    };
    out.grid_csv = "n_pumps";
    for (double a : s.added_amplitudes) out.grid_csv += ',' + fmt17(a);
    out.grid_csv += '\n';
    std::size_t k = 0;
    for (int n : s.n_pumps) {
        out.grid_csv += std::to_string(n);
        for (std::size_t j = 0; j < s.added_amplitudes.size(); ++j) out.grid_csv += ',' + fmt17(value_of(out.grid_rows[k++]));
        out.grid_csv += '\n';
    }
    out.equipower_csv = "n_pumps,added_amplitude,power,log_negativity,purity_pair,converged\n";
    for (const auto& r : out.equipower_rows)
        out.equipower_csv += std::to_string(r.n_pumps) + ',' + fmt17(r.added_amplitude) + ',' + fmt17(power) + ',' +
                             fmt17(r.metrics.log_negativity) + ',' + fmt17(r.metrics.purity_pair) + ',' +
                             (r.metrics.converged ? "true" : "false") + '\n';
    return out;
}

/// Writes grid.csv, equipower.csv, results.csv (all evaluated points),
/// timings.csv and run.json.
inline int run_grid(const RunConfig& rc, const std::filesystem::path& out_dir, unsigned threads) {
    std::filesystem::create_directories(out_dir);
    const GridOutput g = compute_grid(rc, threads);
    std::vector<SweepResultRow> all = g.grid_rows;
    all.insert(all.end(), g.equipower_rows.begin(), g.equipower_rows.end());
    write_text(out_dir / "grid.csv", g.grid_csv);
    write_text(out_dir / "equipower.csv", g.equipower_csv);
    write_text(out_dir / "results.csv", results_csv(all));
    write_text(out_dir / "timings.csv", timings_csv(all));
    write_text(out_dir / "run.json", run_json(rc, all, threads).dump(2) + "\n");
    return all_converged(all) ? 0 : 1;
}

}  // namespace gausscomb::sweep
