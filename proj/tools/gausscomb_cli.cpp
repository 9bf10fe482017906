#include <gausscomb.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#ifndef GAUSSCOMB_PRESET_DIR_INSTALL
#define GAUSSCOMB_PRESET_DIR_INSTALL ""
#endif
#ifndef GAUSSCOMB_PRESET_DIR_SOURCE
#define GAUSSCOMB_PRESET_DIR_SOURCE ""
#endif

namespace fs = std::filesystem;
using namespace gausscomb;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Source {
    std::string config;
    std::string preset;
};

/// GAUSSCOMB_PRESET_DIR, then ./presets, then the installed and source-tree copies.
fs::path find_preset(const std::string& name) {
    std::vector<fs::path> dirs;
    if (const char* env = std::getenv("GAUSSCOMB_PRESET_DIR"); env && *env) dirs.emplace_back(env);
    dirs.emplace_back("presets");
    for (const char* d : {GAUSSCOMB_PRESET_DIR_INSTALL, GAUSSCOMB_PRESET_DIR_SOURCE})
        if (*d) dirs.emplace_back(d);
    const std::string file = name.ends_with(".toml") ? name : name + ".toml";
    for (const auto& d : dirs)
        if (fs::exists(d / file)) return d / file;
    std::string searched;
    for (const auto& d : dirs) searched += " " + d.string();
    throw config::ConfigError(0, "preset '" + name + "' not found in" + searched);
}

sweep::RunConfig load(const Source& src, std::optional<std::uint64_t> seed) {
    if (src.config.empty() == src.preset.empty())
        throw config::ConfigError(0, "give exactly one of a config path or --preset");
    const std::string path = src.preset.empty() ? src.config : find_preset(src.preset).string();
    sweep::RunConfig rc = sweep::load_config_file(path);
    if (seed) sweep::override_seed(rc, *seed);
    return rc;
}

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("config", src.config, "Scenario config file");
    cmd->add_option("--preset", src.preset, "Named preset (searched in GAUSSCOMB_PRESET_DIR, then defaults)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimode parametric comb simulator: steady-state entanglement and purity sweeps"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sweep::kVersion));

    Source src;
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;

    auto* run = app.add_subcommand("run", "Run every scenario point; writes results.csv, timings.csv, run.json");
    add_source(run, src);
    run->add_option("--out", out, "Output directory")->required();
    run->add_option("--seed", seed, "Override the master seed of every scenario");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* grid = app.add_subcommand("run-grid", "Heatmap sweep; writes grid.csv, equipower.csv, results.csv");
    add_source(grid, src);
    grid->add_option("--out", out, "Output directory")->required();
    grid->add_option("--seed", seed, "Override the master seed");
    grid->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Parse and check a config without solving");
    add_source(validate, src);

    std::string scenario_id;
    std::size_t point = 0;
    auto* graph = app.add_subcommand("export-graph", "Write the pump graph of one sweep point as DOT");
    add_source(graph, src);
    graph->add_option("--scenario", scenario_id, "Scenario name (default: first)");
    graph->add_option("--point", point, "Point index within the scenario");
    graph->add_option("--seed", seed, "Override the master seed");
    graph->add_option("--out", out, "DOT file (default: stdout)");

    std::string on_csv, off_csv, meta_path;
    std::vector<int> pair{-1, 1};
    auto* ingest = app.add_subcommand("ingest", "Covariance from pump-on/off quadrature samples");
    ingest->add_option("--on", on_csv, "Pump-on samples CSV")->required();
    ingest->add_option("--off", off_csv, "Pump-off samples CSV")->required();
    ingest->add_option("--meta", meta_path, "Metadata (key = value)")->required();
    ingest->add_option("--pair", pair, "Mode pair for the metrics")->expected(2);
    ingest->add_option("--out", out, "Write the covariance matrix here");

    double amplitude = 0.0;
    CalibrationCurve cal;
    auto* calibrate = app.add_subcommand("calibrate", "Convert an instrument pump amplitude to alpha / kappa");
    calibrate->add_option("--amplitude", amplitude, "Instrument amplitude")->required();
    calibrate->add_option("--critical", cal.critical_amplitude, "Amplitude at oscillation onset")->capture_default_str();
    calibrate->add_option("--kappa", cal.kappa, "Coupling rate")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto rc = load(src, seed);
            return sweep::run(rc, out, threads);
        }
        if (*grid) {
            const auto rc = load(src, seed);
            return sweep::run_grid(rc, out, threads);
        }
        if (*validate) {
            const auto rc = load(src, std::nullopt);
            std::size_t points = sweep::expand_points(rc).size();
            std::cout << "ok: " << rc.scenarios.size() << " scenario(s), " << points << " point(s)\n";
            return 0;
        }
        if (*graph) {
            const auto rc = load(src, seed);
            const auto points = sweep::expand_points(rc);
            std::size_t si = 0;
            if (!scenario_id.empty()) {
                while (si < rc.scenarios.size() && rc.scenarios[si].id != scenario_id) ++si;
                if (si == rc.scenarios.size()) throw config::ConfigError(0, "unknown scenario '" + scenario_id + "'");
            }
            for (const auto& p : points)
                if (p.scenario == si && p.index == point) {
                    const std::string dot =
                        export_graph_dot(scenario_adjacency(p.scenario_input), rc.scenarios[si].id + "_" + std::to_string(point));
                    if (out.empty()) {
                        std::cout << dot;
                    } else {
                        std::ofstream f(out);
                        if (!f) throw std::runtime_error("cannot write " + out);
                        f << dot;
                    }
                    return 0;
                }
            throw config::ConfigError(0, "scenario '" + rc.scenarios[si].id + "' has no point " + std::to_string(point));
        }
        if (*ingest) {
            const auto meta = load_sidecar(meta_path);
            const auto on = covariance_from_samples(load_record(on_csv, meta));
            const auto off_record = load_record(off_csv, meta);
            if (!(off_record.modes == on.modes)) throw std::invalid_argument("pump-on and pump-off files list different modes");
            const auto off = covariance_from_samples(off_record);
            const auto bg = background_subtract(on.sigma, off.sigma, on.modes, off_record.frequencies_hz,
                                                off_record.temperature_k);
            for (const auto* w : {&on.warnings, &off.warnings, &bg.warnings})
                for (const auto& msg : *w) std::cerr << "warning: " << msg << "\n";
            if (!out.empty()) save_covariance(out, bg.sigma);
            std::cout << "samples " << on.sample_count << ", modes " << on.modes.to_string() << "\n";
            std::cout << "purity_full " << sweep::fmt17(bg.physicality.physical ? purity(bg.sigma) : std::nan("")) << "\n";
            if (on.modes.contains(pair[0]) && on.modes.contains(pair[1]) && bg.physicality.physical) {
                const auto m = log_negativity(partial_trace(bg.sigma, std::vector<int>{pair[0], pair[1]}));
                std::cout << "log_negativity " << sweep::fmt17(m.log_negativity) << "\npurity_pair "
                          << sweep::fmt17(m.purity) << "\n";
            }
            return bg.physicality.physical ? 0 : 1;
        }
        if (*calibrate) {
            std::cout << sweep::fmt17(calibrate_pump_amplitude(amplitude, cal)) << "\n";
            return 0;
        }
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
