// cintlab: scenario runs, validation suites and parameter sweeps.
#include <cint/cint.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

using namespace cint;
namespace fs = std::filesystem;

struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name + ": " + e.what());
    }
}

std::vector<std::string> expand_methods(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& item : in) {
        std::stringstream ss(item);
        std::string m;
        while (std::getline(ss, m, ',')) {
            if (m == "all") {
                for (const auto& a : all_methods())
                    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
            } else if (std::find(all_methods().begin(), all_methods().end(), m) == all_methods().end()) {
                throw StageError("arguments: unknown method '" + m + "'");
            } else if (std::find(out.begin(), out.end(), m) == out.end()) {
                out.push_back(m);
            }
        }
    }
    return out;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> v;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw StageError("arguments: bad number '" + tok + "' in --values");
        v.push_back(x);
    }
    if (v.empty()) throw StageError("arguments: --values is empty");
    return v;
}

// Scene from --config or --scenario; returns the scenario label used for the output directory.
std::pair<Scene, std::string> pick_scene(const std::string& config, const std::string& scenario) {
    if (!config.empty() && !scenario.empty()) throw StageError("arguments: give --config or --scenario, not both");
    if (!config.empty()) return {stage("config", [&] { return load_scene(config); }), "custom"};
    std::string name = scenario.empty() ? "fig2" : scenario;
    if (name == "custom") throw StageError("arguments: scenario 'custom' needs --config");
    return {stage("config", [&] { return preset_scene(name); }), name};
}

void print_peaks(const PipelineResult& res) {
    for (const auto& [m, rep] : res.peaks) {
        std::cout << m << ":";
        for (std::size_t i = 0; i < std::min<std::size_t>(5, rep.peaks.size()); ++i)
            std::cout << ' ' << rep.peaks[i].location << " (" << rep.peaks[i].value << ")";
        std::cout << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SAR random-media two-point CINT imaging lab"};
    app.require_subcommand(1);

    std::string config, scenario, out_dir = "out", in_dir, suite, axis, values_csv, out_file;
    std::uint64_t seed = 0;
    int realizations = 20;
    std::vector<std::string> methods = {"all"}, sweep_methods = {"sar,ci,sp,op"};
    double h_est = 0, matrix_dy = 0;

    auto* ds = app.add_subcommand("derive-scales", "print the derived scales of a scene as JSON");
    ds->add_option("--config", config, "scene JSON")->check(CLI::ExistingFile);
    ds->add_option("--scenario", scenario, "fig1|fig2|fig3|fig4");

    auto* sim = app.add_subcommand("simulate", "synthesize one record into <out>/<scenario>/");
    sim->add_option("--config", config, "scene JSON")->check(CLI::ExistingFile);
    sim->add_option("--scenario", scenario, "fig1|fig2|fig3|fig4");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--out", out_dir, "output root");

    auto* img = app.add_subcommand("image", "compute images for a simulated record");
    img->add_option("--in", in_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);
    img->add_option("--method", methods, "sar|ci|sp|op|pr|all (comma separated or repeated)");
    img->add_option("--h-est", h_est, "OP band parameter h_est (default: h if homogeneous, else 2)");
    img->add_option("--matrix-dy", matrix_dy, "two-point matrix grid spacing (default h/3)");

    auto* run = app.add_subcommand("run", "simulate and image in one step");
    run->add_option("--config", config, "scene JSON")->check(CLI::ExistingFile);
    run->add_option("--scenario", scenario, "fig1|fig2|fig3|fig4");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--out", out_dir, "output root");
    run->add_option("--method", methods, "sar|ci|sp|op|pr|all");
    run->add_option("--h-est", h_est, "OP band parameter h_est");

    auto* val = app.add_subcommand("validate", "run a validation suite; JSON report, exit 1 on failure");
    val->add_option("--suite", suite, "moments|spectral|fourier|stability")->required();
    val->add_option("--seed", seed, "seed")->default_val(7);

    auto* sw = app.add_subcommand("sweep", "ensemble sweep over one parameter; CSV table");
    sw->add_option("--axis", axis, "X|sigma_tau|sigma_W")->required();
    sw->add_option("--values", values_csv, "comma-separated values")->required();
    sw->add_option("--realizations", realizations, "realizations per value")->default_val(20);
    sw->add_option("--config", config, "scene JSON")->check(CLI::ExistingFile);
    sw->add_option("--scenario", scenario, "base scenario (default fig2)");
    sw->add_option("--seed", seed, "master seed");
    sw->add_option("--method", sweep_methods, "methods scored for peak errors (default sar,ci,sp,op)");
    sw->add_option("--out", out_file, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineSettings ps;
        ps.h_est = h_est;
        ps.matrix_dy = matrix_dy;

        if (*ds) {
            auto [s, name] = pick_scene(config, scenario);
            Scales sc = stage("derive_scales", [&] { return derive_scales(s); });
            nlohmann::json j = scales_to_json(sc);
            j["scenario"] = name;
            std::cout << j.dump(2) << '\n';
        } else if (*sim) {
            auto [s, name] = pick_scene(config, scenario);
            if (!config.empty() && !sim->count("--seed")) seed = s.seed;
            s.seed = seed;
            Record rec = stage("simulate", [&] { return simulate(s, seed); });
            fs::path dir = stage("write", [&] { return write_simulation(out_dir, name, rec, seed); });
            std::cout << dir.string() << '\n';
        } else if (*img) {
            nlohmann::json man;
            Record rec = stage("load", [&] { return load_simulation(in_dir, &man); });
            auto ms = expand_methods(methods);
            std::uint64_t master = man.at("seeds").at("master").get<std::uint64_t>();
            PipelineResult res = stage("image", [&] { return compute_images(rec, ms, ps, std::nullopt, master); });
            stage("write", [&] {
                write_images(in_dir, res, man);
                return 0;
            });
            print_peaks(res);
        } else if (*run) {
            auto [s, name] = pick_scene(config, scenario);
            if (!config.empty() && !run->count("--seed")) seed = s.seed;
            s.seed = seed;
            auto ms = expand_methods(methods);
            PipelineResult res = stage("run", [&, &s = s, &name = name] {
                return run_scenario(name, s, seed, out_dir, ms, ps);
            });
            std::cout << (fs::path(out_dir) / name).string() << '\n';
            print_peaks(res);
        } else if (*val) {
            if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
                throw StageError("arguments: unknown suite '" + suite + "' (field 'suite')");
            SuiteReport rep = stage("validate", [&] { return run_suite(suite, seed); });
            std::cout << rep.to_json().dump(2) << '\n';
            return rep.pass() ? 0 : 1;
        } else if (*sw) {
            auto [s, name] = pick_scene(config, scenario);
            auto vals = parse_values(values_csv);
            SweepSettings st;
            st.methods = expand_methods(sweep_methods);
            st.seed = seed;
            st.pipeline = ps;
            auto rows = stage("sweep", [&, &s = s] { return sweep(s, axis, vals, realizations, st); });
            std::string csv = sweep_csv(rows, st.methods);
            if (out_file.empty()) std::cout << csv;
            else stage("write", [&] {
                io::atomic_write(out_file, csv);
                return 0;
            });
        }
    } catch (const std::exception& e) {
        std::cerr << "cintlab: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
