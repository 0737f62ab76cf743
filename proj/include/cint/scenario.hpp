#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cint_core.hpp"
#include "common.hpp"
#include "fourier.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "phase_retrieval.hpp"
#include "random_medium.hpp"
#include "scene.hpp"
#include "spectral.hpp"
#include "synthesis.hpp"

namespace cint {

inline const std::vector<std::string>& all_methods() {
    static const std::vector<std::string> m = {"sar", "ci", "sp", "op", "pr"};
    return m;
}

inline Scene base_scene() {
    Scene s;
    s.L = 2.0e4;
    s.a = s.L / (2 * pi);
    s.ell = s.a / 2;
    s.N = 400;
    s.y_min = 0;
    s.y_max = 245;
    s.grid_dy = 0.03;
    return s;
}

inline std::vector<Reflector> reflectors_three() { return {{133, 2.2}, {123, 1.3}, {143, 0.8}}; }
inline std::vector<Reflector> reflectors_five() {
    return {{93.7, 2}, {101, 2}, {130, 3}, {159, 1.5}, {196, 2}};
}
inline std::vector<Reflector> reflectors_signed() { return {{93.7, 2}, {123, -1}, {152, 1.5}}; }

inline Scene preset_scene(const std::string& name) {
    Scene s = base_scene();
    if (name == "fig1") {
        s.reflectors = reflectors_three();
    } else if (name == "fig2") {
        s.reflectors = reflectors_three();
        s.sigma_tau = 3.1;
        s.sigma_W = 0.1;
    } else if (name == "fig3") {
        s.reflectors = reflectors_five();
        s.sigma_tau = 3.1;
        s.sigma_W = 0.1;
    } else if (name == "fig4") {
        s.reflectors = reflectors_signed();
        s.sigma_tau = 4.0;
        s.sigma_W = 0.1;
    } else {
        throw Error("unknown scenario '" + name + "' (field 'name')");
    }
    return s;
}

inline bool is_scenario_name(const std::string& n) {
    return n == "fig1" || n == "fig2" || n == "fig3" || n == "fig4" || n == "custom";
}

struct PipelineSettings {
    double matrix_dy = 0;   // 0: h/3
    double h_est = 0;       // 0: h for a homogeneous scene, else 2
    int pr_points = 1024;
    int pr_iterations = 2000;
    PowerSettings power{};
    OptimizeSettings optimize{};
    double peak_threshold = 0.1;
};

struct PipelineResult {
    Scene scene;
    Scales scales;
    RVec display_grid, matrix_grid;
    std::map<std::string, ImageProfile> images;
    std::map<std::string, PeakReport> peaks;
    std::optional<TwoPointMatrix> M;
    std::optional<FourierProducts> products;
    std::optional<EigenResult> eig;
    std::optional<PhaseEstimate> phase;
    std::optional<PRState> pr;
    double h_est = 0;
};

inline double default_h_est(const Scene& s, const Scales& sc) { return s.sigma_tau > 0 ? 2.0 : sc.h; }

// PR target modulus on FFT bins of a periodic grid covering the domain.
inline RVec pr_target(const CMat& M, const RVec& mgrid, const RVec& pr_grid, double h, double band) {
    double dy = pr_grid[1] - pr_grid[0];
    RVec kap = fft_kappa(pr_grid.size(), dy);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < kap.size(); ++i)
        if (std::abs(kap[i]) < band) idx.push_back(i);
    RVec kb(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) kb[static_cast<Eigen::Index>(i)] = kap[idx[i]];
    RVec mod = modulus_spectrum(M, mgrid, kb, h);
    RVec t = RVec::Zero(kap.size());
    for (std::size_t i = 0; i < idx.size(); ++i) t[idx[i]] = mod[static_cast<Eigen::Index>(i)];
    return t;
}

// Gaussian bumps of std w at the true reflector positions.
inline ImageProfile render_truth(const RVec& grid, const std::vector<Reflector>& refl, double w) {
    RVec v = RVec::Zero(grid.size());
    for (const auto& r : refl)
        v += (r.rho * (-(grid.array() - r.z).square() / (2 * w * w)).exp()).matrix();
    return make_image(grid, v, "truth");
}

inline PipelineResult compute_images(const Record& rec, const std::vector<std::string>& methods,
                                     const PipelineSettings& ps = {}, std::optional<double> X_override = {},
                                     std::uint64_t seed = 0) {
    PipelineResult out;
    out.scene = rec.scene;
    out.scales = derive_scales(rec.scene, X_override);
    const Scene& s = out.scene;
    const Scales& sc = out.scales;
    std::set<std::string> want(methods.begin(), methods.end());
    for (const auto& m : want)
        if (std::find(all_methods().begin(), all_methods().end(), m) == all_methods().end())
            throw Error("unknown method '" + m + "'");
    out.display_grid = s.display_grid();
    out.matrix_grid = uniform_grid(s.y_min, s.y_max, ps.matrix_dy > 0 ? ps.matrix_dy : sc.h / 3);
    out.h_est = ps.h_est > 0 ? ps.h_est : default_h_est(s, sc);

    if (want.count("sar")) out.images["sar"] = sar_image(rec, out.display_grid);
    bool need_matrix = want.count("sp") || want.count("op") || want.count("pr");
    if (need_matrix) out.M = two_point_cint(rec, sc.X, out.matrix_grid, true);
    std::optional<TwoPointMatrix> Md;
    if (want.count("ci") || want.count("sp")) Md = two_point_cint(rec, sc.X, out.display_grid, false);
    if (want.count("ci")) out.images["ci"] = cint_image(*Md);
    if (want.count("sp")) {
        PowerSettings pw = ps.power;
        pw.seed = mix_seed(seed, 11);
        out.eig = power_leading(*out.M, pw);
        out.images["sp"] = sp_image(*out.eig, *out.M, &*Md);
    }
    if (want.count("op")) {
        out.products = fourier_products(out.M->matrix(), out.matrix_grid, sc.H, sc.h, out.h_est, s.y_max - s.y_min);
        out.phase = optimize_phase(*out.products, RVec::Zero(out.products->size()), ps.optimize);
        out.images["op"] = op_image(*out.products, out.phase->theta, out.display_grid);
    }
    if (want.count("pr")) {
        double D = s.y_max - s.y_min;
        RVec pg(ps.pr_points);
        for (int i = 0; i < ps.pr_points; ++i) pg[i] = s.y_min + D * i / ps.pr_points;
        PRSettings prs;
        prs.iterations = ps.pr_iterations;
        prs.band = 3.0 / sc.h;
        RVec target = pr_target(out.M->matrix(), out.matrix_grid, pg, sc.h, prs.band);
        out.pr = pr_reconstruct(pg, target, prs, mix_seed(seed, 13));
        out.images["pr"] = pr_image(*out.pr, out.display_grid);
    }
    for (auto& [k, img] : out.images) out.peaks[k] = find_peaks(img, ps.peak_threshold);
    return out;
}

struct RealizationSeeds {
    std::uint64_t master = 0, screen = 0, noise = 0;
};

inline RealizationSeeds realization_seeds(std::uint64_t master) {
    return {master, mix_seed(master, 1), mix_seed(master, 2)};
}

inline Record simulate(const Scene& s, std::uint64_t seed) {
    auto rs = realization_seeds(seed);
    return synthesize_record(s, sample_screen(s, rs.screen), rs.noise);
}

inline nlohmann::json peaks_json(const PeakReport& r) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : r.peaks) a.push_back({{"location", p.location}, {"value", p.value}, {"width", p.width}});
    return {{"threshold", r.threshold}, {"peaks", a}};
}

inline nlohmann::json record_manifest(const std::string& scenario, const Record& rec, std::uint64_t seed) {
    auto rs = realization_seeds(seed);
    nlohmann::json j;
    j["scenario"] = scenario;
    j["scene"] = scene_to_json(rec.scene);
    j["scales"] = scales_to_json(derive_scales(rec.scene));
    j["seeds"] = {{"master", rs.master}, {"screen", rec.screen_seed}, {"noise", rec.noise_seed}};
    j["sigma_W_abs"] = rec.sigma_W_abs;
    j["sensor_span"] = kSensorSpan;
    j["grids"] = {{"display_dy", rec.scene.grid_dy}};
    return j;
}

namespace fs = std::filesystem;

inline fs::path write_simulation(const fs::path& outdir, const std::string& scenario, const Record& rec,
                                 std::uint64_t seed) {
    fs::path dir = outdir / scenario;
    fs::create_directories(dir);
    io::write_record(dir / "record.bin", rec.r);
    write_screen_csv((dir / "screen.csv").string(), rec.scene, sample_screen(rec.scene, rec.screen_seed));
    io::write_json(dir / "manifest.json", record_manifest(scenario, rec, seed));
    return dir;
}

inline Record load_simulation(const fs::path& dir, nlohmann::json* manifest_out = nullptr) {
    nlohmann::json man = io::read_json(dir / "manifest.json");
    Record rec;
    rec.scene = scene_from_json(man.at("scene"));
    rec.r = io::read_record(dir / "record.bin");
    if (rec.r.size() != rec.scene.N) throw Error("record length differs from N");
    rec.screen_seed = man.at("seeds").at("screen").get<std::uint64_t>();
    rec.noise_seed = man.at("seeds").at("noise").get<std::uint64_t>();
    rec.sigma_W_abs = man.value("sigma_W_abs", 0.0);
    if (manifest_out) *manifest_out = man;
    return rec;
}

inline void write_images(const fs::path& dir, const PipelineResult& res, nlohmann::json& man) {
    man["scales"] = scales_to_json(res.scales);
    man["h_est"] = res.h_est;
    man["grids"]["matrix_dy"] = res.matrix_grid.size() > 1 ? res.matrix_grid[1] - res.matrix_grid[0] : 0.0;
    man["grids"]["matrix_points"] = res.matrix_grid.size();
    man["grids"]["display_points"] = res.display_grid.size();
    for (const auto& [k, img] : res.images) {
        io::write_image_csv(dir / ("image_" + k + ".csv"), img);
        man["methods"][k] = {{"file", "image_" + k + ".csv"}, {"norm", img.norm}, {"peaks", peaks_json(res.peaks.at(k))}};
    }
    if (res.M) {
        io::write_twopoint(dir / "twopoint.bin", *res.M->dense, res.M->X_used);
        man["twopoint"] = {{"file", "twopoint.bin"}, {"G", res.M->size()}, {"X_used", res.M->X_used},
                           {"grid_start", res.matrix_grid[0]},
                           {"grid_dy", res.matrix_grid.size() > 1 ? res.matrix_grid[1] - res.matrix_grid[0] : 0.0}};
    }
    if (res.products) {
        io::atomic_write(dir / "products.csv", io::products_csv(*res.products));
        man["products"] = {{"file", "products.csv"}, {"scale", res.products->scale},
                           {"kappa_max", res.products->kappa.cwiseAbs().maxCoeff()},
                           {"warnings", res.products->warnings}};
    }
    if (res.eig)
        man["diagnostics"]["sp"] = {{"eigenvalue", res.eig->value}, {"residual", res.eig->residual},
                                    {"iterations", res.eig->iterations}, {"converged", res.eig->converged}};
    if (res.phase)
        man["diagnostics"]["op"] = {{"relative_objective", res.phase->relative_objective},
                                    {"iterations", res.phase->iterations},
                                    {"line_search_failed", res.phase->line_search_failed}};
    if (res.pr)
        man["diagnostics"]["pr"] = {{"best_residual", res.pr->best_residual},
                                    {"best_iteration", res.pr->best_iteration},
                                    {"iterations", res.pr->iterations}, {"seed", res.pr->seed}};
    io::write_json(dir / "manifest.json", man);
}

inline PipelineResult run_scenario(const std::string& name, const Scene& scene, std::uint64_t seed,
                                   const fs::path& outdir, const std::vector<std::string>& methods,
                                   const PipelineSettings& ps = {}) {
    if (!is_scenario_name(name)) throw Error("unknown scenario '" + name + "' (field 'name')");
    Record rec = simulate(scene, seed);
    fs::path dir = write_simulation(outdir, name, rec, seed);
    nlohmann::json man = io::read_json(dir / "manifest.json");
    PipelineResult res = compute_images(rec, methods, ps, std::nullopt, seed);
    write_images(dir, res, man);
    return res;
}

}  // namespace cint
