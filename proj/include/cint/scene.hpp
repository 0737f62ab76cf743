#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"

namespace cint {

struct Reflector {
    double z = 0;    // cross-range [lambda0]
    double rho = 0;  // real reflectivity
};

// Sensor track covers [-span*a/2, span*a/2]; the Gaussian apodization
// exp(-x^2/a^2) sets the effective aperture. See README, "Aperture".
inline constexpr double kSensorSpan = 4.0;

struct Scene {
    double lambda0 = 1.0;
    double L = 2.0e4;
    double a = 2.0e4 / (2 * pi);
    int N = 400;
    double ell = 2.0e4 / (4 * pi);
    double sigma_tau = 0.0;
    double sigma_W = 0.0;
    std::vector<Reflector> reflectors;
    double y_min = 0.0, y_max = 245.0;
    double grid_dy = 0.03;
    std::uint64_t seed = 0;
    // optional broadband parameters, only used for the range-direction scales
    std::optional<double> B, c, Omega;

    double k0() const { return 2 * pi / lambda0; }

    void validate() const {
        auto fin = [](double v, const char* name) {
            if (!std::isfinite(v)) throw Error(std::string("scene: non-finite ") + name);
        };
        fin(lambda0, "lambda0"); fin(L, "L"); fin(a, "a"); fin(ell, "ell");
        fin(sigma_tau, "sigma_tau"); fin(sigma_W, "sigma_W");
        fin(y_min, "domain"); fin(y_max, "domain"); fin(grid_dy, "grid_dy");
        if (!(lambda0 > 0)) throw Error("scene: lambda0 must be > 0");
        if (!(a > 0)) throw Error("scene: a must be > 0");
        if (!(L > a)) throw Error("scene: L must exceed a");
        if (N < 2) throw Error("scene: N must be >= 2");
        if (!(ell > 0)) throw Error("scene: ell must be > 0");
        if (!(grid_dy > 0)) throw Error("scene: grid_dy must be > 0");
        if (!(y_max > y_min)) throw Error("scene: empty domain");
        if (sigma_tau < 0) throw Error("scene: sigma_tau must be >= 0");
        if (sigma_W < 0) throw Error("scene: sigma_W must be >= 0");
        for (const auto& r : reflectors) {
            fin(r.z, "reflector z");
            fin(r.rho, "reflector rho");
        }
    }

    RVec sensors() const {
        RVec x(N);
        double half = 0.5 * kSensorSpan * a;
        for (int n = 0; n < N; ++n) x[n] = -half + 2 * half * n / (N - 1);
        return x;
    }

    RVec display_grid() const { return uniform_grid(y_min, y_max, grid_dy); }
};

struct Scales {
    double k0 = 2 * pi;
    double Xd = std::numeric_limits<double>::infinity();
    double X = 0;
    double H = 0;
    double h = 0;
    std::optional<double> Hpar, hpar, Omega_d, Omega, B, c;
    double zeta = std::numeric_limits<double>::infinity();
    double min_gap_over_H = std::numeric_limits<double>::infinity();
};

inline double separation_min_gap(const Scene& s) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.reflectors.size(); ++i)
        for (std::size_t j = i + 1; j < s.reflectors.size(); ++j) {
            double d = std::abs(s.reflectors[i].z - s.reflectors[j].z);
            if (d > 0) g = std::min(g, d);
        }
    return g;
}

inline double separation_zeta(const Scene& s, const Scales& sc) {
    return separation_min_gap(s) / (3 * sc.H);
}

inline double resolution_H(double L, double k0, double X, double Xd, double a) {
    auto inv2 = [](double v) { return std::isinf(v) ? 0.0 : 1.0 / (v * v); };
    return L / (2 * k0) * std::sqrt(inv2(X) + inv2(Xd) + inv2(a));
}

// X_override replaces the default threshold min(a, Xd/3).
inline Scales derive_scales(const Scene& s, std::optional<double> X_override = std::nullopt) {
    s.validate();
    Scales out;
    out.k0 = s.k0();
    const double inf = std::numeric_limits<double>::infinity();
    out.Xd = s.sigma_tau > 0 ? std::sqrt(3.0) * s.ell / (2 * s.sigma_tau) : inf;
    out.X = X_override ? *X_override : std::min(s.a, out.Xd / 3);
    if (!(out.X > 0)) throw Error("derive_scales: X must be > 0");
    out.H = resolution_H(s.L, out.k0, out.X, out.Xd, s.a);
    out.h = s.L / (out.k0 * s.a);
    out.zeta = separation_zeta(s, out);
    out.min_gap_over_H = separation_min_gap(s) / out.H;
    if (s.B && s.c) {
        out.B = s.B;
        out.c = s.c;
        out.hpar = *s.c / *s.B;
        // travel-time std is sigma_tau / omega0 with omega0 = c k0
        out.Omega_d = s.sigma_tau > 0 ? *s.c * out.k0 / (2 * s.sigma_tau) : inf;
        out.Omega = s.Omega ? *s.Omega : std::min(*s.B, *out.Omega_d / 3);
        auto inv2 = [](double v) { return std::isinf(v) ? 0.0 : 1.0 / (v * v); };
        out.Hpar = *s.c / 2 * std::sqrt(inv2(*out.Omega) + inv2(*out.Omega_d) + inv2(*s.B));
    }
    return out;
}

// JSON ----------------------------------------------------------------------

inline Scene scene_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {
        "lambda0", "L", "a", "N", "ell", "sigma_tau", "sigma_W", "reflectors",
        "domain", "grid_dy", "seed", "B", "c", "Omega"};
    if (!j.is_object()) throw Error("scene: configuration must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw Error("scene: unknown field '" + it.key() + "'");
    Scene s;
    auto num = [&](const char* k, double& dst) {
        if (!j.contains(k)) return;
        if (!j[k].is_number()) throw Error(std::string("scene: field '") + k + "' must be a number");
        dst = j[k].get<double>();
    };
    num("lambda0", s.lambda0);
    num("L", s.L);
    num("a", s.a);
    num("ell", s.ell);
    num("sigma_tau", s.sigma_tau);
    num("sigma_W", s.sigma_W);
    num("grid_dy", s.grid_dy);
    if (j.contains("N")) {
        if (!j["N"].is_number_integer()) throw Error("scene: field 'N' must be an integer");
        s.N = j["N"].get<int>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw Error("scene: field 'seed' must be a non-negative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("domain")) {
        const auto& d = j["domain"];
        if (!d.is_array() || d.size() != 2) throw Error("scene: field 'domain' must be [y_min, y_max]");
        s.y_min = d[0].get<double>();
        s.y_max = d[1].get<double>();
    }
    if (j.contains("reflectors")) {
        const auto& r = j["reflectors"];
        if (!r.is_array()) throw Error("scene: field 'reflectors' must be an array");
        for (const auto& e : r) {
            Reflector f;
            if (e.is_array() && e.size() == 2) {
                f.z = e[0].get<double>();
                f.rho = e[1].get<double>();
            } else if (e.is_object()) {
                for (auto it = e.begin(); it != e.end(); ++it)
                    if (it.key() != "z" && it.key() != "rho")
                        throw Error("scene: unknown field 'reflectors." + it.key() + "'");
                f.z = e.at("z").get<double>();
                f.rho = e.at("rho").get<double>();
            } else {
                throw Error("scene: each reflector must be {\"z\":..,\"rho\":..} or [z, rho]");
            }
            s.reflectors.push_back(f);
        }
    }
    for (const char* k : {"B", "c", "Omega"}) {
        if (!j.contains(k)) continue;
        if (!j[k].is_number()) throw Error(std::string("scene: field '") + k + "' must be a number");
        double v = j[k].get<double>();
        if (std::string(k) == "B") s.B = v;
        else if (std::string(k) == "c") s.c = v;
        else s.Omega = v;
    }
    s.validate();
    return s;
}

inline nlohmann::json scene_to_json(const Scene& s) {
    nlohmann::json j;
    j["lambda0"] = s.lambda0;
    j["L"] = s.L;
    j["a"] = s.a;
    j["N"] = s.N;
    j["ell"] = s.ell;
    j["sigma_tau"] = s.sigma_tau;
    j["sigma_W"] = s.sigma_W;
    j["reflectors"] = nlohmann::json::array();
    for (const auto& r : s.reflectors) j["reflectors"].push_back({{"z", r.z}, {"rho", r.rho}});
    j["domain"] = {s.y_min, s.y_max};
    j["grid_dy"] = s.grid_dy;
    j["seed"] = s.seed;
    if (s.B) j["B"] = *s.B;
    if (s.c) j["c"] = *s.c;
    if (s.Omega) j["Omega"] = *s.Omega;
    return j;
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("config '" + path + "': " + e.what());
    }
    return scene_from_json(j);
}

inline nlohmann::json scales_to_json(const Scales& sc) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return "inf";
        return v;
    };
    nlohmann::json j;
    j["k0"] = sc.k0;
    j["Xd"] = num(sc.Xd);
    j["X"] = num(sc.X);
    j["H"] = sc.H;
    j["h"] = sc.h;
    j["zeta"] = num(sc.zeta);
    j["min_gap_over_H"] = num(sc.min_gap_over_H);
    auto opt = [&](const char* k, const std::optional<double>& v) {
        j[k] = v ? num(*v) : nlohmann::json(nullptr);
    };
    opt("Hpar", sc.Hpar);
    opt("hpar", sc.hpar);
    opt("Omega_d", sc.Omega_d);
    opt("Omega", sc.Omega);
    opt("B", sc.B);
    opt("c", sc.c);
    return j;
}

}  // namespace cint
