#pragma once

#include <cmath>

#include "common.hpp"
#include "random_medium.hpp"
#include "scene.hpp"

namespace cint {

// Far-field homogeneous Green's function exp(i k r + i pi/4) / sqrt(8 pi k r).
inline cplx greens_ref(double r, double k) {
    if (!(r > 0)) throw Error("greens_ref: zero distance");
    return std::exp(I * (k * r + pi / 4)) / std::sqrt(8 * pi * k * r);
}

// Squared Green's function from a scene point (y, 0) to a sensor (x, L).
inline cplx greens_sq(double y, double x, double L, double k) {
    double r = std::hypot(y - x, L);
    if (!(r > 0)) throw Error("greens_ref: zero distance");
    return std::exp(I * (2 * k * r + pi / 2)) / (8 * pi * k * r);
}

struct Record {
    CVec r;
    std::uint64_t screen_seed = 0;
    std::uint64_t noise_seed = 0;
    double sigma_W_abs = 0;
    Scene scene;
};

inline CVec noiseless_signal(const Scene& s, const RVec& phi) {
    RVec x = s.sensors();
    double k = s.k0();
    CVec sig = CVec::Zero(s.N);
    for (const auto& f : s.reflectors)
        for (int n = 0; n < s.N; ++n) sig[n] += f.rho * greens_sq(f.z, x[n], s.L, k);
    if (phi.size() == s.N)
        for (int n = 0; n < s.N; ++n) sig[n] *= std::exp(2.0 * I * phi[n]);
    return sig;
}

inline Record synthesize_record(const Scene& s, const TravelTimeScreen& screen, std::uint64_t noise_seed) {
    if (screen.tau.size() != s.N) throw Error("synthesize_record: screen length differs from N");
    Record rec;
    rec.scene = s;
    rec.screen_seed = screen.seed;
    rec.noise_seed = noise_seed;
    rec.r = noiseless_signal(s, screen.tau);
    double peak = rec.r.size() ? rec.r.cwiseAbs().maxCoeff() : 0.0;
    rec.sigma_W_abs = s.sigma_W * peak;
    if (rec.sigma_W_abs > 0) {
        Rng rng = make_rng(noise_seed);
        std::normal_distribution<double> nd;
        double sd = rec.sigma_W_abs / std::sqrt(2.0);
        for (int n = 0; n < s.N; ++n) {
            double re = nd(rng), im = nd(rng);
            rec.r[n] += sd * cplx(re, im);
        }
    }
    return rec;
}

// F_n(y) = G^2((y,0), x_n) exp(-x_n^2 / a^2)
inline CVec reference_field(double y, const Scene& s) {
    RVec x = s.sensors();
    double k = s.k0();
    CVec F(s.N);
    for (int n = 0; n < s.N; ++n) F[n] = greens_sq(y, x[n], s.L, k) * std::exp(-x[n] * x[n] / (s.a * s.a));
    return F;
}

// Rows: grid points, columns: sensors.
inline CMat reference_matrix(const RVec& grid, const Scene& s) {
    RVec x = s.sensors();
    double k = s.k0();
    CMat F(grid.size(), s.N);
    RVec apod = (-(x.array() * x.array()) / (s.a * s.a)).exp();
    for (int n = 0; n < s.N; ++n)
        for (Eigen::Index p = 0; p < grid.size(); ++p) F(p, n) = greens_sq(grid[p], x[n], s.L, k) * apod[n];
    return F;
}

}  // namespace cint
