#pragma once

#include <cmath>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "common.hpp"
#include "image.hpp"

namespace cint {

struct PRSettings {
    int iterations = 2000;
    double band = 3.0;  // keep |kappa| < band (3/h)
};

struct PRState {
    RVec grid;              // reconstruction grid (uniform, periodic)
    RVec rho;               // positivity-projected iterate, >= 0
    RVec rho_band;          // band-limited iterate it was projected from
    std::vector<double> residual;  // Fourier-modulus mismatch per iteration
    std::uint64_t seed = 0;
    int iterations = 0;
    int best_iteration = 0;
    double best_residual = 0;
    double band = 0;
};

// kappa of each FFT bin for n samples at spacing dy.
inline RVec fft_kappa(Eigen::Index n, double dy) {
    RVec k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index m = i <= n / 2 ? i : i - n;
        k[i] = 2 * pi * static_cast<double>(m) / (static_cast<double>(n) * dy);
    }
    return k;
}

// Error reduction with positivity: transform, impose the target modulus in
// the band and zero outside, inverse transform, clamp negatives.
// target[i] is the modulus for FFT bin i (ignored outside the band).
inline PRState pr_reconstruct(const RVec& grid, const RVec& target, const PRSettings& st, std::uint64_t seed) {
    const Eigen::Index n = grid.size();
    if (target.size() != n) throw Error("pr_reconstruct: target size mismatch");
    if ((target.array() < 0).any()) throw Error("pr_reconstruct: negative modulus");
    double dy = grid[1] - grid[0];
    RVec kap = fft_kappa(n, dy);
    std::vector<bool> in_band(n);
    double tnorm = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        in_band[i] = std::abs(kap[i]) < st.band;
        if (in_band[i]) tnorm += target[i] * target[i];
    }
    tnorm = std::sqrt(tnorm);
    if (tnorm == 0) tnorm = 1;

    Eigen::FFT<double> fft;
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);

    PRState out;
    out.grid = grid;
    out.seed = seed;
    out.band = st.band;
    out.best_residual = std::numeric_limits<double>::infinity();
    std::vector<cplx> X, y;
    std::vector<double> xb;  // band-limited array x was clamped from
    for (int it = 0; it < st.iterations; ++it) {
        fft.fwd(X, x);
        double res = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double a = std::abs(X[i]);
            double t = in_band[i] ? target[i] : 0.0;
            res += (a - t) * (a - t);
            if (!in_band[i]) X[i] = 0;
            else X[i] = a > 0 ? X[i] * (t / a) : cplx(t, 0);
        }
        res = std::sqrt(res) / tnorm;
        out.residual.push_back(res);
        if (!xb.empty() && res < out.best_residual) {
            out.best_residual = res;
            out.best_iteration = it;
            out.rho = Eigen::Map<RVec>(x.data(), n);
            out.rho_band = Eigen::Map<RVec>(xb.data(), n);
        }
        fft.inv(y, X);
        xb.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            xb[i] = y[i].real();
            x[i] = std::max(xb[i], 0.0);
        }
    }
    if (out.rho.size() == 0) {
        out.rho = Eigen::Map<RVec>(x.data(), n);
        out.rho_band = xb.empty() ? out.rho : RVec(Eigen::Map<RVec>(xb.data(), n));
        out.best_residual = out.residual.empty() ? 0.0 : out.residual.back();
    }
    out.iterations = st.iterations;
    return out;
}

// Trigonometric interpolation of the band-limited iterate onto another grid,
// negative lobes clamped.
inline ImageProfile pr_image(const PRState& s, const RVec& display) {
    const Eigen::Index n = s.grid.size();
    double dy = s.grid[1] - s.grid[0];
    Eigen::FFT<double> fft;
    std::vector<double> x(s.rho_band.data(), s.rho_band.data() + n);
    std::vector<cplx> X;
    fft.fwd(X, x);
    RVec kap = fft_kappa(n, dy);
    RVec v(display.size());
    for (Eigen::Index p = 0; p < display.size(); ++p) {
        cplx acc = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!(std::abs(kap[i]) < s.band)) continue;
            double w = (n % 2 == 0 && i == n / 2) ? 0.5 : 1.0;
            acc += w * X[i] * std::exp(I * (kap[i] * (display[p] - s.grid[0])));
        }
        v[p] = std::max(0.0, acc.real() / static_cast<double>(n));
    }
    return make_image(display, v, "PR");
}

struct AlignResult {
    ImageProfile aligned;
    Eigen::Index shift = 0;
    bool reflected = false;
    double score = 0;  // normalized correlation of the best alignment
};

// Exhaustive circular shifts x {identity, reflection}.
inline AlignResult align_for_scoring(const ImageProfile& cand, const ImageProfile& ref) {
    const Eigen::Index n = cand.values.size();
    if (ref.values.size() != n) throw Error("align_for_scoring: grid mismatch");
    RVec c = cand.real(), r = ref.real();
    double nc = c.norm(), nr = r.norm();
    AlignResult best;
    best.score = -std::numeric_limits<double>::infinity();
    for (int refl = 0; refl < 2; ++refl) {
        RVec src = refl ? RVec(c.reverse()) : c;
        for (Eigen::Index s = 0; s < n; ++s) {
            double acc = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                Eigen::Index k = i - s;
                if (k < 0) k += n;
                acc += src[k] * r[i];
            }
            double sc = (nc > 0 && nr > 0) ? acc / (nc * nr) : 0.0;
            if (sc > best.score + 1e-15) {
                best.score = sc;
                best.shift = s;
                best.reflected = refl;
            }
        }
    }
    RVec src = best.reflected ? RVec(c.reverse()) : c;
    RVec out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index k = i - best.shift;
        if (k < 0) k += n;
        out[i] = src[k];
    }
    best.aligned = make_image(cand.grid, out, cand.method);
    return best;
}

}  // namespace cint
