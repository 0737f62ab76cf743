#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "common.hpp"
#include "image.hpp"
#include "lbfgs.hpp"

namespace cint {

// Band S = [-kBandFactor/h_est, kBandFactor/h_est], additionally clipped to |kappa| h <= 3.
inline constexpr double kBandFactor = 2.0;
inline constexpr double kEnvelopeBound = 3.0;

// Products are indexed by kappa-grid pairs (i, j):
//   P(i, j) ~ rho_hat(kappa_i) conj(rho_hat(kappa_j)),
//   kappa = (kappa_i + kappa_j)/2, kappa_tilde = kappa_i - kappa_j.
// rho_hat is the transform about the domain centre y_c.
struct FourierProducts {
    RVec kappa;
    CMat P;  // zero outside the mask
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // |kappa_tilde| <= 3/H
    double dk = 0;
    double y_center = 0;
    double H = 0, h = 0, h_est = 0;
    double scale = 1;  // raw products = P * scale
    bool envelope_corrected = true;
    std::vector<std::string> warnings;

    Eigen::Index center() const { return kappa.size() / 2; }
    Eigen::Index size() const { return kappa.size(); }
};

// Kappa grid with spacing 2 pi / (2 D), D the domain length.
inline RVec kappa_grid(double domain_length, double kmax) {
    double dk = 2 * pi / (2 * domain_length);
    auto half = static_cast<Eigen::Index>(std::floor(kmax / dk + 1e-9));
    RVec k(2 * half + 1);
    for (Eigen::Index i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i - half) * dk;
    return k;
}

inline CMat fourier_matrix(const RVec& kappa, const RVec& grid, double yc) {
    CMat E(kappa.size(), grid.size());
    for (Eigen::Index i = 0; i < kappa.size(); ++i)
        for (Eigen::Index p = 0; p < grid.size(); ++p) E(i, p) = std::exp(-I * (kappa[i] * (grid[p] - yc)));
    return E;
}

inline FourierProducts fourier_products(const CMat& M, const RVec& grid, double H, double h, double h_est,
                                        double domain_length = 0, bool envelope = true) {
    if (grid.size() < 2 || M.rows() != grid.size()) throw Error("fourier_products: grid/matrix mismatch");
    if (!(h_est > 0) || !(H > 0) || !(h > 0)) throw Error("fourier_products: scales must be > 0");
    FourierProducts fp;
    fp.H = H;
    fp.h = h;
    fp.h_est = h_est;
    fp.envelope_corrected = envelope;
    if (!(H > 2 * h_est)) fp.warnings.push_back("H >> h_est not satisfied");
    if (!(h_est >= h)) fp.warnings.push_back("h_est >> h not satisfied");
    double D = domain_length > 0 ? domain_length : grid[grid.size() - 1] - grid[0];
    double kmax = kBandFactor / h_est;
    if (kmax * h > kEnvelopeBound) {
        kmax = kEnvelopeBound / h;
        fp.warnings.push_back("band clipped to |kappa| h <= 3");
    }
    fp.kappa = kappa_grid(D, kmax);
    fp.dk = fp.kappa.size() > 1 ? fp.kappa[1] - fp.kappa[0] : 2 * pi / (2 * D);
    fp.y_center = 0.5 * (grid[0] + grid[grid.size() - 1]);
    double dy = grid[1] - grid[0];
    CMat E = fourier_matrix(fp.kappa, grid, fp.y_center);
    fp.P = (dy * dy) * (E * M * E.adjoint());
    Eigen::Index n = fp.kappa.size();
    fp.mask.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double kt = fp.kappa[i] - fp.kappa[j], kc = 0.5 * (fp.kappa[i] + fp.kappa[j]);
            fp.mask(i, j) = std::abs(kt) * H <= kEnvelopeBound * (1 + 1e-12);
            if (!fp.mask(i, j)) fp.P(i, j) = 0;
            else if (envelope) fp.P(i, j) *= std::exp(0.5 * (kc * kc * h * h + kt * kt * H * H));
        }
    double s = fp.P.diagonal().cwiseAbs().maxCoeff();
    fp.scale = s > 0 ? s : 1.0;
    fp.P /= fp.scale;
    return fp;
}

inline RVec product_modulus(const FourierProducts& fp) {
    return fp.P.diagonal().real().cwiseMax(0.0).cwiseSqrt();
}

// |rho_hat(kappa)| for arbitrary kappa from the kappa_tilde = 0 products.
inline RVec modulus_spectrum(const CMat& M, const RVec& grid, const RVec& kappa, double h) {
    double yc = 0.5 * (grid[0] + grid[grid.size() - 1]);
    double dy = grid[1] - grid[0];
    CMat E = fourier_matrix(kappa, grid, yc);
    CMat EM = E * M;
    RVec out(kappa.size());
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
        double v = std::real((EM.row(i).array() * E.row(i).array().conjugate()).sum());
        v *= dy * dy * std::exp(kappa[i] * kappa[i] * h * h / 2);
        out[i] = std::sqrt(std::max(v, 0.0));
    }
    return out;
}

// Outward recursion from the anchor at kappa = 0 using the previously
// estimated values; the pivot is the masked neighbour of largest modulus.
inline CVec recursive_estimate(const FourierProducts& fp, double floor_rel = 1e-6) {
    Eigen::Index n = fp.size(), c = fp.center();
    RVec mod = product_modulus(fp);
    double mmax = mod.maxCoeff();
    double floor = floor_rel * mmax;
    Eigen::Index anchor = -1;
    for (Eigen::Index d = 0; d <= n / 2 && anchor < 0; ++d)
        for (Eigen::Index k : {c - d, c + d})
            if (anchor < 0 && k >= 0 && k < n && mod[k] > floor) anchor = k;
    if (anchor < 0) throw Error("recursive_estimate: no viable anchor");
    CVec est = CVec::Zero(n);
    std::vector<bool> known(n, false);
    est[anchor] = mod[anchor];
    known[anchor] = true;
    for (Eigen::Index d = 1; d < n; ++d)
        for (Eigen::Index i : {anchor - d, anchor + d}) {
            if (i < 0 || i >= n) continue;
            Eigen::Index piv = -1;
            for (Eigen::Index j = 0; j < n; ++j)
                if (known[j] && fp.mask(i, j) && (piv < 0 || std::abs(est[j]) > std::abs(est[piv]))) piv = j;
            if (piv < 0 || std::abs(est[piv]) <= floor)
                throw Error("recursive_estimate: pivot below floor");
            est[i] = fp.P(i, piv) / std::conj(est[piv]);
            known[i] = true;
        }
    return est;
}

struct PhaseEstimate {
    RVec theta;
    std::vector<double> history;  // objective / sum |P|^2 over the mask
    int iterations = 0;
    bool line_search_failed = false;
    bool stalled = false;
    double relative_objective = 0;
};

inline double masked_energy(const FourierProducts& fp) {
    double s = 0;
    for (Eigen::Index i = 0; i < fp.size(); ++i)
        for (Eigen::Index j = 0; j < fp.size(); ++j)
            if (fp.mask(i, j)) s += std::norm(fp.P(i, j));
    return s;
}

struct MaskedPair {
    Eigen::Index i, j;
    cplx P;
};

inline std::vector<MaskedPair> masked_pairs(const FourierProducts& fp) {
    std::vector<MaskedPair> out;
    for (Eigen::Index i = 0; i < fp.size(); ++i)
        for (Eigen::Index j = 0; j < fp.size(); ++j)
            if (fp.mask(i, j)) out.push_back({i, j, fp.P(i, j)});
    return out;
}

// sum over masked pairs |P_ij - m_i m_j exp(i(theta_i - theta_j))|^2
inline double phase_objective(const std::vector<MaskedPair>& pairs, const RVec& m, const RVec& theta,
                              RVec* grad = nullptr) {
    Eigen::Index n = m.size();
    CVec e(n);
    for (Eigen::Index i = 0; i < n; ++i) e[i] = m[i] * std::exp(I * theta[i]);
    double f = 0;
    if (grad) grad->setZero(n);
    for (const auto& q : pairs) {
        cplx R = e[q.i] * std::conj(e[q.j]);
        f += std::norm(q.P - R);
        if (grad) {
            double G = std::imag(std::conj(q.P) * R);
            (*grad)[q.i] += 2 * G;
            (*grad)[q.j] -= 2 * G;
        }
    }
    return f;
}

inline double phase_objective(const FourierProducts& fp, const RVec& m, const RVec& theta, RVec* grad = nullptr) {
    return phase_objective(masked_pairs(fp), m, theta, grad);
}

struct OptimizeSettings {
    LbfgsSettings lbfgs{};
    double rel_target = 0;  // stop when objective <= rel_target * sum |P|^2
};

// theta at kappa = 0 is held at 0 (gauge); the [-pi, pi) box is dropped.
inline PhaseEstimate optimize_phase(const FourierProducts& fp, const RVec& init, const OptimizeSettings& os = {}) {
    Eigen::Index n = fp.size(), c = fp.center();
    if (init.size() != n) throw Error("optimize_phase: init size mismatch");
    RVec m = product_modulus(fp);
    double E = masked_energy(fp);
    if (E == 0) E = 1;
    auto expand = [&](const RVec& x) {
        RVec th(n);
        for (Eigen::Index i = 0, k = 0; i < n; ++i) th[i] = i == c ? 0.0 : x[k++];
        return th;
    };
    RVec x0(n - 1);
    for (Eigen::Index i = 0, k = 0; i < n; ++i)
        if (i != c) x0[k++] = init[i] - init[c];
    RVec gfull(n);
    auto pairs = masked_pairs(fp);
    auto fg = [&](const RVec& x, RVec& g) {
        double f = phase_objective(pairs, m, expand(x), &gfull);
        for (Eigen::Index i = 0, k = 0; i < n; ++i)
            if (i != c) g[k++] = gfull[i] / E;
        return f / E;
    };
    LbfgsSettings ls = os.lbfgs;
    if (os.rel_target > 0) ls.f_target = os.rel_target;
    LbfgsResult r = lbfgs_minimize(fg, x0, ls);
    PhaseEstimate out;
    out.theta = expand(r.x);
    out.history = r.history;
    out.iterations = r.iterations;
    out.line_search_failed = r.status == LbfgsStatus::line_search_failed;
    out.stalled = r.status == LbfgsStatus::stalled;
    out.relative_objective = r.f;
    return out;
}

inline double tukey(double t, double alpha) {
    t = std::abs(t);
    if (t > 1) return 0;
    if (alpha <= 0 || t <= 1 - alpha) return 1;
    return 0.5 * (1 + std::cos(pi * (t - (1 - alpha)) / alpha));
}

struct OpImageSettings {
    double taper = 0.25;  // Tukey taper fraction; 0 gives a hard cutoff
};

inline ImageProfile op_image(const FourierProducts& fp, const RVec& theta, const RVec& grid,
                             const OpImageSettings& st = {}) {
    RVec m = product_modulus(fp);
    Eigen::Index n = fp.size();
    double kmax = n > 1 ? fp.kappa.cwiseAbs().maxCoeff() : 1.0;
    CVec c(n);
    for (Eigen::Index i = 0; i < n; ++i)
        c[i] = tukey(fp.kappa[i] / kmax, st.taper) * m[i] * std::exp(I * theta[i]);
    RVec v(grid.size());
    for (Eigen::Index p = 0; p < grid.size(); ++p) {
        cplx s = 0;
        for (Eigen::Index i = 0; i < n; ++i) s += c[i] * std::exp(I * (fp.kappa[i] * (grid[p] - fp.y_center)));
        v[p] = std::real(s) * fp.dk / (2 * pi);
    }
    return make_image(grid, v, "OP");
}

}  // namespace cint
