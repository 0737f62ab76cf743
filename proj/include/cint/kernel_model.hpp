#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"
#include "scene.hpp"

namespace cint {

struct GaussKernelParams {
    double H = 1;
    double h = 1;
    std::vector<Reflector> reflectors;

    void validate() const {
        if (!(h > 0) || !(H > h / 2)) throw Error("kernel_model: need H > h/2 > 0");
    }
};

// Expected two-point function with C = 1:
// sum rho_j rho_j' K_H((z_j+z_j')/2 - (y+y')/2) K_h((z_j-z_j') - (y-y'))
inline double kernel_K(double y, double yp, const GaussKernelParams& p) {
    double s = 0;
    for (const auto& a : p.reflectors)
        for (const auto& b : p.reflectors)
            s += a.rho * b.rho * gaussian(0.5 * (a.z + b.z) - 0.5 * (y + yp), p.H) *
                 gaussian((a.z - b.z) - (y - yp), p.h);
    return s;
}

inline double kernel_single(double y, double yp, double z, double rho, double H, double h) {
    return rho * rho * gaussian(z - 0.5 * (y + yp), H) * gaussian(yp - y, h);
}

// 2-D blurring kernels K_H(x) K_Hpar(x_par); the range factor is 1 when Hpar is absent.
inline double kernel_2d(double x, double xpar, double H, double Hpar = 0) {
    return gaussian(x, H) * (Hpar > 0 ? gaussian(xpar, Hpar) : 1.0);
}

// Noise contribution to the expected two-point function (diagonal sensor
// sum of the thresholded weights), up to the constant C_W.
inline double noise_kernel(double y, double yp, double h) { return gaussian(y - yp, h); }

inline RMat discretize_kernel(const GaussKernelParams& p, const RVec& grid) {
    double dy = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
    RMat K(grid.size(), grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        for (Eigen::Index j = i; j < grid.size(); ++j) K(i, j) = K(j, i) = dy * kernel_K(grid[i], grid[j], p);
    return K;
}

// Hermite machinery ---------------------------------------------------------

inline double hermite_he(int n, double x) {
    if (n == 0) return 1.0;
    double a = 1.0, b = x;
    for (int k = 1; k < n; ++k) {
        double c = x * b - k * a;
        a = b;
        b = c;
    }
    return b;
}

struct HermiteTable {
    int n_max = 0;
    double H = 0, h = 0;
    RMat Theta;     // He_n(xi) = sum_i Theta(n,i) xi^i
    RMat ThetaInv;
    RMat Dcal;      // diag((sqrt(H^2+h^2/4)/(H+h/2))^l)
    RMat Dmat;      // diag(((H-h/2)/sqrt(H^2+h^2/4))^q)
    RMat T;         // ThetaInv Dcal Theta Dmat
    RMat Gamma;     // p_n(xi) = sum_i Gamma(n,i) xi^i
    RVec LambdaTilde;

    double ratio() const { return (H - h / 2) / (H + h / 2); }

    double p(int n, double xi) const {
        double s = 0, xp = 1;
        for (int i = 0; i <= n; ++i, xp *= xi) s += Gamma(n, i) * xp;
        return s;
    }
};

inline RMat hermite_theta(int n_max) {
    RMat T = RMat::Zero(n_max + 1, n_max + 1);
    T(0, 0) = 1;
    if (n_max >= 1) T(1, 1) = 1;
    for (int n = 1; n < n_max; ++n)
        for (int i = 0; i <= n + 1; ++i) {
            double v = (i > 0 ? T(n, i - 1) : 0.0) - n * T(n - 1, i);
            T(n + 1, i) = v;
        }
    return T;
}

inline HermiteTable hermite_table(int n_max, double H, double h) {
    if (n_max < 0 || n_max > 30) throw Error("hermite_table: n_max must be in [0, 30]");
    if (!(h > 0) || !(H > h / 2)) throw Error("hermite_table: degenerate H <= h/2");
    HermiteTable t;
    t.n_max = n_max;
    t.H = H;
    t.h = h;
    int n = n_max + 1;
    t.Theta = hermite_theta(n_max);
    t.ThetaInv = t.Theta.triangularView<Eigen::Lower>().solve(RMat::Identity(n, n));
    double S = std::sqrt(H * H + h * h / 4);
    t.Dcal = RMat::Zero(n, n);
    t.Dmat = RMat::Zero(n, n);
    for (int l = 0; l < n; ++l) {
        t.Dcal(l, l) = std::pow(S / (H + h / 2), l);
        t.Dmat(l, l) = std::pow((H - h / 2) / S, l);
    }
    t.T = t.ThetaInv * t.Dcal * t.Theta * t.Dmat;
    // row n of Gamma is a left eigenvector of T with eigenvalue T(n,n)
    t.Gamma = RMat::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        t.Gamma(r, r) = 1;
        for (int q = r - 1; q >= 0; --q) {
            double den = t.T(r, r) - t.T(q, q);
            if (den == 0) throw Error("hermite_table: eigenvalue collision");
            double s = 0;
            for (int i = q + 1; i <= r; ++i) s += t.Gamma(r, i) * t.T(i, q);
            t.Gamma(r, q) = s / den;
        }
    }
    t.LambdaTilde.resize(n);
    for (int k = 0; k < n; ++k) t.LambdaTilde[k] = std::pow(t.ratio(), k);
    return t;
}

struct Eigenpair {
    double value = 0;
    std::function<double(double)> V;
};

inline double closed_eigenvalue(double rho, int n, double H, double h) {
    return rho * rho / (std::sqrt(2 * pi) * (H + h / 2)) * std::pow((H - h / 2) / (H + h / 2), n);
}

inline Eigenpair closed_eigenpair(const Reflector& r, int n, const HermiteTable& t) {
    if (n > t.n_max) throw Error("closed_eigenpair: n exceeds table");
    double H = t.H, h = t.h, s = std::sqrt(H * h);
    auto raw = [t, n, s, z = r.z](double y) {
        double xi = (y - z) / s;
        return std::exp(-xi * xi / 2) * t.p(n, xi);
    };
    double w = 12 * s + 2 * n * s;
    auto sq = [&](double y) { double v = raw(y); return v * v; };
    double nrm = integrate(sq, r.z - w, r.z + w, 1e-12).value;
    double c = 1 / std::sqrt(nrm);
    return {closed_eigenvalue(r.rho, n, H, h), [raw, c](double y) { return c * raw(y); }};
}

// Quadrature LHS of the single-Gaussian integral identity (n = 0) and its
// Hermite generalisation, with the closed-form RHS.
inline double b10_lhs(int n, double H, double h, double z, double zp, double eta, double y) {
    double s = std::sqrt(H * h);
    auto f = [=](double yp) {
        double e = (yp - eta) / s;
        return gaussian(0.5 * (y + yp) - 0.5 * (z + zp), H) * gaussian((y - yp) - (z - zp), h) *
               std::exp(-e * e / 2) * hermite_he(n, e);
    };
    double c = y - (z - zp);
    double w = 40 * (H + h) + 4 * n * s;
    std::vector<double> br = {c - w, c - 8 * h, c, c + 8 * h, c + w};
    return integrate_pieces(f, br, 1e-13).value;
}

inline double b10_scale(int n, double H, double h, double z, double zp, double eta, double y) {
    double s = std::sqrt(H * h);
    auto f = [=](double yp) {
        double e = (yp - eta) / s;
        return std::abs(gaussian(0.5 * (y + yp) - 0.5 * (z + zp), H) * gaussian((y - yp) - (z - zp), h) *
                        std::exp(-e * e / 2) * hermite_he(n, e));
    };
    double c = y - (z - zp);
    double w = 40 * (H + h) + 4 * n * s;
    std::vector<double> br = {c - w, c - 8 * h, c, c + 8 * h, c + w};
    return integrate_pieces(f, br, 1e-10).value;
}

inline double b10_rhs(int n, double H, double h, double z, double zp, double eta, double y) {
    double Hp = H + h / 2, Hm = H - h / 2, S = std::sqrt(H * H + h * h / 4);
    double g = y - z + (zp - eta) * Hm / Hp;
    double e = std::exp(-(zp - eta) * (zp - eta) / (2 * Hp * Hp) - g * g / (2 * H * h));
    double arg = (y - z) * Hm / (std::sqrt(H * h) * S) + (zp - eta) * S / (std::sqrt(H * h) * Hp);
    return std::pow(S, n) / (std::sqrt(2 * pi) * std::pow(Hp, n + 1)) * e * hermite_he(n, arg);
}

// |LHS - RHS| relative to max(|RHS|, integral of |integrand|).
inline double lemma_b10_check(int n, double H, double h, double z, double zp, double eta, double y) {
    if (n < 0 || n > 10) throw Error("lemma_b10_check: n must be in [0, 10]");
    if (!(H > h / 2) || !(h > 0)) throw Error("lemma_b10_check: need H > h/2 > 0");
    double l = b10_lhs(n, H, h, z, zp, eta, y);
    double r = b10_rhs(n, H, h, z, zp, eta, y);
    double scale = std::max(std::abs(r), b10_scale(n, H, h, z, zp, eta, y));
    if (scale == 0) return std::abs(l - r);
    return std::abs(l - r) / scale;
}

inline double identity_b6_check(double H, double h, double z, double zp, double eta, double y) {
    return lemma_b10_check(0, H, h, z, zp, eta, y);
}

struct CompositeSpectrum {
    std::vector<double> values;
    std::vector<std::function<double(double)>> V;
};

inline CompositeSpectrum composite_spectrum(const GaussKernelParams& p, const HermiteTable& t, int n_terms) {
    p.validate();
    if (n_terms - 1 > t.n_max) throw Error("composite_spectrum: n_terms exceeds table");
    CompositeSpectrum out;
    double lo = 1e300, hi = -1e300;
    for (const auto& r : p.reflectors) {
        lo = std::min(lo, r.z);
        hi = std::max(hi, r.z);
    }
    double s = std::sqrt(p.H * p.h);
    for (int n = 0; n < n_terms; ++n) {
        double lam = 0;
        std::vector<Eigenpair> parts;
        for (const auto& r : p.reflectors) {
            lam += closed_eigenvalue(r.rho, n, p.H, p.h);
            parts.push_back(closed_eigenpair(r, n, t));
        }
        std::vector<double> rho;
        for (const auto& r : p.reflectors) rho.push_back(r.rho);
        auto raw = [parts, rho](double y) {
            double v = 0;
            for (std::size_t j = 0; j < parts.size(); ++j) v += rho[j] * parts[j].V(y);
            return v;
        };
        double w = 12 * s + 2 * n * s;
        std::vector<double> br;
        for (double y = lo - w; y < hi + w; y += 4 * s) br.push_back(y);
        br.push_back(hi + w);
        auto sq = [&](double y) { double v = raw(y); return v * v; };
        double nrm = integrate_pieces(sq, br, 1e-12).value;
        double c = nrm > 0 ? 1 / std::sqrt(nrm) : 0.0;
        out.values.push_back(lam);
        out.V.push_back([raw, c](double y) { return c * raw(y); });
    }
    return out;
}

// Analytic expected two-point matrix on a grid, scaled like a CINT matrix.
inline CMat analytic_two_point(const GaussKernelParams& p, const RVec& grid) {
    CMat M(grid.size(), grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        for (Eigen::Index j = i; j < grid.size(); ++j) {
            double v = kernel_K(grid[i], grid[j], p);
            M(i, j) = M(j, i) = v;
        }
    return M;
}

}  // namespace cint
