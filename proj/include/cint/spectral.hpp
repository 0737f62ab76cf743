#pragma once

#include <cmath>

#include "cint_core.hpp"
#include "common.hpp"
#include "image.hpp"

namespace cint {

struct EigenResult {
    double value = 0;
    CVec vector;
    int iterations = 0;
    double residual = 0;  // |Mv - lambda v| / |Mv|
    bool converged = false;
};

struct PowerSettings {
    double tol = 1e-8;
    int max_iter = 5000;
    std::uint64_t seed = 1;
};

template <class Apply>
EigenResult power_iterate(Apply&& apply, Eigen::Index n, const PowerSettings& ps = {}) {
    Rng rng = make_rng(ps.seed);
    std::normal_distribution<double> nd;
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double re = nd(rng), im = nd(rng);
        v[i] = cplx(re, im);
    }
    v.normalize();
    EigenResult out;
    for (int it = 1; it <= ps.max_iter; ++it) {
        CVec w = apply(v);
        double lam = std::real(v.dot(w));
        double wn = w.norm();
        out.iterations = it;
        out.value = lam;
        if (wn == 0) {
            out.vector = v;
            out.residual = 0;
            out.converged = true;
            return out;
        }
        out.residual = (w - lam * v).norm() / wn;
        if (out.residual <= ps.tol) {
            out.vector = v;
            out.converged = true;
            return out;
        }
        v = w / wn;
    }
    out.vector = v;
    CVec w = apply(v);
    out.value = std::real(v.dot(w));
    out.residual = w.norm() > 0 ? (w - out.value * v).norm() / w.norm() : 0.0;
    out.converged = out.residual <= ps.tol;
    return out;
}

inline EigenResult power_leading(const TwoPointMatrix& M, const PowerSettings& ps = {}) {
    return power_iterate([&](const CVec& v) { return M.apply(v); }, M.size(), ps);
}

inline EigenResult power_leading(const CMat& M, const PowerSettings& ps = {}) {
    return power_iterate([&](const CVec& v) { return CVec(M * v); }, M.rows(), ps);
}

// Second eigenpair by deflating the first.
inline EigenResult power_second(const TwoPointMatrix& M, const EigenResult& first, const PowerSettings& ps = {}) {
    return power_iterate(
        [&](const CVec& v) {
            CVec w = M.apply(v);
            w -= first.value * first.vector * first.vector.dot(v);
            return w;
        },
        M.size(), ps);
}

// Rotate by the global phase maximizing |Re(exp(-i phi) v)|, then make the
// largest-magnitude entry positive. |Re(e^{-i phi} v)|^2 =
// (|v|^2 + Re(e^{-2 i phi} sum v^2)) / 2, so phi = arg(sum v^2) / 2.
inline RVec fix_phase(const CVec& v) {
    cplx s = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += v[i] * v[i];
    double phi = 0.5 * std::arg(s);
    RVec re = (v * std::exp(-I * phi)).real();
    Eigen::Index k = 0;
    if (re.size()) re.cwiseAbs().maxCoeff(&k);
    if (re.size() && re[k] < 0) re = -re;
    return re;
}

// The eigenvector is extended to the display grid by the Nystrom formula
// v(y) = A(y)^H (A v) / lambda, which is exact on the matrix grid.
inline ImageProfile sp_image(const EigenResult& eig, const TwoPointMatrix& M, const TwoPointMatrix* display = nullptr) {
    if (!display || eig.value <= 0) return make_image(M.grid, fix_phase(eig.vector), "SP");
    CVec ext = display->A.adjoint() * (M.A * eig.vector) / eig.value;
    return make_image(display->grid, fix_phase(ext), "SP");
}

inline ImageProfile sp_image(const EigenResult& eig, const RVec& grid) {
    return make_image(grid, fix_phase(eig.vector), "SP");
}

}  // namespace cint
