#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "common.hpp"
#include "image.hpp"
#include "metrics.hpp"
#include "random_medium.hpp"
#include "scene.hpp"
#include "synthesis.hpp"

namespace cint {

inline constexpr double kWindowNodeSpacing = 0.5;  // node spacing in units of X
inline constexpr double kWindowSupport = 4.0;      // support beyond the sensors, units of X
inline constexpr int kMaxWindowNodes = 20000;

// Two-point matrix M = A^H A, A is K x G.
struct TwoPointMatrix {
    RVec grid;
    CMat A;
    std::optional<CMat> dense;
    double X_used = 0;
    double norm = 1.0;

    Eigen::Index size() const { return grid.size(); }

    CVec apply(const CVec& v) const { return A.adjoint() * (A * v); }

    RVec diagonal() const { return A.cwiseAbs2().colwise().sum().transpose(); }

    const CMat& matrix() {
        if (!dense) dense = A.adjoint() * A;
        return *dense;
    }
};

inline ImageProfile sar_image(const Record& rec, const RVec& grid) {
    CMat F = reference_matrix(grid, rec.scene);
    CVec v = F.conjugate() * rec.r;
    return make_image(grid, v, "SAR");
}

// Quadrature of the Gaussian offset weight exp(-(x-x')^2/(2X^2)) as
// sum_m w_m exp(-(x''_m-x)^2/X^2) exp(-(x''_m-x')^2/X^2).
struct WindowFactor {
    RVec nodes;
    RMat W;  // K x N, includes sqrt(w_m)
};

inline WindowFactor window_factor(const RVec& sensors, double X, int cap = kMaxWindowNodes) {
    if (!(X > 0) || !std::isfinite(X)) throw Error("two_point_cint: X must be finite and > 0");
    double lo = sensors.minCoeff() - kWindowSupport * X;
    double hi = sensors.maxCoeff() + kWindowSupport * X;
    double span = hi - lo;
    auto K = static_cast<Eigen::Index>(std::ceil(span / (kWindowNodeSpacing * X))) + 1;
    if (K > cap) throw Error("two_point_cint: window node count exceeds cap");
    WindowFactor wf;
    wf.nodes.resize(K);
    for (Eigen::Index m = 0; m < K; ++m) wf.nodes[m] = lo + span * m / (K - 1);
    double dn = span / (K - 1);
    double sw = std::sqrt(dn * std::sqrt(2.0) / (std::sqrt(pi) * X));
    wf.W.resize(K, sensors.size());
    for (Eigen::Index m = 0; m < K; ++m)
        for (Eigen::Index n = 0; n < sensors.size(); ++n) {
            double d = wf.nodes[m] - sensors[n];
            wf.W(m, n) = sw * std::exp(-d * d / (X * X));
        }
    return wf;
}

// M_pq = sum_{n,n'} r_n conj(F_n(y_p)) conj(r_n') F_n'(y_q) exp(-(x_n-x_n')^2/(2X^2))
inline TwoPointMatrix two_point_cint(const Record& rec, double X, const RVec& grid, bool keep_dense = true) {
    const Scene& s = rec.scene;
    WindowFactor wf = window_factor(s.sensors(), X);
    CMat B = reference_matrix(grid, s);  // G x N
    CVec rc = rec.r.conjugate();
    for (Eigen::Index n = 0; n < B.cols(); ++n) B.col(n) *= rc[n];
    TwoPointMatrix M;
    M.grid = grid;
    M.X_used = X;
    M.A = wf.W.cast<cplx>() * B.transpose();
    if (keep_dense) M.dense = M.A.adjoint() * M.A;
    return M;
}

inline TwoPointMatrix two_point_cint(const Record& rec, const Scales& sc, const RVec& grid,
                                     bool keep_dense = true) {
    return two_point_cint(rec, sc.X, grid, keep_dense);
}

// Direct evaluation of the double sum; O(G N^2), used as an oracle.
inline CMat two_point_dense(const Record& rec, double X, const RVec& grid) {
    const Scene& s = rec.scene;
    RVec x = s.sensors();
    CMat R = reference_matrix(grid, s).conjugate();
    for (Eigen::Index n = 0; n < R.cols(); ++n) R.col(n) *= rec.r[n];
    RMat C(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            double d = x[i] - x[j];
            C(i, j) = std::exp(-d * d / (2 * X * X));
        }
    return R * C.cast<cplx>() * R.adjoint();
}

// Negative diagonal round-off is clamped to zero here only.
inline ImageProfile cint_image(const TwoPointMatrix& M) {
    RVec d = M.diagonal().cwiseMax(0.0).cwiseSqrt();
    return make_image(M.grid, d, "CI");
}

struct StabilityRow {
    double X = 0;
    double mean = 0;  // |mean| of the peak value
    double std = 0;
    double cov = 0;
    double cov_se = 0;  // bootstrap standard error
};

struct StabilityTable {
    double y_peak = 0;
    int realizations = 0;
    std::vector<StabilityRow> rows;
};

// CoV of M(y*, y*) at the dominant diagonal peak y* of the homogeneous
// noiseless image, over medium realizations with zero additive noise.
inline StabilityTable stability_sweep(const Scene& scene, int n_realizations, const std::vector<double>& X_values,
                                      std::uint64_t seed, const RVec& grid) {
    if (n_realizations < 2) throw Error("stability_sweep: need >= 2 realizations");
    Scene s = scene;
    s.sigma_W = 0;
    Scene hom = s;
    hom.sigma_tau = 0;
    Scales sc0 = derive_scales(hom);
    Record r0 = synthesize_record(hom, {RVec::Zero(s.N), 0}, 0);
    RVec d0 = two_point_cint(r0, sc0.X, grid, false).diagonal();
    Eigen::Index ip = 0;
    d0.maxCoeff(&ip);
    StabilityTable out;
    out.y_peak = grid[ip];
    out.realizations = n_realizations;

    RVec ypk(1);
    ypk[0] = out.y_peak;
    CMat Fp = reference_matrix(ypk, s);
    ScreenSampler sampler(s, s.sensors());
    std::vector<CVec> records(n_realizations);
    parallel_for(records.size(), [&](std::size_t i) {
        Rng rng = make_rng(mix_seed(seed, i));
        TravelTimeScreen t{sampler.sample(rng), mix_seed(seed, i)};
        records[i] = synthesize_record(s, t, 0).r;
    });
    RVec x = s.sensors();
    for (double X : X_values) {
        WindowFactor wf = window_factor(x, X);
        std::vector<cplx> samples;
        for (const auto& r : records) {
            CVec b = (r.conjugate().array() * Fp.row(0).transpose().array()).matrix();
            samples.emplace_back((wf.W.cast<cplx>() * b).squaredNorm(), 0.0);
        }
        StabilityRow row;
        row.X = X;
        cplx m = 0;
        for (auto v : samples) m += v;
        m /= static_cast<double>(samples.size());
        row.mean = std::abs(m);
        row.cov = cov_statistic(samples);
        row.std = row.cov * row.mean;
        Rng rng = make_rng(mix_seed(seed, 0xB007));
        std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
        std::vector<double> boots;
        std::vector<cplx> bs(samples.size());
        for (int b = 0; b < 200; ++b) {
            for (auto& v : bs) v = samples[pick(rng)];
            double c = cov_statistic(bs);
            if (std::isfinite(c)) boots.push_back(c);
        }
        double bm = 0, bv = 0;
        for (double c : boots) bm += c;
        bm /= std::max<std::size_t>(1, boots.size());
        for (double c : boots) bv += (c - bm) * (c - bm);
        row.cov_se = boots.size() > 1 ? std::sqrt(bv / (boots.size() - 1)) : 0.0;
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace cint
