#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "common.hpp"
#include "image.hpp"

namespace cint {

struct Peak {
    double location = 0;
    double value = 0;  // signed for real images, modulus otherwise
    double width = 0;  // fitted Gaussian std
};

struct PeakReport {
    std::vector<Peak> peaks;
    double threshold = 0.1;
    std::string method;
};

// Gaussian std from a weighted least-squares fit of log(v) over the
// half-max neighbourhood of index i.
inline double fit_gaussian_std(const RVec& y, const RVec& v, Eigen::Index i) {
    double top = v[i];
    if (!(top > 0)) return 0;
    Eigen::Index lo = i, hi = i;
    while (lo > 0 && v[lo - 1] >= 0.5 * top && v[lo - 1] <= v[lo]) --lo;
    while (hi + 1 < v.size() && v[hi + 1] >= 0.5 * top && v[hi + 1] <= v[hi]) ++hi;
    if (hi - lo < 2) {
        if (lo > 0) --lo;
        if (hi + 1 < v.size()) ++hi;
    }
    // log v = c0 + c1 t + c2 t^2, weights v^2
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (Eigen::Index k = lo; k <= hi; ++k) {
        if (!(v[k] > 0)) continue;
        double t = y[k] - y[i], w = v[k] * v[k];
        Eigen::Vector3d phi(1, t, t * t);
        A += w * phi * phi.transpose();
        b += w * phi * std::log(v[k]);
    }
    Eigen::Vector3d c = A.ldlt().solve(b);
    if (!(c[2] < 0)) return 0;
    return std::sqrt(-1 / (2 * c[2]));
}

inline PeakReport find_peaks(const RVec& y, const RVec& values, double rel_threshold = 0.1,
                             std::string method = {}) {
    PeakReport rep;
    rep.threshold = rel_threshold;
    rep.method = std::move(method);
    RVec a = values.cwiseAbs();
    double m = a.size() ? a.maxCoeff() : 0.0;
    if (!(m > 0)) return rep;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] < rel_threshold * m) continue;
        bool left = i == 0 || a[i] > a[i - 1];
        bool right = i + 1 == a.size() || a[i] >= a[i + 1];
        if (!left || !right) continue;
        Peak p{y[i], values[i], 0};
        if (i > 0 && i + 1 < a.size()) {
            double d = a[i - 1] - 2 * a[i] + a[i + 1];
            if (d < 0) {
                double off = 0.5 * (a[i - 1] - a[i + 1]) / d;
                p.location = y[i] + off * (y[i + 1] - y[i]);
                double peak_abs = a[i] - 0.25 * (a[i - 1] - a[i + 1]) * off;
                p.value = values[i] < 0 ? -peak_abs : peak_abs;
            }
        }
        p.width = fit_gaussian_std(y, a, i);
        rep.peaks.push_back(p);
    }
    std::stable_sort(rep.peaks.begin(), rep.peaks.end(),
                     [](const Peak& x, const Peak& z) { return std::abs(x.value) > std::abs(z.value); });
    return rep;
}

inline PeakReport find_peaks(const ImageProfile& img, double rel_threshold = 0.1) {
    double mx = img.values.size() ? img.values.cwiseAbs().maxCoeff() : 0.0;
    bool real = mx == 0 || img.values.imag().cwiseAbs().maxCoeff() <= 1e-12 * mx;
    return find_peaks(img.grid, real ? img.real() : img.abs(), rel_threshold, img.method);
}

inline std::vector<int> sign_at(const RVec& y, const RVec& values, const std::vector<double>& locations) {
    std::vector<int> out;
    for (double z : locations) {
        Eigen::Index best = 0;
        double d = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < y.size(); ++i)
            if (std::abs(y[i] - z) < d) {
                d = std::abs(y[i] - z);
                best = i;
            }
        double v = y.size() ? values[best] : 0.0;
        out.push_back((v > 0) - (v < 0));
    }
    return out;
}

inline double value_at(const RVec& y, const RVec& values, double z) {
    Eigen::Index best = 0;
    (y.array() - z).abs().minCoeff(&best);
    return values[best];
}

// std / |mean| with the std taken over real and imaginary parts together.
inline double cov_statistic(const std::vector<cplx>& samples) {
    if (samples.size() < 2) throw Error("cov_statistic: need >= 2 samples");
    cplx mean = 0;
    for (auto s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    double ss = 0;
    for (auto s : samples) ss += std::norm(s - mean);
    double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    double am = std::abs(mean);
    if (am <= 1e-300 * std::max(1.0, sd)) return std::numeric_limits<double>::infinity();
    return sd / am;
}

// True when every target location has a peak among the first k within tol.
inline bool peaks_match(const PeakReport& rep, const std::vector<double>& targets, double tol,
                        std::size_t k) {
    std::size_t n = std::min(k, rep.peaks.size());
    for (double z : targets) {
        bool hit = false;
        for (std::size_t i = 0; i < n; ++i) hit = hit || std::abs(rep.peaks[i].location - z) <= tol;
        if (!hit) return false;
    }
    return true;
}

// Strict 8-neighbour local maxima of |M| above rel_threshold * max|M|;
// ties are broken towards the lexicographically first cell.
inline int count_peaks_2d(const CMat& M, double rel_threshold = 0.1) {
    RMat a = M.cwiseAbs();
    double mx = a.size() ? a.maxCoeff() : 0.0;
    if (!(mx > 0)) return 0;
    int count = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            double v = a(i, j);
            if (v < rel_threshold * mx) continue;
            bool peak = true;
            for (int di = -1; di <= 1 && peak; ++di)
                for (int dj = -1; dj <= 1 && peak; ++dj) {
                    if (!di && !dj) continue;
                    Eigen::Index r = i + di, c = j + dj;
                    if (r < 0 || c < 0 || r >= a.rows() || c >= a.cols()) continue;
                    double w = a(r, c);
                    if (w > v || (w == v && (di < 0 || (di == 0 && dj < 0)))) peak = false;
                }
            count += peak;
        }
    return count;
}

}  // namespace cint
