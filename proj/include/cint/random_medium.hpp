#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <vector>

#include "common.hpp"
#include "quadrature.hpp"
#include "scene.hpp"

namespace cint {

// Cov[w0 tau(x), w0 tau(x+dx)] = sigma_tau^2 int_0^1 exp(-(dx s)^2 / (2 ell^2)) ds
inline double tau_covariance(double dx, const Scene& s) {
    double st2 = s.sigma_tau * s.sigma_tau;
    if (st2 == 0) return 0.0;
    if (dx == 0) return st2;
    double c = dx * dx / (2 * s.ell * s.ell);
    auto f = [c](double t) { return std::exp(-c * t * t); };
    return st2 * integrate(f, 0.0, 1.0, 1e-10).value;
}

// Closed form of the same integral, used as a cross-check.
inline double tau_covariance_erf(double dx, const Scene& s) {
    double st2 = s.sigma_tau * s.sigma_tau;
    double u = std::abs(dx) / (std::sqrt(2.0) * s.ell);
    if (u < 1e-8) return st2 * (1 - u * u / 3);
    return st2 * std::sqrt(pi) / 2 * std::erf(u) / u;
}

struct TravelTimeScreen {
    RVec tau;  // w0 * tau_n, dimensionless phase
    std::uint64_t seed = 0;
};

// Square-root factor of the screen covariance on a fixed point set. The
// Gram matrix is numerically rank deficient (ell >> sensor spacing), so a
// symmetric eigen square root is used instead of Cholesky.
class ScreenSampler {
public:
    ScreenSampler(const Scene& s, const RVec& points) : n_(points.size()) {
        if (n_ > 10000) throw Error("sample_screen: more than 1e4 points");
        if (s.sigma_tau == 0) return;
        std::map<double, double> cache;
        auto cov = [&](double dx) {
            dx = std::abs(dx);
            auto it = cache.find(dx);
            if (it != cache.end()) return it->second;
            return cache[dx] = tau_covariance(dx, s);
        };
        RMat C(n_, n_);
        for (Eigen::Index i = 0; i < n_; ++i)
            for (Eigen::Index j = i; j < n_; ++j) C(i, j) = C(j, i) = cov(points[i] - points[j]);
        double st2 = s.sigma_tau * s.sigma_tau;
        double tol = 1e-10 * st2 * static_cast<double>(n_);
        Eigen::SelfAdjointEigenSolver<RMat> es(C);
        if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -tol) {
            C.diagonal().array() += 1e-12 * st2;
            es.compute(C);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < -tol)
                throw Error("sample_screen: covariance factorization failed");
        }
        RVec w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        root_ = es.eigenvectors() * w.asDiagonal();
    }

    RVec sample(Rng& rng) const {
        if (root_.size() == 0) return RVec::Zero(n_);
        std::normal_distribution<double> nd;
        RVec g(n_);
        for (Eigen::Index i = 0; i < n_; ++i) g[i] = nd(rng);
        return root_ * g;
    }

    Eigen::Index size() const { return n_; }

private:
    Eigen::Index n_;
    RMat root_;
};

inline TravelTimeScreen sample_screen(const Scene& s, std::uint64_t seed) {
    ScreenSampler sampler(s, s.sensors());
    Rng rng = make_rng(seed);
    return {sampler.sample(rng), seed};
}

struct CoherenceRow {
    double dx = 0;
    double empirical = 0;   // Re of the sample mean of exp(2i(phi(x) - phi(x+dx)))
    double predicted = 0;   // exp(-dx^2 / (2 Xd^2))
    double std_error = 0;
};

struct CoherenceReport {
    std::vector<CoherenceRow> rows;
    double mean_phasor = 0;            // |E exp(i phi)|
    double mean_phasor_predicted = 0;  // exp(-sigma_tau^2 / 2)
    double variance = 0;               // pooled sample variance of phi
    int realizations = 0;
};

inline CoherenceReport coherence_check(const Scene& s, int n_realizations, std::uint64_t seed,
                                       std::vector<double> offsets = {}) {
    if (n_realizations < 1000) throw Error("coherence_check: need >= 1000 realizations");
    Scales sc = derive_scales(s);
    if (offsets.empty()) {
        if (std::isinf(sc.Xd)) offsets = {0.0, s.ell / 4, s.ell / 2, s.ell};
        else offsets = {0.0, sc.Xd / 4, sc.Xd / 2, sc.Xd, 2 * sc.Xd};
    }
    RVec pts(offsets.size() + 1);
    pts[0] = 0;
    for (std::size_t i = 0; i < offsets.size(); ++i) pts[i + 1] = offsets[i];
    ScreenSampler sampler(s, pts);

    std::vector<double> sum_c(offsets.size(), 0), sum_c2(offsets.size(), 0);
    cplx phasor = 0;
    double var = 0;
    for (int r = 0; r < n_realizations; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        RVec phi = sampler.sample(rng);
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            double c = std::cos(2 * (phi[0] - phi[i + 1]));
            sum_c[i] += c;
            sum_c2[i] += c * c;
        }
        phasor += std::exp(I * phi[0]);
        var += phi[0] * phi[0];
    }
    CoherenceReport out;
    double n = n_realizations;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        double m = sum_c[i] / n;
        double sd = std::sqrt(std::max(0.0, sum_c2[i] / n - m * m));
        double dx = offsets[i];
        double pred = std::isinf(sc.Xd) ? 1.0 : std::exp(-dx * dx / (2 * sc.Xd * sc.Xd));
        out.rows.push_back({dx, m, pred, sd / std::sqrt(n)});
    }
    out.mean_phasor = std::abs(phasor / n);
    out.mean_phasor_predicted = std::exp(-s.sigma_tau * s.sigma_tau / 2);
    out.variance = var / n;
    out.realizations = n_realizations;
    return out;
}

inline void write_screen_csv(const std::string& path, const Scene& s, const TravelTimeScreen& t) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(17);
    RVec x = s.sensors();
    out << "n,x_n,tau_n\n";
    for (Eigen::Index n = 0; n < t.tau.size(); ++n) out << n << ',' << x[n] << ',' << t.tau[n] << '\n';
}

}  // namespace cint
