#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "kernel_model.hpp"
#include "scenario.hpp"

namespace cint {

struct Check {
    std::string name;
    double value = 0;
    double limit = 0;
    bool pass = false;
    std::string note;
};

inline Check check_le(std::string name, double value, double limit, std::string note = {}) {
    return {std::move(name), value, limit, std::isfinite(value) && value <= limit, std::move(note)};
}

inline Check check_ge(std::string name, double value, double limit, std::string note = {}) {
    return {std::move(name), value, limit, std::isfinite(value) && value >= limit, std::move(note)};
}

inline Check check_true(std::string name, bool ok, std::string note = {}) {
    return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok, std::move(note)};
}

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    double seconds = 0;

    bool pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return !checks.empty();
    }

    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json j = {{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}};
            if (!c.note.empty()) j["note"] = c.note;
            a.push_back(j);
        }
        return {{"suite", suite}, {"pass", pass()}, {"seconds", seconds}, {"checks", a}};
    }
};

// Runs fn, records each check it produces; an exception becomes a failed check.
template <class Fn>
void run_check(SuiteReport& rep, const std::string& name, Fn&& fn) {
    try {
        fn(rep.checks);
    } catch (const std::exception& e) {
        rep.checks.push_back({name, 0, 0, false, std::string("error: ") + e.what()});
    }
}

// Moments ------------------------------------------------------------------

inline SuiteReport suite_moments(std::uint64_t seed = 7, int realizations = 10000) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep{"moments"};
    Scene s = preset_scene("fig2");
    const double st2 = s.sigma_tau * s.sigma_tau;

    run_check(rep, "tau_covariance", [&](auto& out) {
        double v = tau_covariance(s.ell, s) / st2;
        out.push_back(check_le("tau_covariance(ell) / sigma^2 vs 0.85562", std::abs(v - 0.85562), 5e-6));
        double closed = std::sqrt(pi / 2) * std::erf(1 / std::sqrt(2.0));
        out.push_back(check_le("tau_covariance(ell) quadrature vs erf form", std::abs(v - closed) / closed, 1e-9));
        out.push_back(check_le("tau_covariance(0) = sigma^2", std::abs(tau_covariance(0, s) / st2 - 1), 1e-12));
        out.push_back(check_le("tau_covariance(1e4 ell) < 1e-3 sigma^2", tau_covariance(1e4 * s.ell, s) / st2, 1e-3));
        double worst_even = 0, worst_mono = 0, prev = tau_covariance(0, s);
        for (int i = 1; i <= 60; ++i) {
            double dx = 0.1 * i * s.ell;
            double c = tau_covariance(dx, s);
            worst_even = std::max(worst_even, std::abs(c - tau_covariance(-dx, s)) / st2);
            worst_mono = std::max(worst_mono, (c - prev) / st2);
            prev = c;
        }
        out.push_back(check_le("tau_covariance even in dx", worst_even, 1e-14));
        out.push_back(check_le("tau_covariance nonincreasing in |dx|", worst_mono, 0.0));
    });

    run_check(rep, "gram", [&](auto& out) {
        RVec x = s.sensors();
        RMat C(x.size(), x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            for (Eigen::Index j = i; j < x.size(); ++j) C(i, j) = C(j, i) = tau_covariance_erf(x[i] - x[j], s);
        double mn = Eigen::SelfAdjointEigenSolver<RMat>(C, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        out.push_back(check_le("sensor Gram min eigenvalue >= -1e-10 sigma^2", -mn / st2, 1e-10));
    });

    run_check(rep, "coherence", [&](auto& out) {
        CoherenceReport c = coherence_check(s, realizations, seed);
        out.push_back(check_le("sample variance of phase within 5% of sigma^2",
                               std::abs(c.variance - st2) / st2, 0.05));
        out.push_back(check_le("|E exp(i phase)| < 0.05", c.mean_phasor, 0.05));
        double worst = 0;
        for (const auto& r : c.rows) {
            if (r.std_error > 0) worst = std::max(worst, std::abs(r.empirical - r.predicted) / r.std_error);
            else worst = std::max(worst, std::abs(r.empirical - r.predicted) > 1e-12 ? 1e300 : 0.0);
            if (std::abs(r.dx - derive_scales(s).Xd) < 1e-9)
                out.push_back(check_le("coherence at dx = Xd within 0.03 of exp(-1/2)",
                                       std::abs(r.empirical - std::exp(-0.5)), 0.03));
        }
        out.push_back(check_le("coherence within 3 standard errors at every offset", worst, 3.0));
    });

    run_check(rep, "noise", [&](auto& out) {
        Scene sh = s;
        sh.sigma_tau = 0;
        double acc = 0, rule_err = 0;
        int draws = 0;
        CVec clean = noiseless_signal(sh, RVec());
        for (int i = 0; draws < 10000; ++i) {
            Record r = synthesize_record(sh, {RVec::Zero(sh.N), 0}, mix_seed(seed, 100 + i));
            rule_err = std::max(rule_err, std::abs(r.sigma_W_abs - sh.sigma_W * clean.cwiseAbs().maxCoeff()));
            acc += (r.r - clean).squaredNorm();
            draws += sh.N;
        }
        double sd = std::sqrt(acc / draws), want = sh.sigma_W * clean.cwiseAbs().maxCoeff();
        out.push_back(check_le("noise std within 5% of sigma_W max|signal|", std::abs(sd - want) / want, 0.05));
        out.push_back(check_le("sigma_W_abs follows the calibration rule", rule_err, 0.0));
    });

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Spectral -----------------------------------------------------------------

struct SingleSpectrumResult {
    std::vector<double> ratios;        // dense Lambda_{n+1} / Lambda_n, n = 0..4
    std::vector<double> value_errors;  // |dense - closed| / closed, n = 0..4
    std::vector<double> overlaps;      // |<dense v_n, closed V_n>|
    double expected_ratio = 0;
    double gaussian_std = 0;
};

// Dense eigendecomposition of dy * K_j on [z - 8H, z + 8H] at spacing h / 4.
inline SingleSpectrumResult single_reflector_oracle(double H = 11.36, double h = 1.0) {
    Reflector r{0.0, 1.0};
    GaussKernelParams p{H, h, {r}};
    RVec g = uniform_grid(-8 * H, 8 * H, h / 4);
    double dy = g[1] - g[0];
    Eigen::SelfAdjointEigenSolver<RMat> es(discretize_kernel(p, g));
    HermiteTable t = hermite_table(6, H, h);
    SingleSpectrumResult out;
    out.expected_ratio = t.ratio();
    out.gaussian_std = std::sqrt(H * h);
    Eigen::Index n = g.size();
    for (int k = 0; k < 5; ++k) {
        double lam = es.eigenvalues()[n - 1 - k];
        double next = es.eigenvalues()[n - 2 - k];
        out.ratios.push_back(next / lam);
        double closed = closed_eigenvalue(1.0, k, H, h);
        out.value_errors.push_back(std::abs(lam - closed) / closed);
        Eigenpair ep = closed_eigenpair(r, k, t);
        RVec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = ep.V(g[i]) * std::sqrt(dy);
        out.overlaps.push_back(std::abs(es.eigenvectors().col(n - 1 - k).dot(v)) / v.norm());
    }
    return out;
}

struct PairSpectrumResult {
    double composite = 0, dense = 0, rel_error = 0;
    bool sign_change = false;
    double zeta = 0;
};

// Two unit reflectors at separation sep_over_H * H; the signed case uses rho = (1, -1).
inline PairSpectrumResult pair_oracle(double sep_over_H = 3.5, double H = 11.36, double h = 1.0) {
    double sep = sep_over_H * H;
    PairSpectrumResult out;
    out.zeta = sep / (3 * H);
    RVec g = uniform_grid(-8 * H, sep + 8 * H, h / 4);
    HermiteTable t = hermite_table(2, H, h);
    {
        GaussKernelParams p{H, h, {{0.0, 1.0}, {sep, 1.0}}};
        Eigen::SelfAdjointEigenSolver<RMat> es(discretize_kernel(p, g), Eigen::EigenvaluesOnly);
        out.dense = es.eigenvalues().maxCoeff();
        out.composite = composite_spectrum(p, t, 1).values[0];
        out.rel_error = std::abs(out.composite - out.dense) / out.dense;
    }
    {
        GaussKernelParams p{H, h, {{0.0, 1.0}, {sep, -1.0}}};
        Eigen::SelfAdjointEigenSolver<RMat> es(discretize_kernel(p, g));
        RVec v = es.eigenvectors().col(g.size() - 1);
        double a = value_at(g, v, 0.0), b = value_at(g, v, sep);
        out.sign_change = a * b < 0;
    }
    return out;
}

struct IdentityResult {
    double worst_b6 = 0, worst_b10 = 0;
    int samples = 0;
};

inline IdentityResult identity_sample(std::uint64_t seed = 11, int samples = 20) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> uh(0.3, 2.0), ur(1.0, 6.0), uz(-3.0, 3.0);
    std::uniform_int_distribution<int> un(1, 10);
    IdentityResult out;
    out.samples = samples;
    for (int i = 0; i < samples; ++i) {
        double h = uh(rng);
        double H = h / 2 + h * ur(rng);
        double s = std::sqrt(H * h);
        double z = s * uz(rng), zp = s * uz(rng), eta = s * uz(rng), y = s * uz(rng);
        int n = un(rng);
        out.worst_b6 = std::max(out.worst_b6, identity_b6_check(H, h, z, zp, eta, y));
        out.worst_b10 = std::max(out.worst_b10, lemma_b10_check(n, H, h, z, zp, eta, y));
    }
    return out;
}

inline SuiteReport suite_spectral(std::uint64_t seed = 7) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep{"spectral"};

    run_check(rep, "hermite", [&](auto& out) {
        RMat T = hermite_theta(8);
        out.push_back(check_true("He_2 coefficients {-1, 0, 1}", T(2, 0) == -1 && T(2, 1) == 0 && T(2, 2) == 1));
        HermiteTable t = hermite_table(8, 11.36, 1.0);
        out.push_back(check_le("Theta ThetaInv = I", (t.Theta * t.ThetaInv - RMat::Identity(9, 9)).cwiseAbs().maxCoeff(),
                               1e-12));
        double worst = 0;
        for (int n = 0; n <= 8; ++n)
            for (int m = 0; m <= n; ++m) {
                auto f = [&](double x) { return hermite_he(n, x) * hermite_he(m, x) * std::exp(-x * x / 2); };
                double v = integrate(f, -40, 40, 1e-13).value;
                double want = n == m ? std::sqrt(2 * pi) * std::tgamma(n + 1.0) : 0.0;
                worst = std::max(worst, std::abs(v - want) / (std::sqrt(2 * pi) * std::tgamma(n + 1.0)));
            }
        out.push_back(check_le("Hermite orthogonality n, m <= 8", worst, 1e-8));
        double strict_upper = t.Gamma.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff();
        double diag = (t.Gamma.diagonal().array() - 1).abs().maxCoeff();
        out.push_back(check_le("Gamma unit lower triangular", std::max(strict_upper, diag), 0.0));
        out.push_back(check_le("p_1(xi) = xi", std::abs(t.Gamma(1, 0)), 1e-14));
    });

    run_check(rep, "single_reflector", [&](auto& out) {
        SingleSpectrumResult r = single_reflector_oracle();
        double wr = 0, wv = 0, wo = 1;
        for (int k = 0; k < 5; ++k) {
            wr = std::max(wr, std::abs(r.ratios[k] - r.expected_ratio) / r.expected_ratio);
            wv = std::max(wv, r.value_errors[k]);
            wo = std::min(wo, r.overlaps[k]);
        }
        out.push_back(check_le("top-5 eigenvalue ratios vs (H-h/2)/(H+h/2)", wr, 1e-3));
        out.push_back(check_le("top-5 eigenvalues vs closed form", wv, 1e-3));
        out.push_back(check_ge("top-5 eigenvector overlaps", wo, 0.999));
    });

    run_check(rep, "identities", [&](auto& out) {
        IdentityResult r = identity_sample(seed);
        out.push_back(check_le("identity B6 residual (20 samples)", r.worst_b6, 1e-7));
        out.push_back(check_le("lemma B10 residual (20 samples)", r.worst_b10, 1e-7));
    });

    run_check(rep, "pair", [&](auto& out) {
        PairSpectrumResult r = pair_oracle();
        out.push_back(check_le("composite Lambda_0 vs dense, separation 3.5H", r.rel_error, 1e-3));
        out.push_back(check_true("rho = (1, -1): V_0 changes sign", r.sign_change));
    });

    run_check(rep, "positivity", [&](auto& out) {
        GaussKernelParams p{11.36, 1.0, {{93.7, 2}, {123, -1}, {152, 1.5}}};
        RVec g = uniform_grid(40, 210, 0.5);
        RVec ev = Eigen::SelfAdjointEigenSolver<RMat>(discretize_kernel(p, g), Eigen::EigenvaluesOnly).eigenvalues();
        out.push_back(check_le("signed kernel min eigenvalue >= -1e-8 lambda_max", -ev.minCoeff() / ev.maxCoeff(), 1e-8));
    });

    run_check(rep, "power", [&](auto& out) {
        Scene s = preset_scene("fig2");
        Record rec = simulate(s, seed);
        Scales sc = derive_scales(s);
        RVec g = uniform_grid(100, 166, sc.h / 3);
        CMat M = two_point_cint(rec, sc.X, g, true).matrix();
        Eigen::SelfAdjointEigenSolver<CMat> es(M);
        PowerSettings ps;
        ps.tol = 1e-10;
        ps.max_iter = 20000;
        ps.seed = mix_seed(seed, 11);
        EigenResult e = power_leading(M, ps);
        Eigen::Index n = M.rows();
        double lam = es.eigenvalues()[n - 1];
        out.push_back(check_le("power method eigenvalue vs dense (G <= 300)", std::abs(e.value - lam) / lam, 1e-7));
        out.push_back(check_ge("power method vector overlap vs dense", std::abs(es.eigenvectors().col(n - 1).dot(e.vector)),
                               1 - 1e-7));
    });

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Fourier ------------------------------------------------------------------

// rho_hat(kappa) = sum rho_j exp(-i kappa (z_j - yc))
inline CVec true_spectrum(const std::vector<Reflector>& refl, const RVec& kappa, double yc) {
    CVec out = CVec::Zero(kappa.size());
    for (Eigen::Index i = 0; i < kappa.size(); ++i)
        for (const auto& r : refl) out[i] += r.rho * std::exp(-I * (kappa[i] * (r.z - yc)));
    return out;
}

inline FourierProducts analytic_products(const std::vector<Reflector>& refl, double H, double h, double h_est,
                                         double y_min = 0, double y_max = 245) {
    RVec g = uniform_grid(y_min, y_max, h / 3);
    GaussKernelParams p{H, h, refl};
    return fourier_products(analytic_two_point(p, g), g, H, h, h_est, y_max - y_min);
}

// Peak sidelobe: largest |image| beyond the first sign change on either side
// of the main peak.
inline double sidelobe_level(const ImageProfile& img) {
    RVec v = img.real();
    Eigen::Index n = v.size(), k = 0;
    if (n == 0) return 0;
    v.cwiseAbs().maxCoeff(&k);
    Eigen::Index lo = k, hi = k;
    while (lo > 0 && v[lo - 1] * v[k] > 0) --lo;
    while (hi + 1 < n && v[hi + 1] * v[k] > 0) ++hi;
    double s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (i < lo || i > hi) s = std::max(s, std::abs(v[i]));
    return s / std::abs(v[k]);
}

struct FourierSuiteResult {
    double modulus_error = 0;      // max |P(k,0) scale - |rho_hat|^2| / max |rho_hat|^2
    double factor_error = 0;       // masked pairs vs rho_hat_i conj(rho_hat_j)
    double hermitian_error = 0;
    double recursive_phase_error = 0;
    double optimized_objective = 0;  // from theta = 0, relative to masked energy
    double true_phase_objective = 0;
    std::vector<double> op_peak_errors;
};

inline double wrap_phase(double x) { return std::remainder(x, 2 * pi); }

inline FourierSuiteResult fourier_analytic_checks(double H = 11.36, double h = 1.0, double h_est = 2.0) {
    FourierSuiteResult out;
    auto refl = reflectors_three();
    FourierProducts fp = analytic_products(refl, H, h, h_est);
    CVec rh = true_spectrum(refl, fp.kappa, fp.y_center);
    double r2 = rh.cwiseAbs2().maxCoeff();
    Eigen::Index n = fp.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        out.modulus_error = std::max(out.modulus_error, std::abs(fp.P(i, i) * fp.scale - std::norm(rh[i])) / r2);
        for (Eigen::Index j = 0; j < n; ++j) {
            out.hermitian_error =
                std::max(out.hermitian_error, std::abs(fp.P(i, j) - std::conj(fp.P(j, i))) / fp.P.diagonal().cwiseAbs().maxCoeff());
            if (fp.mask(i, j))
                out.factor_error =
                    std::max(out.factor_error, std::abs(fp.P(i, j) * fp.scale - rh[i] * std::conj(rh[j])) / r2);
        }
    }
    CVec est = recursive_estimate(fp);
    double rmax = rh.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(rh[i]) < 1e-3 * rmax) continue;
        double d = wrap_phase(std::arg(est[i]) - std::arg(rh[i]) - (std::arg(est[fp.center()]) - std::arg(rh[fp.center()])));
        out.recursive_phase_error = std::max(out.recursive_phase_error, std::abs(d));
    }
    RVec truth(n);
    for (Eigen::Index i = 0; i < n; ++i) truth[i] = std::arg(rh[i]) - std::arg(rh[fp.center()]);
    double E = masked_energy(fp);
    out.true_phase_objective = phase_objective(fp, product_modulus(fp), truth) / E;
    PhaseEstimate ph = optimize_phase(fp, RVec::Zero(n));
    out.optimized_objective = ph.relative_objective;
    RVec dg = uniform_grid(0, 245, 0.03);
    PeakReport pk = find_peaks(op_image(fp, ph.theta, dg), 0.1);
    for (const auto& r : refl) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < std::min<std::size_t>(3, pk.peaks.size()); ++k)
            best = std::min(best, std::abs(pk.peaks[k].location - r.z));
        out.op_peak_errors.push_back(best);
    }
    return out;
}

inline SuiteReport suite_fourier(std::uint64_t /*seed*/ = 7) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep{"fourier"};
    const double H = 11.36, h = 1.0, h_est = 2.0;

    run_check(rep, "analytic", [&](auto& out) {
        FourierSuiteResult r = fourier_analytic_checks(H, h, h_est);
        out.push_back(check_le("P(kappa, 0) vs |rho_hat|^2", r.modulus_error, 1e-6));
        out.push_back(check_le("masked products factorize", r.factor_error, 1e-6));
        out.push_back(check_le("conjugate symmetry", r.hermitian_error, 1e-10));
        out.push_back(check_le("recursive_estimate phase error [rad]", r.recursive_phase_error, 1e-3));
        out.push_back(check_le("objective at the true phase", r.true_phase_objective, 1e-12));
        out.push_back(check_le("optimize_phase from 0: objective / sum |P|^2", r.optimized_objective, 1e-10));
        double worst = 0;
        for (double e : r.op_peak_errors) worst = std::max(worst, e);
        out.push_back(check_le("OP peaks within h_est of truth", worst, h_est));
    });

    run_check(rep, "shift", [&](auto& out) {
        for (double z : {0.0, 7.5}) {
            FourierProducts fp = analytic_products({{z, 1.0}}, H, h, h_est, -122.5, 122.5);
            CVec est = recursive_estimate(fp);
            // unwrap from the centre outwards and fit the slope
            Eigen::Index n = fp.size();
            RVec ph(n);
            for (Eigen::Index i = 0; i < n; ++i) ph[i] = std::arg(est[i]);
            for (Eigen::Index i = fp.center() + 1; i < n; ++i) ph[i] = ph[i - 1] + wrap_phase(ph[i] - ph[i - 1]);
            for (Eigen::Index i = fp.center() - 1; i >= 0; --i) ph[i] = ph[i + 1] + wrap_phase(ph[i] - ph[i + 1]);
            double sxx = fp.kappa.squaredNorm(), sxy = fp.kappa.dot(ph);
            double slope = sxy / sxx;
            double want = -(z - fp.y_center);
            if (z == 0) {
                double dev = (est.array() - est[fp.center()]).abs().maxCoeff() / std::abs(est[fp.center()]);
                out.push_back(check_le("single reflector at 0: constant spectrum", dev, 1e-10));
            } else {
                out.push_back(check_le("shifted reflector: phase slope vs -z (relative)", std::abs(slope - want) / std::abs(want),
                                       1e-2));
            }
        }
    });

    run_check(rep, "identifiability", [&](auto& out) {
        std::vector<Reflector> two = {{123, 1.0}, {140, 0.7}};
        FourierProducts fp = analytic_products(two, H, h, h_est);
        CVec rh = true_spectrum(two, fp.kappa, fp.y_center);
        RVec m = product_modulus(fp), th(fp.size());
        for (Eigen::Index i = 0; i < fp.size(); ++i) th[i] = std::arg(rh[i]);
        double f0 = phase_objective(fp, m, th);
        double fc = phase_objective(fp, m, (th.array() + 0.7).matrix());
        out.push_back(check_le("objective invariant under constant phase", std::abs(fc - f0) / masked_energy(fp), 1e-12));
        double least = std::numeric_limits<double>::infinity();
        for (double a : {-1.0, -0.5, 0.5, 1.0}) least = std::min(least, phase_objective(fp, m, th + a * fp.kappa) - f0);
        out.push_back(check_ge("linear phase strictly increases the objective", least / masked_energy(fp), 1e-6));
    });

    run_check(rep, "taper", [&](auto& out) {
        std::vector<Reflector> one = {{122.5, 1.0}};
        FourierProducts fp = analytic_products(one, H, h, h_est);
        CVec rh = true_spectrum(one, fp.kappa, fp.y_center);
        RVec th(fp.size());
        for (Eigen::Index i = 0; i < fp.size(); ++i) th[i] = std::arg(rh[i]);
        RVec dg = uniform_grid(0, 245, 0.03);
        double tukey_side = sidelobe_level(op_image(fp, th, dg, {0.25}));
        double box_side = sidelobe_level(op_image(fp, th, dg, {0.0}));
        out.push_back(check_le("Tukey sidelobes <= hard-cutoff sidelobes", tukey_side - box_side, 0.0,
                               "tukey " + std::to_string(tukey_side) + ", box " + std::to_string(box_side)));
    });

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// Stability ------------------------------------------------------------------

inline std::vector<double> stability_X_values(const Scene& s) {
    Scales sc = derive_scales(s);
    return {s.a, sc.Xd, sc.Xd / 3, sc.Xd / 10};
}

// Largest increase of CoV as X decreases, in units of the larger standard error.
inline double stability_violation(const StabilityTable& t) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        double se = std::max({t.rows[i].cov_se, t.rows[i - 1].cov_se, 1e-300});
        worst = std::max(worst, (t.rows[i].cov - t.rows[i - 1].cov) / se);
    }
    return worst;
}

inline SuiteReport suite_stability(std::uint64_t seed = 7, int realizations = 50) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep{"stability"};
    Scene s = preset_scene("fig2");
    Scales sc = derive_scales(s);
    RVec g = uniform_grid(s.y_min, s.y_max, sc.h / 3);

    run_check(rep, "sweep", [&](auto& out) {
        StabilityTable t = stability_sweep(s, realizations, stability_X_values(s), seed, g);
        out.push_back(check_le("CoV nonincreasing as X decreases (within 2 SE)", stability_violation(t), 2.0));
        for (const auto& r : t.rows)
            if (std::abs(r.X - sc.Xd / 3) < 1e-9) out.push_back(check_le("CoV at X = Xd/3 below 0.5", r.cov, 0.5));
    });

    run_check(rep, "homogeneous", [&](auto& out) {
        Scene h = s;
        h.sigma_tau = 0;
        StabilityTable t = stability_sweep(h, 20, stability_X_values(s), seed, g);
        double worst = 0;
        for (const auto& r : t.rows) worst = std::max(worst, r.cov);
        out.push_back(check_le("sigma_tau = 0: CoV = 0", worst, 1e-12));
    });

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> n = {"moments", "spectral", "fourier", "stability"};
    return n;
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed = 7) {
    if (name == "moments") return suite_moments(seed);
    if (name == "spectral") return suite_spectral(seed);
    if (name == "fourier") return suite_fourier(seed);
    if (name == "stability") return suite_stability(seed);
    throw Error("unknown suite '" + name + "'");
}

}  // namespace cint
