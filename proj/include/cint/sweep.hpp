#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace cint {

// Mean distance from each true reflector to the nearest of the top-k peaks,
// k the reflector count.
inline double peak_location_error(const PeakReport& rep, const std::vector<Reflector>& truth) {
    if (truth.empty()) return 0;
    std::size_t k = std::min(truth.size(), rep.peaks.size());
    if (k == 0) return std::numeric_limits<double>::infinity();
    double s = 0;
    for (const auto& r : truth) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) best = std::min(best, std::abs(rep.peaks[i].location - r.z));
        s += best;
    }
    return s / static_cast<double>(truth.size());
}

// M(y, y) = |W (conj(r) .* F(y))|^2 without forming the matrix.
inline double two_point_diagonal_at(const Record& rec, double X, double y) {
    RVec yp(1);
    yp[0] = y;
    CMat F = reference_matrix(yp, rec.scene);
    WindowFactor wf = window_factor(rec.scene.sensors(), X);
    CVec b = (rec.r.conjugate().array() * F.row(0).transpose().array()).matrix();
    return (wf.W.cast<cplx>() * b).squaredNorm();
}

struct SweepRow {
    std::string axis;
    double value = 0;
    int realizations = 0;
    double X = 0;
    double cov = 0;
    std::map<std::string, double> err_mean, err_std;
};

struct SweepSettings {
    std::vector<std::string> methods = {"sar", "ci", "sp", "op"};
    std::uint64_t seed = 0;
    PipelineSettings pipeline{};
};

inline const std::vector<std::string>& sweep_axes() {
    static const std::vector<std::string> a = {"X", "sigma_tau", "sigma_W"};
    return a;
}

// One row per value. The CoV column uses noise-free records except on the
// sigma_W axis, where the noise is the swept quantity.
inline std::vector<SweepRow> sweep(const Scene& base, const std::string& axis, const std::vector<double>& values,
                                   int realizations, const SweepSettings& st = {}) {
    if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end())
        throw Error("unknown sweep axis '" + axis + "'");
    if (values.empty()) throw Error("sweep: empty values list");
    if (realizations < 2) throw Error("sweep: need >= 2 realizations");
    std::vector<SweepRow> rows;
    for (double v : values) {
        Scene s = base;
        std::optional<double> X_override;
        if (axis == "X") {
            if (!(v > 0)) throw Error("sweep: X values must be > 0");
            X_override = v;
        } else if (axis == "sigma_tau") {
            s.sigma_tau = v;
        } else {
            s.sigma_W = v;
        }
        s.validate();
        Scales sc = derive_scales(s, X_override);

        Scene hom = s;
        hom.sigma_tau = 0;
        hom.sigma_W = 0;
        RVec mg = uniform_grid(s.y_min, s.y_max, sc.h / 3);
        Record r0 = synthesize_record(hom, {RVec::Zero(s.N), 0}, 0);
        Eigen::Index ip = 0;
        two_point_cint(r0, derive_scales(hom).X, mg, false).diagonal().maxCoeff(&ip);
        double y_peak = mg[ip];

        std::vector<double> peak_values(realizations);
        std::vector<std::map<std::string, double>> errs(realizations);
        parallel_for(static_cast<std::size_t>(realizations), [&](std::size_t i) {
            std::uint64_t seed_i = mix_seed(st.seed, i);
            auto rs = realization_seeds(seed_i);
            TravelTimeScreen t = sample_screen(s, rs.screen);
            Record rec = synthesize_record(s, t, rs.noise);
            Scene quiet = s;
            if (axis != "sigma_W") quiet.sigma_W = 0;
            peak_values[i] = two_point_diagonal_at(synthesize_record(quiet, t, rs.noise), sc.X, y_peak);
            PipelineResult res = compute_images(rec, st.methods, st.pipeline, X_override, seed_i);
            for (const auto& [m, rep] : res.peaks) errs[i][m] = peak_location_error(rep, s.reflectors);
        });

        SweepRow row;
        row.axis = axis;
        row.value = v;
        row.realizations = realizations;
        row.X = sc.X;
        std::vector<cplx> samples(peak_values.begin(), peak_values.end());
        row.cov = cov_statistic(samples);
        for (const auto& m : st.methods) {
            double sum = 0, sum2 = 0;
            for (const auto& e : errs) {
                double x = e.at(m);
                sum += x;
                sum2 += x * x;
            }
            double n = realizations;
            double mean = sum / n;
            row.err_mean[m] = mean;
            row.err_std[m] = std::sqrt(std::max(0.0, (sum2 - n * mean * mean) / (n - 1)));
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& methods) {
    std::string s = "axis,value,realizations,X,cov";
    for (const auto& m : methods) s += "," + m + "_err_mean," + m + "_err_std";
    s += "\n";
    for (const auto& r : rows) {
        s += r.axis + "," + io::fmt(r.value) + "," + std::to_string(r.realizations) + "," + io::fmt(r.X) + "," +
             io::fmt(r.cov);
        for (const auto& m : methods) s += "," + io::fmt(r.err_mean.at(m)) + "," + io::fmt(r.err_std.at(m));
        s += "\n";
    }
    return s;
}

}  // namespace cint
