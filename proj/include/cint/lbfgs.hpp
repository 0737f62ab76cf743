#pragma once

#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "common.hpp"

namespace cint {

struct LbfgsSettings {
    int max_iter = 20000;
    int memory = 12;
    double gtol = 1e-14;      // stop when |g|_inf <= gtol
    double f_target = -std::numeric_limits<double>::infinity();
    double c1 = 1e-4;
    int max_backtracks = 60;
    double ftol = 1e-13;  // stagnation: relative decrease below ftol ...
    int patience = 20;    // ... for this many consecutive steps
};

enum class LbfgsStatus { converged, reached_target, max_iter, line_search_failed, stalled };

struct LbfgsResult {
    RVec x;
    double f = 0;
    int iterations = 0;
    LbfgsStatus status = LbfgsStatus::max_iter;
    std::vector<double> history;  // objective after each accepted step
};

// fg(x, g) returns f(x) and writes the gradient into g.
template <class FG>
LbfgsResult lbfgs_minimize(FG&& fg, RVec x, const LbfgsSettings& st = {}) {
    LbfgsResult out;
    const Eigen::Index n = x.size();
    RVec g(n), gn(n), d(n), xn(n);
    double f = fg(x, g);
    out.history.push_back(f);
    std::deque<RVec> S, Y;
    std::deque<double> rho;
    std::vector<double> alpha(st.memory);
    auto finish = [&](LbfgsStatus s) {
        out.x = x;
        out.f = f;
        out.status = s;
        return out;
    };
    if (n == 0) return finish(LbfgsStatus::converged);
    int flat = 0;
    for (int it = 1; it <= st.max_iter; ++it) {
        out.iterations = it;
        if (f <= st.f_target) return finish(LbfgsStatus::reached_target);
        if (g.cwiseAbs().maxCoeff() <= st.gtol) return finish(LbfgsStatus::converged);
        // two-loop recursion
        d = -g;
        int m = static_cast<int>(S.size());
        for (int i = m - 1; i >= 0; --i) {
            alpha[i] = rho[i] * S[i].dot(d);
            d -= alpha[i] * Y[i];
        }
        if (m > 0) d *= S.back().dot(Y.back()) / Y.back().squaredNorm();
        else d /= std::max(1.0, g.norm());
        for (int i = 0; i < m; ++i) {
            double b = rho[i] * Y[i].dot(d);
            d += (alpha[i] - b) * S[i];
        }
        double slope = g.dot(d);
        if (!(slope < 0)) {
            S.clear();
            Y.clear();
            rho.clear();
            d = -g / std::max(1.0, g.norm());
            slope = g.dot(d);
        }
        double step = 1.0, fn = 0;
        bool ok = false;
        for (int k = 0; k < st.max_backtracks; ++k) {
            xn = x + step * d;
            fn = fg(xn, gn);
            if (std::isfinite(fn) && fn <= f + st.c1 * step * slope) {
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) return finish(LbfgsStatus::line_search_failed);
        RVec s = xn - x, y = gn - g;
        double sy = s.dot(y);
        if (sy > 1e-300) {
            S.push_back(s);
            Y.push_back(y);
            rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > st.memory) {
                S.pop_front();
                Y.pop_front();
                rho.pop_front();
            }
        }
        bool small = f - fn <= st.ftol * std::max(std::abs(f), std::numeric_limits<double>::min());
        flat = small ? flat + 1 : 0;
        x = xn;
        g = gn;
        f = fn;
        out.history.push_back(f);
        if (flat >= st.patience) return finish(LbfgsStatus::stalled);
    }
    return finish(LbfgsStatus::max_iter);
}

}  // namespace cint
