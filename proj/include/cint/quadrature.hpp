#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "common.hpp"

namespace cint {

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1]
inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
void gk15(F& f, double a, double b, double& val, double& err) {
    double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double fc = f(c);
    double rk = fc * gk_wk[7], rg = fc * gk_wg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = hw * gk_x[j];
        double s = f(c - dx) + f(c + dx);
        rk += gk_wk[j] * s;
        if (j % 2 == 1) rg += gk_wg[j / 2] * s;
    }
    val = rk * hw;
    err = std::abs((rk - rg) * hw);
}

}  // namespace detail

struct QuadResult {
    double value = 0;
    double abs_error = 0;
    int intervals = 0;
};

// Adaptive G7K15 by global bisection of the worst interval.
template <class F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                     double abs_tol = 0.0, int max_intervals = 4000) {
    struct Seg { double a, b, v, e; };
    std::vector<Seg> segs;
    double v, e;
    detail::gk15(f, a, b, v, e);
    segs.push_back({a, b, v, e});
    double total = v, err = e;
    while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
           static_cast<int>(segs.size()) < max_intervals) {
        auto worst = std::max_element(segs.begin(), segs.end(),
                                      [](const Seg& x, const Seg& y) { return x.e < y.e; });
        Seg s = *worst;
        double m = 0.5 * (s.a + s.b);
        double v1, e1, v2, e2;
        detail::gk15(f, s.a, m, v1, e1);
        detail::gk15(f, m, s.b, v2, e2);
        *worst = {s.a, m, v1, e1};
        segs.push_back({m, s.b, v2, e2});
        total = 0;
        err = 0;
        for (const auto& g : segs) {
            total += g.v;
            err += g.e;
        }
        if (err < 50 * std::numeric_limits<double>::epsilon() * std::abs(total)) break;
    }
    return {total, err, static_cast<int>(segs.size())};
}

// Sum of integrals over consecutive breakpoints.
template <class F>
QuadResult integrate_pieces(F&& f, const std::vector<double>& breaks, double rel_tol = 1e-10) {
    QuadResult out;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        auto r = integrate(f, breaks[i], breaks[i + 1], rel_tol, 0.0);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.intervals += r.intervals;
    }
    return out;
}

}  // namespace cint
