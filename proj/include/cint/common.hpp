#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace cint {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// splitmix64 finalizer, used to derive per-realization seeds
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed, 0)); }

// Runs fn(i) for i in [0, n). Each index must write only its own output slot,
// so results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& fn, unsigned max_threads = 0) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned nt = max_threads ? std::min(max_threads, hw) : hw;
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    for (auto& th : pool) th.join();
}

// Uniform grid lo, lo+d, ... up to hi (inclusive within 1e-9 cells).
inline RVec uniform_grid(double lo, double hi, double d) {
    if (!(d > 0) || !(hi > lo)) throw Error("uniform_grid: bad range");
    auto n = static_cast<Eigen::Index>(std::floor((hi - lo) / d + 1e-9)) + 1;
    RVec g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = lo + d * static_cast<double>(i);
    return g;
}

inline double gaussian(double x, double s) {
    return std::exp(-x * x / (2 * s * s)) / (std::sqrt(2 * pi) * s);
}

}  // namespace cint
