#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "fourier.hpp"
#include "image.hpp"
#include "synthesis.hpp"

namespace cint::io {

namespace fs = std::filesystem;

// Write to <path>.tmp then rename over <path>.
inline void atomic_write(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Image CSV ----------------------------------------------------------------

inline std::string image_csv(const ImageProfile& img) {
    std::string s = "y,re,im,abs\n";
    for (Eigen::Index i = 0; i < img.grid.size(); ++i) {
        cplx v = img.values[i];
        s += fmt(img.grid[i]) + ',' + fmt(v.real()) + ',' + fmt(v.imag()) + ',' + fmt(std::abs(v)) + '\n';
    }
    return s;
}

inline void write_image_csv(const fs::path& path, const ImageProfile& img) { atomic_write(path, image_csv(img)); }

inline ImageProfile read_image_csv(const fs::path& path, const std::string& method = {}) {
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    if (line.rfind("y,re,im,abs", 0) != 0) throw Error("'" + path.string() + "': bad image header");
    std::vector<double> y;
    std::vector<cplx> v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double a, b, c, d;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
            throw Error("'" + path.string() + "': bad row");
        y.push_back(a);
        v.emplace_back(b, c);
    }
    ImageProfile img;
    img.grid = Eigen::Map<RVec>(y.data(), static_cast<Eigen::Index>(y.size()));
    img.values = Eigen::Map<CVec>(v.data(), static_cast<Eigen::Index>(v.size()));
    img.method = method;
    return img;
}

// Binary helpers (little-endian hosts only) ------------------------------

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <class T>
void put(std::string& s, T v) {
    char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    s.append(b, sizeof(T));
}

template <class T>
T get(const std::string& s, std::size_t& off) {
    if (off + sizeof(T) > s.size()) throw Error("truncated binary payload");
    T v;
    std::memcpy(&v, s.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

// twopoint.bin: "C2PT", u32 version=1, u64 G, f64 X_used, G*G (re, im) row-major.
inline std::string twopoint_bytes(const CMat& M, double X_used) {
    std::string s = "C2PT";
    put<std::uint32_t>(s, 1);
    put<std::uint64_t>(s, static_cast<std::uint64_t>(M.rows()));
    put<double>(s, X_used);
    s.reserve(s.size() + 16 * M.size());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            put<double>(s, M(i, j).real());
            put<double>(s, M(i, j).imag());
        }
    return s;
}

inline void write_twopoint(const fs::path& path, const CMat& M, double X_used) {
    atomic_write(path, twopoint_bytes(M, X_used));
}

inline CMat read_twopoint(const fs::path& path, double* X_used = nullptr) {
    std::string s = read_file(path);
    if (s.size() < 24 || s.compare(0, 4, "C2PT") != 0) throw Error("'" + path.string() + "': bad magic");
    std::size_t off = 4;
    if (get<std::uint32_t>(s, off) != 1) throw Error("'" + path.string() + "': unsupported version");
    auto G = static_cast<Eigen::Index>(get<std::uint64_t>(s, off));
    double X = get<double>(s, off);
    if (X_used) *X_used = X;
    if (s.size() != off + 16 * static_cast<std::size_t>(G * G)) throw Error("'" + path.string() + "': bad size");
    CMat M(G, G);
    for (Eigen::Index i = 0; i < G; ++i)
        for (Eigen::Index j = 0; j < G; ++j) {
            double re = get<double>(s, off);
            double im = get<double>(s, off);
            M(i, j) = cplx(re, im);
        }
    return M;
}

// record.bin: "CREC", u32 version=1, u64 N, N (re, im).
inline void write_record(const fs::path& path, const CVec& r) {
    std::string s = "CREC";
    put<std::uint32_t>(s, 1);
    put<std::uint64_t>(s, static_cast<std::uint64_t>(r.size()));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        put<double>(s, r[i].real());
        put<double>(s, r[i].imag());
    }
    atomic_write(path, s);
}

inline CVec read_record(const fs::path& path) {
    std::string s = read_file(path);
    if (s.size() < 16 || s.compare(0, 4, "CREC") != 0) throw Error("'" + path.string() + "': bad magic");
    std::size_t off = 4;
    if (get<std::uint32_t>(s, off) != 1) throw Error("'" + path.string() + "': unsupported version");
    auto N = static_cast<Eigen::Index>(get<std::uint64_t>(s, off));
    if (s.size() != off + 16 * static_cast<std::size_t>(N)) throw Error("'" + path.string() + "': bad size");
    CVec r(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        double re = get<double>(s, off);
        double im = get<double>(s, off);
        r[i] = cplx(re, im);
    }
    return r;
}

// products.csv: kappa, kappa_tilde, re, im over the masked pairs.
inline std::string products_csv(const FourierProducts& fp) {
    std::string s = "kappa,kappa_tilde,re,im\n";
    for (Eigen::Index i = 0; i < fp.size(); ++i)
        for (Eigen::Index j = 0; j < fp.size(); ++j) {
            if (!fp.mask(i, j)) continue;
            double kc = 0.5 * (fp.kappa[i] + fp.kappa[j]), kt = fp.kappa[i] - fp.kappa[j];
            s += fmt(kc) + ',' + fmt(kt) + ',' + fmt(fp.P(i, j).real()) + ',' + fmt(fp.P(i, j).imag()) + '\n';
        }
    return s;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) { atomic_write(path, j.dump(2) + "\n"); }

inline nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error("'" + path.string() + "': " + e.what());
    }
}

}  // namespace cint::io
