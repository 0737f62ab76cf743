#pragma once

#include <string>

#include <json.hpp>

#include "common.hpp"

namespace cint {

struct ImageProfile {
    RVec grid;
    CVec values;
    std::string method;  // SAR, CI, SP, OP, PR
    double norm = 1.0;   // original max modulus before normalization
    nlohmann::json metrics = nlohmann::json::object();

    RVec real() const { return values.real(); }
    RVec abs() const { return values.cwiseAbs(); }
};

inline ImageProfile make_image(RVec grid, CVec values, std::string method) {
    ImageProfile img{std::move(grid), std::move(values), std::move(method)};
    double m = img.values.size() ? img.values.cwiseAbs().maxCoeff() : 0.0;
    img.norm = m;
    if (m > 0) img.values /= m;
    return img;
}

inline ImageProfile make_image(RVec grid, const RVec& values, std::string method) {
    return make_image(std::move(grid), CVec(values.cast<cplx>()), std::move(method));
}

}  // namespace cint
