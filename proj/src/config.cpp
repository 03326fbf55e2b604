#include "noncollide/config.hpp"

#include <fstream>
#include <stdexcept>

#include "noncollide/io.hpp"

namespace noncollide {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
    throw std::runtime_error("config: " + what);
}

Matrix parse_gamma(const json& j, int d) {
    if (!j.is_object() || !j.contains("kind")) bad("gamma must be an object with a kind");
    const std::string kind = j.at("kind").get<std::string>();
    Matrix g(d, d);
    if (kind == "scalar") {
        const double v = j.at("value").get<double>();
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                if (i != k) g(i, k) = v;
    } else if (kind == "matrix") {
        const auto& rows = j.at("value");
        if (!rows.is_array() || static_cast<int>(rows.size()) != d) bad("gamma matrix must have d rows");
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(rows[i].size()) != d) bad("gamma matrix row has wrong length");
            for (int k = 0; k < d; ++k) g(i, k) = rows[i][k].get<double>();
        }
    } else {
        bad("gamma kind must be scalar or matrix");
    }
    return g;
}

Matrix parse_sigma(const json& j, int d) {
    if (!j.is_object() || !j.contains("kind")) bad("sigma must be an object with a kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return Matrix::identity(d);
    Matrix s(d, d);
    if (kind == "diag") {
        const auto& v = j.at("value");
        if (!v.is_array() || static_cast<int>(v.size()) != d) bad("sigma diag needs d values");
        for (int i = 0; i < d; ++i) s(i, i) = v[i].get<double>();
    } else if (kind == "matrix") {
        const auto& rows = j.at("value");
        if (!rows.is_array() || static_cast<int>(rows.size()) != d) bad("sigma matrix must have d rows");
        for (int i = 0; i < d; ++i) {
            if (static_cast<int>(rows[i].size()) != d) bad("sigma matrix row has wrong length");
            for (int k = 0; k < d; ++k) s(i, k) = rows[i][k].get<double>();
        }
    } else {
        bad("sigma kind must be identity, diag or matrix");
    }
    return s;
}

DriftSpec parse_drift(const json& j, int d) {
    DriftSpec drift;
    if (j.is_null()) return drift;
    if (!j.is_object() || !j.contains("kind")) bad("drift must be an object with a kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        drift.kind = DriftKind::Zero;
    } else if (kind == "affine") {
        drift.kind = DriftKind::AffineSharedSlope;
        drift.slope = j.at("slope").get<double>();
        const auto& a = j.at("intercepts");
        if (!a.is_array() || static_cast<int>(a.size()) != d) bad("drift needs d intercepts");
        drift.intercepts.resize(d);
        for (int i = 0; i < d; ++i) drift.intercepts[i] = a[i].get<double>();
    } else {
        bad("drift kind must be zero or affine");
    }
    return drift;
}

}  // namespace

SystemSpec spec_from_json(const nlohmann::json& j) {
    try {
        SystemSpec spec;
        spec.d = j.at("d").get<int>();
        if (spec.d < 2) bad("d must be >= 2");
        spec.gamma = parse_gamma(j.at("gamma"), spec.d);
        spec.sigma = parse_sigma(j.at("sigma"), spec.d);
        spec.drift = parse_drift(j.contains("drift") ? j.at("drift") : nlohmann::json(), spec.d);
        const auto& x0 = j.at("x0");
        if (!x0.is_array() || static_cast<int>(x0.size()) != spec.d) bad("x0 must have d entries");
        spec.x0.resize(spec.d);
        for (int i = 0; i < spec.d; ++i) spec.x0[i] = x0[i].get<double>();
        spec.horizon = j.at("horizon").get<double>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        bad(e.what());
    }
}

SystemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        bad(std::string("parse error in ") + path + ": " + e.what());
    }
    return spec_from_json(j);
}

nlohmann::json spec_to_json(const SystemSpec& spec) {
    nlohmann::json j;
    j["d"] = spec.d;
    {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < spec.d; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < spec.d; ++k) row.push_back(spec.gamma(i, k));
            rows.push_back(row);
        }
        j["gamma"] = {{"kind", "matrix"}, {"value", rows}};
    }
    {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < spec.d; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k < spec.d; ++k) row.push_back(spec.sigma(i, k));
            rows.push_back(row);
        }
        j["sigma"] = {{"kind", "matrix"}, {"value", rows}};
    }
    if (spec.drift.kind == DriftKind::Zero) {
        j["drift"] = {{"kind", "zero"}};
    } else {
        j["drift"] = {{"kind", "affine"},
                      {"slope", spec.drift.slope},
                      {"intercepts", spec.drift.intercepts}};
    }
    j["x0"] = spec.x0;
    j["horizon"] = spec.horizon;
    return j;
}

std::string spec_hash(const SystemSpec& spec) {
    return sha256_hex(spec_to_json(spec).dump());
}

}  // namespace noncollide
