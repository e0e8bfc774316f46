#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "disc/balancing.hpp"
#include "disc/bodies.hpp"
#include "disc/errors.hpp"
#include "disc/full_coloring.hpp"

namespace disc {

using json = nlohmann::json;

namespace detail {

inline Vector parse_vector(const json& j, int expected_dim, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path + ": expected an array of numbers");
    if (static_cast<int>(j.size()) != expected_dim)
        throw SchemaError(path + ": expected " + std::to_string(expected_dim) + " entries, got " +
                          std::to_string(j.size()));
    Vector v(expected_dim);
    for (int i = 0; i < expected_dim; ++i) {
        if (!j[i].is_number())
            throw SchemaError(path + "[" + std::to_string(i) + "]: expected a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

}  // namespace detail

/// Body description schema:
///   {"dim": n, "strips": [{"normal": [...], "half_width": l}, ...],
///    "equalities": [[...], ...], "ball_radius": rho|null, "scale": alpha}
/// Zero-width strips are folded into the equality subspace so projection
/// engines treat them as affine cells.
inline BodyPtr body_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("body: expected a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw SchemaError("dim: expected an integer");
    const int n = j["dim"].get<int>();
    if (n < 1) throw SchemaError("dim: must be >= 1");

    std::vector<Strip> strips;
    std::vector<Vector> equalities;
    if (j.contains("strips")) {
        if (!j["strips"].is_array()) throw SchemaError("strips: expected an array");
        for (std::size_t i = 0; i < j["strips"].size(); ++i) {
            const std::string path = "strips[" + std::to_string(i) + "]";
            const auto& js = j["strips"][i];
            if (!js.is_object()) throw SchemaError(path + ": expected an object");
            if (!js.contains("normal")) throw SchemaError(path + ".normal: missing");
            if (!js.contains("half_width") || !js["half_width"].is_number())
                throw SchemaError(path + ".half_width: expected a number");
            Vector normal = detail::parse_vector(js["normal"], n, path + ".normal");
            const double hw = js["half_width"].get<double>();
            if (hw < 0.0) throw SchemaError(path + ".half_width: must be >= 0");
            if (hw == 0.0)
                equalities.push_back(std::move(normal));
            else
                strips.emplace_back(std::move(normal), hw);
        }
    }
    if (j.contains("equalities")) {
        if (!j["equalities"].is_array()) throw SchemaError("equalities: expected an array");
        for (std::size_t i = 0; i < j["equalities"].size(); ++i)
            equalities.push_back(detail::parse_vector(j["equalities"][i], n,
                                                      "equalities[" + std::to_string(i) + "]"));
    }

    std::vector<BodyPtr> members;
    if (!strips.empty()) members.push_back(std::make_shared<PolytopeBody>(n, std::move(strips)));
    if (!equalities.empty())
        members.push_back(
            std::make_shared<SubspaceBody>(Subspace::from_constraints(n, equalities)));
    if (j.contains("ball_radius") && !j["ball_radius"].is_null()) {
        if (!j["ball_radius"].is_number())
            throw SchemaError("ball_radius: expected a number or null");
        const double rho = j["ball_radius"].get<double>();
        if (!(rho > 0.0)) throw SchemaError("ball_radius: must be > 0");
        members.push_back(std::make_shared<Ball>(n, rho));
    }

    BodyPtr body;
    if (members.size() == 1)
        body = members.front();
    else
        body = std::make_shared<Intersection>(n, std::move(members));

    if (j.contains("scale")) {
        if (!j["scale"].is_number()) throw SchemaError("scale: expected a number");
        const double alpha = j["scale"].get<double>();
        if (!(alpha > 0.0)) throw SchemaError("scale: must be > 0");
        if (alpha != 1.0) body = std::make_shared<ScaledBody>(alpha, std::move(body));
    }
    return body;
}

inline BodyPtr load_body(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open body file: " + file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("body file " + file + ": " + e.what());
    }
    return body_from_json(j);
}

/// Set-system schema: {"n": int, "sets": [[int, ...], ...]}
inline SetSystem set_system_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("system: expected a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw SchemaError("n: expected an integer");
    SetSystem sys;
    sys.n_elements = j["n"].get<int>();
    if (sys.n_elements < 1) throw SchemaError("n: must be >= 1");
    if (!j.contains("sets") || !j["sets"].is_array())
        throw SchemaError("sets: expected an array of arrays");
    for (std::size_t i = 0; i < j["sets"].size(); ++i) {
        const auto& js = j["sets"][i];
        const std::string path = "sets[" + std::to_string(i) + "]";
        if (!js.is_array()) throw SchemaError(path + ": expected an array");
        std::vector<int> s;
        for (std::size_t k = 0; k < js.size(); ++k) {
            if (!js[k].is_number_integer())
                throw SchemaError(path + "[" + std::to_string(k) + "]: expected an integer");
            const int e = js[k].get<int>();
            if (e < 0 || e >= sys.n_elements)
                throw SchemaError(path + "[" + std::to_string(k) + "]: element " +
                                  std::to_string(e) + " out of range [0, " +
                                  std::to_string(sys.n_elements) + ")");
            s.push_back(e);
        }
        sys.sets.push_back(std::move(s));
    }
    return sys;
}

inline json set_system_to_json(const SetSystem& sys) {
    json j;
    j["n"] = sys.n_elements;
    j["sets"] = json::array();
    for (const auto& s : sys.sets) j["sets"].push_back(s);
    return j;
}

inline SetSystem load_set_system(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open set-system file: " + file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw SchemaError("set-system file " + file + ": " + e.what());
    }
    return set_system_from_json(j);
}

/// Vector family CSV: one vector per row, n comma-separated columns.
inline VectorFamily load_vector_family(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw SchemaError("cannot open vector file: " + file);
    std::vector<Vector> rows;
    std::string line;
    int lineno = 0;
    Eigen::Index width = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double d = std::stod(cell, &used);
                vals.push_back(d);
            } catch (const std::exception&) {
                throw SchemaError("vectors line " + std::to_string(lineno) +
                                  ": cannot parse number '" + cell + "'");
            }
        }
        if (vals.empty()) continue;
        Vector v = Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        if (width < 0) width = v.size();
        if (v.size() != width)
            throw SchemaError("vectors line " + std::to_string(lineno) + ": expected " +
                              std::to_string(width) + " columns, got " + std::to_string(v.size()));
        rows.push_back(std::move(v));
    }
    if (rows.empty()) throw SchemaError("vectors: file holds no rows");
    return VectorFamily::from_columns(rows);
}

}  // namespace disc
