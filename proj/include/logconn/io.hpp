#pragma once

// JSON file formats. Matrices are row-major arrays of [re, im] pairs.
// Connection: {"n": int, "coefficients": [{"power": k, "matrix": [...]}]}
// System:     {"n": int, "poles": [[re,im],...], "residues": [...], "basepoint": [re,im]?}
// Datum:      {"n": int, "M": [...], "h": [...], "A": [...]}

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logconn/connection.hpp"
#include "logconn/datum.hpp"
#include "logconn/fuchsian.hpp"
#include "logconn/types.hpp"

namespace logconn {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ParseError parse_error_at(const std::string& text, size_t byte, const std::string& what) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                      what);
}

inline complexd complex_from_json(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a [re, im] number pair, got " + j.dump());
    return complexd{j[0].get<double>(), j[1].get<double>()};
}

inline ordered_json complex_to_json(complexd z) {
    return ordered_json::array({z.real(), z.imag()});
}

} // namespace detail

inline CMatrix matrix_from_json(const ordered_json& j, Eigen::Index n) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw ParseError("expected a matrix with " + std::to_string(n) + " rows, got " +
                         std::to_string(j.is_array() ? j.size() : 0));
    CMatrix M(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = j[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw ParseError("matrix row " + std::to_string(r) + " must have " +
                             std::to_string(n) + " entries");
        for (Eigen::Index c = 0; c < n; ++c)
            M(r, c) = detail::complex_from_json(row[static_cast<size_t>(c)]);
    }
    return M;
}

inline ordered_json matrix_to_json(const CMatrix& M) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            row.push_back(detail::complex_to_json(M(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ordered_json parse_text(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw detail::parse_error_at(text, e.byte, e.what());
    }
}

inline ordered_json parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

inline Eigen::Index dimension_field(const ordered_json& j) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        throw ParseError("missing integer field \"n\"");
    const long long n = j["n"].get<long long>();
    if (n < 1 || n > 64) throw ParseError("dimension n out of range: " + std::to_string(n));
    return static_cast<Eigen::Index>(n);
}

inline PolyConnection connection_from_json(const ordered_json& j) {
    const Eigen::Index n = dimension_field(j);
    if (!j.contains("coefficients") || !j["coefficients"].is_array() ||
        j["coefficients"].empty())
        throw ParseError("connection needs a nonempty \"coefficients\" array");
    size_t maxpow = 0;
    for (const auto& c : j["coefficients"]) {
        if (!c.is_object() || !c.contains("power") || !c["power"].is_number_integer() ||
            !c.contains("matrix"))
            throw ParseError("each coefficient needs integer \"power\" and \"matrix\"");
        const long long p = c["power"].get<long long>();
        if (p < 0 || p > 512) throw ParseError("coefficient power out of range");
        maxpow = std::max(maxpow, static_cast<size_t>(p));
    }
    std::vector<CMatrix> coeffs(maxpow + 1, CMatrix::Zero(n, n));
    for (const auto& c : j["coefficients"])
        coeffs[c["power"].get<size_t>()] = matrix_from_json(c["matrix"], n);
    return PolyConnection(std::move(coeffs));
}

inline ordered_json connection_to_json(const PolyConnection& conn) {
    ordered_json j;
    j["n"] = conn.n;
    ordered_json arr = ordered_json::array();
    for (size_t k = 0; k < conn.coeffs.size(); ++k) {
        if (k > 0 && fnorm(conn.coeffs[k]) == 0.0) continue;
        ordered_json c;
        c["power"] = k;
        c["matrix"] = matrix_to_json(conn.coeffs[k]);
        arr.push_back(std::move(c));
    }
    j["coefficients"] = std::move(arr);
    return j;
}

inline MonodromyDatum datum_from_json(const ordered_json& j) {
    const Eigen::Index n = dimension_field(j);
    for (const char* f : {"M", "h", "A"})
        if (!j.contains(f)) throw ParseError(std::string("datum needs field \"") + f + "\"");
    MonodromyDatum d;
    d.M = matrix_from_json(j["M"], n);
    d.h = matrix_from_json(j["h"], n);
    d.A = matrix_from_json(j["A"], n);
    return d;
}

inline ordered_json datum_to_json(const MonodromyDatum& d) {
    ordered_json j;
    j["n"] = d.A.rows();
    j["M"] = matrix_to_json(d.M);
    j["h"] = matrix_to_json(d.h);
    j["A"] = matrix_to_json(d.A);
    return j;
}

inline FuchsianSystem system_from_json(const ordered_json& j) {
    const Eigen::Index n = dimension_field(j);
    if (!j.contains("poles") || !j["poles"].is_array() || j["poles"].empty())
        throw ParseError("system needs a nonempty \"poles\" array");
    if (!j.contains("residues") || !j["residues"].is_array() ||
        j["residues"].size() != j["poles"].size())
        throw ParseError("system needs one residue per pole");
    std::vector<complexd> poles;
    for (const auto& p : j["poles"]) poles.push_back(detail::complex_from_json(p));
    std::vector<CMatrix> residues;
    for (const auto& r : j["residues"]) residues.push_back(matrix_from_json(r, n));
    if (j.contains("basepoint"))
        return make_system(std::move(poles), std::move(residues),
                           detail::complex_from_json(j["basepoint"]));
    return make_system(std::move(poles), std::move(residues));
}

inline ordered_json system_to_json(const FuchsianSystem& sys) {
    ordered_json j;
    j["n"] = sys.n();
    ordered_json poles = ordered_json::array();
    for (complexd p : sys.poles) poles.push_back(detail::complex_to_json(p));
    j["poles"] = std::move(poles);
    ordered_json residues = ordered_json::array();
    for (const auto& r : sys.residues) residues.push_back(matrix_to_json(r));
    j["residues"] = std::move(residues);
    if (sys.basepoint_set) j["basepoint"] = detail::complex_to_json(sys.basepoint);
    return j;
}

inline void write_json_file(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace logconn
