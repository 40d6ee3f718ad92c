#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nmrqc/algorithms.hpp"
#include "nmrqc/qstate.hpp"
#include "nmrqc/synth.hpp"
#include "nmrqc/textio.hpp"

namespace nmrqc {

// Outbound JSON is emitted directly so every float is written with exactly
// 17 significant digits: identical inputs give byte-identical output.
// nlohmann/json does all the parsing.

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

namespace detail {

// Row-major grid of one component (real or imaginary part).
inline void append_grid(std::string& out, const ComplexMatrix& m, bool real_part) {
    out += '[';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) out += ',';
        out += '[';
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(real_part ? m(r, c).real() : m(r, c).imag());
        }
        out += ']';
    }
    out += ']';
}

inline std::string matrix_schema_json(int n_qubits, const std::string& kind, const ComplexMatrix& m) {
    std::string out = "{\"n_qubits\":" + std::to_string(n_qubits) + ",\"kind\":\"" + kind + "\",\"re\":";
    append_grid(out, m, true);
    out += ",\"im\":";
    append_grid(out, m, false);
    out += '}';
    return out;
}

inline ComplexMatrix row_matrix(const StateVector& s) {
    ComplexMatrix m(1, s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) m(0, i) = s.amps[i];
    return m;
}

}  // namespace detail

// Schema: {"n_qubits": N, "kind": "state"|"density"|"unitary",
//          "re": [[..]], "im": [[..]]}, row-major, qubit 1 = MSB.
// A state is one row of length 2^N; density/unitary are 2^N x 2^N.
inline std::string to_json(const StateVector& s) {
    return detail::matrix_schema_json(s.n_qubits, "state", detail::row_matrix(s));
}

inline std::string to_json(const DensityMatrix& rho) {
    return detail::matrix_schema_json(rho.n_qubits, "density", rho.mat);
}

inline std::string unitary_to_json(const ComplexMatrix& u, int n_qubits) {
    return detail::matrix_schema_json(n_qubits, "unitary", u);
}

inline std::string to_json(const VerifyReport& r) {
    std::string out = "{\"target\":\"" + json_escape(r.target_name) + "\"";
    out += ",\"max_err\":" + format_double(r.max_err);
    out += ",\"phase\":" + format_double(r.phase);
    out += ",\"pass\":";
    out += r.pass ? "true" : "false";
    if (r.expected_phase) {
        out += ",\"expected_phase\":" + format_double(*r.expected_phase);
        out += ",\"phase_ok\":";
        out += r.phase_ok ? "true" : "false";
    }
    if (!r.diagonal_phases.empty()) {
        out += ",\"diag_phase\":[";
        for (std::size_t i = 0; i < r.diagonal_phases.size(); ++i) {
            if (i) out += ',';
            out += format_double(r.diagonal_phases[i]);
        }
        out += ']';
    }
    out += '}';
    return out;
}

// A trace is an object keyed by checkpoint label, each value in the matrix schema.
inline std::string to_json(const RunTrace& trace) {
    std::string out = "{";
    bool first = true;
    for (const auto& [label, snap] : trace.checkpoints) {
        if (!first) out += ',';
        first = false;
        out += '"' + json_escape(label) + "\":";
        if (std::holds_alternative<StateVector>(snap))
            out += to_json(std::get<StateVector>(snap));
        else
            out += to_json(std::get<DensityMatrix>(snap));
    }
    out += '}';
    return out;
}

namespace detail {

inline ComplexMatrix grid_to_matrix(const nlohmann::json& re, const nlohmann::json& im) {
    if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty())
        throw std::invalid_argument("matrix json: re/im must be equal-shape nonempty arrays");
    const std::size_t rows = re.size();
    const std::size_t cols = re[0].size();
    ComplexMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!re[r].is_array() || !im[r].is_array() || re[r].size() != cols || im[r].size() != cols)
            throw std::invalid_argument("matrix json: ragged re/im grid");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = cd(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return m;
}

inline nlohmann::json parse_schema(const std::string& text, const std::string& want_kind, int& n_qubits) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("n_qubits") || !j.contains("kind") || !j.contains("re") || !j.contains("im"))
        throw std::invalid_argument("matrix json: missing n_qubits/kind/re/im");
    if (j["kind"].get<std::string>() != want_kind)
        throw std::invalid_argument("matrix json: expected kind '" + want_kind + "'");
    n_qubits = j["n_qubits"].get<int>();
    if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("matrix json: bad n_qubits");
    return j;
}

}  // namespace detail

inline StateVector state_from_json(const std::string& text) {
    int n = 0;
    const nlohmann::json j = detail::parse_schema(text, "state", n);
    const ComplexMatrix m = detail::grid_to_matrix(j["re"], j["im"]);
    if (m.rows() != 1 || m.cols() != dim_for(n)) throw std::invalid_argument("state json: expected 1 x 2^N grid");
    StateVector s(n);
    for (std::size_t i = 0; i < s.dim(); ++i) s.amps[i] = m(0, i);
    return s;
}

inline DensityMatrix density_from_json(const std::string& text) {
    int n = 0;
    const nlohmann::json j = detail::parse_schema(text, "density", n);
    DensityMatrix rho(n);
    rho.mat = detail::grid_to_matrix(j["re"], j["im"]);
    if (rho.mat.rows() != dim_for(n) || rho.mat.cols() != dim_for(n))
        throw std::invalid_argument("density json: expected 2^N x 2^N grid");
    // The schema carries no deviation flag; a (near-)zero trace marks one.
    rho.deviation = std::abs(rho.mat.trace()) < 1e-6;
    return rho;
}

inline ComplexMatrix unitary_from_json(const std::string& text, int* n_qubits_out = nullptr) {
    int n = 0;
    const nlohmann::json j = detail::parse_schema(text, "unitary", n);
    const ComplexMatrix m = detail::grid_to_matrix(j["re"], j["im"]);
    if (m.rows() != dim_for(n) || m.cols() != dim_for(n))
        throw std::invalid_argument("unitary json: expected 2^N x 2^N grid");
    if (n_qubits_out) *n_qubits_out = n;
    return m;
}

}  // namespace nmrqc
