#ifndef WALKSPEC_IO_HPP
#define WALKSPEC_IO_HPP

#include "walkspec/regex.hpp"
#include "walkspec/spectral.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace walkspec {

using Json = nlohmann::json;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text format: "digraph <n>" header, then "u v [mult]" per arc. '#' starts a
// comment. Vertices 1-indexed. Round-trips bit-exactly through write_digraph.
inline Digraph read_digraph(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<Arc> arcs;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (n < 0) {
            std::string word;
            if (!(ls >> word)) continue;  // blank before header
            int count;
            std::string extra;
            if (word != "digraph" || !(ls >> count) || count < 1 || (ls >> extra))
                throw InputError("line " + std::to_string(lineno) +
                                 ": expected header \"digraph <n>\"");
            n = count;
            continue;
        }
        Arc a;
        if (!(ls >> a.u)) continue;  // blank line
        if (!(ls >> a.v))
            throw InputError("line " + std::to_string(lineno) + ": expected \"u v [mult]\"");
        long long mult = 1;
        if (!(ls >> mult)) {
            mult = 1;
            ls.clear();
        }
        std::string extra;
        if (ls >> extra)
            throw InputError("line " + std::to_string(lineno) + ": expected \"u v [mult]\"");
        a.mult = mult;
        if (a.u < 1 || a.u > n || a.v < 1 || a.v > n)
            throw InputError("line " + std::to_string(lineno) + ": vertex out of range 1.." +
                             std::to_string(n));
        if (a.mult < 1)
            throw InputError("line " + std::to_string(lineno) + ": multiplicity must be >= 1");
        arcs.push_back(a);
    }
    if (n < 0) throw InputError("missing \"digraph <n>\" header");
    return build_digraph(arcs, n);
}

inline void write_digraph(std::ostream& out, const Digraph& d) {
    out << "digraph " << d.n << "\n";
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) {
            if (d.adj(i, j) == 0) continue;
            out << (i + 1) << " " << (j + 1);
            if (d.adj(i, j) != 1) out << " " << d.adj(i, j);
            out << "\n";
        }
}

inline Digraph read_digraph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return read_digraph(in);
}

// DFA JSON: {"n": int, "initial": [ids], "final": [ids], "arcs": [[u,v,mult],...]}.
inline AutomatonSystem read_dfa_json(const Json& j) {
    try {
        const int n = j.at("n").get<int>();
        if (n < 1) throw InputError("\"n\" must be >= 1");
        std::vector<Arc> arcs;
        for (const auto& row : j.at("arcs")) {
            if (!row.is_array() || (row.size() != 2 && row.size() != 3))
                throw InputError("each arc must be [u, v] or [u, v, mult]");
            Arc a;
            a.u = row[0].get<int>();
            a.v = row[1].get<int>();
            a.mult = row.size() == 3 ? row[2].get<long long>() : 1;
            arcs.push_back(a);
        }
        AutomatonSystem sys;
        sys.digraph = build_digraph(arcs, n);
        for (int v : j.at("initial").get<std::vector<int>>()) {
            if (v < 1 || v > n) throw InputError("initial state out of range");
            sys.initial.insert(v);
        }
        for (int v : j.at("final").get<std::vector<int>>()) {
            if (v < 1 || v > n) throw InputError("final state out of range");
            sys.final.insert(v);
        }
        return sys;
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed DFA JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("malformed DFA JSON: ") + e.what());
    }
}

inline AutomatonSystem read_dfa_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::exception& e) {
        throw InputError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return read_dfa_json(j);
}

inline Json dfa_to_json(const AutomatonSystem& sys) {
    Json j;
    j["n"] = sys.digraph.n;
    j["initial"] = std::vector<int>(sys.initial.begin(), sys.initial.end());
    j["final"] = std::vector<int>(sys.final.begin(), sys.final.end());
    Json arcs = Json::array();
    for (int i = 0; i < sys.digraph.n; ++i)
        for (int k = 0; k < sys.digraph.n; ++k)
            if (sys.digraph.adj(i, k) != 0)
                arcs.push_back({i + 1, k + 1, sys.digraph.adj(i, k).convert_to<long long>()});
    j["arcs"] = arcs;
    return j;
}

// Scalars print as "p/q" when rational snapping succeeds, floats otherwise.
// Complex values with a residual imaginary part print as {"re":, "im":}.
inline Json scalar_to_json(Complex z) {
    if (std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z.real())))
        return Json{{"re", z.real()}, {"im", z.imag()}};
    if (auto r = snap_rational(z.real())) {
        if (r->second == 1) return r->first;
        return std::to_string(r->first) + "/" + std::to_string(r->second);
    }
    return z.real();
}

inline Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(scalar_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

inline Json vector_to_json(const CVector& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(scalar_to_json(v(i)));
    return out;
}

inline Json int_matrix_to_json(const IntMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
        rows.push_back(row);
    }
    return rows;
}

// {"terms": [{"eigenvalue": {"re":, "im":}, "matrices": [matrix per power of m]}]}
inline Json closed_form_to_json(const ClosedForm& cf) {
    Json terms = Json::array();
    for (const auto& t : cf.terms) {
        Json term;
        term["eigenvalue"] = Json{{"re", t.lambda.real()}, {"im", t.lambda.imag()}};
        Json mats = Json::array();
        for (const auto& m : t.coefficients) mats.push_back(matrix_to_json(m));
        term["matrices"] = mats;
        terms.push_back(term);
    }
    return Json{{"terms", terms}};
}

inline Json scalar_closed_form_to_json(const ScalarClosedForm& cf) {
    Json terms = Json::array();
    for (const auto& t : cf.terms) {
        Json term;
        term["eigenvalue"] = Json{{"re", t.lambda.real()}, {"im", t.lambda.imag()}};
        Json coeffs = Json::array();
        for (Complex c : t.poly) coeffs.push_back(scalar_to_json(c));
        term["polynomial"] = coeffs;  // coefficients in m, ascending degree
        terms.push_back(term);
    }
    Json j{{"terms", terms}};
    if (!cf.transient.empty()) {
        Json tr = Json::array();
        for (Complex c : cf.transient) tr.push_back(scalar_to_json(c));
        j["transient"] = tr;
    }
    return j;
}

}  // namespace walkspec

#endif
