#ifndef QUASISTEADY_CONFIG_HPP
#define QUASISTEADY_CONFIG_HPP

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "quasisteady/problem.hpp"

// Problem config grammar (line oriented, '#' starts a comment):
//
//   [problem]
//   dimE = 1            dimF = 1 on its own line, etc.
//   dimF = 1
//   n = 2
//   m = 1
//   eta = 1.0
//   p = 2.0
//   q = 2.0
//
//   [interior]
//   alpha = (2,0) : [[1]]          # multi-index (n entries) : dimE x dimE matrix
//
//   [boundary.0]                   # j = 0..m, in any order
//   order = 1                      # m_j
//   beta = (0,1) : [[-1i]]         # multi-index (n entries) : matrix
//   tangential_order = 0           # k_j; omit the key entirely for C_j = 0
//   gamma = (0) : [[-1]]           # multi-index (n-1 entries) : matrix
//
// Complex literals are a+bi with either part optional: 2, -1.5, 3i, 1+2i,
// 2.5-1e-3i. Matrices are [[row],[row]] with comma-separated entries.
// Unknown keys are rejected.

namespace qs {

struct ConfigError : Error {
    int line;
    std::string field;
    ConfigError(int line_, const std::string& field_, const std::string& msg)
        : Error("config line " + std::to_string(line_) + ", " + field_ + ": " + msg),
          line(line_),
          field(field_) {}
};

namespace detail {

inline std::string strip(std::string_view sv) {
    size_t b = 0, e = sv.size();
    while (b < e && std::isspace(static_cast<unsigned char>(sv[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(sv[e - 1]))) --e;
    return std::string(sv.substr(b, e - b));
}

// Parses one a+bi literal.
inline Complex parse_complex(const std::string& text, int line, const std::string& field) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ConfigError(line, field, "empty complex literal");

    auto read_number = [&](size_t& pos) -> double {
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        bool digits = false;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            digits = true;
            ++pos;
        }
        if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
            size_t mark = pos;
            ++pos;
            if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            bool exp_digits = false;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                exp_digits = true;
                ++pos;
            }
            if (!exp_digits) pos = mark;
        }
        if (!digits) {
            // bare "i", "+i", "-i"
            if (pos < s.size() && s[pos] == 'i') return (start < pos && s[start] == '-') ? -1.0 : 1.0;
            throw ConfigError(line, field, "malformed complex literal '" + text + "'");
        }
        return std::stod(s.substr(start, pos - start));
    };

    size_t pos = 0;
    double first = read_number(pos);
    if (pos == s.size()) return Complex(first, 0.0);
    if (s[pos] == 'i') {
        if (pos + 1 != s.size())
            throw ConfigError(line, field, "trailing characters in complex literal '" + text + "'");
        return Complex(0.0, first);
    }
    if (s[pos] != '+' && s[pos] != '-')
        throw ConfigError(line, field, "malformed complex literal '" + text + "'");
    double second = read_number(pos);
    if (pos == s.size() || s[pos] != 'i' || pos + 1 != s.size())
        throw ConfigError(line, field, "imaginary part must end in 'i' in '" + text + "'");
    return Complex(first, second);
}

inline MultiIndex parse_multi_index(const std::string& text, int line, const std::string& field) {
    std::string s = strip(text);
    if (s.size() < 2 || s.front() != '(' || s.back() != ')')
        throw ConfigError(line, field, "multi-index must be parenthesized, got '" + text + "'");
    MultiIndex idx;
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = strip(tok);
        if (tok.empty()) throw ConfigError(line, field, "empty entry in multi-index");
        try {
            size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            idx.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(line, field, "multi-index entry '" + tok + "' is not an integer");
        }
    }
    if (idx.empty()) throw ConfigError(line, field, "empty multi-index");
    return idx;
}

inline CMatrix parse_matrix(const std::string& text, int line, const std::string& field) {
    std::string outer = strip(text);
    if (outer.size() < 4 || outer.front() != '[' || outer.back() != ']')
        throw ConfigError(line, field, "matrix literal must look like [[...],[...]]");
    const std::string s = outer.substr(1, outer.size() - 2);  // row list
    std::vector<std::vector<Complex>> rows;
    size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && (s[pos] == ',' || std::isspace(static_cast<unsigned char>(s[pos]))))
            ++pos;
        if (pos >= s.size()) break;
        if (s[pos] != '[') throw ConfigError(line, field, "expected '[' starting a matrix row");
        size_t close = s.find(']', pos);
        if (close == std::string::npos) throw ConfigError(line, field, "unterminated matrix row");
        std::string row_text = s.substr(pos + 1, close - pos - 1);
        std::vector<Complex> row;
        std::stringstream ss(row_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(parse_complex(tok, line, field));
        if (row.empty()) throw ConfigError(line, field, "empty matrix row");
        rows.push_back(std::move(row));
        pos = close + 1;
    }
    if (rows.empty()) throw ConfigError(line, field, "empty matrix literal");
    const size_t cols = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != cols) throw ConfigError(line, field, "ragged matrix literal");
    CMatrix mat(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols; ++j) mat(i, j) = rows[i][j];
    return mat;
}

inline std::string format_complex(const Complex& z) {
    char buf[64];
    std::string out;
    if (z.real() != 0.0 || z.imag() == 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", z.real());
        out = buf;
    }
    if (z.imag() != 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", z.imag());
        std::string im = buf;
        if (!out.empty() && im[0] != '-') out += "+";
        out += im + "i";
    }
    return out;
}

inline std::string format_matrix(const CMatrix& mat) {
    std::string s = "[";
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        if (i) s += ",";
        s += "[";
        for (Eigen::Index j = 0; j < mat.cols(); ++j) {
            if (j) s += ", ";
            s += format_complex(mat(i, j));
        }
        s += "]";
    }
    return s + "]";
}

}  // namespace detail

inline ProblemSpec parse_problem_spec(const std::string& text) {
    using detail::strip;
    ProblemSpec spec;
    spec.interior.clear();
    spec.boundary.clear();

    enum class Section { none, problem, interior, boundary };
    Section section = Section::none;
    int boundary_j = -1;
    std::set<std::string> seen_problem_keys;
    std::map<int, BoundaryOperator> boundary_map;
    std::set<int> boundary_seen;
    bool saw_problem = false, saw_interior = false;

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (auto hash = s.find('#'); hash != std::string::npos) s = s.substr(0, hash);
        s = strip(s);
        if (s.empty()) continue;

        if (s.front() == '[' && s.back() == ']') {
            std::string name = strip(s.substr(1, s.size() - 2));
            if (name == "problem") {
                section = Section::problem;
                saw_problem = true;
            } else if (name == "interior") {
                section = Section::interior;
                saw_interior = true;
            } else if (name.rfind("boundary.", 0) == 0) {
                std::string idx = name.substr(9);
                try {
                    size_t used = 0;
                    boundary_j = std::stoi(idx, &used);
                    if (used != idx.size() || boundary_j < 0) throw std::invalid_argument(idx);
                } catch (const std::exception&) {
                    throw ConfigError(line, name, "malformed boundary section index");
                }
                if (!boundary_seen.insert(boundary_j).second)
                    throw ConfigError(line, name, "duplicate boundary section");
                section = Section::boundary;
            } else {
                throw ConfigError(line, name, "unknown section");
            }
            continue;
        }

        auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, s, "expected 'key = value'");
        std::string key = strip(s.substr(0, eq));
        std::string value = strip(s.substr(eq + 1));

        auto parse_int = [&](const std::string& v) {
            try {
                size_t used = 0;
                int r = std::stoi(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return r;
            } catch (const std::exception&) {
                throw ConfigError(line, key, "'" + v + "' is not an integer");
            }
        };
        auto parse_real = [&](const std::string& v) {
            try {
                size_t used = 0;
                double r = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return r;
            } catch (const std::exception&) {
                throw ConfigError(line, key, "'" + v + "' is not a number");
            }
        };
        // "idx : matrix" entries
        auto split_entry = [&](const std::string& v) -> std::pair<MultiIndex, CMatrix> {
            auto colon = v.find(':');
            if (colon == std::string::npos)
                throw ConfigError(line, key, "expected '(multi-index) : [[matrix]]'");
            MultiIndex idx = detail::parse_multi_index(v.substr(0, colon), line, key);
            CMatrix mat = detail::parse_matrix(v.substr(colon + 1), line, key);
            return {idx, mat};
        };

        switch (section) {
            case Section::none:
                throw ConfigError(line, key, "entry outside any section");
            case Section::problem: {
                if (!seen_problem_keys.insert(key).second)
                    throw ConfigError(line, key, "duplicate key");
                if (key == "dimE") spec.dimE = parse_int(value);
                else if (key == "dimF") spec.dimF = parse_int(value);
                else if (key == "n") spec.n = parse_int(value);
                else if (key == "m") spec.m = parse_int(value);
                else if (key == "eta") spec.eta = parse_real(value);
                else if (key == "p") spec.p = parse_real(value);
                else if (key == "q") spec.q = parse_real(value);
                else throw ConfigError(line, key, "unknown key in [problem]");
                break;
            }
            case Section::interior: {
                if (key != "alpha") throw ConfigError(line, key, "unknown key in [interior]");
                auto [idx, mat] = split_entry(value);
                if (spec.interior.count(idx))
                    throw ConfigError(line, key, "duplicate interior multi-index " + format_multi_index(idx));
                spec.interior[idx] = mat;
                break;
            }
            case Section::boundary: {
                BoundaryOperator& b = boundary_map[boundary_j];
                if (key == "order") b.order = parse_int(value);
                else if (key == "tangential_order") b.tangential_order = parse_int(value);
                else if (key == "beta") {
                    auto [idx, mat] = split_entry(value);
                    if (b.coeffs.count(idx))
                        throw ConfigError(line, key, "duplicate beta " + format_multi_index(idx));
                    b.coeffs[idx] = mat;
                } else if (key == "gamma") {
                    auto [idx, mat] = split_entry(value);
                    if (b.tangential_coeffs.count(idx))
                        throw ConfigError(line, key, "duplicate gamma " + format_multi_index(idx));
                    b.tangential_coeffs[idx] = mat;
                } else {
                    throw ConfigError(line, key, "unknown key in [boundary." + std::to_string(boundary_j) + "]");
                }
                break;
            }
        }
    }

    if (!saw_problem) throw ConfigError(line, "problem", "missing [problem] section");
    if (!saw_interior) throw ConfigError(line, "interior", "missing [interior] section");
    for (int j = 0; j <= spec.m; ++j) {
        auto it = boundary_map.find(j);
        if (it == boundary_map.end())
            throw ConfigError(line, "boundary." + std::to_string(j), "missing boundary section");
        spec.boundary.push_back(it->second);
    }
    for (const auto& [j, b] : boundary_map)
        if (j > spec.m)
            throw ConfigError(line, "boundary." + std::to_string(j), "boundary index exceeds m");

    validate(spec);
    return spec;
}

inline std::string serialize_problem_spec(const ProblemSpec& spec) {
    using detail::format_matrix;
    char buf[64];
    auto real = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out;
    out += "[problem]\n";
    out += "dimE = " + std::to_string(spec.dimE) + "\n";
    out += "dimF = " + std::to_string(spec.dimF) + "\n";
    out += "n = " + std::to_string(spec.n) + "\n";
    out += "m = " + std::to_string(spec.m) + "\n";
    out += "eta = " + real(spec.eta) + "\n";
    out += "p = " + real(spec.p) + "\n";
    out += "q = " + real(spec.q) + "\n";
    out += "\n[interior]\n";
    for (const auto& [alpha, mat] : spec.interior)
        out += "alpha = " + format_multi_index(alpha) + " : " + format_matrix(mat) + "\n";
    for (int j = 0; j <= spec.m; ++j) {
        const auto& b = spec.boundary[j];
        out += "\n[boundary." + std::to_string(j) + "]\n";
        out += "order = " + std::to_string(b.order) + "\n";
        for (const auto& [beta, mat] : b.coeffs)
            out += "beta = " + format_multi_index(beta) + " : " + format_matrix(mat) + "\n";
        if (b.has_tangential()) {
            out += "tangential_order = " + std::to_string(*b.tangential_order) + "\n";
            for (const auto& [gamma, mat] : b.tangential_coeffs)
                out += "gamma = " + format_multi_index(gamma) + " : " + format_matrix(mat) + "\n";
        }
    }
    return out;
}

inline ProblemSpec load_problem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_spec(ss.str());
}

inline bool operator==(const BoundaryOperator& a, const BoundaryOperator& b) {
    auto maps_equal = [](const std::map<MultiIndex, CMatrix>& x, const std::map<MultiIndex, CMatrix>& y) {
        if (x.size() != y.size()) return false;
        for (const auto& [k, v] : x) {
            auto it = y.find(k);
            if (it == y.end() || it->second.rows() != v.rows() || it->second.cols() != v.cols() ||
                it->second != v)
                return false;
        }
        return true;
    };
    return a.order == b.order && a.tangential_order == b.tangential_order &&
           maps_equal(a.coeffs, b.coeffs) && maps_equal(a.tangential_coeffs, b.tangential_coeffs);
}

inline bool operator==(const ProblemSpec& a, const ProblemSpec& b) {
    if (a.dimE != b.dimE || a.dimF != b.dimF || a.n != b.n || a.m != b.m || a.eta != b.eta ||
        a.p != b.p || a.q != b.q || a.boundary.size() != b.boundary.size())
        return false;
    if (a.interior.size() != b.interior.size()) return false;
    for (const auto& [k, v] : a.interior) {
        auto it = b.interior.find(k);
        if (it == b.interior.end() || it->second != v) return false;
    }
    for (size_t j = 0; j < a.boundary.size(); ++j)
        if (!(a.boundary[j] == b.boundary[j])) return false;
    return true;
}

}  // namespace qs

#endif
