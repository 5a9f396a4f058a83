#ifndef QUASISTEADY_PROBLEM_HPP
#define QUASISTEADY_PROBLEM_HPP

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "quasisteady/core.hpp"

namespace qs {

// Boundary operator pair (B_j, C_j). B_j acts on the interior unknown and is
// a polynomial in the full gradient D = -i(grad', d_y); C_j acts on the
// surface unknown and is a polynomial in the tangential gradient only.
// C_j = 0 is encoded by an absent tangential_order (never a sentinel value).
struct BoundaryOperator {
    int order = 0;  // m_j
    std::map<MultiIndex, CMatrix> coeffs;  // beta (n entries) -> b_{j,beta}
    std::optional<int> tangential_order;   // k_j, nullopt when C_j = 0
    std::map<MultiIndex, CMatrix> tangential_coeffs;  // gamma (n-1 entries)

    bool has_tangential() const { return tangential_order.has_value(); }
};

// Constant-coefficient operator triple (A, {B_j}, {C_j}) on the half space,
// with the normal direction as the last coordinate.
struct ProblemSpec {
    int dimE = 1;
    int dimF = 1;
    int n = 2;      // spatial dimension
    int m = 1;      // half-order of A (interior order 2m)
    double eta = 1.0;
    double p = 2.0;
    double q = 2.0;
    std::map<MultiIndex, CMatrix> interior;  // alpha (n entries) -> a_alpha
    std::vector<BoundaryOperator> boundary;  // j = 0..m

    // l_j = k_j - m_j + m_0; absent when C_j = 0.
    std::optional<int> l_j(int j) const {
        const auto& b = boundary.at(j);
        if (!b.has_tangential()) return std::nullopt;
        return *b.tangential_order - b.order + boundary.at(0).order;
    }

    int l() const {
        int best = std::numeric_limits<int>::min();
        for (int j = 0; j <= m; ++j)
            if (auto lj = l_j(j)) best = std::max(best, *lj);
        return best;
    }

    // Coefficient of D_y^{2m} in the principal interior part.
    CMatrix a0() const {
        MultiIndex alpha(n, 0);
        alpha[n - 1] = 2 * m;
        auto it = interior.find(alpha);
        if (it == interior.end())
            throw Error("interior coefficient of D_y^" + std::to_string(2 * m) + " is missing");
        return it->second;
    }
};

// Trace exponents and derived smoothness data of the function-space scale.
struct FunctionSpaceSpec {
    double p = 2.0;
    double q = 2.0;
    std::vector<double> kappa;  // kappa_j, j = 0..m
    int l = 0;
};

inline FunctionSpaceSpec function_spaces(const ProblemSpec& spec) {
    FunctionSpaceSpec fs;
    fs.p = spec.p;
    fs.q = spec.q;
    fs.l = spec.l();
    const double tm = 2.0 * spec.m;
    for (int j = 0; j <= spec.m; ++j)
        fs.kappa.push_back(1.0 - spec.boundary[j].order / tm - 1.0 / (tm * spec.q));
    return fs;
}

// Validates every structural invariant; throws Error naming the first
// violated one. Called by the parser and by anyone building specs in code.
inline void validate(const ProblemSpec& spec) {
    if (spec.dimE < 1 || spec.dimF < 1) throw Error("dimE and dimF must be positive");
    if (spec.n < 2) throw Error("spatial dimension n must be >= 2");
    if (spec.m < 1) throw Error("m must be a positive integer");
    if (!(spec.eta > 0.0)) throw Error("eta must be positive");
    if (!(spec.p > 1.0) || !(spec.q > 1.0)) throw Error("p and q must lie in (1, infinity)");
    if (static_cast<int>(spec.boundary.size()) != spec.m + 1)
        throw Error("expected " + std::to_string(spec.m + 1) + " boundary operators, got " +
                    std::to_string(spec.boundary.size()));

    for (const auto& [alpha, mat] : spec.interior) {
        if (static_cast<int>(alpha.size()) != spec.n)
            throw Error("interior multi-index " + format_multi_index(alpha) + " must have n components");
        for (int a : alpha)
            if (a < 0) throw Error("negative entry in multi-index " + format_multi_index(alpha));
        if (order(alpha) > 2 * spec.m)
            throw Error("interior multi-index " + format_multi_index(alpha) + " exceeds order 2m");
        if (mat.rows() != spec.dimE || mat.cols() != spec.dimE)
            throw Error("interior coefficient " + format_multi_index(alpha) + " must be dimE x dimE");
    }

    bool has_principal = false;
    for (const auto& [alpha, mat] : spec.interior)
        if (order(alpha) == 2 * spec.m) has_principal = true;
    if (!has_principal) throw Error("interior principal part (|alpha| = 2m) is missing");

    {
        MultiIndex pure_normal(spec.n, 0);
        pure_normal[spec.n - 1] = 2 * spec.m;
        auto it = spec.interior.find(pure_normal);
        if (it == spec.interior.end())
            throw Error("pure normal coefficient a_0 (D_y^{2m}) is missing");
        Eigen::FullPivLU<CMatrix> lu(it->second);
        if (!lu.isInvertible()) throw Error("pure normal coefficient a_0 is singular");
    }

    bool any_tangential = false;
    for (int j = 0; j <= spec.m; ++j) {
        const auto& b = spec.boundary[j];
        if (b.order < 0 || b.order >= 2 * spec.m)
            throw Error("boundary order m_" + std::to_string(j) + " must lie in [0, 2m)");
        if (b.coeffs.empty())
            throw Error("boundary operator B_" + std::to_string(j) + " is trivial");
        const int rows = (j == 0) ? spec.dimF : spec.dimE;
        for (const auto& [beta, mat] : b.coeffs) {
            if (static_cast<int>(beta.size()) != spec.n)
                throw Error("boundary multi-index " + format_multi_index(beta) + " must have n components");
            for (int a : beta)
                if (a < 0) throw Error("negative entry in multi-index " + format_multi_index(beta));
            if (order(beta) > b.order)
                throw Error("boundary multi-index " + format_multi_index(beta) + " exceeds order m_" +
                            std::to_string(j));
            if (mat.rows() != rows || mat.cols() != spec.dimE)
                throw Error("coefficient " + format_multi_index(beta) + " of B_" + std::to_string(j) +
                            " has wrong shape");
        }
        if (b.has_tangential() != !b.tangential_coeffs.empty())
            throw Error("k_j must be present exactly when C_" + std::to_string(j) +
                        " has coefficients");
        if (b.has_tangential()) {
            any_tangential = true;
            if (*b.tangential_order < 0)
                throw Error("tangential order k_" + std::to_string(j) + " must be >= 0");
            const int trows = (j == 0) ? spec.dimF : spec.dimE;
            for (const auto& [gamma, mat] : b.tangential_coeffs) {
                if (static_cast<int>(gamma.size()) != spec.n - 1)
                    throw Error("tangential multi-index " + format_multi_index(gamma) +
                                " must have n-1 components");
                for (int a : gamma)
                    if (a < 0) throw Error("negative entry in multi-index " + format_multi_index(gamma));
                if (order(gamma) > *b.tangential_order)
                    throw Error("tangential multi-index " + format_multi_index(gamma) +
                                " exceeds order k_" + std::to_string(j));
                if (mat.rows() != trows || mat.cols() != spec.dimF)
                    throw Error("coefficient " + format_multi_index(gamma) + " of C_" + std::to_string(j) +
                                " has wrong shape");
            }
        }
    }
    if (!any_tangential)
        throw Error("at least one C_j must be nontrivial");
    if (spec.l() < 0) throw Error("l = max_j (k_j - m_j + m_0) must be >= 0");

    FunctionSpaceSpec fs = function_spaces(spec);
    for (int j = 0; j <= spec.m; ++j)
        if (!(fs.kappa[j] > 0.0 && fs.kappa[j] < 1.0))
            throw Error("trace exponent kappa_" + std::to_string(j) + " lies outside (0, 1)");
}

// Principal interior symbol A_#(xi) = sum_{|alpha| = 2m} a_alpha xi^alpha.
// Template so oracle code may evaluate at complex frequencies.
template <typename VectorT>
CMatrix evaluate_interior_symbol(const ProblemSpec& spec, const VectorT& xi) {
    CMatrix acc = CMatrix::Zero(spec.dimE, spec.dimE);
    for (const auto& [alpha, mat] : spec.interior)
        if (order(alpha) == 2 * spec.m) acc += power(xi, alpha) * mat;
    return acc;
}

// Full interior symbol including lower-order terms.
inline CMatrix full_interior_symbol(const ProblemSpec& spec, const RVector& xi) {
    CMatrix acc = CMatrix::Zero(spec.dimE, spec.dimE);
    for (const auto& [alpha, mat] : spec.interior) acc += power(xi, alpha) * mat;
    return acc;
}

// a_k(xi') = coefficient of D_y^{2m-k} in A_#(xi', D_y), homogeneous of
// degree k in xi'. Returned as a_k for k = 0..2m.
inline std::vector<CMatrix> normal_coefficients(const ProblemSpec& spec, const RVector& xi_prime) {
    std::vector<CMatrix> a(2 * spec.m + 1, CMatrix::Zero(spec.dimE, spec.dimE));
    for (const auto& [alpha, mat] : spec.interior) {
        if (order(alpha) != 2 * spec.m) continue;
        const int k = 2 * spec.m - alpha[spec.n - 1];
        MultiIndex tang(alpha.begin(), alpha.end() - 1);
        a[k] += power(xi_prime, tang) * mat;
    }
    return a;
}

// b_{j,k}(xi') = coefficient of D_y^{m_j-k} in B_{j#}(xi', D_y), degree k.
inline std::vector<CMatrix> boundary_normal_coefficients(const ProblemSpec& spec, int j,
                                                         const RVector& xi_prime) {
    const auto& b = spec.boundary.at(j);
    const int rows = (j == 0) ? spec.dimF : spec.dimE;
    std::vector<CMatrix> out(b.order + 1, CMatrix::Zero(rows, spec.dimE));
    for (const auto& [beta, mat] : b.coeffs) {
        if (order(beta) != b.order) continue;  // principal part only
        const int k = b.order - beta[spec.n - 1];
        MultiIndex tang(beta.begin(), beta.end() - 1);
        out[k] += power(xi_prime, tang) * mat;
    }
    return out;
}

// Principal tangential symbol C_{j#}(xi'). Zero when C_j = 0.
inline CMatrix tangential_symbol(const ProblemSpec& spec, int j, const RVector& xi_prime) {
    const auto& b = spec.boundary.at(j);
    const int rows = (j == 0) ? spec.dimF : spec.dimE;
    CMatrix acc = CMatrix::Zero(rows, spec.dimF);
    if (!b.has_tangential()) return acc;
    for (const auto& [gamma, mat] : b.tangential_coeffs)
        if (order(gamma) == *b.tangential_order) acc += power(xi_prime, gamma) * mat;
    return acc;
}

// Full (all orders) tangential symbol, used by the half-space solver.
inline CMatrix full_tangential_symbol(const ProblemSpec& spec, int j, const RVector& xi_prime) {
    const auto& b = spec.boundary.at(j);
    const int rows = (j == 0) ? spec.dimF : spec.dimE;
    CMatrix acc = CMatrix::Zero(rows, spec.dimF);
    for (const auto& [gamma, mat] : b.tangential_coeffs) acc += power(xi_prime, gamma) * mat;
    return acc;
}

// Block row B_j(zeta) = (b_{j,m_j}(zeta), ..., b_{j,0}, 0, ..., 0) acting on
// the companion unknown w = (v, (D_y/mu) v, ...) in E^{2m}.
inline CMatrix boundary_block_row(const ProblemSpec& spec, int j, const RVector& zeta) {
    const int rows = (j == 0) ? spec.dimF : spec.dimE;
    const auto& b = spec.boundary.at(j);
    CMatrix row = CMatrix::Zero(rows, 2 * spec.m * spec.dimE);
    auto bk = boundary_normal_coefficients(spec, j, zeta);
    // Block r (0-based) multiplies w_{r+1}; the coefficient there is b_{j, m_j - r}.
    for (int r = 0; r <= b.order; ++r)
        row.middleCols(r * spec.dimE, spec.dimE) = bk[b.order - r];
    return row;
}

}  // namespace qs

#endif
