#ifndef QUASISTEADY_CORE_HPP
#define QUASISTEADY_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Multi-index of a mixed partial derivative, one entry per coordinate.
using MultiIndex = std::vector<int>;

inline int order(const MultiIndex& alpha) {
    int s = 0;
    for (int a : alpha) s += a;
    return s;
}

/// xi^alpha for a real frequency vector.
inline double power(const RVector& xi, const MultiIndex& alpha) {
    double p = 1.0;
    for (int i = 0; i < static_cast<int>(alpha.size()); ++i)
        for (int r = 0; r < alpha[i]; ++r) p *= xi(i);
    return p;
}

inline Complex power(const CVector& xi, const MultiIndex& alpha) {
    Complex p = 1.0;
    for (int i = 0; i < static_cast<int>(alpha.size()); ++i)
        for (int r = 0; r < alpha[i]; ++r) p *= xi(i);
    return p;
}

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline std::string format_multi_index(const MultiIndex& alpha) {
    std::string s = "(";
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(alpha[i]);
    }
    return s + ")";
}

}  // namespace qs

#endif
