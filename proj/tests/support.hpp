#pragma once

// Test-only generators and independent reference computations.

#include "permlin/linalg.hpp"
#include "permlin/random.hpp"
#include "permlin/regime.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace permlin::testing {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

inline double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
    return max_abs_diff(a.matrix(), b.matrix());
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
    return (a - b).frobenius_norm() / std::max(1e-300, b.frobenius_norm());
}

inline SymMatrix random_symmetric(std::size_t n, Engine& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = normal(rng);
    return SymMatrix(m);
}

/// G G^T / n + shift I for Gaussian G.
inline SymMatrix random_pd(std::size_t n, Engine& rng, double shift = 0.1) {
    std::normal_distribution<double> normal;
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = normal(rng);
    Matrix m = (1.0 / static_cast<double>(n)) * (g * g.transpose());
    for (std::size_t i = 0; i < n; ++i) m(i, i) += shift;
    return SymMatrix(m, 1e-8);
}

/// gamma, a in [0.05, 0.95]; |v| up to 0.9 of the admissible bound.
inline LinearRegimeParams random_params(std::size_t n, Engine& rng, bool random_basis = true) {
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_real_distribution<double> sym(-0.9, 0.9);
    const double g = unit(rng);
    const double a = unit(rng);
    const double bound = std::sqrt(std::min(a * g, (1.0 - a) * (1.0 - g)));
    const double v = sym(rng) * bound;
    return LinearRegimeParams(g, a, v, random_basis ? random_q_basis(n, rng) : helmert_q(n));
}

/// Eigenvalues of [[p, q], [q, r]] from the characteristic polynomial, descending.
inline std::pair<double, double> eig2(double p, double q, double r) {
    const double mean = 0.5 * (p + r);
    const double rad = std::sqrt(0.25 * (p - r) * (p - r) + q * q);
    return {mean + rad, mean - rad};
}

/// Pr(sort order of X differs from that of Y = X + N) for n = 2, X ~ N(0, I),
/// N ~ N(0, sigma2 I): the differences are jointly Gaussian with correlation
/// rho = 1/sqrt(1 + sigma2), so the sign-disagreement probability is arccos(rho)/pi.
inline double orthant_error_probability(double sigma2) {
    return std::acos(1.0 / std::sqrt(1.0 + sigma2)) / std::numbers::pi;
}

} // namespace permlin::testing
