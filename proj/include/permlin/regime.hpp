#pragma once

#include "permlin/linalg.hpp"
#include "permlin/random.hpp"

#include <optional>

namespace permlin {

/// (gamma, a, v) with a basis Q whose last column is (1/sqrt(n)) * 1. Parameterizes
///     (K^-1 + I)^-1 = Q blockdiag(gamma I_{n-2}, S) Q^T,   S = [gamma v; v a].
class LinearRegimeParams {
public:
    /// Throws ParameterError unless 0 < gamma < 1, 0 < a < 1,
    /// v^2 < min(a*gamma, (1-a)(1-gamma)), n >= 2 and q is in the Q family.
    LinearRegimeParams(double gamma, double a, double v, OrthonormalBasis q);

    double gamma() const noexcept { return gamma_; }
    double a() const noexcept { return a_; }
    double v() const noexcept { return v_; }
    const OrthonormalBasis& basis() const noexcept { return q_; }
    std::size_t n() const noexcept { return q_.n(); }

private:
    double gamma_;
    double a_;
    double v_;
    OrthonormalBasis q_;
};

struct RegimeCheckResult {
    bool is_linear = false;
    std::optional<LinearRegimeParams> params;  // present iff is_linear
    double residual = 0.0;                     // max |B - gamma I|
};

struct BlockFormResult {
    bool holds = false;
    double residual = 0.0;
};

/// M = (K^-1 + I)^-1, the posterior covariance of X given Y.
SymMatrix conditional_covariance(const CovarianceMatrix& k);

/// Q blockdiag(gamma I_{n-2}, S) Q^T.
SymMatrix block_matrix(const LinearRegimeParams& p);

/// K = M (I - M)^-1 for M = block_matrix(p), evaluated block-wise before rotating by Q.
CovarianceMatrix construct_covariance(const LinearRegimeParams& p);

/// B = C^T M C with C the first n-1 columns of `q`. Throws ParameterError if
/// `q` is not in the Q family or n < 2.
SymMatrix projection_matrix(const CovarianceMatrix& k, const OrthonormalBasis& q);

/// Projection-isotropy test against the Helmert basis.
RegimeCheckResult check_linear_regime(const CovarianceMatrix& k, double tol = 1e-9);

/// Same test against an arbitrary member of the Q family.
RegimeCheckResult check_linear_regime(const CovarianceMatrix& k, const OrthonormalBasis& q,
                                      double tol = 1e-9);

/// Verifies the block structure of Q~^T M Q~ directly, with Q~ assembled from the
/// W-component of M 1 and a Gram-Schmidt completion of the standard basis.
BlockFormResult check_block_form(const CovarianceMatrix& k, double tol = 1e-9);

/// Eigenpairs of construct_covariance(p) from the parameters alone, sorted descending.
Spectrum spectrum_closed_form(const LinearRegimeParams& p);

/// Parameters of a 2x2 covariance with Q = (1/sqrt 2)[-1 1; 1 1]:
/// a = (w+z+2q)/2, gamma = (w+z-2q)/2, v = (z-w)/2 where M = [w q; q z].
LinearRegimeParams n2_params(const CovarianceMatrix& k);

/// Random member of the Q family: Gram-Schmidt of Gaussian vectors against (1/sqrt n) * 1,
/// which is placed last.
OrthonormalBasis random_q_basis(std::size_t n, Engine& engine);

} // namespace permlin
