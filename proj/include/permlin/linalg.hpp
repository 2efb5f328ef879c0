#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace permlin {

using Vector = std::vector<double>;

/// Tolerances used by the dense symmetric routines. Frobenius-relative unless noted.
struct LinalgTolerances {
    double symmetry = 1e-10;      // max |m_ij - m_ji| relative to max |m|
    int max_sweeps = 100;         // Jacobi sweep cap
    double off_diagonal = 1e-12;  // Jacobi stop: off(A) <= off_diagonal * ||M||_F
    double pd_pivot = 1e-12;      // Cholesky pivots must exceed pd_pivot * max diagonal
    double psd_negative = 1e-10;  // sqrt rejects eigenvalues below -psd_negative * ||M||_F
};

/// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    Vector column(std::size_t j) const;
    std::vector<Vector> to_rows() const;

    Matrix transpose() const;
    Vector apply(std::span<const double> x) const;
    /// Writes this * x into out (out.size() == rows()).
    void apply_into(std::span<const double> x, std::span<double> out) const;

    double frobenius_norm() const;
    double max_abs() const;

    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
    friend Matrix operator+(const Matrix& lhs, const Matrix& rhs);
    friend Matrix operator-(const Matrix& lhs, const Matrix& rhs);
    friend Matrix operator*(double s, const Matrix& m);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Symmetric n x n matrix. Construction averages (m + m^T)/2 when the asymmetry
/// is within tolerance and rejects the input otherwise.
class SymMatrix {
public:
    explicit SymMatrix(const Matrix& m, double symmetry_tol = LinalgTolerances{}.symmetry);

    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(std::span<const double> d);
    static SymMatrix from_rows(const std::vector<Vector>& rows,
                               double symmetry_tol = LinalgTolerances{}.symmetry);

    std::size_t n() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }
    std::vector<Vector> to_rows() const { return m_.to_rows(); }
    Vector apply(std::span<const double> x) const { return m_.apply(x); }

    double frobenius_norm() const { return m_.frobenius_norm(); }
    double max_abs() const { return m_.max_abs(); }

    friend SymMatrix operator+(const SymMatrix& lhs, const SymMatrix& rhs);
    friend SymMatrix operator-(const SymMatrix& lhs, const SymMatrix& rhs);
    friend SymMatrix operator*(double s, const SymMatrix& m);

private:
    Matrix m_;
};

/// left * mid * left^T, symmetrized.
SymMatrix congruence(const Matrix& left, const SymMatrix& mid);

/// Square matrix with orthonormal columns.
class OrthonormalBasis {
public:
    /// `columns(i, j)` is entry i of basis vector j. Throws ParameterError unless
    /// Q^T Q = I within `tol` per entry.
    explicit OrthonormalBasis(Matrix columns, double tol = 1e-10);

    std::size_t n() const noexcept { return q_.rows(); }
    const Matrix& matrix() const noexcept { return q_; }
    Vector column(std::size_t j) const { return q_.column(j); }

    /// Orthonormal with last column (1/sqrt(n)) * 1.
    bool in_q_family(double tol = 1e-10) const;

private:
    Matrix q_;
};

/// Eigenpairs sorted by descending eigenvalue; column i of `vectors` pairs with values[i].
struct Spectrum {
    Vector values;
    Matrix vectors;
};

/// Cyclic Jacobi eigendecomposition. Each eigenvector is sign-normalized so that
/// its largest-magnitude entry (first on ties) is positive.
/// Throws NumericalError after `tol.max_sweeps` sweeps without convergence.
Spectrum sym_eigen(const SymMatrix& m, const LinalgTolerances& tol = {});

/// Diagonally pivoted Cholesky; every pivot must exceed pd_pivot * max diagonal.
bool is_positive_definite(const SymMatrix& m, const LinalgTolerances& tol = {});

/// Throws DomainError on non-positive-definite input.
SymMatrix sym_inverse(const SymMatrix& m, const LinalgTolerances& tol = {});

/// Principal square root of a positive semi-definite matrix.
SymMatrix sym_sqrt(const SymMatrix& m, const LinalgTolerances& tol = {});

double determinant(const SymMatrix& m, const LinalgTolerances& tol = {});

/// Q_ij = (j^2+j)^{-1/2} for i <= j < n, -(1+1/j)^{-1/2} for i = j+1, n^{-1/2} for j = n
/// (1-based), zero otherwise.
OrthonormalBasis helmert_q(std::size_t n);

/// Noise covariance: symmetric positive definite.
class CovarianceMatrix {
public:
    /// Throws DomainError if `m` is not positive definite.
    explicit CovarianceMatrix(SymMatrix m, const LinalgTolerances& tol = {});

    std::size_t n() const noexcept { return m_.n(); }
    const SymMatrix& sym() const noexcept { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

private:
    SymMatrix m_;
};

} // namespace permlin
