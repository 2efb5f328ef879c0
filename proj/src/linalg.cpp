#include "permlin/linalg.hpp"

#include "permlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace permlin {

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) {
            throw ParameterError("ragged matrix: row " + std::to_string(i) + " has " +
                                 std::to_string(rows[i].size()) + " entries, expected " +
                                 std::to_string(c));
        }
        std::copy(rows[i].begin(), rows[i].end(), m.data_.begin() + i * c);
    }
    return m;
}

Vector Matrix::column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

std::vector<Vector> Matrix::to_rows() const {
    std::vector<Vector> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i].assign(row(i).begin(), row(i).end());
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vector Matrix::apply(std::span<const double> x) const {
    Vector out(rows_);
    apply_into(x, out);
    return out;
}

void Matrix::apply_into(std::span<const double> x, std::span<double> out) const {
    if (x.size() != cols_ || out.size() != rows_) {
        throw ParameterError("matrix-vector dimension mismatch: " + std::to_string(rows_) + "x" +
                             std::to_string(cols_) + " times length " + std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        const double* r = data_.data() + i * cols_;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * x[j];
        out[i] = acc;
    }
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols_ != rhs.rows_) throw ParameterError("matrix product dimension mismatch");
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t i = 0; i < lhs.rows_; ++i)
        for (std::size_t k = 0; k < lhs.cols_; ++k) {
            const double a = lhs(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

Matrix operator+(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows_ != rhs.rows_ || lhs.cols_ != rhs.cols_)
        throw ParameterError("matrix sum dimension mismatch");
    Matrix out = lhs;
    for (std::size_t k = 0; k < out.data_.size(); ++k) out.data_[k] += rhs.data_[k];
    return out;
}

Matrix operator-(const Matrix& lhs, const Matrix& rhs) {
    return lhs + (-1.0) * rhs;
}

Matrix operator*(double s, const Matrix& m) {
    Matrix out = m;
    for (double& v : out.data_) v *= s;
    return out;
}

// ---------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(const Matrix& m, double symmetry_tol) : m_(m) {
    if (m.rows() != m.cols()) {
        throw ParameterError("matrix is not square: " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
    }
    if (m.rows() == 0) throw ParameterError("matrix dimension must be at least 1");
    const std::size_t n = m.rows();
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(m(i, j))) throw DomainError("matrix has non-finite entries");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = std::abs(m(i, j) - m(j, i));
            if (gap > symmetry_tol * scale) {
                throw ParameterError("matrix is not symmetric: |m(" + std::to_string(i) + "," +
                                     std::to_string(j) + ") - m(" + std::to_string(j) + "," +
                                     std::to_string(i) + ")| = " + std::to_string(gap));
            }
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m_(i, j) = avg;
            m_(j, i) = avg;
        }
    }
}

SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return SymMatrix(m);
}

SymMatrix SymMatrix::from_rows(const std::vector<Vector>& rows, double symmetry_tol) {
    return SymMatrix(Matrix::from_rows(rows), symmetry_tol);
}

SymMatrix operator+(const SymMatrix& lhs, const SymMatrix& rhs) {
    return SymMatrix(lhs.m_ + rhs.m_);
}

SymMatrix operator-(const SymMatrix& lhs, const SymMatrix& rhs) {
    return SymMatrix(lhs.m_ - rhs.m_);
}

SymMatrix operator*(double s, const SymMatrix& m) { return SymMatrix(s * m.m_); }

SymMatrix congruence(const Matrix& left, const SymMatrix& mid) {
    Matrix prod = left * mid.matrix() * left.transpose();
    const std::size_t n = prod.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (prod(i, j) + prod(j, i));
            prod(i, j) = avg;
            prod(j, i) = avg;
        }
    return SymMatrix(prod);
}

// ---------------------------------------------------------------- OrthonormalBasis

OrthonormalBasis::OrthonormalBasis(Matrix columns, double tol) : q_(std::move(columns)) {
    if (q_.rows() != q_.cols() || q_.rows() == 0) {
        throw ParameterError("basis matrix must be square and non-empty");
    }
    const Matrix gram = q_.transpose() * q_;
    const std::size_t n = q_.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double target = i == j ? 1.0 : 0.0;
            if (std::abs(gram(i, j) - target) > tol) {
                throw ParameterError("basis columns are not orthonormal: (Q^T Q)(" +
                                     std::to_string(i) + "," + std::to_string(j) +
                                     ") = " + std::to_string(gram(i, j)));
            }
        }
}

bool OrthonormalBasis::in_q_family(double tol) const {
    const std::size_t n = q_.rows();
    const Matrix gram = q_.transpose() * q_;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(gram(i, j) - (i == j ? 1.0 : 0.0)) > tol) return false;
    const double e = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(q_(i, n - 1) - e) > tol) return false;
    return true;
}

// ---------------------------------------------------------------- eigen

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// A <- J^T A J and V <- V J for the rotation zeroing a(p, q).
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) return;
    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

} // namespace

Spectrum sym_eigen(const SymMatrix& m, const LinalgTolerances& tol) {
    const std::size_t n = m.n();
    Matrix a = m.matrix();
    Matrix v = Matrix::identity(n);
    const double target = tol.off_diagonal * m.frobenius_norm();

    bool converged = off_diagonal_norm(a) <= target;
    for (int sweep = 0; sweep < tol.max_sweeps && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
        converged = off_diagonal_norm(a) <= target;
    }
    if (!converged) {
        throw NumericalError("Jacobi eigendecomposition did not converge within " +
                             std::to_string(tol.max_sweeps) + " sweeps");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    Spectrum out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = idx[k];
        out.values[k] = a(src, src);
        std::size_t lead = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(v(i, src)) > std::abs(v(lead, src)) + 1e-12) lead = i;
        const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
    }
    return out;
}

bool is_positive_definite(const SymMatrix& m, const LinalgTolerances& tol) {
    const std::size_t n = m.n();
    Matrix a = m.matrix();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
    if (!(max_diag > 0.0)) return false;
    const double floor = tol.pd_pivot * max_diag;

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (a(perm[i], perm[i]) > a(perm[piv], perm[piv])) piv = i;
        std::swap(perm[k], perm[piv]);
        const std::size_t pk = perm[k];
        const double d = a(pk, pk);
        if (!(d > floor)) return false;
        const double l = std::sqrt(d);
        for (std::size_t i = k + 1; i < n; ++i) a(perm[i], pk) /= l;
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j <= i; ++j) {
                const double upd = a(perm[i], pk) * a(perm[j], pk);
                a(perm[i], perm[j]) -= upd;
                if (i != j) a(perm[j], perm[i]) -= upd;
            }
    }
    return true;
}

SymMatrix sym_inverse(const SymMatrix& m, const LinalgTolerances& tol) {
    if (!is_positive_definite(m, tol)) {
        throw DomainError("matrix inverse requires a positive definite matrix");
    }
    const std::size_t n = m.n();
    // m = L L^T
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    Matrix inv(n, n);
    Vector y(n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = i == c ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
            y[i] = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * inv(k, c);
            inv(ii, c) = s / l(ii, ii);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = avg;
            inv(j, i) = avg;
        }
    return SymMatrix(inv);
}

SymMatrix sym_sqrt(const SymMatrix& m, const LinalgTolerances& tol) {
    const Spectrum s = sym_eigen(m, tol);
    const double floor = -tol.psd_negative * m.frobenius_norm();
    Vector roots(s.values.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (s.values[i] < floor) {
            throw DomainError("matrix square root requires a positive semi-definite matrix "
                              "(eigenvalue " + std::to_string(s.values[i]) + ")");
        }
        roots[i] = std::sqrt(std::max(0.0, s.values[i]));
    }
    return congruence(s.vectors, SymMatrix::diagonal(roots));
}

double determinant(const SymMatrix& m, const LinalgTolerances& tol) {
    const Spectrum s = sym_eigen(m, tol);
    double d = 1.0;
    for (double v : s.values) d *= v;
    return d;
}

OrthonormalBasis helmert_q(std::size_t n) {
    if (n == 0) throw ParameterError("basis dimension must be at least 1");
    Matrix q(n, n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        for (std::size_t i = 1; i <= n; ++i) {
            double value = 0.0;
            if (j == n) {
                value = 1.0 / std::sqrt(static_cast<double>(n));
            } else if (i <= j) {
                value = 1.0 / std::sqrt(jd * jd + jd);
            } else if (i == j + 1) {
                value = -1.0 / std::sqrt(1.0 + 1.0 / jd);
            }
            q(i - 1, j - 1) = value;
        }
    }
    return OrthonormalBasis(std::move(q), 1e-12);
}

// ---------------------------------------------------------------- CovarianceMatrix

CovarianceMatrix::CovarianceMatrix(SymMatrix m, const LinalgTolerances& tol) : m_(std::move(m)) {
    if (!is_positive_definite(m_, tol)) {
        throw DomainError("covariance matrix must be positive definite");
    }
}

} // namespace permlin
