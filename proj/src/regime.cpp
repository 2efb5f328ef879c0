#include "permlin/regime.hpp"

#include "permlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace permlin {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// First n-1 columns of q.
Matrix leading_columns(const OrthonormalBasis& q) {
    const std::size_t n = q.n();
    Matrix c(n, n - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j + 1 < n; ++j) c(i, j) = q.matrix()(i, j);
    return c;
}

// blockdiag(g I_{n-2}, [[s11, s12],[s12, s22]])
SymMatrix block_diagonal(std::size_t n, double g, double s11, double s12, double s22) {
    Matrix d(n, n);
    for (std::size_t i = 0; i + 2 < n; ++i) d(i, i) = g;
    d(n - 2, n - 2) = s11;
    d(n - 2, n - 1) = s12;
    d(n - 1, n - 2) = s12;
    d(n - 1, n - 1) = s22;
    return SymMatrix(d);
}

// Unit eigenvector, in (q_{n-1}, q_n) coordinates, of S = [g v; v a] for eigenvalue mu.
// Both (v, mu - g) and (mu - a, v) solve (S - mu I) x = 0; take the better conditioned.
std::pair<double, double> s_block_eigenvector(double g, double a, double v, double mu) {
    double x1 = v, x2 = mu - g;
    const double y1 = mu - a, y2 = v;
    if (std::hypot(y1, y2) > std::hypot(x1, x2)) {
        x1 = y1;
        x2 = y2;
    }
    const double len = std::hypot(x1, x2);
    return {x1 / len, x2 / len};
}

} // namespace

LinearRegimeParams::LinearRegimeParams(double gamma, double a, double v, OrthonormalBasis q)
    : gamma_(gamma), a_(a), v_(v), q_(std::move(q)) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw ParameterError("gamma must lie in (0, 1), got " + fmt(gamma));
    }
    if (!(a > 0.0 && a < 1.0)) throw ParameterError("a must lie in (0, 1), got " + fmt(a));
    if (!std::isfinite(v)) throw ParameterError("v must be finite");
    const double bound = std::min(a * gamma, (1.0 - a) * (1.0 - gamma));
    if (!(v * v < bound)) {
        throw ParameterError("v^2 < min(a*gamma, (1-a)(1-gamma)) violated: v^2 = " + fmt(v * v) +
                             ", a*gamma = " + fmt(a * gamma) +
                             ", (1-a)(1-gamma) = " + fmt((1.0 - a) * (1.0 - gamma)));
    }
    if (q_.n() < 2) throw ParameterError("linear-regime parameters need n >= 2");
    if (!q_.in_q_family()) {
        throw ParameterError("basis is not in the Q family (last column must be 1/sqrt(n))");
    }
}

SymMatrix conditional_covariance(const CovarianceMatrix& k) {
    // (K^-1 + I)^-1 = I - (I + K)^-1
    const std::size_t n = k.n();
    const SymMatrix shifted = SymMatrix::identity(n) + k.sym();
    return SymMatrix::identity(n) - sym_inverse(shifted);
}

SymMatrix block_matrix(const LinearRegimeParams& p) {
    const SymMatrix d = block_diagonal(p.n(), p.gamma(), p.gamma(), p.v(), p.a());
    return congruence(p.basis().matrix(), d);
}

CovarianceMatrix construct_covariance(const LinearRegimeParams& p) {
    const double g = p.gamma(), a = p.a(), v = p.v();
    // D (I - D)^-1 per block: g/(1-g) on the isotropic part and
    // S (I - S)^-1 = [g(1-a)+v^2, v; v, a(1-g)+v^2] / det(I - S).
    const double det = (1.0 - g) * (1.0 - a) - v * v;
    const SymMatrix kd = block_diagonal(p.n(), g / (1.0 - g), (g * (1.0 - a) + v * v) / det,
                                        v / det, (a * (1.0 - g) + v * v) / det);
    return CovarianceMatrix(congruence(p.basis().matrix(), kd));
}

SymMatrix projection_matrix(const CovarianceMatrix& k, const OrthonormalBasis& q) {
    if (k.n() < 2) throw ParameterError("projection onto the zero-sum hyperplane needs n >= 2");
    if (q.n() != k.n()) throw ParameterError("basis and covariance dimensions differ");
    if (!q.in_q_family()) {
        throw ParameterError("basis is not in the Q family (last column must be 1/sqrt(n))");
    }
    const SymMatrix m = conditional_covariance(k);
    return congruence(leading_columns(q).transpose(), m);
}

RegimeCheckResult check_linear_regime(const CovarianceMatrix& k, double tol) {
    if (k.n() < 2) throw ParameterError("regime check needs n >= 2");
    return check_linear_regime(k, helmert_q(k.n()), tol);
}

RegimeCheckResult check_linear_regime(const CovarianceMatrix& k, const OrthonormalBasis& q,
                                      double tol) {
    const std::size_t n = k.n();
    const SymMatrix b = projection_matrix(k, q);
    const std::size_t d = n - 1;

    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) trace += b(i, i);
    const double gamma = trace / static_cast<double>(d);

    double residual = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            residual = std::max(residual, std::abs(b(i, j) - (i == j ? gamma : 0.0)));

    RegimeCheckResult result;
    result.residual = residual;
    result.is_linear = residual <= tol * (1.0 + b.max_abs());
    if (!result.is_linear) return result;

    const SymMatrix m = conditional_covariance(k);
    const Vector qn = q.column(n - 1);
    const Vector mqn = m.apply(qn);
    const double a = dot(qn, mqn);
    const Matrix c = leading_columns(q);
    const Vector w = c.transpose().apply(mqn);  // C^T M q_n
    const double v = norm(w);

    // Rotate within span(C) so that C^T M q_n lines up with the (n-1)-th column:
    // Householder H maps w/|w| to e_{n-1}; C H keeps C^T M C = gamma I.
    Matrix rotated = q.matrix();
    if (v > 0.0) {
        Vector h(d);
        for (std::size_t i = 0; i < d; ++i) h[i] = w[i] / v;
        h[d - 1] -= 1.0;
        const double hh = dot(h, h);
        if (hh > 1e-28) {
            Matrix hm = Matrix::identity(d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) hm(i, j) -= 2.0 * h[i] * h[j] / hh;
            const Matrix ch = c * hm;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < d; ++j) rotated(i, j) = ch(i, j);
        }
    }
    result.params.emplace(gamma, a, v, OrthonormalBasis(std::move(rotated)));
    return result;
}

BlockFormResult check_block_form(const CovarianceMatrix& k, double tol) {
    const std::size_t n = k.n();
    if (n < 2) throw ParameterError("block-form check needs n >= 2");
    const SymMatrix m = conditional_covariance(k);

    const Vector qn(n, 1.0 / std::sqrt(static_cast<double>(n)));
    const Vector mqn = m.apply(qn);
    const double a = dot(qn, mqn);
    Vector u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = mqn[i] - a * qn[i];
    const double ulen = norm(u);

    // Fixed trailing columns: u/|u| (when nonzero) then q_n.
    std::vector<Vector> fixed;
    if (ulen > 1e-14) {
        for (double& x : u) x /= ulen;
        fixed.push_back(u);
    }
    fixed.push_back(qn);

    std::vector<Vector> lead;
    const std::size_t want = n - fixed.size();
    for (std::size_t e = 0; e < n && lead.size() < want; ++e) {
        Vector x(n, 0.0);
        x[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto* set : {&fixed, &lead})
                for (const Vector& b : *set) {
                    const double proj = dot(x, b);
                    for (std::size_t i = 0; i < n; ++i) x[i] -= proj * b[i];
                }
        }
        const double len = norm(x);
        if (len < 1e-8) continue;
        for (double& xi : x) xi /= len;
        lead.push_back(std::move(x));
    }

    Matrix qt(n, n);
    std::size_t col = 0;
    for (const auto* set : {&lead, &fixed})
        for (const Vector& b : *set) {
            for (std::size_t i = 0; i < n; ++i) qt(i, col) = b[i];
            ++col;
        }

    const SymMatrix t = congruence(qt.transpose(), m);  // Q~^T M Q~
    double gamma = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) gamma += t(i, i);
    gamma /= static_cast<double>(n - 1);
    const SymMatrix target = block_diagonal(n, gamma, gamma, t(n - 2, n - 1), t(n - 1, n - 1));

    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            residual = std::max(residual, std::abs(t(i, j) - target(i, j)));
    return {residual <= tol * (1.0 + t.max_abs()), residual};
}

Spectrum spectrum_closed_form(const LinearRegimeParams& p) {
    const std::size_t n = p.n();
    const double g = p.gamma(), a = p.a(), v = p.v();
    const double root = std::sqrt((a - g) * (a - g) + 4.0 * v * v);

    struct Pair {
        double value;
        Vector vec;
    };
    std::vector<Pair> pairs;
    pairs.reserve(n);
    for (std::size_t i = 0; i + 2 < n; ++i) pairs.push_back({g / (1.0 - g), p.basis().column(i)});

    const Vector qa = p.basis().column(n - 2);
    const Vector qb = p.basis().column(n - 1);
    const double mu_hi = 0.5 * (a + g + root);
    const double mu_lo = 0.5 * (a + g - root);
    const double lambda_hi = (a + g + root) / (2.0 - a - g - root);
    const double lambda_lo = (a + g - root) / (2.0 - a - g + root);

    std::pair<double, double> e_hi, e_lo;
    if (root == 0.0) {
        e_hi = {1.0, 0.0};
        e_lo = {0.0, 1.0};
    } else {
        e_hi = s_block_eigenvector(g, a, v, mu_hi);
        e_lo = s_block_eigenvector(g, a, v, mu_lo);
    }
    for (const auto& [lambda, e] : {std::pair{lambda_hi, e_hi}, std::pair{lambda_lo, e_lo}}) {
        Vector vec(n);
        for (std::size_t i = 0; i < n; ++i) vec[i] = e.first * qa[i] + e.second * qb[i];
        pairs.push_back({lambda, std::move(vec)});
    }

    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const Pair& x, const Pair& y) { return x.value > y.value; });
    Spectrum out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = pairs[k].value;
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = pairs[k].vec[i];
    }
    return out;
}

LinearRegimeParams n2_params(const CovarianceMatrix& k) {
    if (k.n() != 2) {
        throw ParameterError("n2_params needs a 2x2 covariance, got n = " + std::to_string(k.n()));
    }
    const SymMatrix m = conditional_covariance(k);
    const double w = m(0, 0), q = m(0, 1), z = m(1, 1);
    const double s = 1.0 / std::sqrt(2.0);
    Matrix basis(2, 2);
    basis(0, 0) = -s;
    basis(0, 1) = s;
    basis(1, 0) = s;
    basis(1, 1) = s;
    return LinearRegimeParams((w + z - 2.0 * q) / 2.0, (w + z + 2.0 * q) / 2.0, (z - w) / 2.0,
                              OrthonormalBasis(std::move(basis)));
}

OrthonormalBasis random_q_basis(std::size_t n, Engine& engine) {
    if (n == 0) throw ParameterError("basis dimension must be at least 1");
    std::normal_distribution<double> normal;
    const Vector ones(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<Vector> cols;
    while (cols.size() + 1 < n) {
        Vector x(n);
        for (double& xi : x) xi = normal(engine);
        for (int pass = 0; pass < 2; ++pass) {
            double proj = dot(x, ones);
            for (std::size_t i = 0; i < n; ++i) x[i] -= proj * ones[i];
            for (const Vector& b : cols) {
                proj = dot(x, b);
                for (std::size_t i = 0; i < n; ++i) x[i] -= proj * b[i];
            }
        }
        const double len = norm(x);
        if (len < 1e-6) continue;
        for (double& xi : x) xi /= len;
        cols.push_back(std::move(x));
    }
    Matrix q(n, n);
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (std::size_t i = 0; i < n; ++i) q(i, j) = cols[j][i];
    for (std::size_t i = 0; i < n; ++i) q(i, n - 1) = ones[i];
    return OrthonormalBasis(std::move(q));
}

} // namespace permlin
