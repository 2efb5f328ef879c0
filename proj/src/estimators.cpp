#include "permlin/estimators.hpp"

#include "permlin/error.hpp"
#include "permlin/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

namespace permlin {

namespace {

Estimate binomial(std::uint64_t hits, std::uint64_t trials, std::uint64_t seed,
                  std::string method) {
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials, seed,
            std::move(method)};
}

// Uniform point in the unit ball of dimension out.size().
void draw_ball_point(NormalSource& normal, std::span<double> out) {
    double len2 = 0.0;
    do {
        normal.fill(out);
        len2 = std::inner_product(out.begin(), out.end(), out.begin(), 0.0);
    } while (len2 == 0.0);
    const double radius = std::pow(normal.uniform(), 1.0 / static_cast<double>(out.size()));
    const double scale = radius / std::sqrt(len2);
    double after = 0.0;
    for (double& v : out) {
        v *= scale;
        after += v * v;
    }
    if (after > 1.0) {
        const double fix = 1.0 / std::sqrt(after);
        for (double& v : out) v *= fix;
    }
}

bool ascending(std::span<const double> x) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] <= x[i + 1])) return false;
    return true;
}

std::uint64_t sum(const std::vector<std::uint64_t>& v) {
    return std::accumulate(v.begin(), v.end(), std::uint64_t{0});
}

double unit_ball_volume(std::size_t dim) {
    const double d = static_cast<double>(dim);
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

} // namespace

std::string to_string(DecoderKind kind) { return kind == DecoderKind::linear ? "linear" : "map"; }

DecoderKind parse_decoder_kind(const std::string& text) {
    if (text == "linear") return DecoderKind::linear;
    if (text == "map") return DecoderKind::map;
    throw ParameterError("unknown decoder \"" + text + "\" (expected linear or map)");
}

std::vector<Vector> sample_gaussian(const CovarianceMatrix& cov, std::size_t count,
                                    std::uint64_t seed) {
    const std::size_t n = cov.n();
    const SymMatrix root = sym_sqrt(cov.sym());
    NormalSource normal(make_stream(seed, 0));
    std::vector<Vector> out(count, Vector(n));
    Vector z(n);
    for (auto& x : out) {
        normal.fill(z);
        root.matrix().apply_into(z, x);
    }
    return out;
}

std::vector<Vector> sample_uniform_ball(std::size_t dim, std::size_t count, std::uint64_t seed) {
    if (dim == 0) throw ParameterError("ball dimension must be at least 1");
    NormalSource normal(make_stream(seed, 0));
    std::vector<Vector> out(count, Vector(dim));
    for (auto& x : out) draw_ball_point(normal, x);
    return out;
}

Estimate perr_simulation(const CovarianceMatrix& k, DecoderKind decoder, std::uint64_t trials,
                         std::uint64_t seed, std::uint64_t map_samples,
                         const MonteCarloOptions& opts) {
    if (trials == 0) throw ParameterError("error-probability simulation needs at least one trial");
    const std::size_t n = k.n();
    const std::string method = "simulation-" + to_string(decoder);
    if (n == 1) return {0.0, 0.0, trials, seed, method};
    if (decoder == DecoderKind::map) enforce_factorial_guard(n, opts.max_factorial_n);

    const SymMatrix root = sym_sqrt(k.sym());
    const LinearDecoder linear(k);
    std::optional<MapDecoder> map;
    if (decoder == DecoderKind::map) map.emplace(k);

    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    MonteCarloOptions inner = opts;
    inner.workers = 1;
    inner.negate_noise = false;

    std::vector<std::uint64_t> errors(workers, 0);
    run_workers(workers, [&](std::size_t w) {
        NormalSource normal(make_stream(seed, w));
        const Chunk chunk = chunk_for(trials, workers, w);
        Vector x(n), z(n), noise(n), y(n);
        std::vector<std::size_t> scratch(n);
        for (std::uint64_t t = chunk.begin; t < chunk.end; ++t) {
            normal.fill(x);
            normal.fill(z);
            root.matrix().apply_into(z, noise);
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + noise[i];
            const std::uint64_t truth = sorted_order_rank(x, scratch);
            std::uint64_t decoded = 0;
            if (decoder == DecoderKind::linear) {
                decoded = sorted_order_rank(linear.estimate(y), scratch);
            } else {
                decoded = (*map)(y, map_samples, splitmix64(seed + t + 1), inner).lex_rank();
            }
            if (decoded != truth) ++errors[w];
        }
    });
    return binomial(sum(errors), trials, seed, method);
}

Estimate perr_geometric(const CovarianceMatrix& k, std::uint64_t samples, std::uint64_t seed,
                        const MonteCarloOptions& opts, double regime_tol) {
    if (samples == 0) throw ParameterError("geometric estimator needs at least one sample");
    const std::size_t n = k.n();
    const std::string method = "geometric";
    if (n == 1) return {0.0, 0.0, samples, seed, method};
    const RegimeCheckResult regime = check_linear_regime(k, regime_tol);
    if (!regime.is_linear) {
        throw RefusalError("the cone-volume error formula requires a covariance in the linear "
                           "regime; projection residual " + std::to_string(regime.residual) +
                           " exceeds tolerance");
    }

    const SymMatrix root = sym_sqrt(k.sym());
    const SymMatrix shrink = sym_inverse(SymMatrix::identity(n) + k.sym());
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    std::vector<std::uint64_t> hits(workers, 0);

    run_workers(workers, [&](std::size_t w) {
        NormalSource normal(make_stream(seed, w));
        const Chunk chunk = chunk_for(samples, workers, w);
        Vector ball(2 * n), noise(n), second(n), mapped(n);
        const std::span<const double> x(ball.data(), n);
        const std::span<const double> z(ball.data() + n, n);
        for (std::uint64_t s = chunk.begin; s < chunk.end; ++s) {
            draw_ball_point(normal, ball);
            // A w = (x, x + K^{1/2} z); second block must lie in (K+I) H.
            if (!ascending(x)) continue;
            root.matrix().apply_into(z, noise);
            for (std::size_t i = 0; i < n; ++i) second[i] = x[i] + noise[i];
            shrink.matrix().apply_into(second, mapped);
            if (ascending(mapped)) ++hits[w];
        }
    });

    const double nfact = static_cast<double>(factorial(n));
    const double p = static_cast<double>(sum(hits)) / static_cast<double>(samples);
    const double correct = nfact * p;
    return {std::clamp(1.0 - correct, 0.0, 1.0),
            nfact * std::sqrt(p * (1.0 - p) / static_cast<double>(samples)), samples, seed,
            method};
}

PosteriorTable origin_uniformity(const CovarianceMatrix& k, std::uint64_t samples,
                                 std::uint64_t seed, const MonteCarloOptions& opts) {
    const Vector origin(k.n(), 0.0);
    return posterior_table(k, origin, samples, seed, opts);
}

Estimate cone_probability_gaussian(const CovarianceMatrix& cov_u, const Permutation& pi,
                                   std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw ParameterError("cone probability needs at least one sample");
    if (pi.size() != cov_u.n()) throw ParameterError("permutation and covariance sizes differ");
    const SymMatrix root = sym_sqrt(cov_u.sym());
    NormalSource normal(make_stream(seed, 0));
    const std::size_t n = cov_u.n();
    Vector z(n), u(n);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        normal.fill(z);
        root.matrix().apply_into(z, u);
        if (pi.contains(u)) ++hits;
    }
    return binomial(hits, samples, seed, "gaussian");
}

Estimate cone_probability_volume(const CovarianceMatrix& cov_u, const Permutation& pi,
                                 std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw ParameterError("cone probability needs at least one sample");
    if (pi.size() != cov_u.n()) throw ParameterError("permutation and covariance sizes differ");
    const std::size_t n = cov_u.n();
    const SymMatrix root = sym_sqrt(cov_u.sym());
    const double det_root = std::sqrt(determinant(cov_u.sym()));
    const double ball = unit_ball_volume(n);
    const double ellipsoid = det_root * ball;  // Vol(cov_u^{1/2} B)

    NormalSource normal(make_stream(seed, 0));
    Vector w(n), u(n);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        draw_ball_point(normal, w);
        root.matrix().apply_into(w, u);
        if (pi.contains(u)) ++hits;
    }
    const double fraction = static_cast<double>(hits) / static_cast<double>(samples);
    const double intersection = fraction * ellipsoid;
    const double scale = (1.0 / det_root) / ball;
    const double value = scale * intersection;
    const double fraction_se = std::sqrt(fraction * (1.0 - fraction) / static_cast<double>(samples));
    return {value, scale * ellipsoid * fraction_se, samples, seed, "volume"};
}

Box Box::cube(std::size_t n, double lo, double hi) {
    if (!(lo < hi)) throw ParameterError("box bounds must satisfy lo < hi");
    return {std::vector<std::pair<double, double>>(n, {lo, hi})};
}

RegionSample region_sample(const CovarianceMatrix& k, const Box& box, std::size_t count,
                           DecoderKind decoder, std::uint64_t map_samples, std::uint64_t seed,
                           const MonteCarloOptions& opts) {
    const std::size_t n = k.n();
    if (box.dim() != n) {
        throw ParameterError("box has " + std::to_string(box.dim()) + " axes, covariance has " +
                             std::to_string(n));
    }
    for (const auto& [lo, hi] : box.bounds)
        if (!(lo < hi)) throw ParameterError("box bounds must satisfy lo < hi");
    if (decoder == DecoderKind::map) {
        enforce_factorial_guard(n, opts.max_factorial_n);
        if (map_samples == 0) throw ParameterError("MAP labeling needs at least one sample");
    }

    RegionSample out;
    out.box = box;
    out.decoder = decoder;
    out.samples_per_point = decoder == DecoderKind::map ? map_samples : 0;

    Engine engine = make_stream(seed, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    out.points.assign(count, Vector(n));
    for (auto& y : out.points)
        for (std::size_t i = 0; i < n; ++i) {
            const auto [lo, hi] = box.bounds[i];
            y[i] = lo + (hi - lo) * unit(engine);
        }

    out.labels.reserve(count);
    if (decoder == DecoderKind::linear) {
        const LinearDecoder linear(k);
        for (const auto& y : out.points) out.labels.push_back(linear(y));
    } else {
        const MapDecoder map(k);
        for (std::size_t i = 0; i < count; ++i)
            out.labels.push_back(map(out.points[i], map_samples, splitmix64(seed + i + 1), opts));
    }
    return out;
}

EllipsoidData ellipsoid_projection_data(const LinearRegimeParams& p, std::size_t count,
                                        std::uint64_t seed) {
    if (p.n() != 3) {
        throw ParameterError("ellipsoid figure data is defined for n = 3, got n = " +
                             std::to_string(p.n()));
    }
    const std::size_t n = 3;
    const SymMatrix m = block_matrix(p);
    const SymMatrix root = sym_sqrt(m);
    const SymMatrix b = projection_matrix(construct_covariance(p), p.basis());

    EllipsoidData out;
    out.radius_bound = std::sqrt(b(0, 0));
    out.surface.reserve(count);
    out.projection.reserve(count);
    NormalSource normal(make_stream(seed, 0));
    Vector s(n);
    for (std::size_t k = 0; k < count; ++k) {
        double len2 = 0.0;
        do {
            normal.fill(s);
            len2 = std::inner_product(s.begin(), s.end(), s.begin(), 0.0);
        } while (len2 == 0.0);
        const double inv = 1.0 / std::sqrt(len2);
        for (double& v : s) v *= inv;
        Vector x = root.apply(s);
        const double mean = (x[0] + x[1] + x[2]) / 3.0;
        Vector proj{x[0] - mean, x[1] - mean, x[2] - mean};
        out.surface.push_back(std::move(x));
        out.projection.push_back(std::move(proj));
    }
    return out;
}

} // namespace permlin
