#pragma once

#include "permlin/decoder.hpp"
#include "permlin/linalg.hpp"
#include "permlin/regime.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace permlin {

/// Monte Carlo estimate of a probability with its binomial standard error.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string method;
};

enum class DecoderKind { linear, map };

std::string to_string(DecoderKind kind);
/// Accepts "linear" or "map".
DecoderKind parse_decoder_kind(const std::string& text);

/// Draws sym_sqrt(cov) Z for Z ~ N(0, I).
std::vector<Vector> sample_gaussian(const CovarianceMatrix& cov, std::size_t count,
                                    std::uint64_t seed);

/// Uniform in the closed unit ball: Gaussian direction, radius U^{1/dim}.
std::vector<Vector> sample_uniform_ball(std::size_t dim, std::size_t count, std::uint64_t seed);

/// Error probability by direct simulation: draw X ~ N(0, I) and N ~ N(0, K), decode
/// Y = X + N, compare with the sorting permutation of X. `map_samples` is the posterior
/// sample budget per trial for the MAP decoder.
Estimate perr_simulation(const CovarianceMatrix& k, DecoderKind decoder, std::uint64_t trials,
                         std::uint64_t seed, std::uint64_t map_samples = 200000,
                         const MonteCarloOptions& opts = {});

/// Error probability from the cone-volume formula
///     P_e = 1 - n! Pr[W in A^-1 (H x (K+I) H)],  A = [I 0; I K^{1/2}],
/// with W uniform in the 2n-dimensional unit ball and H the identity cone.
/// Refuses (RefusalError) covariances outside the linear regime.
Estimate perr_geometric(const CovarianceMatrix& k, std::uint64_t samples, std::uint64_t seed,
                        const MonteCarloOptions& opts = {}, double regime_tol = 1e-9);

/// Pr(Y0 in H_pi) for Y0 ~ N(0, (K^-1 + I)^-1), all pi.
PosteriorTable origin_uniformity(const CovarianceMatrix& k, std::uint64_t samples,
                                 std::uint64_t seed, const MonteCarloOptions& opts = {});

/// Pr(U in H_pi) for U ~ N(0, cov_u), by Gaussian sampling.
Estimate cone_probability_gaussian(const CovarianceMatrix& cov_u, const Permutation& pi,
                                   std::uint64_t samples, std::uint64_t seed);

/// Pr(U in H_pi) through volumes: |det cov_u^{-1/2}| Vol(H_pi cap cov_u^{1/2} B) / Vol(B),
/// with the intersection volume estimated from uniform samples of cov_u^{1/2} B.
Estimate cone_probability_volume(const CovarianceMatrix& cov_u, const Permutation& pi,
                                 std::uint64_t samples, std::uint64_t seed);

/// Per-axis sampling bounds.
struct Box {
    std::vector<std::pair<double, double>> bounds;

    static Box cube(std::size_t n, double lo, double hi);
    std::size_t dim() const noexcept { return bounds.size(); }
};

struct RegionSample {
    std::vector<Vector> points;
    std::vector<Permutation> labels;
    Box box;
    DecoderKind decoder = DecoderKind::linear;
    std::uint64_t samples_per_point = 0;  // MAP posterior budget; 0 for the linear decoder
};

/// `count` points uniform in `box`, each labeled by the chosen decoder. Point coordinates
/// come from stream 0 of `seed`; the MAP posterior for point i uses seed splitmix64(seed + i + 1).
RegionSample region_sample(const CovarianceMatrix& k, const Box& box, std::size_t count,
                           DecoderKind decoder, std::uint64_t map_samples, std::uint64_t seed,
                           const MonteCarloOptions& opts = {});

struct EllipsoidData {
    std::vector<Vector> surface;     // M^{1/2} s for s uniform on the unit sphere
    std::vector<Vector> projection;  // orthogonal projection onto 1^T x = 0
    double radius_bound = 0.0;       // sqrt(B_11)
};

/// Figure data for n = 3; throws ParameterError otherwise.
EllipsoidData ellipsoid_projection_data(const LinearRegimeParams& p, std::size_t count,
                                        std::uint64_t seed);

} // namespace permlin
