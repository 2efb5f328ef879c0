#pragma once

#include "permlin/linalg.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace permlin {

/// Ordering (pi_1, ..., pi_n) of 1-based indices: x lies in the hypothesis cone
/// of pi when x_{pi_1} <= x_{pi_2} <= ... <= x_{pi_n}.
class Permutation {
public:
    /// Throws ParameterError unless `order` is a bijection on [1:n].
    explicit Permutation(std::vector<std::size_t> order);

    static Permutation identity(std::size_t n);
    /// Permutation with rank `rank` in lexicographic order of all n! orderings.
    static Permutation from_lex_rank(std::size_t n, std::uint64_t rank);
    /// Parses "2,3,1".
    static Permutation parse(std::string_view text);

    std::size_t size() const noexcept { return order_.size(); }
    std::span<const std::size_t> order() const noexcept { return order_; }
    std::size_t operator[](std::size_t i) const { return order_[i]; }

    /// Closed cone membership; throws ParameterError on length mismatch.
    bool contains(std::span<const double> x) const;
    /// tau_i = pi_{n-i+1}; the cone of the reverse is the negated cone.
    Permutation reversed() const;
    std::uint64_t lex_rank() const;
    std::string str() const;

    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> order_;
};

/// Stable ascending argsort (ties by ascending original index).
/// Throws DomainError on non-finite entries.
Permutation sort_permutation(std::span<const double> x);

bool contains(const Permutation& p, std::span<const double> x);

std::uint64_t factorial(std::size_t n);

/// Lexicographic rank of the stable argsort of x without materializing a Permutation.
/// `scratch` must hold x.size() entries. x must be finite.
std::uint64_t sorted_order_rank(std::span<const double> x, std::span<std::size_t> scratch);

struct MonteCarloOptions {
    std::size_t workers = 1;
    /// n! enumeration is refused above this n unless raised explicitly.
    std::size_t max_factorial_n = 8;
    /// Common random numbers: use -Z in place of each draw Z.
    bool negate_noise = false;
};

/// Throws RefusalError when n exceeds the guard.
void enforce_factorial_guard(std::size_t n, std::size_t max_factorial_n);

/// Empirical Pr[X in H_pi | Y = y] over all n! permutations, indexed by lex rank.
class PosteriorTable {
public:
    PosteriorTable(std::size_t n, std::vector<std::uint64_t> counts, std::uint64_t samples);

    std::size_t n() const noexcept { return n_; }
    std::uint64_t samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return counts_.size(); }

    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    double probability(std::uint64_t lex_rank) const;
    double probability(const Permutation& p) const { return probability(p.lex_rank()); }
    std::vector<std::pair<Permutation, double>> entries() const;

    /// Most frequent permutation; ties go to the lexicographically smallest.
    Permutation argmax() const;

private:
    std::size_t n_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t samples_;
};

/// sort((I + K)^-1 y). Precomputes the linear map for repeated decoding.
class LinearDecoder {
public:
    explicit LinearDecoder(const CovarianceMatrix& k);

    std::size_t n() const noexcept { return shrink_.n(); }
    /// Posterior mean (I + K)^-1 y.
    Vector estimate(std::span<const double> y) const;
    Permutation operator()(std::span<const double> y) const;

private:
    SymMatrix shrink_;
};

Permutation linear_decode(const CovarianceMatrix& k, std::span<const double> y);

/// Monte Carlo MAP decoder: draws (I+K)^-1 y + (I+K^-1)^{-1/2} Z and classifies by sorting.
class MapDecoder {
public:
    explicit MapDecoder(const CovarianceMatrix& k);

    std::size_t n() const noexcept { return shrink_.n(); }
    PosteriorTable posterior(std::span<const double> y, std::uint64_t samples,
                             std::uint64_t seed, const MonteCarloOptions& opts = {}) const;
    Permutation operator()(std::span<const double> y, std::uint64_t samples, std::uint64_t seed,
                           const MonteCarloOptions& opts = {}) const {
        return posterior(y, samples, seed, opts).argmax();
    }

private:
    SymMatrix shrink_;     // (I + K)^-1
    SymMatrix noise_root_; // (I + K^-1)^{-1/2}
};

PosteriorTable posterior_table(const CovarianceMatrix& k, std::span<const double> y,
                               std::uint64_t samples, std::uint64_t seed,
                               const MonteCarloOptions& opts = {});

Permutation map_decode(const CovarianceMatrix& k, std::span<const double> y,
                       std::uint64_t samples, std::uint64_t seed,
                       const MonteCarloOptions& opts = {});

} // namespace permlin
