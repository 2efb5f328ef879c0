#include "permlin/decoder.hpp"

#include "permlin/error.hpp"
#include "permlin/random.hpp"
#include "permlin/regime.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace permlin {

namespace {

// Enumerating 13! counters would need tens of gigabytes.
constexpr std::size_t kEnumerationLimit = 12;

void stable_argsort(std::span<const double> x, std::span<std::size_t> idx) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i;
        while (j > 0 && x[idx[j - 1]] > x[i]) {
            idx[j] = idx[j - 1];
            --j;
        }
        idx[j] = i;
    }
}

// Lexicographic rank of a 0-based ordering.
std::uint64_t rank_of(std::span<const std::size_t> order) {
    const std::size_t n = order.size();
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t smaller = 0;
        for (std::size_t j = i + 1; j < n; ++j)
            if (order[j] < order[i]) ++smaller;
        rank = rank * (n - i) + smaller;
    }
    return rank;
}

} // namespace

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<std::size_t> order) : order_(std::move(order)) {
    const std::size_t n = order_.size();
    if (n == 0) throw ParameterError("permutation must have at least one index");
    std::vector<bool> seen(n + 1, false);
    for (std::size_t v : order_) {
        if (v < 1 || v > n || seen[v]) {
            throw ParameterError("permutation is not a bijection on [1:" + std::to_string(n) + "]");
        }
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> o(n);
    std::iota(o.begin(), o.end(), std::size_t{1});
    return Permutation(std::move(o));
}

Permutation Permutation::from_lex_rank(std::size_t n, std::uint64_t rank) {
    if (n > 20 || rank >= factorial(n)) throw ParameterError("permutation rank out of range");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{1});
    std::vector<std::size_t> o;
    o.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t block = factorial(n - 1 - i);
        const auto pick = static_cast<std::size_t>(rank / block);
        rank %= block;
        o.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return Permutation(std::move(o));
}

Permutation Permutation::parse(std::string_view text) {
    std::vector<std::size_t> o;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string_view tok = text.substr(pos, comma - pos);
        while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
        while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
            throw ParameterError("cannot parse permutation \"" + std::string(text) + "\"");
        }
        o.push_back(v);
        pos = comma + 1;
    }
    return Permutation(std::move(o));
}

bool Permutation::contains(std::span<const double> x) const {
    if (x.size() != order_.size()) {
        throw ParameterError("vector length " + std::to_string(x.size()) +
                             " does not match permutation length " + std::to_string(order_.size()));
    }
    for (std::size_t i = 0; i + 1 < order_.size(); ++i)
        if (!(x[order_[i] - 1] <= x[order_[i + 1] - 1])) return false;
    return true;
}

Permutation Permutation::reversed() const {
    return Permutation(std::vector<std::size_t>(order_.rbegin(), order_.rend()));
}

std::uint64_t Permutation::lex_rank() const {
    std::vector<std::size_t> zero_based(order_.size());
    std::transform(order_.begin(), order_.end(), zero_based.begin(),
                   [](std::size_t v) { return v - 1; });
    return rank_of(zero_based);
}

std::string Permutation::str() const {
    std::string out;
    for (std::size_t i = 0; i < order_.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(order_[i]);
    }
    return out;
}

Permutation sort_permutation(std::span<const double> x) {
    if (x.empty()) throw ParameterError("cannot sort an empty vector");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("cannot sort a vector with non-finite entries");
    std::vector<std::size_t> idx(x.size());
    stable_argsort(x, idx);
    for (auto& i : idx) ++i;
    return Permutation(std::move(idx));
}

bool contains(const Permutation& p, std::span<const double> x) { return p.contains(x); }

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

std::uint64_t sorted_order_rank(std::span<const double> x, std::span<std::size_t> scratch) {
    stable_argsort(x, scratch.first(x.size()));
    return rank_of(scratch.first(x.size()));
}

void enforce_factorial_guard(std::size_t n, std::size_t max_factorial_n) {
    if (n > max_factorial_n) {
        throw RefusalError("n = " + std::to_string(n) + " exceeds the factorial guard (n! enumeration "
                           "allowed up to n = " + std::to_string(max_factorial_n) +
                           "); raise it with --max-factorial-n");
    }
    if (n > kEnumerationLimit) {
        throw ParameterError("n = " + std::to_string(n) + " is too large to enumerate all n! "
                             "permutations (limit " + std::to_string(kEnumerationLimit) + ")");
    }
}

// ---------------------------------------------------------------- PosteriorTable

PosteriorTable::PosteriorTable(std::size_t n, std::vector<std::uint64_t> counts,
                               std::uint64_t samples)
    : n_(n), counts_(std::move(counts)), samples_(samples) {
    if (counts_.size() != factorial(n)) throw ParameterError("posterior table must have n! entries");
    if (samples_ == 0) throw ParameterError("posterior table needs at least one sample");
}

double PosteriorTable::probability(std::uint64_t lex_rank) const {
    return static_cast<double>(counts_.at(lex_rank)) / static_cast<double>(samples_);
}

std::vector<std::pair<Permutation, double>> PosteriorTable::entries() const {
    std::vector<std::pair<Permutation, double>> out;
    out.reserve(counts_.size());
    for (std::uint64_t r = 0; r < counts_.size(); ++r)
        out.emplace_back(Permutation::from_lex_rank(n_, r), probability(r));
    return out;
}

Permutation PosteriorTable::argmax() const {
    // max_element returns the first maximum, i.e. the smallest lex rank.
    const auto it = std::max_element(counts_.begin(), counts_.end());
    return Permutation::from_lex_rank(n_, static_cast<std::uint64_t>(it - counts_.begin()));
}

// ---------------------------------------------------------------- decoders

LinearDecoder::LinearDecoder(const CovarianceMatrix& k)
    : shrink_(sym_inverse(SymMatrix::identity(k.n()) + k.sym())) {}

Vector LinearDecoder::estimate(std::span<const double> y) const {
    if (y.size() != n()) {
        throw ParameterError("observation has length " + std::to_string(y.size()) +
                             ", covariance is " + std::to_string(n()) + "x" + std::to_string(n()));
    }
    return shrink_.apply(y);
}

Permutation LinearDecoder::operator()(std::span<const double> y) const {
    return sort_permutation(estimate(y));
}

Permutation linear_decode(const CovarianceMatrix& k, std::span<const double> y) {
    return LinearDecoder(k)(y);
}

MapDecoder::MapDecoder(const CovarianceMatrix& k)
    : shrink_(sym_inverse(SymMatrix::identity(k.n()) + k.sym())),
      noise_root_(sym_sqrt(conditional_covariance(k))) {}

PosteriorTable MapDecoder::posterior(std::span<const double> y, std::uint64_t samples,
                                     std::uint64_t seed, const MonteCarloOptions& opts) const {
    const std::size_t n = this->n();
    enforce_factorial_guard(n, opts.max_factorial_n);
    if (samples == 0) throw ParameterError("posterior estimation needs at least one sample");
    if (y.size() != n) {
        throw ParameterError("observation has length " + std::to_string(y.size()) +
                             ", covariance is " + std::to_string(n) + "x" + std::to_string(n));
    }
    for (double v : y)
        if (!std::isfinite(v)) throw DomainError("observation has non-finite entries");

    const Vector center = shrink_.apply(y);
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    const double sign = opts.negate_noise ? -1.0 : 1.0;
    std::vector<std::vector<std::uint64_t>> partial(workers,
                                                    std::vector<std::uint64_t>(factorial(n), 0));

    run_workers(workers, [&](std::size_t w) {
        NormalSource normal(make_stream(seed, w));
        const Chunk chunk = chunk_for(samples, workers, w);
        Vector z(n), noise(n), point(n);
        std::vector<std::size_t> scratch(n);
        auto& counts = partial[w];
        for (std::uint64_t s = chunk.begin; s < chunk.end; ++s) {
            normal.fill(z);
            noise_root_.matrix().apply_into(z, noise);
            for (std::size_t i = 0; i < n; ++i) point[i] = center[i] + sign * noise[i];
            ++counts[sorted_order_rank(point, scratch)];
        }
    });

    std::vector<std::uint64_t> total(factorial(n), 0);
    for (const auto& c : partial)
        for (std::size_t r = 0; r < c.size(); ++r) total[r] += c[r];
    return PosteriorTable(n, std::move(total), samples);
}

PosteriorTable posterior_table(const CovarianceMatrix& k, std::span<const double> y,
                               std::uint64_t samples, std::uint64_t seed,
                               const MonteCarloOptions& opts) {
    enforce_factorial_guard(k.n(), opts.max_factorial_n);
    return MapDecoder(k).posterior(y, samples, seed, opts);
}

Permutation map_decode(const CovarianceMatrix& k, std::span<const double> y,
                       std::uint64_t samples, std::uint64_t seed, const MonteCarloOptions& opts) {
    return posterior_table(k, y, samples, seed, opts).argmax();
}

} // namespace permlin
