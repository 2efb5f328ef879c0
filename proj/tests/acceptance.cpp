// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "permlin/decoder.hpp"
#include "permlin/estimators.hpp"
#include "permlin/regime.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace permlin;
using permlin::testing::max_abs_diff;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Matrices exercised by criteria 2-4, reused by criterion 9.
std::vector<CovarianceMatrix> g_regime_matrices;

CovarianceMatrix example_cov() {
    return construct_covariance(LinearRegimeParams(0.5, 0.5, 0.2, helmert_q(3)));
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

Outcome spectrum_reproduction() {
    const CovarianceMatrix k = example_cov();
    const Vector ev = sym_eigen(k.sym()).values;  // descending
    const Vector want{7.0 / 3.0, 1.0, 3.0 / 7.0};
    double err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) err = std::max(err, std::abs(ev[i] - want[i]));
    return {err <= 1e-9, "max |lambda - expected| = " + num(err) + " (limit 1e-09)"};
}

Outcome regime_classification() {
    const CovarianceMatrix diag(SymMatrix::diagonal(Vector{1.0, 1.0, 2.0}));
    const bool diag_rejected = !check_linear_regime(diag).is_linear;
    g_regime_matrices.push_back(diag);

    Engine rng(1001);
    std::uniform_int_distribution<std::size_t> dim(2, 8);
    int accepted = 0;
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const LinearRegimeParams p = permlin::testing::random_params(dim(rng), rng, true);
        const CovarianceMatrix k = construct_covariance(p);
        g_regime_matrices.push_back(k);
        const RegimeCheckResult r = check_linear_regime(k);
        if (!r.is_linear) continue;
        ++accepted;
        worst = std::max(worst, max_abs_diff(construct_covariance(*r.params).sym(), k.sym()));
    }
    const bool ok = diag_rejected && accepted == 500 && worst <= 1e-9;
    return {ok, std::string("diag(1,1,2) ") + (diag_rejected ? "rejected" : "ACCEPTED") + ", " +
                    std::to_string(accepted) + "/500 constructed accepted, worst round trip " +
                    num(worst) + " (limit 1e-09)"};
}

Outcome n2_always_linear() {
    Engine rng(1002);
    int accepted = 0;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const CovarianceMatrix k(permlin::testing::random_pd(2, rng, 0.05));
        g_regime_matrices.push_back(k);
        if (check_linear_regime(k).is_linear) ++accepted;
        worst = std::max(worst, max_abs_diff(construct_covariance(n2_params(k)).sym(), k.sym()));
    }
    return {accepted == 1000 && worst <= 1e-10,
            std::to_string(accepted) + "/1000 accepted, worst n=2 round trip " + num(worst) +
                " (limit 1e-10)"};
}

Outcome diagonal_matrices() {
    Engine rng(1003);
    std::uniform_real_distribution<double> unif(0.1, 5.0);
    int rejected = 0, total = 0;
    for (std::size_t n : {3u, 4u, 5u}) {
        for (int t = 0; t < 200; ++t) {
            Vector d(n);
            for (double& x : d) x = unif(rng);
            const CovarianceMatrix k(SymMatrix::diagonal(d));
            g_regime_matrices.push_back(k);
            ++total;
            if (!check_linear_regime(k).is_linear) ++rejected;
        }
    }
    int iso_ok = 0, iso_total = 0;
    double worst = 0.0;
    for (std::size_t n : {3u, 4u, 5u}) {
        for (double c : {0.05, 0.5, 1.0, 2.0, 10.0}) {
            const CovarianceMatrix k(c * SymMatrix::identity(n));
            g_regime_matrices.push_back(k);
            ++iso_total;
            const RegimeCheckResult r = check_linear_regime(k);
            if (!r.is_linear) continue;
            const double err = std::abs(r.params->gamma() - c / (1.0 + c));
            worst = std::max(worst, err);
            if (err <= 1e-10) ++iso_ok;
        }
    }
    return {rejected == total && iso_ok == iso_total,
            std::to_string(rejected) + "/" + std::to_string(total) + " diagonal rejected, " +
                std::to_string(iso_ok) + "/" + std::to_string(iso_total) +
                " isotropic accepted, worst |gamma - c/(1+c)| " + num(worst) + " (limit 1e-10)"};
}

Outcome decoder_equivalence() {
    const CovarianceMatrix k = example_cov();
    const LinearDecoder lin(k);
    const MapDecoder map(k);
    const SymMatrix marginal = SymMatrix::identity(3) + k.sym();
    const auto ys = sample_gaussian(CovarianceMatrix(marginal), 500, 1005);
    int agree = 0;
    for (std::size_t i = 0; i < ys.size(); ++i)
        if (map(ys[i], 200000, splitmix64(5000 + i)) == lin(ys[i])) ++agree;
    const double rate = agree / 500.0;
    return {rate >= 0.98, std::to_string(agree) + "/500 agree (" + num(100.0 * rate) +
                              "%, limit >= 98%)"};
}

Outcome error_cross_check() {
    const double oracle = permlin::testing::orthant_error_probability(1.0);
    const Estimate s2 = perr_simulation(CovarianceMatrix(SymMatrix::identity(2)), DecoderKind::linear,
                                        1000000, 1006);
    const bool first = std::abs(s2.value - oracle) <= 3.0 * s2.std_error;

    const CovarianceMatrix k = example_cov();
    const Estimate sim = perr_simulation(k, DecoderKind::linear, 1000000, 1007);
    const Estimate geo = perr_geometric(k, 1000000, 1008);
    const double comb = std::sqrt(sim.std_error * sim.std_error + geo.std_error * geo.std_error);
    const bool second = std::abs(sim.value - geo.value) <= 3.0 * comb;
    return {first && second, "n=2: " + num(s2.value) + " vs " + num(oracle) + " (3 se = " +
                                 num(3.0 * s2.std_error) + "); n=3: sim " + num(sim.value) +
                                 " geo " + num(geo.value) + " (3 combined se = " + num(3.0 * comb) + ")"};
}

Outcome origin_uniformity_check() {
    const std::uint64_t samples = 1000000;
    const PosteriorTable lin = origin_uniformity(example_cov(), samples, 1009);
    double worst_z = 0.0;
    bool uniform = true;
    for (std::uint64_t r = 0; r < lin.size(); ++r) {
        const double p = lin.probability(r);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
        const double z = std::abs(p - 1.0 / 6.0) / se;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) uniform = false;
    }
    const PosteriorTable diag =
        origin_uniformity(CovarianceMatrix(SymMatrix::diagonal(Vector{1.0, 1.0, 2.0})), samples, 1010);
    double lo = 1.0, hi = 0.0;
    for (std::uint64_t r = 0; r < diag.size(); ++r) {
        lo = std::min(lo, diag.probability(r));
        hi = std::max(hi, diag.probability(r));
    }
    const double se = std::sqrt((1.0 / 6.0) * (5.0 / 6.0) / static_cast<double>(samples));
    const double spread_se = (hi - lo) / se;
    return {uniform && spread_se > 6.0, "linear regime worst |p - 1/6| = " + num(worst_z) +
                                            " se (limit 3); diag(1,1,2) spread = " + num(spread_se) +
                                            " se (limit > 6)"};
}

Outcome point_symmetry() {
    Engine rng(1011);
    std::normal_distribution<double> normal;
    const std::vector<CovarianceMatrix> ks{example_cov(),
                                           CovarianceMatrix(SymMatrix::diagonal(Vector{1.0, 1.0, 2.0}))};
    int checked = 0, matched = 0;
    while (checked < 10000) {
        const CovarianceMatrix& k = ks[static_cast<std::size_t>(checked) % ks.size()];
        const LinearDecoder dec(k);
        Vector y(3);
        for (double& v : y) v = 3.0 * normal(rng);
        Vector e = dec.estimate(y);
        if (e[0] == e[1] || e[1] == e[2] || e[0] == e[2]) continue;
        Vector neg(y);
        for (double& v : neg) v = -v;
        ++checked;
        if (dec(neg) == dec(y).reversed()) ++matched;
    }
    MonteCarloOptions crn;
    crn.negate_noise = true;
    int map_checked = 0, map_matched = 0;
    for (int t = 0; t < 100; ++t) {
        const MapDecoder dec(ks[static_cast<std::size_t>(t) % ks.size()]);
        Vector y(3);
        for (double& v : y) v = 2.0 * normal(rng);
        Vector neg(y);
        for (double& v : neg) v = -v;
        const std::uint64_t seed = splitmix64(20000 + t);
        ++map_checked;
        if (dec(neg, 100000, seed, crn) == dec(y, 100000, seed).reversed()) ++map_matched;
    }
    return {matched == checked && map_matched == map_checked,
            "linear " + std::to_string(matched) + "/" + std::to_string(checked) + ", map (common random numbers) " +
                std::to_string(map_matched) + "/" + std::to_string(map_checked)};
}

Outcome projection_isotropy() {
    Engine rng(1012);
    std::size_t agree = 0, invariant = 0;
    for (const auto& k : g_regime_matrices) {
        const bool verdict = check_linear_regime(k).is_linear;
        if (check_block_form(k).holds == verdict) ++agree;
        bool same = true;
        for (int rep = 0; rep < 10; ++rep)
            if (check_linear_regime(k, random_q_basis(k.n(), rng)).is_linear != verdict) same = false;
        if (same) ++invariant;
    }
    const std::size_t total = g_regime_matrices.size();
    return {total > 0 && agree == total && invariant == total,
            std::to_string(agree) + "/" + std::to_string(total) + " projection vs block-form agree, " +
                std::to_string(invariant) + "/" + std::to_string(total) + " invariant over 10 random Q"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // <= 0: no runtime limit
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "spectrum reproduction", 1.0, spectrum_reproduction},
        {2, "regime classification", 30.0, regime_classification},
        {3, "every 2x2 covariance is linear", 5.0, n2_always_linear},
        {4, "diagonal versus isotropic", 10.0, diagonal_matrices},
        {5, "MAP and linear decoders agree", 300.0, decoder_equivalence},
        {6, "error probability cross-check", 180.0, error_cross_check},
        {7, "origin uniformity", 120.0, origin_uniformity_check},
        {8, "point symmetry", 120.0, point_symmetry},
        {9, "projection isotropy versus block form", 0.0, projection_isotropy},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_seconds <= 0.0 || secs < c.limit_seconds;
        const bool pass = out.pass && in_time;
        if (!pass) ++failures;
        std::string timing = num(secs) + " s";
        if (c.limit_seconds > 0.0) timing += " of " + num(c.limit_seconds) + " s";
        std::printf("criterion %d %s: %s | %s | %s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                    out.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
