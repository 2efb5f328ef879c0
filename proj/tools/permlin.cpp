#include "permlin/decoder.hpp"
#include "permlin/error.hpp"
#include "permlin/estimators.hpp"
#include "permlin/io.hpp"
#include "permlin/regime.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using permlin::io::json;

constexpr int kExitOk = 0;
constexpr int kExitNotLinear = 1;
constexpr int kExitError = 2;

struct Globals {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    double tol = 1e-9;
    std::size_t max_factorial_n = 8;
    std::string command_line;

    permlin::MonteCarloOptions options() const {
        permlin::MonteCarloOptions o;
        o.workers = workers;
        o.max_factorial_n = max_factorial_n;
        return o;
    }
};

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json metadata(const Globals& g) {
    json m;
    m["tool"] = "permlin";
    m["version"] = PERMLIN_VERSION;
    m["seed"] = g.seed;
    m["workers"] = g.workers;
    m["command_line"] = g.command_line;
    m["timestamp"] = utc_timestamp();
    return m;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Writes to `out` when given, stdout otherwise.
void emit(const std::string& out, const std::string& payload) {
    if (out.empty() || out == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw permlin::ParameterError("cannot write " + out);
    f << payload;
}

std::string csv_header(const json& meta) { return "# " + meta.dump() + "\n"; }

// "lo,hi" for every axis or "lo1,hi1;lo2,hi2;..." per axis.
permlin::Box parse_box(const std::string& text, std::size_t n) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ';');) parts.push_back(item);
    permlin::Box box;
    for (const auto& part : parts) {
        const permlin::Vector v = permlin::io::parse_vector(part);
        if (v.size() != 2 || !(v[0] < v[1])) {
            throw permlin::ParameterError("box axis \"" + part + "\" must be lo,hi with lo < hi");
        }
        box.bounds.emplace_back(v[0], v[1]);
    }
    if (box.dim() == 1 && n > 1) return permlin::Box::cube(n, box.bounds[0].first, box.bounds[0].second);
    if (box.dim() != n) {
        throw permlin::ParameterError("box has " + std::to_string(box.dim()) + " axes, matrix is " +
                                      std::to_string(n) + "x" + std::to_string(n));
    }
    return box;
}

json box_to_json(const permlin::Box& box) {
    json b = json::array();
    for (const auto& [lo, hi] : box.bounds) b.push_back({lo, hi});
    return b;
}

} // namespace

int main(int argc, char** argv) {
    Globals g;
    for (int i = 0; i < argc; ++i) {
        if (i) g.command_line += ' ';
        g.command_line += argv[i];
    }

    CLI::App app{"Linear-regime permutation recovery under Gaussian noise"};
    app.set_version_flag("--version", std::string(PERMLIN_VERSION));
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--workers", g.workers, "Parallel workers for Monte Carlo loops")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol", g.tol, "Relative tolerance of the linear-regime test")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--max-factorial-n", g.max_factorial_n, "Largest n for n! enumeration");

    std::string params_file, matrix_file, out, y_text, decoder = "linear", method = "sim",
                                                     box_text = "-3,3";
    std::uint64_t samples = 200000, trials = 100000, count = 1000;

    auto* construct = app.add_subcommand("construct", "Covariance from (gamma, a, v, Q)");
    construct->add_option("params", params_file, "Params JSON")->required();
    construct->add_option("--out", out, "Output path (.csv for CSV, JSON otherwise)");

    auto* check = app.add_subcommand("check", "Test a covariance for the linear regime");
    check->add_option("matrix", matrix_file, "Matrix JSON or CSV")->required();

    auto* decode = app.add_subcommand("decode", "Decode one observation");
    decode->add_option("matrix", matrix_file, "Matrix JSON or CSV")->required();
    decode->add_option("--y", y_text, "Observation as 3,1,2 or [3,1,2]")->required();
    decode->add_option("--decoder", decoder)->check(CLI::IsMember({"linear", "map"}));
    decode->add_option("--samples", samples, "MAP posterior samples")->check(CLI::PositiveNumber);

    auto* perr = app.add_subcommand("perr", "Estimate the error probability");
    perr->add_option("matrix", matrix_file, "Matrix JSON or CSV")->required();
    perr->add_option("--method", method)->check(CLI::IsMember({"sim", "geo"}));
    perr->add_option("--trials", trials, "Trials (sim) or ball samples (geo)")->check(CLI::PositiveNumber);
    perr->add_option("--decoder", decoder)->check(CLI::IsMember({"linear", "map"}));
    perr->add_option("--samples", samples, "MAP posterior samples per trial")->check(CLI::PositiveNumber);

    auto* regions = app.add_subcommand("regions", "Label uniform box samples by decoder");
    regions->add_option("matrix", matrix_file, "Matrix JSON or CSV")->required();
    regions->add_option("--box", box_text, "lo,hi or lo1,hi1;lo2,hi2;...");
    regions->add_option("--count", count, "Number of points");
    regions->add_option("--decoder", decoder)->check(CLI::IsMember({"linear", "map"}));
    regions->add_option("--samples", samples, "MAP posterior samples per point")->check(CLI::PositiveNumber);
    regions->add_option("--out", out, "CSV output path");

    auto* ellipsoid = app.add_subcommand("ellipsoid", "Ellipsoid surface and its zero-sum projection (n = 3)");
    ellipsoid->add_option("params", params_file, "Params JSON")->required();
    ellipsoid->add_option("--count", count, "Number of surface points");
    ellipsoid->add_option("--out", out, "CSV output path");

    for (auto* sub : {construct, check, decode, perr, regions, ellipsoid}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (construct->parsed()) {
            const permlin::LinearRegimeParams p = permlin::io::read_params_file(params_file);
            const permlin::CovarianceMatrix k = permlin::construct_covariance(p);
            const json meta = metadata(g);
            if (has_suffix(out, ".csv")) {
                emit(out, csv_header(meta) + permlin::io::matrix_to_csv(k.sym()));
            } else {
                json doc = permlin::io::matrix_to_json(k.sym());
                doc["spectrum"] = permlin::io::spectrum_to_json(permlin::sym_eigen(k.sym()));
                doc["params"] = permlin::io::params_to_json(p);
                doc["metadata"] = meta;
                emit(out, doc.dump(2) + "\n");
            }
            return kExitOk;
        }

        if (check->parsed()) {
            const permlin::CovarianceMatrix k(permlin::io::read_matrix_file(matrix_file));
            const permlin::RegimeCheckResult r = permlin::check_linear_regime(k, g.tol);
            json doc = permlin::io::regime_to_json(r);
            doc["tolerance"] = g.tol;
            doc["metadata"] = metadata(g);
            std::cout << doc.dump(2) << "\n";
            return r.is_linear ? kExitOk : kExitNotLinear;
        }

        if (decode->parsed()) {
            const permlin::CovarianceMatrix k(permlin::io::read_matrix_file(matrix_file));
            const permlin::Vector y = permlin::io::parse_vector(y_text);
            const permlin::Permutation pi =
                permlin::parse_decoder_kind(decoder) == permlin::DecoderKind::linear
                    ? permlin::linear_decode(k, y)
                    : permlin::map_decode(k, y, samples, g.seed, g.options());
            std::cout << pi.str() << "\n";
            return kExitOk;
        }

        if (perr->parsed()) {
            const permlin::CovarianceMatrix k(permlin::io::read_matrix_file(matrix_file));
            const permlin::DecoderKind kind = permlin::parse_decoder_kind(decoder);
            const permlin::Estimate e =
                method == "sim" ? permlin::perr_simulation(k, kind, trials, g.seed, samples, g.options())
                                : permlin::perr_geometric(k, trials, g.seed, g.options(), g.tol);
            json doc = permlin::io::estimate_to_json(e);
            json params;
            params["n"] = k.n();
            params["estimator"] = method;
            if (method == "sim") {
                params["decoder"] = decoder;
                if (kind == permlin::DecoderKind::map) params["map_samples"] = samples;
            } else {
                params["tolerance"] = g.tol;
            }
            params["matrix"] = k.sym().to_rows();
            doc["params"] = params;
            doc["metadata"] = metadata(g);
            std::cout << doc.dump(2) << "\n";
            return kExitOk;
        }

        if (regions->parsed()) {
            const permlin::CovarianceMatrix k(permlin::io::read_matrix_file(matrix_file));
            const permlin::Box box = parse_box(box_text, k.n());
            const permlin::DecoderKind kind = permlin::parse_decoder_kind(decoder);
            const permlin::RegionSample s =
                permlin::region_sample(k, box, count, kind, samples, g.seed, g.options());
            json meta = metadata(g);
            meta["sampling"] = "uniform in box";
            meta["box"] = box_to_json(box);
            meta["decoder"] = decoder;
            meta["samples_per_point"] = s.samples_per_point;
            std::ostringstream os;
            os << csv_header(meta);
            permlin::io::write_region_csv(os, s);
            emit(out, os.str());
            return kExitOk;
        }

        if (ellipsoid->parsed()) {
            const permlin::LinearRegimeParams p = permlin::io::read_params_file(params_file);
            const permlin::EllipsoidData d = permlin::ellipsoid_projection_data(p, count, g.seed);
            json meta = metadata(g);
            meta["radius_bound"] = d.radius_bound;
            std::ostringstream os;
            os << csv_header(meta);
            permlin::io::write_ellipsoid_csv(os, d);
            emit(out, os.str());
            return kExitOk;
        }
    } catch (const permlin::Error& e) {
        std::cerr << "permlin: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "permlin: unexpected failure: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
