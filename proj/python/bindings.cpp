#include "permlin/decoder.hpp"
#include "permlin/error.hpp"
#include "permlin/estimators.hpp"
#include "permlin/regime.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace permlin;

namespace {

using Rows = std::vector<Vector>;

CovarianceMatrix covariance(const Rows& rows) { return CovarianceMatrix(SymMatrix::from_rows(rows)); }

OrthonormalBasis basis(std::size_t n, const std::optional<Rows>& q) {
    return q ? OrthonormalBasis(Matrix::from_rows(*q)) : helmert_q(n);
}

LinearRegimeParams params(std::size_t n, double gamma, double a, double v, const std::optional<Rows>& q) {
    return LinearRegimeParams(gamma, a, v, basis(n, q));
}

py::dict params_dict(const LinearRegimeParams& p) {
    py::dict d;
    d["n"] = p.n();
    d["gamma"] = p.gamma();
    d["a"] = p.a();
    d["v"] = p.v();
    d["q"] = p.basis().matrix().to_rows();
    return d;
}

py::dict estimate_dict(const Estimate& e) {
    py::dict d;
    d["value"] = e.value;
    d["stderr"] = e.std_error;
    d["trials"] = e.trials;
    d["seed"] = e.seed;
    d["method"] = e.method;
    return d;
}

py::tuple spectrum_tuple(const Spectrum& s) {
    return py::make_tuple(s.values, s.vectors.to_rows());
}

std::vector<std::size_t> order(const Permutation& p) { return {p.order().begin(), p.order().end()}; }

MonteCarloOptions options(std::size_t workers, std::size_t max_factorial_n) {
    MonteCarloOptions o;
    o.workers = workers;
    o.max_factorial_n = max_factorial_n;
    return o;
}

py::dict table_dict(const PosteriorTable& t) {
    py::dict d;
    for (const auto& [perm, prob] : t.entries()) d[py::str(perm.str())] = prob;
    return d;
}

} // namespace

PYBIND11_MODULE(_permlin, m) {
    m.doc() = "Linear-regime permutation recovery under Gaussian noise";
    m.attr("__version__") = PERMLIN_VERSION;

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    static py::exception<DomainError> domain(m, "DomainError", error.ptr());
    static py::exception<ParameterError> parameter(m, "ParameterError", error.ptr());
    static py::exception<NumericalError> numerical(m, "NumericalError", error.ptr());
    static py::exception<RefusalError> refusal(m, "RefusalError", error.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            py::set_error(domain, e.what());
        } catch (const ParameterError& e) {
            py::set_error(parameter, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const RefusalError& e) {
            py::set_error(refusal, e.what());
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    m.def("sym_eigen", [](const Rows& a) { return spectrum_tuple(sym_eigen(SymMatrix::from_rows(a))); },
          py::arg("matrix"), "(eigenvalues descending, eigenvector matrix with eigenvectors as columns)");
    m.def("is_positive_definite", [](const Rows& a) { return is_positive_definite(SymMatrix::from_rows(a)); },
          py::arg("matrix"));
    m.def("helmert_q", [](std::size_t n) { return helmert_q(n).matrix().to_rows(); }, py::arg("n"));

    m.def("conditional_covariance", [](const Rows& k) { return conditional_covariance(covariance(k)).to_rows(); },
          py::arg("k"));
    m.def("construct_covariance",
          [](double gamma, double a, double v, std::size_t n, const std::optional<Rows>& q) {
              return construct_covariance(params(n, gamma, a, v, q)).sym().to_rows();
          },
          py::arg("gamma"), py::arg("a"), py::arg("v"), py::arg("n"), py::arg("q") = py::none());
    m.def("spectrum_closed_form",
          [](double gamma, double a, double v, std::size_t n, const std::optional<Rows>& q) {
              return spectrum_tuple(spectrum_closed_form(params(n, gamma, a, v, q)));
          },
          py::arg("gamma"), py::arg("a"), py::arg("v"), py::arg("n"), py::arg("q") = py::none());
    m.def("projection_matrix",
          [](const Rows& k, const std::optional<Rows>& q) {
              const CovarianceMatrix c = covariance(k);
              return projection_matrix(c, basis(c.n(), q)).to_rows();
          },
          py::arg("k"), py::arg("q") = py::none());
    m.def("check_linear_regime",
          [](const Rows& k, double tol) {
              const RegimeCheckResult r = check_linear_regime(covariance(k), tol);
              py::dict d;
              d["is_linear"] = r.is_linear;
              d["residual"] = r.residual;
              d["params"] = r.params ? py::object(params_dict(*r.params)) : py::none();
              return d;
          },
          py::arg("k"), py::arg("tol") = 1e-9);
    m.def("n2_params", [](const Rows& k) { return params_dict(n2_params(covariance(k))); }, py::arg("k"));

    m.def("sort_permutation", [](const Vector& x) { return order(sort_permutation(x)); }, py::arg("x"));
    m.def("linear_decode", [](const Rows& k, const Vector& y) { return order(linear_decode(covariance(k), y)); },
          py::arg("k"), py::arg("y"));
    m.def("map_decode",
          [](const Rows& k, const Vector& y, std::uint64_t samples, std::uint64_t seed, std::size_t workers,
             std::size_t max_factorial_n) {
              return order(map_decode(covariance(k), y, samples, seed, options(workers, max_factorial_n)));
          },
          py::arg("k"), py::arg("y"), py::arg("samples") = 200000, py::arg("seed") = 0, py::arg("workers") = 1,
          py::arg("max_factorial_n") = 8);
    m.def("posterior_table",
          [](const Rows& k, const Vector& y, std::uint64_t samples, std::uint64_t seed, std::size_t workers,
             std::size_t max_factorial_n) {
              return table_dict(posterior_table(covariance(k), y, samples, seed, options(workers, max_factorial_n)));
          },
          py::arg("k"), py::arg("y"), py::arg("samples") = 200000, py::arg("seed") = 0, py::arg("workers") = 1,
          py::arg("max_factorial_n") = 8, "Maps \"2,3,1\"-style permutation strings to probabilities.");

    m.def("perr_simulation",
          [](const Rows& k, const std::string& decoder, std::uint64_t trials, std::uint64_t seed,
             std::uint64_t map_samples, std::size_t workers, std::size_t max_factorial_n) {
              const CovarianceMatrix c = covariance(k);
              const DecoderKind kind = parse_decoder_kind(decoder);
              Estimate e;
              {
                  py::gil_scoped_release release;
                  e = perr_simulation(c, kind, trials, seed, map_samples, options(workers, max_factorial_n));
              }
              return estimate_dict(e);
          },
          py::arg("k"), py::arg("decoder") = "linear", py::arg("trials") = 100000, py::arg("seed") = 0,
          py::arg("map_samples") = 200000, py::arg("workers") = 1, py::arg("max_factorial_n") = 8);
    m.def("perr_geometric",
          [](const Rows& k, std::uint64_t samples, std::uint64_t seed, std::size_t workers, double tol) {
              const CovarianceMatrix c = covariance(k);
              Estimate e;
              {
                  py::gil_scoped_release release;
                  e = perr_geometric(c, samples, seed, options(workers, 8), tol);
              }
              return estimate_dict(e);
          },
          py::arg("k"), py::arg("samples") = 100000, py::arg("seed") = 0, py::arg("workers") = 1,
          py::arg("tol") = 1e-9);
    m.def("origin_uniformity",
          [](const Rows& k, std::uint64_t samples, std::uint64_t seed, std::size_t workers,
             std::size_t max_factorial_n) {
              return table_dict(origin_uniformity(covariance(k), samples, seed, options(workers, max_factorial_n)));
          },
          py::arg("k"), py::arg("samples") = 1000000, py::arg("seed") = 0, py::arg("workers") = 1,
          py::arg("max_factorial_n") = 8);
    m.def("region_sample",
          [](const Rows& k, double lo, double hi, std::size_t count, const std::string& decoder,
             std::uint64_t map_samples, std::uint64_t seed) {
              const CovarianceMatrix c = covariance(k);
              const RegionSample s =
                  region_sample(c, Box::cube(c.n(), lo, hi), count, parse_decoder_kind(decoder), map_samples, seed);
              std::vector<std::string> labels;
              labels.reserve(s.labels.size());
              for (const auto& p : s.labels) labels.push_back(p.str());
              return py::make_tuple(s.points, labels);
          },
          py::arg("k"), py::arg("lo") = -3.0, py::arg("hi") = 3.0, py::arg("count") = 1000,
          py::arg("decoder") = "linear", py::arg("map_samples") = 200000, py::arg("seed") = 0,
          "(points, labels) for points uniform in the cube [lo, hi]^n.");
}
