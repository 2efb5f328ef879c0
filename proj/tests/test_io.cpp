#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "permlin/error.hpp"
#include "permlin/io.hpp"

#include <sstream>

using namespace permlin;
namespace io = permlin::io;

TEST_CASE("matrix JSON") {
    const SymMatrix m = io::parse_matrix(R"({"n": 2, "entries": [[2, 1], [1, 2]], "note": "x"})");
    CHECK(m.n() == 2);
    CHECK(m(0, 1) == 1.0);
    CHECK_THROWS_AS(io::parse_matrix(R"({"n": 3, "entries": [[2, 1], [1, 2]]})"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix(R"({"entries": [[2, 1, 0], [1, 2, 0]]})"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix(R"({"entries": [[2, 1], [0, 2]]})"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix(R"({"entries": [[2, "a"], [1, 2]]})"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix(R"({"n": 2)"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix(R"({"n": 2})"), ParameterError);

    const auto doc = io::matrix_to_json(m);
    CHECK(doc["n"] == 2);
    CHECK(io::parse_matrix_json(doc).to_rows() == m.to_rows());
}

TEST_CASE("matrix CSV") {
    const SymMatrix m = io::parse_matrix("# comment\n1, 0.5,0\n0.5,2,0\n\n0,0,3\n");
    CHECK(m.n() == 3);
    CHECK(m(1, 0) == 0.5);
    CHECK(m(2, 2) == 3.0);
    CHECK_THROWS_AS(io::parse_matrix("1,2\n3,4,5\n"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix("1,2\n3,4\n"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix("1,x\nx,1\n"), ParameterError);
    CHECK_THROWS_AS(io::parse_matrix(""), ParameterError);
    CHECK(io::parse_matrix(io::matrix_to_csv(m)).to_rows() == m.to_rows());
}

TEST_CASE("params JSON") {
    const LinearRegimeParams p =
        io::parse_params_json(io::json::parse(R"({"n": 3, "gamma": 0.5, "a": 0.5, "v": 0.2})"));
    CHECK(p.n() == 3);
    CHECK(p.basis().matrix().to_rows() == helmert_q(3).matrix().to_rows());
    const LinearRegimeParams back = io::parse_params_json(io::params_to_json(p));
    CHECK(back.basis().matrix().to_rows() == p.basis().matrix().to_rows());
    CHECK(back.v() == 0.2);

    CHECK_THROWS_AS(io::parse_params_json(io::json::parse(R"({"n": 3, "gamma": 0.5, "a": 0.5, "v": 0.6})")),
                    ParameterError);
    CHECK_THROWS_AS(io::parse_params_json(io::json::parse(R"({"n": 3, "gamma": 0.5, "a": 0.5})")),
                    ParameterError);
    CHECK_THROWS_AS(io::parse_params_json(io::json::parse(R"({"n": 1, "gamma": 0.5, "a": 0.5, "v": 0})")),
                    ParameterError);
    CHECK_THROWS_AS(
        io::parse_params_json(io::json::parse(R"({"n": 2, "gamma": 0.5, "a": 0.5, "v": 0, "q": "other"})")),
        ParameterError);
    CHECK_THROWS_AS(io::parse_params_json(io::json::parse(
                        R"({"n": 2, "gamma": 0.5, "a": 0.5, "v": 0, "q": [[1, 0], [0, 1]]})")),
                    ParameterError);
}

TEST_CASE("vectors") {
    CHECK(io::parse_vector("[3, 1, 2]") == Vector{3.0, 1.0, 2.0});
    CHECK(io::parse_vector("3,1,2") == Vector{3.0, 1.0, 2.0});
    CHECK(io::parse_vector(" -1.5e0 , +2 \n") == Vector{-1.5, 2.0});
    CHECK_THROWS_AS(io::parse_vector("1,2\n3,4"), ParameterError);
    CHECK_THROWS_AS(io::parse_vector("[1, \"a\"]"), ParameterError);
    CHECK_THROWS_AS(io::parse_vector(""), ParameterError);
    CHECK_THROWS_AS(io::parse_vector("1,,2"), ParameterError);
}

TEST_CASE("result serialization") {
    const Estimate e{0.25, 0.001, 1000, 7, "geometric"};
    const auto doc = io::estimate_to_json(e);
    CHECK(doc["value"] == 0.25);
    CHECK(doc["stderr"] == 0.001);
    CHECK(doc["trials"] == 1000);
    CHECK(doc["seed"] == 7);
    CHECK(doc["method"] == "geometric");

    const PosteriorTable t(2, {3, 1}, 4);
    const auto pt = io::posterior_to_json(t);
    CHECK(pt["entries"][0]["permutation"] == "1,2");
    CHECK(pt["entries"][1]["probability"] == 0.25);

    RegimeCheckResult r;
    r.residual = 0.5;
    const auto rj = io::regime_to_json(r);
    CHECK(rj["is_linear"] == false);
    CHECK(rj["params"].is_null());
}

TEST_CASE("CSV writers") {
    RegionSample s;
    s.box = Box::cube(3, -1.0, 1.0);
    s.points = {{0.5, -0.25, 1.0}};
    s.labels = {Permutation::parse("2,1,3")};
    std::ostringstream os;
    io::write_region_csv(os, s);
    CHECK(os.str() == "y1,y2,y3,label\n0.5,-0.25,1,\"2,1,3\"\n");

    EllipsoidData d;
    d.surface = {{1.0, 0.0, 0.0}};
    d.projection = {{0.5, -0.5, 0.0}};
    std::ostringstream es;
    io::write_ellipsoid_csv(es, d);
    CHECK(es.str() == "set,x1,x2,x3\nsurface,1,0,0\nprojection,0.5,-0.5,0\n");
}

TEST_CASE("format_double round trips") {
    for (double x : {0.1, 1.0 / 3.0, 7.0 / 3.0, -1e-300, 12345678.9}) {
        CHECK(std::stod(io::format_double(x)) == x);
    }
}
