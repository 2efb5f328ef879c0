import math

import pytest

import permlin

EXAMPLE = dict(gamma=0.5, a=0.5, v=0.2, n=3)


def example_k():
    return permlin.construct_covariance(**EXAMPLE)


def test_spectrum_of_example():
    values, vectors = permlin.sym_eigen(example_k())
    assert values == pytest.approx([7 / 3, 1.0, 3 / 7], abs=1e-9)
    closed, _ = permlin.spectrum_closed_form(**EXAMPLE)
    assert closed == pytest.approx(values, abs=1e-9)
    assert len(vectors) == 3


def test_regime_check():
    result = permlin.check_linear_regime(example_k())
    assert result["is_linear"]
    assert result["params"]["gamma"] == pytest.approx(0.5)
    assert result["params"]["v"] == pytest.approx(0.2)
    diag = [[1, 0, 0], [0, 1, 0], [0, 0, 2]]
    bad = permlin.check_linear_regime(diag)
    assert not bad["is_linear"]
    assert bad["params"] is None
    b = permlin.projection_matrix(diag)
    assert b[0][0] == pytest.approx(0.5)
    assert b[1][1] == pytest.approx(11 / 18)


def test_n2_params():
    p = permlin.n2_params([[1, 0], [0, 3]])
    assert (p["a"], p["gamma"], p["v"]) == pytest.approx((5 / 8, 5 / 8, 1 / 8))


def test_decoders():
    identity = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert permlin.sort_permutation([3, 1, 2]) == [2, 3, 1]
    assert permlin.linear_decode(identity, [3, 1, 2]) == [2, 3, 1]
    assert permlin.map_decode(identity, [3, 1, 2], samples=20000, seed=1) == [2, 3, 1]
    table = permlin.posterior_table(example_k(), [0, 0, 0], samples=60000, seed=2)
    assert len(table) == 6
    assert sum(table.values()) == pytest.approx(1.0)


def test_estimators():
    k = [[1, 0], [0, 1]]
    sim = permlin.perr_simulation(k, trials=200000, seed=3)
    assert abs(sim["value"] - 0.25) <= 3 * sim["stderr"]
    geo = permlin.perr_geometric(k, samples=200000, seed=4)
    combined = math.hypot(sim["stderr"], geo["stderr"])
    assert abs(sim["value"] - geo["value"]) <= 3 * combined
    points, labels = permlin.region_sample(example_k(), count=50, seed=5)
    assert len(points) == len(labels) == 50


def test_numpy_inputs():
    np = pytest.importorskip("numpy")
    k = np.array(example_k())
    assert permlin.check_linear_regime(k)["is_linear"]
    assert permlin.linear_decode(k, np.array([0.0, 0.0, 0.0])) == [1, 2, 3]


def test_errors():
    with pytest.raises(permlin.ParameterError, match="v\\^2"):
        permlin.construct_covariance(0.5, 0.5, 0.6, 3)
    with pytest.raises(permlin.DomainError):
        permlin.check_linear_regime([[1, 0], [0, -1]])
    with pytest.raises(permlin.RefusalError):
        permlin.perr_geometric([[1, 0, 0], [0, 1, 0], [0, 0, 2]], samples=10)
    with pytest.raises(permlin.RefusalError, match="--max-factorial-n"):
        permlin.posterior_table([[1.0 if i == j else 0.0 for j in range(9)] for i in range(9)], [0.0] * 9, 10)
    assert issubclass(permlin.RefusalError, permlin.Error)
