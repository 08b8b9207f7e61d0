import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.errors import MeasureError, OracleCapExceededError
from src.flat import (
    DblInstance,
    bounded_lipschitz_distance,
    coarsen,
    dbl_flow,
    dbl_lp,
    lipschitz_violations,
    snap_directions,
)
from src.measures import DiscreteMeasure, PointMeasure, exact_support_measure

S = ([0.0, 0.0], [1.0, 0.0])


def _atom(x, u=(1.0, 0.0), w=1.0) -> DiscreteMeasure:
    return DiscreteMeasure([x], [u], [w])


def _random_measure(seed: int, atoms: int = 6) -> DiscreteMeasure:
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * np.pi, atoms)
    return DiscreteMeasure(
        rng.uniform(-1, 1, (atoms, 2)),
        np.column_stack([np.cos(theta), np.sin(theta)]),
        rng.uniform(0.1, 1.0, atoms),
    )


@pytest.mark.parametrize("solver", [dbl_lp, dbl_flow])
@pytest.mark.parametrize(
    "mu, nu, expected",
    [
        (_atom([0, 0]), _atom([0.5, 0]), 0.5),
        (_atom([0, 0]), _atom([5, 0]), 2.0),
        (_atom([0, 0]), _atom([0, 0]), 0.0),
        (_atom([0, 0], w=2.0), _atom([0, 0]), 1.0),
    ],
)
def test_dbl_examples(solver, mu, nu, expected):
    cert = solver(DblInstance.from_measures(mu, nu))
    assert cert.value == pytest.approx(expected, abs=1e-9)
    assert cert.box_residual <= 1e-9
    assert cert.lipschitz_residual <= 1e-9


def test_certificate_serializes():
    cert = dbl_flow(DblInstance.from_measures(_atom([0, 0]), _atom([0.5, 0])))
    data = cert.to_dict()
    assert data["solver"] == "flow"
    assert data["value"] == pytest.approx(0.5)
    assert len(data["witness"]) == 2


def test_signed_difference_input():
    diff = DiscreteMeasure([[0, 0], [0.3, 0]], [[1, 0], [1, 0]], [1.0, -1.0], signed=True)
    assert bounded_lipschitz_distance(diff).value == pytest.approx(0.3, abs=1e-9)


def test_instance_dimension_mismatch():
    with pytest.raises(MeasureError):
        DblInstance.from_measures(PointMeasure([[0, 0]], [1.0]), PointMeasure([[0, 0, 0]], [1.0]))


def test_oracle_cap():
    mu = _random_measure(0, atoms=20)
    with pytest.raises(OracleCapExceededError):
        bounded_lipschitz_distance(mu, _random_measure(1, atoms=20), oracle=True, cap=10)


def _random_signed_measure(seed: int, atoms: int) -> DiscreteMeasure:
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * np.pi, atoms)
    return DiscreteMeasure(
        rng.uniform(-1, 1, (atoms, 2)),
        np.column_stack([np.cos(theta), np.sin(theta)]),
        rng.uniform(0.1, 1.0, atoms) * rng.choice([-1.0, 1.0], atoms),
        signed=True,
    )


@given(seed=st.integers(min_value=0, max_value=100_000), atoms=st.integers(min_value=2, max_value=40))
@settings(max_examples=200, deadline=None)
def test_flow_matches_lp(seed, atoms):
    inst = DblInstance.from_measures(_random_signed_measure(seed, atoms))
    lp, flow = dbl_lp(inst), dbl_flow(inst, neighbors=3)
    assert flow.value == pytest.approx(lp.value, abs=1e-9)
    k, _, _ = lipschitz_violations(inst.points, flow.witness, tol=1e-9)
    assert len(k) == 0
    assert flow.objective_residual <= 1e-9


@given(seed=st.integers(min_value=0, max_value=100_000))
@settings(max_examples=25, deadline=None)
def test_metric_axioms(seed):
    mu, nu, zeta = _random_measure(seed), _random_measure(seed + 1), _random_measure(seed + 2)
    d_mn = bounded_lipschitz_distance(mu, nu).value
    assert d_mn == pytest.approx(bounded_lipschitz_distance(nu, mu).value, abs=1e-9)
    assert bounded_lipschitz_distance(mu, mu).value == 0.0
    d_mz = bounded_lipschitz_distance(mu, zeta).value
    d_nz = bounded_lipschitz_distance(nu, zeta).value
    assert d_mz <= d_mn + d_nz + 1e-8
    assert abs(mu.total_mass - nu.total_mass) <= d_mn + 1e-9
    assert d_mn <= mu.total_mass + nu.total_mass + 1e-9


@given(seed=st.integers(min_value=0, max_value=100_000), c=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=25, deadline=None)
def test_scaling(seed, c):
    mu, nu = _random_measure(seed), _random_measure(seed + 1)
    base = bounded_lipschitz_distance(mu, nu, oracle=True).value
    scaled = bounded_lipschitz_distance(mu.scaled(c), nu.scaled(c), oracle=True).value
    assert scaled == pytest.approx(c * base, abs=1e-8)


@pytest.mark.slow
def test_metric_axioms_many_triples():
    for seed in range(100):
        mu, nu, zeta = _random_measure(3 * seed), _random_measure(3 * seed + 1), _random_measure(3 * seed + 2)
        d_mn = bounded_lipschitz_distance(mu, nu).value
        d_nz = bounded_lipschitz_distance(nu, zeta).value
        assert bounded_lipschitz_distance(mu, zeta).value <= d_mn + d_nz + 1e-8


# ---- 粗化 ----

def test_coarsen_tiny_grid_is_identity():
    mu = _random_measure(7)
    coarse, bound = coarsen(mu, 1e-12)
    assert bound <= 1e-10
    assert coarse.total_mass == pytest.approx(mu.total_mass)
    assert len(coarse) == len(mu)


@pytest.mark.parametrize("h", [0.01, 0.1, 0.5])
def test_coarsen_single_atom_bound(h):
    mu = _atom([0.123, -0.456], (np.cos(0.3), np.sin(0.3)), w=2.5)
    coarse, bound = coarsen(mu, h)
    assert len(coarse) == 1
    assert bound <= h * np.sqrt(2) * 2.5


def test_coarsen_merges_and_preserves_mass(unit_square):
    lam = exact_support_measure(unit_square, 1, 0.05).measure
    coarse, bound = coarsen(lam, 0.2)
    assert len(coarse) < len(lam)
    assert coarse.total_mass == pytest.approx(lam.total_mass)
    assert bound > 0


def test_coarsen_bound_dominates_distance(unit_square):
    lam = exact_support_measure(unit_square, 0, 0.1).measure
    coarse, bound = coarsen(lam, 0.05)
    assert bounded_lipschitz_distance(lam, coarse).value <= bound + 1e-9


def test_coarsen_rejects_nonpositive_grid():
    with pytest.raises(MeasureError):
        coarsen(_random_measure(0), 0.0)


def test_snap_directions_stay_unit():
    rng = np.random.default_rng(0)
    u = rng.normal(size=(200, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    snapped = snap_directions(u, 0.1)
    np.testing.assert_allclose(np.linalg.norm(snapped, axis=1), 1.0)
    assert np.max(np.linalg.norm(snapped - u, axis=1)) <= 0.2
