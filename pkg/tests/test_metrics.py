import numpy as np
import pytest

from asyncpd.graph import build_topology
from asyncpd.metrics import (
    ReferenceNotConvergedError,
    RunTrace,
    centralized_reference,
    gap_function_Q,
    perturbed_gap,
    primal_gap,
    rate_slope,
)
from asyncpd.problems import Dataset, make_quadratic_problem, make_svm_problem, partition_evenly


def test_reference_closed_form():
    probs = make_quadratic_problem([[0.0], [0.0], [3.0]], 2.0)
    ref = centralized_reference(probs)
    assert ref.method == "closed_form"
    assert np.allclose(ref.x_star, [1.0])
    assert ref.F_star == pytest.approx(6.0, abs=1e-12)
    assert ref.certificate == 0.0


def test_reference_subgradient_hinge():
    # one sample (v=+1, u=[2]) per agent, l2 weight 1/2: summed minimum at x=0.5
    topo = build_topology("complete", 2)
    data2 = Dataset(
        labels=np.array([1.0, 1.0]),
        features=np.array([[2.0], [2.0]]),
        partition=partition_evenly(2, 2),
    )
    probs = make_svm_problem(data2, topo, reg="l2", reg_weight=0.5)
    ref = centralized_reference(probs, method="long_run_subgradient", budget=60000, tol=2e-3)
    # brute-force grid oracle on the summed 1-d objective
    grid = np.linspace(-1, 2, 30001)
    vals = [sum(p.value(np.array([g])) for p in probs) for g in grid]
    g_star = grid[int(np.argmin(vals))]
    assert ref.x_star[0] == pytest.approx(g_star, abs=2e-2)
    assert ref.F_star == pytest.approx(min(vals), abs=1e-3)


def test_reference_budget_exhaustion():
    probs = make_quadratic_problem([[0.0], [5.0]], 1.0)
    with pytest.raises(ReferenceNotConvergedError):
        centralized_reference(probs, method="long_run_subgradient", budget=10, tol=1e-12)


def test_primal_gap_cases():
    probs = make_quadratic_problem([[0.0], [2.0]], 1.0)
    ref = centralized_reference(probs)
    stacked_star = np.tile(ref.x_star, (2, 1))
    assert primal_gap(probs, stacked_star, ref) == pytest.approx(0.0, abs=1e-12)
    assert primal_gap(probs, np.array([[0.0], [2.0]]), ref) == pytest.approx(-1.0)
    assert primal_gap(probs, np.zeros((2, 1)), ref) == pytest.approx(1.0)


def _m2_saddle():
    probs = make_quadratic_problem([[0.0, 1.0], [2.0, -1.0]], 1.5)
    topo = build_topology("complete", 2)
    x_star = np.mean([p.meta["center"] for p in probs], axis=0)
    # stationarity: grad f_i(x*) + (L y)_i = 0; with L=[[1,-1],[-1,1]] pick y_2=0
    y1 = -probs[0].subgrad(x_star)
    ys = np.stack([y1, np.zeros(2)])
    return probs, topo, np.tile(x_star, (2, 1)), ys


def test_gap_Q_zero_at_equal_args():
    probs, topo, xs, ys = _m2_saddle()
    assert gap_function_Q(probs, topo, (xs, ys), (xs, ys)) == pytest.approx(0.0, abs=1e-12)


def test_gap_Q_saddle_signs():
    probs, topo, x_star_stack, y_star = _m2_saddle()
    rng = np.random.default_rng(0)
    for _ in range(10):
        xbar = np.tile(rng.normal(size=2), (2, 1))  # feasible comparison point
        ybar = rng.normal(size=(2, 2))
        q = gap_function_Q(probs, topo, (x_star_stack, y_star), (xbar, ybar))
        assert q <= 1e-10
        q2 = gap_function_Q(probs, topo, (xbar, ybar), (x_star_stack, y_star))
        assert q2 >= -1e-10


def test_gap_Q_zero_duals():
    probs, topo, xs, _ = _m2_saddle()
    rng = np.random.default_rng(1)
    other = rng.normal(size=(2, 2))
    zeros = np.zeros((2, 2))
    q = gap_function_Q(probs, topo, (other, zeros), (xs, zeros))
    F = sum(p.value(other[i]) for i, p in enumerate(probs))
    Fbar = sum(p.value(xs[i]) for i, p in enumerate(probs))
    assert q == pytest.approx(F - Fbar)


def test_perturbed_gap_cases():
    probs, topo, x_star_stack, _ = _m2_saddle()
    x_star = x_star_stack[0]
    rng = np.random.default_rng(2)
    xs = rng.normal(size=(2, 2))
    lap_img = topo.laplacian_dense() @ xs
    g = perturbed_gap(probs, topo, lap_img, (xs, None), x_star, 5.0)
    g0 = perturbed_gap(probs, topo, np.zeros((2, 2)), (xs, None), x_star, 0.0)
    assert g == pytest.approx(g0)  # v = Lx kills the radius term
    z = perturbed_gap(probs, topo, np.zeros((2, 2)), (x_star_stack, None), x_star, 1.0)
    assert z == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(ValueError):
        perturbed_gap(probs, topo, np.zeros((2, 2)), (xs, None), x_star, -1.0)


def test_perturbed_gap_matches_brute_force():
    probs, topo, x_star_stack, _ = _m2_saddle()
    x_star = x_star_stack[0]
    rng = np.random.default_rng(3)
    xs = rng.normal(size=(2, 2))
    v = rng.normal(size=(2, 2)) * 0.1
    radius = 2.0
    closed = perturbed_gap(probs, topo, v, (xs, None), x_star, radius)
    F = sum(p.value(xs[i]) for i, p in enumerate(probs))
    Fstar = sum(p.value(x_star) for p in probs)
    resid = (topo.laplacian_dense() @ xs - v).ravel()
    best = -np.inf
    ys = rng.normal(size=(10**5, resid.shape[0]))
    ys *= radius / np.linalg.norm(ys, axis=1, keepdims=True)  # sup sits on the sphere
    best = F - Fstar + float((ys @ resid).max())
    scale = max(1.0, abs(closed))
    assert best <= closed + 1e-12
    assert closed - best < 1e-2 * scale


def test_rate_slope():
    Ns = [10, 20, 40, 80]
    assert rate_slope([(n, 1.0 / n) for n in Ns]) == pytest.approx(-1.0)
    assert rate_slope([(n, 1.0 / n**2) for n in Ns]) == pytest.approx(-2.0)
    assert rate_slope([(n, 3.7) for n in Ns]) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        rate_slope([(10, 1.0)])
    with pytest.raises(ValueError):
        rate_slope([(10, 0.0), (20, 1.0)])


def test_runtrace_roundtrip(tmp_path):
    tr = RunTrace(seed=5)
    tr.append(10, 20, 30, 1.5, 0.25)
    tr.append(20, 40, 60, 1.25, 0.125)
    tr.validate()
    path = tmp_path / "trace.csv"
    tr.to_csv(path)
    text = path.read_text()
    assert text.startswith("k,comm_rounds,grad_evals,objective,feasibility,wall_seconds,seed\n")
    assert "\r" not in text
    back = RunTrace.from_csv(path)
    assert back.seed == 5
    assert back.k == tr.k and back.objective == tr.objective


def test_runtrace_validate_rejects():
    tr = RunTrace(seed=0)
    tr.append(1, 3, 0, 1.0, 1.0)  # comm_rounds != 2k
    with pytest.raises(ValueError):
        tr.validate()
    tr2 = RunTrace(seed=0)
    tr2.append(1, 2, 5, 1.0, 1.0)
    tr2.append(2, 4, 4, 1.0, 1.0)  # grad_evals decreasing
    with pytest.raises(ValueError):
        tr2.validate()
    tr3 = RunTrace(seed=0)
    tr3.append(1, 2, 1, float("nan"), 1.0)
    with pytest.raises(ValueError):
        tr3.validate()
