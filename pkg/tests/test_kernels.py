"""Backend agreement: the JIT kernel, the numpy fallback, and the readable
reference rollout must score identical populations identically (up to
summation order), and the environment flag must select backends."""

import os
import subprocess
import sys

import numpy as np
import pytest

from uavsearch import mapping as mp
from uavsearch import objective as obj
from uavsearch.geometry import GridPose, heading_to_number, slot_heading
from uavsearch.kernels import _numba_impl, _numpy_impl
from uavsearch.planner import PlanProblem


def _random_problem(rng, with_peers=True):
    spec = mp.GridSpec(4.0, 80, 50)
    smap = mp.SearchMap.blank(spec)
    smap.probability[:] = rng.random(smap.probability.shape) * 0.4
    smap.uncertainty[:] = rng.random(smap.uncertainty.shape)
    smap.found[:] = rng.random(smap.found.shape) < 0.02
    denied = (rng.random((spec.cells_x, spec.cells_y)) < 0.03).astype(np.uint8)
    pose = GridPose(
        int(rng.integers(20, 60)),
        int(rng.integers(15, 35)),
        slot_heading(int(rng.integers(-7, 9)), 2),
    )
    denied[pose.x_g - 1, pose.y_g - 1] = 0
    peers = (
        rng.random((int(rng.integers(0, 4)), 2)) * [320.0, 200.0]
        if with_peers
        else np.zeros((0, 2))
    )
    problem = PlanProblem(
        spec=spec,
        pose=pose,
        pw=np.where(smap.found, 0.0, smap.probability),
        chi=smap.uncertainty,
        denied=denied,
        peers=np.asarray(peers, dtype=np.float64).reshape(-1, 2),
        rep_k=10.0,
        rep_mu=6e-3,
        rep_dmax=200.0,
        zero_dir=(0.6, 0.8),
        w_prob=10.0,
        w_unc=1.0,
        w_col=5.0,
        fov_cache=mp.FootprintCache(mp.FovGeometry(40.0, 40.0), spec.r),
    )
    return problem, smap


def _raw_args(problem, j, m, pop):
    inc_x, inc_y, offs_x, offs_y, offs_ptr = problem.tables(j)
    cov, touched = problem.scratch(m)
    return (
        np.ascontiguousarray(pop, dtype=np.int8),
        problem.pose.x_g,
        problem.pose.y_g,
        heading_to_number(problem.pose.heading, j),
        j,
        inc_x,
        inc_y,
        offs_x,
        offs_y,
        offs_ptr,
        problem.pw,
        problem.chi,
        problem.denied,
        problem.peers,
        problem.rep_k,
        problem.rep_mu,
        problem.rep_dmax,
        problem.zero_dir[0],
        problem.zero_dir[1],
        problem.spec.r,
        problem.w_prob,
        problem.w_unc,
        problem.w_col,
        0.5 ** np.arange(m + 1, dtype=np.float64),
        cov,
        touched,
    )


@pytest.mark.parametrize("case", range(10))
def test_numba_and_numpy_backends_agree(case):
    rng = np.random.default_rng(100 + case)
    problem, _ = _random_problem(rng)
    j = int(rng.integers(1, 5))
    m = int(rng.integers(2, 9))
    pop = rng.integers(-1, 2, size=(64, m), dtype=np.int8)
    fit_a, viol_a = _numba_impl.evaluate_sequences(*_raw_args(problem, j, m, pop))
    fit_b, viol_b = _numpy_impl.evaluate_sequences(*_raw_args(problem, j, m, pop))
    assert np.array_equal(viol_a, viol_b)
    np.testing.assert_allclose(fit_a, fit_b, rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("case", range(5))
def test_kernels_agree_with_reference_rollout(case):
    rng = np.random.default_rng(200 + case)
    problem, smap = _random_problem(rng)
    j = int(rng.integers(1, 4))
    m = int(rng.integers(2, 7))
    pop = rng.integers(-1, 2, size=(16, m), dtype=np.int8)
    fit, viol = _numba_impl.evaluate_sequences(*_raw_args(problem, j, m, pop))
    weights = obj.Weights(w_prob=10.0, w_unc=1.0, w_col=5.0)
    for k in range(len(pop)):
        ref = obj.sequence_revenue(
            smap, problem.pose, list(pop[k]), j, problem.peers, weights,
            obj.RepulsionParams(), problem.fov_cache, denied=problem.denied,
            zero_dir=problem.zero_dir,
        )
        assert fit[k] == pytest.approx(ref, rel=1e-9, abs=1e-9)
        assert (viol[k] > 0) == (ref < 0)


def test_scratch_cov_restored_between_calls():
    rng = np.random.default_rng(42)
    problem, _ = _random_problem(rng)
    pop = rng.integers(-1, 2, size=(32, 6), dtype=np.int8)
    args = _raw_args(problem, 2, 6, pop)
    _numba_impl.evaluate_sequences(*args)
    assert not args[-2].any()  # cov array back to all-zero
    fit1, _ = _numba_impl.evaluate_sequences(*args)
    fit2, _ = _numba_impl.evaluate_sequences(*args)
    np.testing.assert_array_equal(fit1, fit2)


def _backend_in_subprocess(value):
    env = dict(os.environ)
    if value is None:
        env.pop("UAVSEARCH_BACKEND", None)
    else:
        env["UAVSEARCH_BACKEND"] = value
    out = subprocess.run(
        [sys.executable, "-c", "import uavsearch.kernels as k; print(k.backend_name())"],
        capture_output=True,
        text=True,
        env=env,
    )
    return out


def test_env_flag_selects_numpy_backend():
    out = _backend_in_subprocess("numpy")
    assert out.returncode == 0
    assert out.stdout.strip() == "numpy"


def test_env_flag_default_prefers_numba():
    out = _backend_in_subprocess(None)
    assert out.returncode == 0
    assert out.stdout.strip() == "numba"


def test_env_flag_rejects_unknown_value():
    out = _backend_in_subprocess("cuda")
    assert out.returncode != 0
