import numpy as np
import pytest

from conftest import pencil_ensemble, rel_err
from rovir import oracle
from rovir._ascent_py import ascend_batch as ascend_python
from rovir.errors import InfeasiblePrefix, InvalidNv, NotDiagonal, ValidationError
from rovir.oracle import (
    OracleConfig,
    ascent_restarts,
    exhaustive_axis_oracle,
    start_point,
    stiefel_ascent,
)
from rovir.solvers import sir, solve_greedy, solve_original

try:
    from rovir._ascent import ascend_batch as ascend_cython
except ImportError:
    ascend_cython = None

needs_ext = pytest.mark.skipif(ascend_cython is None, reason="compiled kernel not built")

FAST = OracleConfig(restarts=40)


def trace_ratio_newton(A, B, nv, iters=200):
    """Global maximum of tr(W^H A W) / tr(W^H B W) over orthonormal W.

    Dinkelbach iteration: rho <- ratio of the top-nv eigenvectors of A - rho B.
    Independent of the ascent oracle; used only to check it.
    """
    rho = 0.0
    for _ in range(iters):
        _, V = np.linalg.eigh(A - rho * B)
        W = V[:, ::-1][:, :nv]
        new = np.trace(W.conj().T @ A @ W).real / np.trace(W.conj().T @ B @ W).real
        if abs(new - rho) <= 1e-15 * abs(new):
            return new
        rho = new
    return rho


class TestStiefelAscent:
    def test_identity_b(self):
        W, val = stiefel_ascent(np.diag([3.0, 2.0, 1.0]), np.eye(3), 2, FAST)
        assert rel_err(val, 2.5) <= 1e-10
        P = W.vectors @ W.vectors.conj().T
        np.testing.assert_allclose(P, np.diag([1.0, 1.0, 0.0]), atol=1e-5)
        assert W.method == "oracle"

    def test_a_equals_b(self):
        A, B = pencil_ensemble(1, nc_range=(4, 4))[0]
        for nv in (1, 2, 3):
            assert rel_err(stiefel_ascent(B, B, nv, FAST)[1], 1.0) <= 1e-12

    def test_counterexample(self, counterexample):
        W, val = stiefel_ascent(*counterexample, 2)
        g = sir(solve_greedy(*counterexample, 2), *counterexample)
        # diagonal pencil: the greedy axis pair (0, 2) is the global optimum
        assert val >= g * (1 - 1e-12)
        assert rel_err(val, g) <= 1e-10
        assert W.orthonormality_error() <= 1e-10

    def test_never_beaten_by_solvers(self):
        for A, B in pencil_ensemble(25, nc_range=(2, 6)):
            for nv in range(1, A.shape[0] + 1):
                val = stiefel_ascent(A, B, nv, FAST)[1]
                assert val >= sir(solve_greedy(A, B, nv), A, B) * (1 - 1e-6)
                assert val >= sir(solve_original(A, B, nv), A, B) * (1 - 1e-6)

    def test_matches_dinkelbach_global_optimum(self):
        for A, B in pencil_ensemble(25, nc_range=(3, 6)):
            for nv in range(1, A.shape[0]):
                val = stiefel_ascent(A, B, nv, FAST)[1]
                assert rel_err(val, trace_ratio_newton(A, B, nv)) <= 1e-9

    def test_prefix_confines_search(self):
        for A, B in pencil_ensemble(10, nc_range=(3, 5)):
            g = solve_greedy(A, B, 2)
            W, val = stiefel_ascent(A, B, 2, FAST, fixed_prefix=g.prefix(1))
            np.testing.assert_array_equal(W.vectors[:, 0], g.vectors[:, 0])
            assert abs(np.vdot(W.vectors[:, 0], W.vectors[:, 1])) <= 1e-10
            assert rel_err(val, sir(g, A, B)) <= 1e-6

    def test_prefix_equal_to_nv(self):
        A, B = pencil_ensemble(1, nc_range=(4, 4))[0]
        g = solve_greedy(A, B, 2)
        W, val = stiefel_ascent(A, B, 2, FAST, fixed_prefix=g)
        np.testing.assert_array_equal(W.vectors, g.vectors)
        assert val == sir(g, A, B)

    def test_infeasible_prefix(self):
        A, B = pencil_ensemble(1, nc_range=(4, 4))[0]
        g = solve_greedy(A, B, 3)
        with pytest.raises(InfeasiblePrefix):
            stiefel_ascent(A, B, 2, FAST, fixed_prefix=g)
        with pytest.raises(InfeasiblePrefix):
            stiefel_ascent(A, B, 2, FAST, fixed_prefix=np.ones((4, 1)))

    @pytest.mark.parametrize("nv", [0, 5])
    def test_invalid_nv(self, nv):
        with pytest.raises(InvalidNv):
            stiefel_ascent(np.eye(4), np.eye(4), nv, FAST)

    def test_deterministic(self):
        A, B = pencil_ensemble(3, nc_range=(5, 5))[2]
        cfg = OracleConfig(restarts=30, seed=99)
        r1 = ascent_restarts(A, B, 2, cfg)
        r2 = ascent_restarts(A, B, 2, cfg)
        assert np.array_equal(r1.restart_sirs, r2.restart_sirs)
        assert np.array_equal(r1.weights.vectors, r2.weights.vectors)
        assert r1.sir == r2.sir and r1.best_restart == r2.best_restart

    def test_restart_streams_independent_of_count(self):
        # restart r sees the same start whatever the total number of restarts
        A, B = pencil_ensemble(1, nc_range=(4, 4))[0]
        short = ascent_restarts(A, B, 2, OracleConfig(restarts=5, seed=7))
        long = ascent_restarts(A, B, 2, OracleConfig(restarts=12, seed=7))
        assert np.array_equal(short.restart_sirs, long.restart_sirs[:5])
        np.testing.assert_array_equal(start_point(7, 3, 4, 2), start_point(7, 3, 4, 2))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            OracleConfig(restarts=0)
        with pytest.raises(ValidationError):
            OracleConfig(rel_tol=0.0)


class TestExhaustiveAxis:
    def test_counterexample(self, counterexample):
        subset, val = exhaustive_axis_oracle(*counterexample, 2)
        assert subset == (0, 2)
        assert val == pytest.approx(99.99960000399996, rel=1e-15)

    def test_identity_b(self):
        assert exhaustive_axis_oracle(np.diag([3.0, 2.0, 1.0]), np.eye(3), 2) == ((0, 1), 2.5)

    def test_all_axes(self):
        a, b = np.array([1.0, 4.0, 2.0, 8.0]), np.array([2.0, 1.0, 3.0, 0.5])
        subset, val = exhaustive_axis_oracle(np.diag(a), np.diag(b), 4)
        assert subset == (0, 1, 2, 3)
        assert val == pytest.approx(a.sum() / b.sum(), rel=1e-15)

    def test_not_diagonal(self):
        with pytest.raises(NotDiagonal):
            exhaustive_axis_oracle(np.ones((3, 3)), np.eye(3), 1)

    def test_agrees_with_stiefel_on_diagonal_pencils(self, rng):
        # cond(B) <= 100, the regime the unpreconditioned ascent is meant for
        for _ in range(15):
            n = int(rng.integers(2, 7))
            a = rng.uniform(0, 10, n) * 10 ** rng.uniform(-3, 0, n)
            b = 10 ** rng.uniform(-2, 0, n)
            for nv in range(1, n + 1):
                _, exact = exhaustive_axis_oracle(np.diag(a), np.diag(b), nv)
                res = ascent_restarts(np.diag(a), np.diag(b), nv, FAST)
                assert rel_err(res.sir, exact) <= 1e-6


def test_ill_conditioned_b_is_flagged():
    # b spans four decades; the optimum is axis 3 (ratio 15.0) but the ascent
    # stalls near axis 5 (ratio 9.43) and must say so
    a = np.array([0.02534329, 0.01384035, 0.09700615, 0.01080546, 2.26552821, 0.12261202])
    b = np.array([5.12888225, 6.63772795e-02, 2.46036343e-02, 7.19984353e-04,
                  1.66821008, 1.30074539e-02])
    (axis,), exact = exhaustive_axis_oracle(np.diag(a), np.diag(b), 1)
    assert axis == 3
    res = ascent_restarts(np.diag(a), np.diag(b), 1, OracleConfig(restarts=10))
    assert res.sir < exact
    assert not res.converged


def test_misses_are_flagged_as_unconverged(rng):
    # diagonal spreads up to 1e4: wherever the ascent misses the exact axis
    # optimum, the winning restart must have run into the iteration cap
    for _ in range(15):
        n = int(rng.integers(2, 7))
        a = rng.uniform(0, 10, n) * 10 ** rng.uniform(-3, 0, n)
        b = rng.uniform(0.01, 10, n) * 10 ** rng.uniform(-3, 0, n)
        for nv in range(1, n + 1):
            _, exact = exhaustive_axis_oracle(np.diag(a), np.diag(b), nv)
            res = ascent_restarts(np.diag(a), np.diag(b), nv, FAST)
            assert res.sir <= exact * (1 + 1e-12)
            if rel_err(res.sir, exact) > 1e-6:
                assert not res.converged


@needs_ext
def test_backends_agree():
    for A, B in pencil_ensemble(10, nc_range=(3, 8)):
        for nv in (1, 2, A.shape[0] - 1):
            c = ascent_restarts(A, B, nv, FAST, ascend=ascend_cython)
            p = ascent_restarts(A, B, nv, FAST, ascend=ascend_python)
            np.testing.assert_allclose(c.restart_sirs, p.restart_sirs, rtol=1e-10)
            assert rel_err(c.sir, p.sir) <= 1e-12


@needs_ext
def test_compiled_backend_selected():
    assert oracle.BACKEND == "cython"
