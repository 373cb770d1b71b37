import numpy as np
import pytest
import scipy.sparse as sp

from polydg.assembly import DGParams, SparseSystem, assemble
from polydg.mesh import generate_dual_hex, generate_hybrid
from polydg.problems import get_problem
from polydg.solver import BlockJacobi, NotPositiveDefiniteError, solve


def test_identity():
    b = np.array([1.0, -2.0, 3.5])
    report = solve(SparseSystem.from_matrix(sp.identity(3), b))
    assert report.method == "cg" and report.converged
    assert report.iterations == 1
    np.testing.assert_array_equal(report.x, b)


@pytest.mark.parametrize("symmetric", [True, False])
def test_two_by_two(symmetric):
    system = SparseSystem.from_matrix([[4.0, 1.0], [1.0, 3.0]], [1.0, 2.0], symmetric=symmetric)
    report = solve(system, tol=1e-14)
    assert report.method == ("cg" if symmetric else "bicgstab")
    np.testing.assert_allclose(report.x, [1 / 11, 7 / 11], rtol=1e-13)


def test_nonsymmetric_small():
    A = np.array([[3.0, 1.0, 0.0], [-1.0, 4.0, 1.0], [0.0, 2.0, 5.0]])
    b = np.array([1.0, 2.0, 3.0])
    report = solve(SparseSystem.from_matrix(A, b), tol=1e-13)
    assert report.method == "bicgstab" and report.converged
    np.testing.assert_allclose(report.x, np.linalg.solve(A, b), rtol=1e-12)


def test_indefinite_matrix_raises():
    system = SparseSystem.from_matrix([[1.0, 2.0], [2.0, 1.0]], [1.0, -1.0], symmetric=True)
    with pytest.raises(NotPositiveDefiniteError, match="not positive definite"):
        solve(system)


def test_small_penalty_breaks_cg():
    mesh = generate_dual_hex(8)
    prob = get_problem("paper")
    system = assemble(mesh, DGParams(1, 0.01, 1), prob.f, prob.g)
    with pytest.raises(NotPositiveDefiniteError, match="penalty alpha"):
        solve(system)


def test_zero_rhs():
    report = solve(SparseSystem.from_matrix(sp.identity(4) * 2.0, np.zeros(4)))
    assert report.converged and report.iterations == 0
    np.testing.assert_array_equal(report.x, 0.0)


def test_maxit_gives_unconverged_report():
    mesh = generate_hybrid(8)
    prob = get_problem("sinsin")
    system = assemble(mesh, DGParams(), prob.f, prob.g)
    report = solve(system, maxit=3)
    assert not report.converged
    assert report.iterations == 3
    assert report.residual > 1e-10
    # the contract holds away from convergence too, where it is not vacuous
    assert abs(report.residual - report.iterated_residual) <= 1e-10


@pytest.mark.parametrize("kw", [dict(tol=0.0), dict(tol=1.0), dict(tol=-1e-3), dict(maxit=0)])
def test_argument_validation(kw):
    with pytest.raises(ValueError):
        solve(SparseSystem.from_matrix(sp.identity(2), np.ones(2)), **kw)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        solve(SparseSystem(sp.identity(3, format="csr"), np.ones(2), True))


def test_block_jacobi_inverts_diagonal_blocks():
    rng = np.random.default_rng(0)
    blocks = [rng.standard_normal((3, 3)) + 4 * np.eye(3) for _ in range(4)]
    D = sp.block_diag(blocks, format="csr")
    coupling = sp.diags([np.full(9, 0.5)], [3], shape=(12, 12))
    M = BlockJacobi((D + coupling).tocsr(), 3)
    r = rng.standard_normal(12)
    # off-block coupling is ignored; the diagonal blocks are inverted exactly
    np.testing.assert_allclose(D @ M(r), r, rtol=1e-12, atol=1e-12)
    with pytest.raises(ValueError):
        BlockJacobi(D, 5)


@pytest.mark.parametrize("family", ["dualhex", "hybrid"])
@pytest.mark.parametrize("delta", [1, 0, -1])
def test_residual_contract(family, delta):
    mesh = generate_dual_hex(16) if family == "dualhex" else generate_hybrid(16)
    prob = get_problem("sinsin")
    system = assemble(mesh, DGParams(delta, 10.0, 1), prob.f, prob.g)
    report = solve(system, tol=1e-10)
    assert report.converged and report.residual <= 1e-10
    assert report.method == ("cg" if delta == 1 else "bicgstab")
    # recomputed residual agrees with the iterated one
    assert abs(report.residual - report.iterated_residual) <= 1e-10
    r = system.rhs - system.matrix @ report.x
    assert np.linalg.norm(r) / np.linalg.norm(system.rhs) == pytest.approx(report.residual, rel=1e-8)
    assert np.abs(r).max() <= np.linalg.norm(r)


def test_determinism():
    mesh = generate_hybrid(8)
    prob = get_problem("paper")
    system = assemble(mesh, DGParams(), prob.f, prob.g)
    a, b = solve(system), solve(system)
    assert a.iterations == b.iterations and a.residual == b.residual
    np.testing.assert_array_equal(a.x, b.x)


def test_report_dict():
    report = solve(SparseSystem.from_matrix(sp.identity(2), np.ones(2)))
    d = report.to_dict()
    assert d == {"iterations": 1, "relative_residual": 0.0, "iterated_residual": 0.0,
                 "converged": True, "method": "cg"}
