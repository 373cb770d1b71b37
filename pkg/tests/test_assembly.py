import numpy as np
import pytest

from polydg.analysis import coercivity_sample, errors
from polydg.assembly import DGParams, SparseSystem, apply_bilinear, assemble, default_orders
from polydg.mesh import generate_dual_hex, generate_hybrid
from polydg.poly_space import DiscreteFunction, basis_dim, l2_project
from polydg.problems import linear_problem
from polydg.solver import solve

from conftest import hanging_mesh, two_squares_mesh, unit_square_mesh


def zero(x, y):
    return np.zeros_like(x)


def one(x, y):
    return np.ones_like(x)


@pytest.mark.parametrize("kw", [dict(delta=2), dict(delta=0.5), dict(alpha=0.0),
                                dict(alpha=-1.0), dict(degree=-1), dict(degree=1.5)])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        DGParams(**kw)


def test_default_orders():
    assert default_orders(1) == {"volume": 4, "edge": 5, "source": 7}
    assert default_orders(3)["source"] == 8


def test_single_cell_degree_zero():
    system = assemble(unit_square_mesh(), DGParams(delta=1, alpha=10.0, degree=0), one)
    assert system.matrix.shape == (1, 1)
    assert system.matrix[0, 0] == pytest.approx(40.0, rel=1e-14)
    assert system.rhs[0] == pytest.approx(1.0, rel=1e-14)
    assert system.symmetric


def test_boundary_data_enters_rhs():
    # degree 0, g = 1: rhs gains alpha / h_e * |e| on each of the 4 sides
    system = assemble(unit_square_mesh(), DGParams(1, 10.0, 0), zero, one)
    assert system.rhs[0] == pytest.approx(40.0, rel=1e-14)


@pytest.mark.parametrize("mesh_fn", [lambda: generate_dual_hex(4), lambda: generate_hybrid(4),
                                     hanging_mesh])
def test_symmetry_flag(mesh_fn):
    mesh = mesh_fn()
    sym = assemble(mesh, DGParams(1, 10.0, 1), one)
    assert sym.symmetric and sym.asymmetry() <= 1e-12
    for delta in (0, -1):
        nonsym = assemble(mesh, DGParams(delta, 10.0, 1), one)
        assert not nonsym.symmetric and nonsym.asymmetry() > 1e-3


@pytest.mark.parametrize("degree", [1, 2])
def test_sparsity_pattern(degree, small_mesh):
    mesh = small_mesh
    system = assemble(mesh, DGParams(1, 10.0, degree), one)
    nb = basis_dim(degree)
    coo = system.matrix.tocoo()
    blocks = set(zip((coo.row // nb).tolist(), (coo.col // nb).tolist()))
    assert len(blocks) == mesh.n_cells + 2 * mesh.n_interior
    neighbours = {tuple(sorted(p)) for p in mesh.iface_cells[~mesh.boundary_mask].tolist()}
    assert {tuple(sorted(b)) for b in blocks if b[0] != b[1]} == neighbours


def test_two_cell_penalty_by_hand():
    mesh = two_squares_mesh()
    params = DGParams(1, 10.0, 1)
    v1 = DiscreteFunction(mesh, 1, [1, 0, 0, 0, 0, 0])
    v2 = DiscreteFunction(mesh, 1, [0, 0, 0, 1, 0, 0])
    ones = DiscreteFunction(mesh, 1, [1, 0, 0, 1, 0, 0])
    # piecewise constants: no volume or average terms, only penalties of
    # 10 per unit length; boundary sides count too (3 per cell)
    a11 = apply_bilinear(v1, v1, params)
    assert a11 == pytest.approx(10.0 + 30.0, rel=1e-13)
    # isolate the shared interface: [1] vanishes there, so
    # A(v1,v1) + A(v2,v2) - A(1,1) = 2 * penalty on the shared side
    shared = 0.5 * (a11 + apply_bilinear(v2, v2, params) - apply_bilinear(ones, ones, params))
    assert shared == pytest.approx(10.0, rel=1e-13)
    system = assemble(mesh, params, one)
    assert v1.coeffs @ (system.matrix @ v1.coeffs) == pytest.approx(a11, rel=1e-13)


def test_zero_argument():
    mesh = generate_dual_hex(3)
    rng = np.random.default_rng(0)
    v = DiscreteFunction(mesh, 1, rng.standard_normal(3 * mesh.n_cells))
    assert apply_bilinear(DiscreteFunction(mesh, 1), v, DGParams()) == 0.0


def test_mismatched_arguments():
    a = DiscreteFunction(generate_dual_hex(2), 1)
    b = DiscreteFunction(generate_dual_hex(2), 1)
    with pytest.raises(ValueError):
        apply_bilinear(a, b, DGParams())
    with pytest.raises(ValueError):
        apply_bilinear(a, DiscreteFunction(a.mesh, 2), DGParams())


@pytest.mark.parametrize("delta", [1, 0, -1])
@pytest.mark.parametrize("degree", [1, 2])
def test_oracle_matches_matrix(delta, degree):
    mesh = hanging_mesh() if degree == 2 else generate_hybrid(2)
    params = DGParams(delta, 7.5, degree)
    A = assemble(mesh, params, one).matrix
    rng = np.random.default_rng(delta + 10 * degree)
    for _ in range(3):
        u = DiscreteFunction(mesh, degree, rng.standard_normal(A.shape[0]))
        v = DiscreteFunction(mesh, degree, rng.standard_normal(A.shape[0]))
        ref = apply_bilinear(u, v, params)
        assert v.coeffs @ (A @ u.coeffs) == pytest.approx(ref, rel=1e-11)


def test_jump_terms_vanish_for_continuous_functions(dualhex4):
    # the projection of a global linear is that (continuous) linear itself
    mesh = dualhex4
    w = l2_project(lambda x, y: 1.0 + 2 * x - y, mesh, 1)
    inner = ~mesh.boundary_mask
    pts = mesh.iface_points[inner].mean(axis=1)
    k1, k2 = mesh.iface_cells[inner].T
    np.testing.assert_allclose(w.values_at(pts, k1), w.values_at(pts, k2), atol=1e-13)
    # so A(w, w) depends on alpha only through the boundary jumps
    a_lo, a_hi = (apply_bilinear(w, w, DGParams(1, a, 1)) for a in (1.0, 100.0))
    bjump = errors(w, alpha=1.0).energy ** 2 - errors(w, alpha=0.0).energy ** 2
    assert a_hi - a_lo == pytest.approx(99.0 * bjump, rel=1e-10)


@pytest.mark.parametrize("gen", [generate_dual_hex, generate_hybrid])
def test_coercivity_sample(gen):
    mesh = gen(4)
    out = coercivity_sample(mesh, DGParams(1, 10.0, 1), samples=100, seed=2)
    assert out["all_positive"]
    assert out["min_ratio"] > 0


@pytest.mark.parametrize("gen, n", [(generate_dual_hex, 4), (generate_hybrid, 4)])
@pytest.mark.parametrize("delta", [1, 0, -1])
def test_linear_solution_is_reproduced(gen, n, delta):
    mesh = gen(n)
    prob = linear_problem()
    params = DGParams(delta, 10.0, 1)
    system = assemble(mesh, params, prob.f, prob.g)
    report = solve(system, tol=1e-13)
    assert report.converged
    uh = DiscreteFunction(mesh, 1, report.x)
    err = errors(uh, prob.u, prob.grad)
    assert err.h1_broken <= 1e-10
    assert err.l2 <= 1e-10


def test_from_matrix_detects_symmetry():
    s = SparseSystem.from_matrix([[2.0, 1.0], [1.0, 2.0]], [1.0, 0.0])
    assert s.symmetric and s.dofmap is None and s.n == 2
    assert not SparseSystem.from_matrix([[2.0, 1.0], [0.0, 2.0]], [1.0, 0.0]).symmetric


def test_assembly_is_deterministic():
    mesh = generate_hybrid(4)
    a = assemble(mesh, DGParams(), one)
    b = assemble(generate_hybrid(4), DGParams(), one)
    assert (a.matrix != b.matrix).nnz == 0
    np.testing.assert_array_equal(a.rhs, b.rhs)
