from fractions import Fraction

import numpy as np
import pytest

from resistnet.boundary import (
    build_deficiency_zline, build_deficiency_zplus, build_harmonic_zline,
    build_harmonic_zplus, classify_model, resolvent_delta,
    solve_ab_deficiency, space_decomposition_check, tail_flag,
)
from resistnet.energy import (
    EnergyVector, apply_laplacian, energy, random_interior_vector, vector,
)
from resistnet.graphs import (
    ModelSpec, build_dyadic_tree, build_half_line, build_sym_line, path_graph,
)


# -- harmonic vectors ---------------------------------------------------------

@pytest.mark.parametrize("m_ratio", [1.5, 2.0, 7.0])
def test_half_line_has_no_nonconstant_harmonic(m_ratio):
    res = build_harmonic_zplus(m_ratio, 50)
    assert res.verdict == "HARM_TRIVIAL"
    assert res.forced_first_increment == 0.0
    assert res.propagated_max_abs == 0.0


def test_sym_line_harmonic_closed_form_energy():
    res = build_harmonic_zline(2, 1.0, 40)
    assert abs(res.energy_partial - 2.0) < 1e-10
    assert res.energy_limit == 2.0
    assert res.interior_residual <= 1e-12
    g = res.vector.graph
    assert res.vector.values[g.index_of(1)] == 0.5
    assert res.antisymmetric_ok


def test_sym_line_harmonic_deep_truncation():
    res = build_harmonic_zline(2, 1.0, 200)
    assert res.interior_residual <= 1e-12
    assert abs(res.energy_partial - res.energy_partial_closed) <= 1e-10 * res.energy_limit


def test_sym_line_harmonic_rejects_zero_slope():
    with pytest.raises(ValueError):
        build_harmonic_zline(2, 0.0, 10)


# -- defect eigenvectors -------------------------------------------------------

def test_half_line_deficiency_matches_polynomial_values():
    sol = build_deficiency_zplus(2, 200)
    assert sol.u_exact[0] == 1
    assert sol.u_exact[1] == Fraction(3, 2)
    assert sol.u_exact[2] == Fraction(17, 8)
    assert sol.u_exact[3] == Fraction(173, 64)
    assert sol.seed_relation_ok
    assert sol.flux_recursion_ok


def test_half_line_deficiency_exact_interior_residual():
    sol = build_deficiency_zplus(2, 200)
    assert sol.interior_residual_exact_zero
    assert sol.float_residual_rel_max < 1e-9


def test_deficiency_increments_match_value_differences_exactly():
    for sol in (build_deficiency_zplus(2, 80), build_deficiency_zline(2, 80)):
        for x in range(1, 81):
            assert sol.du_exact[x - 1] == sol.u_exact[x] - sol.u_exact[x - 1]
            assert sol.du_exact[x - 1] > 0


def test_half_line_deficiency_dichotomy():
    sol = build_deficiency_zplus(2, 200)
    assert sol.energy_flag == "CONVERGENT"
    assert sol.l2_flag == "DIVERGENT"
    # square sums really do grow at least linearly at the minimum value
    depth, last = sol.l2_partials[-1]
    assert depth == 200
    assert last >= 0.9 * 200 * float(min(abs(v) for v in sol.u_exact)) ** 2


@pytest.mark.parametrize("m_ratio", [1.5, 2.0, 4.0])
def test_half_line_dichotomy_across_ratios(m_ratio):
    sol = build_deficiency_zplus(m_ratio, 200)
    assert sol.interior_residual_exact_zero
    assert sol.energy_flag == "CONVERGENT"
    assert sol.l2_flag == "DIVERGENT"
    assert sol.monotone_ok
    assert sol.within_bound


def test_half_line_deficiency_rational_residual_oracle():
    # independent evaluation of the defect row in exact arithmetic
    sol = build_deficiency_zplus(2, 60)
    u = sol.u_exact
    m = Fraction(2)
    for x in range(1, 59):
        row = m ** x * (u[x] - u[x - 1]) + m ** (x + 1) * (u[x] - u[x + 1])
        assert row == -u[x]


def test_sym_line_deficiency_seed_and_symmetry():
    sol = build_deficiency_zline(2, 100)
    assert sol.u_exact[1] == Fraction(5, 4)        # 1 + xi/2 at xi = 1/2
    assert sol.seed_relation_ok
    assert sol.interior_residual_exact_zero
    g = sol.graph
    vals = sol.vector.values
    for x in range(101):
        assert vals[g.index_of(-x)] == vals[g.index_of(x)]


def test_sym_line_deficiency_vertex_zero_row_exact():
    sol = build_deficiency_zline(2, 40)
    u = sol.u_exact
    assert Fraction(2) * (2 * u[0] - 2 * u[1]) + u[0] == 0


def test_sym_line_deficiency_energy_classification():
    sol = build_deficiency_zline(2, 100)
    assert sol.classification == "FINITE"
    assert sol.monotone_ok


def test_sym_line_deficiency_matrix_product_oracle():
    # u(x) is the second component of the product of the step matrices
    # [[1, 1], [xi^k, 1 + xi^k]], k = x down to 2, applied to the seed
    # (1/2, 1 + xi/2) scaled by u(0)
    sol = build_deficiency_zline(2, 12)
    xi = Fraction(1, 2)
    vec = (Fraction(1, 2), 1 + xi / 2)
    for x in range(2, 13):
        xk = xi ** x
        vec = (vec[0] + vec[1], xk * vec[0] + (1 + xk) * vec[1])
        assert sol.u_exact[x] == vec[1]


# -- two-ratio model -------------------------------------------------------------

def test_ab_deficiency_reports_inconsistency():
    rep = solve_ab_deficiency(2, 3, 50)
    assert rep.alpha == Fraction(1, 2)
    assert rep.beta == Fraction(1, 3)
    assert rep.literal_u1 == Fraction(3, 2)        # q_1(1/2)
    assert rep.literal_um1 == Fraction(4, 3)       # q_1(1/3)
    assert rep.normalization_sum == 2
    assert rep.normalization_flag == "INCONSISTENT_AS_WRITTEN"
    assert rep.literal_vertex0_residual == -1


def test_ab_deficiency_repaired_candidate():
    rep = solve_ab_deficiency(2, 3, 50)
    assert rep.repaired_lambda_plus + rep.repaired_lambda_minus == 1
    assert rep.repaired_vertex0_residual == 0
    # matrix-product oracle for the literal positive side: u(2) = q_2(1/2)
    assert rep.literal_values_pos[2] == Fraction(17, 8)


def test_ab_symmetric_case_reduces_to_sym_line():
    rep = solve_ab_deficiency(2, 2, 60)
    sol = build_deficiency_zline(2, 60)
    assert rep.repaired_values_pos == sol.u_exact
    assert rep.repaired_values_neg == sol.u_exact
    assert rep.repaired_vertex0_residual == 0


# -- resolvent ----------------------------------------------------------------------

def test_resolvent_path_hand_solve():
    g = path_graph([1.0, 1.0])
    res = resolvent_delta(g, 1)
    # oracle: independent dense solve of the hand-written 3x3 system
    lap = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
    expected = np.linalg.solve(np.eye(3) + lap, np.array([0.0, 1.0, 0.0]))
    assert np.allclose(res.vector.values, expected, atol=1e-12)
    assert np.allclose(res.vector.values, [0.25, 0.5, 0.25], atol=1e-12)


@pytest.mark.parametrize("graph_factory,x", [
    (lambda: path_graph([1.0, 1.0]), 1),
    (lambda: build_half_line(2, 16), 3),
    (lambda: build_sym_line(2, 10), 12),
    (lambda: build_dyadic_tree(1.0, 5), 4),
    (lambda: build_half_line(1.5, 16), 5),
])
def test_resolvent_contract(graph_factory, x):
    g = graph_factory()
    res = resolvent_delta(g, x)
    assert res.residual_inf <= 1e-10
    assert res.punctured_residual_inf <= 1e-9
    assert res.l2_norm <= 1.0
    assert res.contractive_ok
    assert res.energy_identity_full_rel <= 1e-8


def test_resolvent_dirichlet_suppresses_frontier_tail():
    g = build_half_line(2, 24)
    free = resolvent_delta(g, 3, boundary="free")
    pinned = resolvent_delta(g, 3, boundary="dirichlet")
    # the free truncation carries a near-flat tail; pinning removes it and
    # the interior quadratic sum then matches the energy
    assert abs(free.vector.values[-1]) > 1e-3
    assert abs(pinned.vector.values[-1]) == 0.0
    assert pinned.energy_identity_rel <= 1e-8
    assert pinned.residual_inf <= 1e-10
    assert pinned.l2_norm <= 1.0


def test_resolvent_idempotence_random_vertices():
    rng = np.random.default_rng(13)
    for g in (build_half_line(2, 16), build_sym_line(2, 10),
              build_dyadic_tree(1.0, 5)):
        xs = rng.choice(g.n_vertices, 5, replace=False)
        for x in xs:
            res = resolvent_delta(g, int(x))
            out = res.vector.values + apply_laplacian(res.vector).values
            target = np.zeros(g.n_vertices)
            target[x] = 1.0
            assert np.max(np.abs(out - target)) <= 1e-9


def test_resolvent_rejects_pinned_source():
    g = build_half_line(2, 10)
    with pytest.raises(ValueError):
        resolvent_delta(g, 10, boundary="dirichlet")


# -- energy decomposition --------------------------------------------------------

def test_space_decomposition_zero_vector():
    g = build_sym_line(2, 20)
    res = space_decomposition_check(vector(g, np.zeros(g.n_vertices)), [])
    assert res.energy_u == 0.0
    assert res.s2_interior == 0.0
    assert res.energy_harm_projection == 0.0
    assert res.passed


def test_space_decomposition_no_harmonic_basis():
    # on the half line the harmonic space is trivial and the identity
    # reduces to energy(u) = S2(u)
    g = build_half_line(2, 30)
    rng = np.random.default_rng(14)
    for _ in range(5):
        v = random_interior_vector(g, rng, margin=2)
        res = space_decomposition_check(v, [])
        assert res.passed, res.to_dict()


def test_space_decomposition_sym_line_with_basis():
    harm = build_harmonic_zline(2, 1.0, 200)
    g = harm.vector.graph
    rng = np.random.default_rng(15)
    for _ in range(20):
        values = rng.standard_normal(g.n_vertices)
        values[np.abs(np.arange(g.n_vertices) - g.base_vertex) > 10] = 0.0
        v = EnergyVector(g, values)
        res = space_decomposition_check(v, [harm.vector])
        assert res.residual_rel <= 1e-6, res.to_dict()
        assert res.passed


def test_space_decomposition_delta_example():
    harm = build_harmonic_zline(2, 1.0, 60)
    g = harm.vector.graph
    d1 = np.zeros(g.n_vertices)
    d1[g.index_of(1)] = 1.0
    res = space_decomposition_check(EnergyVector(g, d1), [harm.vector])
    assert res.passed
    assert res.energy_harm_projection <= 1e-12 * res.energy_u


# -- classification ----------------------------------------------------------------

@pytest.mark.parametrize("m_ratio", [1.5, 2.0, 4.0])
def test_classify_half_line(m_ratio):
    report = classify_model(ModelSpec("HALF_LINE_GEOM", 100, M=m_ratio))
    assert report.harm_dim == 0
    assert report.def_dim == 1
    assert report.hard_expectations_ok
    assert report.def_evidence["interior_residual_exact_zero"]


def test_classify_sym_line():
    report = classify_model(ModelSpec("LINE_GEOM_SYM", 100, M=2.0))
    assert report.harm_dim == 1
    assert report.hard_expectations_ok
    # the defect verdict stays evidence-only for this model
    assert not report.def_hard
    assert report.def_evidence["classification"] in (
        "FINITE", "INFINITE", "INCONCLUSIVE")


def test_classify_rejects_other_families():
    with pytest.raises(ValueError):
        classify_model(ModelSpec("DYADIC_TREE", 4, c_const=1.0))


def test_tail_flag_windows():
    n = 40
    depths = [10, 20, 30, 40]
    geometric = np.cumsum([0.5 ** k for k in range(n + 1)])
    flag, _ = tail_flag(geometric, depths)
    assert flag == "CONVERGENT"
    linear = np.arange(n + 1, dtype=float)
    flag, _ = tail_flag(linear, depths)
    assert flag == "DIVERGENT"
    flat = np.zeros(n + 1)
    flag, _ = tail_flag(flat, depths)
    assert flag == "CONVERGENT"
