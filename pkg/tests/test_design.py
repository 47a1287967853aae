import math

import numpy as np
import pytest

from nooncav import (
    N2_MODEL,
    N4_MODEL,
    N4_VARIANT_MODEL,
    ParamsN2,
    ParamsN4,
    UNIT_COUPLING,
    build_space,
    condition_delta2,
    continuation_curve_n4,
    flow_graph,
    ges_energy_n2,
    hamiltonian,
    one_photon_eigensystem,
    requirement_residuals_n4,
    solve_ges_n2,
    solve_ges_n4,
)
from nooncav.design import ANCHOR_PARAMS, energy_forms_n4, h_2p_matrix

SQRT2 = math.sqrt(2)


def test_condition_values():
    # branch roots at delta1 = 1 and the strong-blockade point at delta1 = 5
    assert condition_delta2(1.0, UNIT_COUPLING, -1) == pytest.approx(-0.207, abs=5e-4)
    assert condition_delta2(1.0, UNIT_COUPLING, +1) == pytest.approx(1.207, abs=5e-4)
    assert condition_delta2(5.0, UNIT_COUPLING, -1) == pytest.approx(-0.0495, abs=5e-5)
    # closed form: exact values
    assert condition_delta2(1.0, UNIT_COUPLING, -1) == pytest.approx((1 - SQRT2) / 2, abs=1e-15)


def test_condition_requires_positive_coupling():
    with pytest.raises(ValueError):
        condition_delta2(1.0, 0.0, -1)
    with pytest.raises(ValueError):
        condition_delta2(1.0, UNIT_COUPLING, 2)


@pytest.mark.parametrize("delta1", [0.0, 1.0, 5.0, -2.3])
@pytest.mark.parametrize("s", [-1, +1])
def test_ges_matches_numeric_diagonalization(delta1, s):
    p = ParamsN2(j=1.7, delta1=delta1, delta2=condition_delta2(delta1, UNIT_COUPLING, s))
    sol = solve_ges_n2(p, s)
    vals, vecs = np.linalg.eigh(h_2p_matrix(p))
    k = int(np.argmin(np.abs(vals - sol.energy)))
    assert vals[k] == pytest.approx(sol.energy, abs=1e-10)
    assert abs(vecs[:, k] @ sol.state) == pytest.approx(1.0, abs=1e-10)


def test_ges_branch_minus_delta1_one():
    p = ParamsN2(j=2.0, delta1=1.0, delta2=condition_delta2(1.0, UNIT_COUPLING, -1))
    sol = solve_ges_n2(p, -1)
    assert sol.energy == pytest.approx(1 - SQRT2, abs=1e-14)
    assert sol.energy == pytest.approx(2 * p.delta2, abs=1e-14)
    assert sol.state[2] == 0.0  # no |G,11> component


def test_ges_symmetric_point_amplitudes():
    # delta1 = 0: numeric diagonalization gives equal thirds and tan(phi) = +-sqrt(2)
    for s in (-1, +1):
        p = ParamsN2(j=1.0, delta1=0.0, delta2=condition_delta2(0.0, UNIT_COUPLING, s))
        sol = solve_ges_n2(p, s)
        assert sol.energy == pytest.approx(s * 1.0, abs=1e-14)  # +-sqrt(2) g2p
        assert math.tan(sol.mixing_angle) == pytest.approx(s * SQRT2, abs=1e-12)
        a_b, a_20, _, a_02 = sol.state
        assert a_b**2 == pytest.approx(1 / 3, abs=1e-12)
        assert a_20**2 == pytest.approx(1 / 3, abs=1e-12)
        assert a_02**2 == pytest.approx(1 / 3, abs=1e-12)


def test_solution_independent_of_tunneling():
    d2 = condition_delta2(1.0, UNIT_COUPLING, -1)
    sols = [
        solve_ges_n2(ParamsN2(j=j, delta1=1.0, delta2=d2), -1) for j in (1.0, 5.0)
    ]
    assert sols[0].energy == sols[1].energy
    assert sols[0].mixing_angle == sols[1].mixing_angle
    assert np.array_equal(sols[0].state, sols[1].state)
    # the other two-photon eigenvalues do move with J
    others = []
    for j in (1.0, 5.0):
        vals = np.linalg.eigvalsh(h_2p_matrix(ParamsN2(j=j, delta1=1.0, delta2=d2)))
        others.append(np.delete(vals, np.argmin(np.abs(vals - sols[0].energy))))
    assert np.max(np.abs(others[0] - others[1])) > 0.5


def test_destructive_interference_identity():
    for s in (-1, +1):
        p = ParamsN2(j=3.0, delta1=0.8, delta2=condition_delta2(0.8, UNIT_COUPLING, s))
        sol = solve_ges_n2(p, s)
        assert p.j * (sol.state[1] + sol.state[3]) == 0.0


def test_condition_violation_rejected_with_residual():
    p = ParamsN2(j=2.0, delta1=1.0, delta2=0.0)
    with pytest.raises(ValueError, match="residual"):
        solve_ges_n2(p, -1)


def test_one_photon_eigensystem_symmetric():
    p = ParamsN2(j=1.4, delta1=0.6, delta2=0.6)
    sys = one_photon_eigensystem(p)
    assert sys.phi == pytest.approx(math.pi / 4)
    assert sys.e_plus == pytest.approx(0.6 + 1.4)
    assert sys.e_minus == pytest.approx(0.6 - 1.4)


def test_one_photon_eigensystem_cross_check():
    p = ParamsN2(j=2.0, delta1=1.0, delta2=condition_delta2(1.0, UNIT_COUPLING, -1))
    sys = one_photon_eigensystem(p)
    splitting = math.sqrt((p.delta1 - p.delta2) ** 2 + 4 * p.j**2)
    assert sys.splitting == pytest.approx(splitting, abs=1e-12)
    vals = np.linalg.eigvalsh(np.array([[p.delta1, p.j], [p.j, p.delta2]]))
    assert sys.e_minus == pytest.approx(vals[0], abs=1e-12)
    assert sys.e_plus == pytest.approx(vals[1], abs=1e-12)


def test_one_photon_depends_on_j_while_ges_does_not():
    d2 = condition_delta2(1.0, UNIT_COUPLING, -1)
    e1 = one_photon_eigensystem(ParamsN2(j=1.0, delta1=1.0, delta2=d2)).e_plus
    e2 = one_photon_eigensystem(ParamsN2(j=2.0, delta1=1.0, delta2=d2)).e_plus
    assert abs(e1 - e2) > 0.5
    assert ges_energy_n2(1.0, UNIT_COUPLING, -1) == ges_energy_n2(1.0, UNIT_COUPLING, -1)


def test_one_photon_rejects_decoupled():
    with pytest.raises(ValueError, match="J=0"):
        one_photon_eigensystem(ParamsN2(j=0.0, delta1=1.0, delta2=0.0))


# ---------------------------------------------------------------------------
# Flow graph
# ---------------------------------------------------------------------------

def _graph_for(p, model, n_max):
    space = build_space(model, n_max)
    return flow_graph(hamiltonian(p, space))


def test_flow_graph_n2_candidate():
    p = ParamsN2(j=2.0, delta1=1.0, delta2=-0.2)
    graph = _graph_for(p, N2_MODEL, 2)
    target = [lab for lab in graph.incoming_path_count if lab.n1 == 1][0]
    assert graph.incoming_path_count[target] == 2
    assert graph.candidate


def test_flow_graph_n4_candidate():
    p = ParamsN4(j=1.6, delta1=-0.8, delta2=1.9, delta_b=2.7, g2=1.4)
    graph = _graph_for(p, N4_MODEL, 4)
    assert sorted(graph.incoming_path_count.values()) == [2, 2, 2]
    assert graph.candidate


def test_flow_graph_variant_not_candidate():
    p = ParamsN4(j=1.6, delta1=-0.8, delta2=1.9, delta_b=2.7, g2=1.4, variant=True)
    graph = _graph_for(p, N4_VARIANT_MODEL, 4)
    blocking = graph.blocking_states()
    assert not graph.candidate
    assert len(blocking) == 1
    assert (blocking[0].n1, blocking[0].n2) == (1, 3)


def test_flow_graph_structure_is_parameter_free():
    rng = np.random.default_rng(20240811)
    for _ in range(20):
        j, d1, d2, db = rng.uniform(0.2, 5.0, 4)
        g1, g2 = rng.uniform(0.2, 3.0, 2)
        assert _graph_for(
            ParamsN2(j=j, delta1=d1, delta2=d2, g2p=g1), N2_MODEL, 2
        ).candidate
        assert _graph_for(
            ParamsN4(j=j, delta1=d1, delta2=d2, delta_b=db, g1=g1, g2=g2),
            N4_MODEL,
            4,
        ).candidate
        assert not _graph_for(
            ParamsN4(j=j, delta1=d1, delta2=d2, delta_b=db, g1=g1, g2=g2, variant=True),
            N4_VARIANT_MODEL,
            4,
        ).candidate


# ---------------------------------------------------------------------------
# Conditioned eigenvalue problem (two-dot system)
# ---------------------------------------------------------------------------

def test_solve_anchor_matches_published_point():
    sol = solve_ges_n4(2.0)
    assert sol is not None
    for value, published in zip(sol.params, ANCHOR_PARAMS):
        assert value == pytest.approx(published, abs=0.02)
    assert sol.residual <= 1e-9


def test_solution_satisfies_noon_form():
    sol = solve_ges_n4(2.0)
    for key in ("G,31", "G,22", "G,13"):
        assert abs(sol.amplitudes[key]) <= 1e-9
    a40, a04 = sol.amplitudes["G,40"], sol.amplitudes["G,04"]
    assert abs(abs(a40) - abs(a04)) <= 1e-9
    assert a40 * a04 < 0  # opposite signs: the (|40> - |04>) superposition
    norm = sum(v**2 for v in sol.amplitudes.values())
    assert norm == pytest.approx(1.0, abs=1e-12)


def test_energy_closed_forms_agree():
    for ratio in (1.8, 2.0, 2.6):
        sol = solve_ges_n4(ratio)
        e1, e2 = energy_forms_n4(sol.params, ratio)
        assert abs(e1 - sol.energy) <= 1e-9
        assert abs(e2 - sol.energy) <= 1e-9


def test_no_solution_below_threshold():
    assert solve_ges_n4(1.5) is None
    assert solve_ges_n4(1.6) is None


def test_ratio_below_symmetry_range_rejected():
    with pytest.raises(ValueError, match="ratio"):
        solve_ges_n4(0.8)


def test_requirement_residuals_detect_detuned_point():
    sol = solve_ges_n4(2.0)
    res = requirement_residuals_n4(sol.params, 2.0)
    assert np.max(np.abs(res)) <= 1e-9
    perturbed = (sol.j, sol.delta1, sol.delta2, sol.delta_b + 0.1)
    res_off = requirement_residuals_n4(perturbed, 2.0)
    assert np.max(np.abs(res_off)) > 1e-3


def test_requirement_residuals_decoupled_limit():
    # with J = 0 the tunneling terms drop out of the interference sums
    from nooncav.design import _sector_eigenvector

    params = (0.0, 0.3, 0.9, 1.1)
    amp, _, _ = _sector_eigenvector(params, 1.4)
    res = requirement_residuals_n4(params, 1.4)
    g1 = UNIT_COUPLING
    g2 = 1.4 * UNIT_COUPLING
    assert res[0] == pytest.approx(math.sqrt(6) * g2 * amp("B2", 1, 1), abs=1e-14)
    assert res[2] == pytest.approx(math.sqrt(6) * g1 * amp("B1", 1, 1), abs=1e-14)


def test_continuation_curve_continuity():
    ratios = np.arange(1.74, 3.0001, 0.05)
    curve = continuation_curve_n4(ratios)
    sols = [sol for _, sol in curve]
    assert all(sol is not None for sol in sols)
    params = np.array([sol.params for sol in sols])
    jumps = np.abs(np.diff(params, axis=0))
    assert jumps.max() < 0.2
