import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nooncav import (
    N2_MODEL,
    N4_MODEL,
    N4_VARIANT_MODEL,
    ParamsN2,
    ParamsN4,
    annihilator,
    build_space,
    hamiltonian,
    projector,
    total_excitation_operator,
)


def test_space_dimensions():
    assert build_space(N2_MODEL, 2).dim == 18
    assert build_space(N2_MODEL, 4).dim == 50
    assert build_space(N4_MODEL, 4).dim == 100


def test_truncation_below_target_rejected():
    with pytest.raises(ValueError, match="n_max >= 2"):
        build_space(N2_MODEL, 1)
    with pytest.raises(ValueError, match="n_max >= 4"):
        build_space(N4_MODEL, 3)


def test_annihilator_single_cavity_block():
    space = build_space(N2_MODEL, 2)
    a = annihilator(space, 1).mat
    i0 = space.index_of("G", 0, 0)
    i1 = space.index_of("G", 1, 0)
    block = a[np.ix_([i0, i1], [i0, i1])]
    assert np.allclose(block, [[0.0, 1.0], [0.0, 0.0]])


def test_annihilator_ladder_rule():
    space = build_space(N2_MODEL, 4)
    a = annihilator(space, 1).mat
    assert a[space.index_of("G", 2, 0), space.index_of("G", 3, 0)] == pytest.approx(
        math.sqrt(3)
    )
    vac = space.basis_vector("G", 0, 0)
    assert np.all(a @ vac == 0)


def test_annihilator_commutator_below_truncation():
    space = build_space(N2_MODEL, 3)
    for cav in (1, 2):
        a = annihilator(space, cav).mat
        comm = a @ a.conj().T - a.conj().T @ a
        for i, lab in enumerate(space.labels):
            n = lab.n1 if cav == 1 else lab.n2
            expected = 1.0 if n < space.n_max else -space.n_max
            assert comm[i, i] == pytest.approx(expected)


def test_creation_powers_norm():
    space = build_space(N2_MODEL, 4)
    adag = annihilator(space, 1).mat.conj().T
    vac = space.basis_vector("G", 0, 0)
    vec = vac
    for k in range(1, space.n_max + 1):
        vec = adag @ vec
        assert np.linalg.norm(vec) == pytest.approx(math.sqrt(math.factorial(k)))
        vec = vec / np.linalg.norm(vec) * math.sqrt(math.factorial(k))


def test_projector_completeness_and_algebra():
    space = build_space(N2_MODEL, 2)
    pgg = projector(space, "G", "G").mat
    pbb = projector(space, "B", "B").mat
    assert np.allclose(pgg + pbb, np.eye(space.dim))
    pgb = projector(space, "G", "B").mat  # |B><G|
    pbg = projector(space, "B", "G").mat  # |G><B|
    assert np.allclose(pgb @ pbg, pbb)
    assert np.trace(pbb).real == pytest.approx(space.dim / 2)


def test_projector_unknown_label_rejected():
    space = build_space(N2_MODEL, 2)
    with pytest.raises(ValueError, match="not in model"):
        projector(space, "B1", "G")


def test_total_excitation_entries():
    space2 = build_space(N2_MODEL, 2)
    n2 = total_excitation_operator(space2).mat
    assert n2[space2.index_of("B", 0, 0), space2.index_of("B", 0, 0)] == 2
    assert n2[space2.index_of("G", 0, 0), space2.index_of("G", 0, 0)] == 0
    space4 = build_space(N4_MODEL, 4)
    n4 = total_excitation_operator(space4).mat
    assert n4[space4.index_of("Q", 0, 0), space4.index_of("Q", 0, 0)] == 4


def test_basis_ordering_deterministic():
    a = build_space(N4_MODEL, 5)
    b = build_space(N4_MODEL, 5)
    assert a.labels == b.labels
    assert a == b


@settings(max_examples=25, deadline=None)
@given(
    j=st.floats(0.0, 10.0),
    d1=st.floats(-5.0, 5.0),
    d2=st.floats(-5.0, 5.0),
    db=st.floats(-3.0, 3.0),
    g2=st.floats(0.1, 3.0),
)
def test_hamiltonians_commute_with_total_excitation(j, d1, d2, db, g2):
    p2 = ParamsN2(j=j, delta1=d1, delta2=d2)
    space2 = build_space(N2_MODEL, 3)
    h2 = hamiltonian(p2, space2).mat
    n2 = total_excitation_operator(space2).mat
    assert np.max(np.abs(n2 @ h2 - h2 @ n2)) < 1e-12
    for variant, model in ((False, N4_MODEL), (True, N4_VARIANT_MODEL)):
        p4 = ParamsN4(j=j, delta1=d1, delta2=d2, delta_b=db, g2=g2, variant=variant)
        space4 = build_space(model, 4)
        h4 = hamiltonian(p4, space4).mat
        n4 = total_excitation_operator(space4).mat
        assert np.max(np.abs(n4 @ h4 - h4 @ n4)) < 1e-12
