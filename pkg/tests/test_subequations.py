"""Jet-space constraint semantics: axioms, fibres, completeness, stability."""

import numpy as np
import pytest

from jetcones.cones import ContainingCone, HalfSpaceList, OracleSet, Subspace, stab_membership
from jetcones.jets import (
    Jet2,
    JetHalfSpace,
    JetOperator,
    SymMatrix,
    iso_vectors_to_matrices,
    jacobi_eigensystem,
    min_eig_batch,
    min_eigenvalue,
    op_to_vec,
    pair,
    sym_dim,
)
from jetcones.subequations import (
    CompletenessReport,
    EmptyFibre,
    SpecDomainError,
    SubequationSpec,
    decomposition_check,
    diagonal_entry_spec,
    diagonal_pair_spec,
    fewer_variables,
    fibre,
    laplacian_spec,
    psd_spec,
    sample_stable,
    second_order_complete,
    validate,
)


def _random_psd(rng, n, rank=None):
    b = rng.normal(size=(rank or n, n))
    return b.T @ b


def _jet(rng, n, a):
    return Jet2(float(rng.normal()), rng.normal(size=n), SymMatrix.from_full(a))


# ---------------------------------------------------------------------------
# batch eigenvalue helpers (dual route against the Jacobi path)


def test_min_eig_batch_matches_jacobi():
    rng = np.random.default_rng(11)
    for n in (1, 2, 3):
        mats = np.array([_random_psd(rng, n) - rng.uniform(0, 2) * np.eye(n) for _ in range(50)])
        got = min_eig_batch(mats)
        want = np.array([jacobi_eigensystem(m)[0][0] for m in mats])
        assert np.max(np.abs(got - want)) <= 1e-10


def test_iso_vector_roundtrip_batch():
    rng = np.random.default_rng(12)
    for n in (2, 3, 4):
        mats = [_random_psd(rng, n) - np.eye(n) for _ in range(20)]
        packed = np.array([SymMatrix.from_full(m).iso_vector() for m in mats])
        back = iso_vectors_to_matrices(n, packed)
        assert np.max(np.abs(back - np.array(mats))) <= 1e-12


# ---------------------------------------------------------------------------
# construction and validation


def test_spec_kinds_are_checked():
    with pytest.raises(SpecDomainError):
        SubequationSpec(2, "mystery")
    with pytest.raises(SpecDomainError):
        SubequationSpec(2, "halfspace_list", [])
    with pytest.raises(SpecDomainError):
        SubequationSpec(2, "oracle")


def test_validate_named_fixtures():
    for spec in (laplacian_spec(2), diagonal_entry_spec(2, 0), diagonal_pair_spec()):
        rep = validate(spec)
        assert all(rep[key] for key in ("positivity", "negativity", "topological", "proper", "nonempty"))


def test_validate_flags_negative_symbol():
    op = JetOperator(0.0, np.zeros(2), SymMatrix.from_full(np.diag([-1.0, 0.0])))
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(op, 0.0)])
    rep = validate(spec)
    assert not rep["positivity"]
    w = rep["positivity_witness"]
    assert w["halfspace"] == 0 and w["eigenvalue"] < -0.5


def test_validate_flags_positive_value_coefficient():
    op = JetOperator(1.0, np.zeros(2), SymMatrix.eye(2))
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(op, 0.0)])
    rep = validate(spec)
    assert rep["positivity"]
    assert not rep["negativity"]
    assert rep["negativity_witness"]["c"] == 1.0


def test_validate_flags_empty_and_thin_sets():
    up = JetOperator(0.0, np.array([1.0, 0.0]), SymMatrix.zeros(2))
    down = JetOperator(0.0, np.array([-1.0, 0.0]), SymMatrix.zeros(2))
    thin = SubequationSpec(2, "halfspace_list", [JetHalfSpace(up, 0.0), JetHalfSpace(down, 0.0)])
    rep = validate(thin)
    assert rep["nonempty"] and not rep["topological"]

    empty = SubequationSpec(
        2, "halfspace_list", [JetHalfSpace(up, 1.0), JetHalfSpace(down, 0.0)]
    )
    rep = validate(empty)
    assert not rep["nonempty"]


def test_validate_psd_sampled_axioms():
    rep = validate(psd_spec(2), k=32, rng=np.random.default_rng(3))
    assert all(rep[key] for key in ("positivity", "negativity", "topological", "proper", "nonempty"))


def test_plane_fixture_has_no_jet_semantics():
    spec = SubequationSpec(2, "builtin_parabola_a9")
    with pytest.raises(SpecDomainError):
        spec.rep
    with pytest.raises(SpecDomainError):
        validate(spec)
    with pytest.raises(SpecDomainError):
        sample_stable(spec, 3)


# ---------------------------------------------------------------------------
# fibres


def test_fibre_matches_direct_pairing():
    rng = np.random.default_rng(21)
    ops = [
        JetOperator(-0.5, np.array([1.0, 0.0]), SymMatrix.from_full(np.diag([2.0, 0.0]))),
        JetOperator(0.0, np.array([0.0, -1.0]), SymMatrix.eye(2)),
    ]
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(op, 0.3) for op in ops])
    for _ in range(40):
        r = float(rng.normal())
        p = rng.normal(size=2)
        a = _random_psd(rng, 2) - rng.uniform(0, 1) * np.eye(2)
        fib = fibre(spec, r, p)
        if isinstance(fib, EmptyFibre):
            continue
        jet = Jet2(r, p, SymMatrix.from_full(a))
        direct = all(pair(op, jet) >= 0.3 - 1e-9 for op in ops)
        assert fib.member(SymMatrix.from_full(a).iso_vector()) == direct


def test_fibre_offset_tracks_value_coefficient():
    op = JetOperator(-1.0, np.zeros(2), SymMatrix.eye(2))
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(op, 0.0)])
    fib = fibre(spec, 2.0, np.zeros(2))
    assert fib.member(SymMatrix.eye(2).iso_vector())
    assert not fib.member((SymMatrix.eye(2) * 0.9).iso_vector())


def test_fibre_empty_marker_and_dropped_rows():
    op = JetOperator(0.0, np.array([1.0, 0.0]), SymMatrix.zeros(2))
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(op, 1.0)])
    fib = fibre(spec, 0.0, np.zeros(2))
    assert isinstance(fib, EmptyFibre)
    assert fib.d == sym_dim(2)

    fib = fibre(spec, 0.0, np.array([2.0, 0.0]))
    assert isinstance(fib, HalfSpaceList)
    assert not fib.items
    assert fib.member(np.array([-5.0, 3.0, 4.0]))


def test_fibre_psd_oracle():
    spec = psd_spec(2)
    fib = fibre(spec, 0.7, np.array([1.0, -1.0]))
    assert isinstance(fib, OracleSet)
    assert fib.member(SymMatrix.from_full(np.diag([1.0, 0.5])).iso_vector())
    assert not fib.member(SymMatrix.from_full(np.diag([1.0, -0.5])).iso_vector())


def test_fibre_oracle_kind_slices_the_base_set():
    base = psd_spec(2).rep
    spec = SubequationSpec(2, "oracle", oracle=base)
    fib = fibre(spec, 0.0, np.zeros(2))
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = _random_psd(rng, 2) - rng.uniform(0, 1.5) * np.eye(2)
        want = min_eigenvalue(a) >= -1e-9
        assert fib.member(SymMatrix.from_full(a).iso_vector()) == want


# ---------------------------------------------------------------------------
# completeness and variable reduction


def test_completeness_of_named_fixtures():
    rng = np.random.default_rng(31)
    report = second_order_complete(laplacian_spec(2), samples=32, rng=rng)
    assert isinstance(report, CompletenessReport)
    assert report.complete
    assert report.common_kernel.dim == 0
    assert report.reduced_subspace.dim == 2
    assert report.kernel_cross_check_mismatches == 0
    assert report.fibre_verdicts_agree

    report = second_order_complete(diagonal_pair_spec(), samples=32, rng=rng)
    assert report.complete

    report = second_order_complete(psd_spec(2), samples=16, rng=rng)
    assert report.complete
    assert report.kernel_cross_check_mismatches == 0


def test_incomplete_fixture_has_kernel_witness():
    report = second_order_complete(diagonal_entry_spec(2, 0), samples=32)
    assert not report.complete
    assert report.common_kernel.dim == 1
    e = report.witness_e
    assert abs(abs(e[1]) - 1.0) <= 1e-10 and abs(e[0]) <= 1e-10
    assert report.kernel_cross_check_mismatches == 0
    # the witness direction is exactly the one the fibres never read
    w = report.reduced_subspace
    assert w.dim == 1 and w.contains(np.array([1.0, 0.0]))


def test_completeness_requires_positivity():
    op = JetOperator(0.0, np.zeros(2), SymMatrix.from_full(np.diag([-1.0, 1.0])))
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(op, 0.0)])
    with pytest.raises(ValueError):
        second_order_complete(spec)


def test_completeness_matches_stable_sample_ellipticity():
    # kernel verdict against the sampled route: complete exactly when every
    # strictly positive mixture has a definite symbol
    rng = np.random.default_rng(41)
    seen = {True: 0, False: 0}
    for trial in range(30):
        n = 2
        m = int(rng.integers(1, 4))
        halfspaces = []
        for _ in range(m):
            rank = int(rng.integers(1, n + 1))
            sym = _random_psd(rng, n, rank=rank)
            op = JetOperator(
                -float(rng.uniform(0, 1)), rng.normal(size=n), SymMatrix.from_full(sym)
            )
            halfspaces.append(JetHalfSpace(op, float(rng.normal() * 0.3)))
        spec = SubequationSpec(n, "halfspace_list", halfspaces)
        report = second_order_complete(spec, samples=16, rng=np.random.default_rng(trial))
        stable = sample_stable(spec, 20, rng=np.random.default_rng(trial + 100))
        elliptic = all(min_eigenvalue(op.a.full()) > 1e-10 for op, _ in stable)
        assert report.complete == elliptic
        assert report.kernel_cross_check_mismatches == 0
        assert report.fibre_verdicts_agree
        seen[report.complete] += 1
    assert seen[True] >= 5 and seen[False] >= 5


def test_fewer_variables_examples():
    w = fewer_variables(diagonal_entry_spec(2, 0))
    assert w.dim == 1 and w.contains(np.array([1.0, 0.0]))

    assert fewer_variables(laplacian_spec(2)).dim == 2
    assert fewer_variables(psd_spec(3)).dim == 3

    gradient_only = JetOperator(0.0, np.array([0.0, 1.0]), SymMatrix.zeros(2))
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(gradient_only, 0.0)])
    assert fewer_variables(spec).dim == 0


# ---------------------------------------------------------------------------
# stable samples


def test_sample_stable_halfspace_mixtures():
    spec = diagonal_pair_spec()
    cone = ContainingCone(spec.d, spec.rep.items)
    for op, lam in sample_stable(spec, 25, rng=np.random.default_rng(51)):
        assert lam == 0.0
        assert min_eigenvalue(op.a.full()) > 0.04
        assert cone.contains_pair(op_to_vec(op), lam)


def test_sample_stable_tracks_thresholds():
    ops = [
        JetOperator(0.0, np.zeros(2), SymMatrix.eye(2)),
        JetOperator(-0.25, np.array([0.5, 0.0]), SymMatrix.from_full(np.diag([1.0, 3.0]))),
    ]
    spec = SubequationSpec(2, "halfspace_list", [JetHalfSpace(ops[0], 1.0), JetHalfSpace(ops[1], -2.0)])
    cone = ContainingCone(spec.d, spec.rep.items)
    for op, lam in sample_stable(spec, 15, rng=np.random.default_rng(52)):
        assert -2.0 < lam < 1.0
        assert cone.contains_pair(op_to_vec(op), lam)


def test_sample_stable_psd_mixtures_are_definite_and_containing():
    rng = np.random.default_rng(53)
    samples = sample_stable(psd_spec(2), 10, rng=rng)
    for op, lam in samples:
        assert lam == 0.0
        assert min_eigenvalue(op.a.full()) > 0.0
        assert float(np.linalg.norm(op.b)) == 0.0 and op.c == 0.0
        for _ in range(20):
            a = _random_psd(rng, 2)
            assert pair(op, _jet(rng, 2, a)) >= -1e-12


def test_sample_stable_psd_passes_oracle_stability():
    op, _ = sample_stable(psd_spec(2), 1, rng=np.random.default_rng(54))[0]
    assert stab_membership(op_to_vec(op), psd_spec(2).rep)


# ---------------------------------------------------------------------------
# decomposition


def test_decomposition_psd_interior_and_exterior():
    rng = np.random.default_rng(61)
    spec = psd_spec(2)
    stable = sample_stable(spec, 40, rng=rng)
    inside = [_jet(rng, 2, _random_psd(rng, 2)) for _ in range(30)]
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    outside = [
        (_jet(rng, 2, q @ np.diag([1.0, -1.0]) @ q.T), 1.0),
        (_jet(rng, 2, np.diag([0.2, -0.5])), 0.5),
        (_jet(rng, 2, -np.eye(2)), 1.0),
    ]
    report = decomposition_check(spec, stable, inside, outside, rng=rng)
    assert report["ok"]
    assert not report["inside_failures"]
    for row in report["outside"]:
        assert row["excluded"] and row["escalations"] <= 3
        assert row["violation"] < -1e-9


def test_decomposition_trace_detects_immediately():
    rng = np.random.default_rng(62)
    spec = laplacian_spec(2)
    stable = sample_stable(spec, 10, rng=rng)
    inside = [_jet(rng, 2, _random_psd(rng, 2)) for _ in range(20)]
    bad = _jet(rng, 2, np.diag([0.35, -0.65]))
    report = decomposition_check(spec, stable, inside, [(bad, 0.3)], rng=rng)
    assert report["ok"]
    assert report["outside"][0]["escalations"] == 0


def test_decomposition_reports_inside_violations():
    rng = np.random.default_rng(63)
    spec = psd_spec(2)
    stable = sample_stable(spec, 30, rng=rng)
    bad = _jet(rng, 2, np.diag([1.0, -1.0]))
    report = decomposition_check(spec, stable, [bad], [], rng=rng)
    assert not report["ok"]
    assert report["inside_failures"] and report["inside_failures"][0]["index"] == 0
