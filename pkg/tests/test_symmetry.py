import json

import numpy as np
import pytest

from conjtoep.conjugation import (
    AlphaDiagonal,
    BasisSpec,
    CanonicalJ,
    Composition,
    FromBasis,
    ThetaXi,
    materialize,
)
from conjtoep.core import Window
from conjtoep.hardy import LaurentSymbol, ShiftOperator, s_toeplitz_residual, toeplitz_matrix
from conjtoep.symmetry import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    CheckConfig,
    build_xy,
    check_coefficient_equations,
    check_conjugated_toeplitz,
    check_definition,
    check_s_toeplitz_necessary,
    check_transpose_basis,
    check_xy,
    run_all,
)


def sym_z_minus_zbar():
    return LaurentSymbol({1: 1, -1: -1})


def sym_z_plus_zbar():
    return LaurentSymbol({1: 1, -1: 1})


def block_basis_columns(degree):
    n = degree + 1
    cols = np.eye(n, dtype=complex)
    cols[1:3, 1] = 1 / np.sqrt(2)
    cols[1, 2] = 1 / np.sqrt(2)
    cols[2, 2] = -1 / np.sqrt(2)
    return cols


# --- definition -------------------------------------------------------------


def test_definition_constant_passes_for_any_conjugation():
    phi = LaurentSymbol({0: 7 + 2j})
    for spec in [CanonicalJ(), ThetaXi(1.2, 0.4), Composition(0.5)]:
        res = check_definition(phi, materialize(spec, 24))
        assert res.verdict == PASS
        assert res.residual < 1e-9


def test_definition_real_symmetric_symbol_with_canonical():
    res = check_definition(sym_z_plus_zbar(), materialize(CanonicalJ(), 24))
    assert res.verdict == PASS and res.residual < 1e-13


def test_definition_coordinate_symbol_fails_decisively():
    res = check_definition(LaurentSymbol({1: 1}), materialize(CanonicalJ(), 24))
    assert res.verdict == FAIL
    assert res.residual >= 1 - 1e-12


# --- transpose basis ----------------------------------------------------------


def test_transpose_basis_twisted_pass():
    res = check_transpose_basis(sym_z_minus_zbar(), materialize(ThetaXi(np.pi, 0.0), 24))
    assert res.verdict == PASS and res.residual < 1e-12


def test_transpose_basis_twisted_fail_has_unit_entry_gap():
    res = check_transpose_basis(sym_z_plus_zbar(), materialize(ThetaXi(np.pi, 0.7), 24))
    assert res.verdict == FAIL
    assert res.residual >= 2 - 1e-10  # |phi_1 - phi_{-1} e^{-i pi}| at one entry


def test_transpose_basis_canonical_pass():
    res = check_transpose_basis(sym_z_plus_zbar(), materialize(CanonicalJ(), 24))
    assert res.verdict == PASS


# --- conjugated Toeplitz ------------------------------------------------------


def test_conjugated_toeplitz_alternating_diagonal():
    alphas = tuple(1j**n for n in range(4))
    conj = materialize(AlphaDiagonal(alphas, period=4), 24)
    res = check_conjugated_toeplitz(sym_z_minus_zbar(), conj)
    assert res.verdict == PASS
    assert res.details["is_toeplitz"]


def test_conjugated_toeplitz_even_symbol_with_canonical():
    phi = LaurentSymbol({0: 1, 2: 1, -2: 1})
    res = check_conjugated_toeplitz(phi, materialize(CanonicalJ(), 24))
    assert res.verdict == PASS


def test_conjugated_toeplitz_composition_rejects_nonconstant():
    phi = LaurentSymbol({-1: 1, 1: -1})
    res = check_conjugated_toeplitz(phi, materialize(Composition(0.5), 24))
    assert res.verdict == FAIL


# --- coefficient equations ----------------------------------------------------


def test_coefficient_equations_constant():
    res = check_coefficient_equations(LaurentSymbol({0: 3 - 1j}), materialize(ThetaXi(0.9, 0.1), 24))
    assert res.verdict == PASS and res.residual < 1e-13


def test_coefficient_equations_detects_phase_mismatch():
    res = check_coefficient_equations(sym_z_plus_zbar(), materialize(ThetaXi(2 * np.pi / 3, 0.0), 24))
    assert res.verdict == FAIL
    # definition oracle agrees
    assert check_definition(sym_z_plus_zbar(), materialize(ThetaXi(2 * np.pi / 3, 0.0), 24)).verdict == FAIL


def test_coefficient_equations_twisted_pass():
    res = check_coefficient_equations(sym_z_minus_zbar(), materialize(ThetaXi(np.pi, 1.3), 24))
    assert res.verdict == PASS and res.residual < 1e-13


# --- X(k)/Y(k) ---------------------------------------------------------------


def test_xy_canonical_encodes_coefficient_reflection():
    conj = materialize(CanonicalJ(), 24)
    assert check_xy(sym_z_plus_zbar(), conj).verdict == PASS
    assert check_xy(sym_z_minus_zbar(), conj).verdict == FAIL


def test_xy_constant_passes_every_k():
    res = check_xy(LaurentSymbol({0: 9}), materialize(ThetaXi(0.4, 0.2), 24))
    assert res.verdict == PASS
    assert all(r == 0 for r in res.details["per_k"])


def test_xy_fail_at_k_zero_with_unit_two_residual():
    res = check_xy(sym_z_plus_zbar(), materialize(ThetaXi(np.pi, 0.0), 24))
    assert res.verdict == FAIL
    assert res.details["per_k"][0] == pytest.approx(2.0, abs=1e-12)


def test_xy_matches_coefficient_equations_verdicts():
    rng = np.random.default_rng(8)
    conj_specs = [CanonicalJ(), ThetaXi(1.7, 0.3), AlphaDiagonal((1, 1j, -1, -1j))]
    for _ in range(12):
        coeffs = {int(k): complex(*rng.standard_normal(2)) for k in rng.integers(-3, 4, 4)}
        phi = LaurentSymbol(coeffs)
        spec = conj_specs[int(rng.integers(0, len(conj_specs)))]
        conj = materialize(spec, 24)
        a = check_coefficient_equations(phi, conj)
        b = check_xy(phi, conj)
        assert a.verdict == b.verdict
        assert a.residual == pytest.approx(b.residual, rel=1e-9, abs=1e-12)


def test_build_xy_shapes_and_zero_columns():
    conj = materialize(ThetaXi(0.9, 0.0), 24)
    phi = LaurentSymbol({1: 2, -1: 3})
    k = 3
    system = build_xy(conj, k, trunc=6, phi=phi, rows=k)
    assert system.x.shape == (k + 1, 6)
    assert system.y.shape == (k + 1, 6)
    # the displayed rows j <= k have zero columns beyond index k
    assert np.all(system.y[:, k:] == 0)
    np.testing.assert_array_equal(system.phi_plus, [2, 0, 0, 0, 0, 0])
    np.testing.assert_array_equal(system.phi_minus, [3, 0, 0, 0, 0, 0])


def test_build_xy_antisymmetric_pairing():
    # the (j, k) equation is minus the (k, j) equation, so extended rows are
    # consistent with the k-indexed family
    conj = materialize(AlphaDiagonal((1, np.exp(0.5j), np.exp(1.1j))), 30)
    phi = LaurentSymbol({2: 1 + 1j, -2: 0.5, 1: -2})
    a = conj.coeff

    def equation(k, j):
        lhs = sum(
            phi.coefficient(n - k).conjugate() * a[n, j] for n in range(max(0, k - 2), k + 3)
        )
        rhs = sum(phi.coefficient(n).conjugate() * a[k, n + j] for n in range(1, 3))
        rhs += sum(phi.coefficient(-l).conjugate() * a[k, j - l] for l in range(0, min(j, 2) + 1))
        return lhs - rhs

    for k, j in [(0, 1), (2, 5), (4, 3), (1, 1)]:
        assert equation(k, j) == pytest.approx(-equation(j, k), abs=1e-12)


# --- S-Toeplitz necessity ------------------------------------------------------


def test_necessity_passes_on_symmetric_pair():
    res = check_s_toeplitz_necessary(sym_z_minus_zbar(), materialize(ThetaXi(np.pi, 0.0), 24))
    assert res.verdict == PASS and res.residual < 1e-12


def test_necessity_passes_despite_asymmetry():
    res = check_s_toeplitz_necessary(LaurentSymbol({1: 1}), materialize(CanonicalJ(), 24))
    assert res.verdict == PASS and res.residual < 1e-13


def test_compression_fails_for_generic_basis_shift():
    degree = 16
    b = block_basis_columns(degree)
    s = ShiftOperator(b @ np.eye(degree + 1, k=-1) @ b.conj().T, degree, "block basis", band=3)
    t = toeplitz_matrix(LaurentSymbol({1: 1}), degree)
    residual = s_toeplitz_residual(t, s, Window.square(degree - 1 - 4))
    assert residual > 0.1


# --- run_all -------------------------------------------------------------------


def test_run_all_symmetric_instance_all_pass():
    report = run_all(sym_z_minus_zbar(), materialize(ThetaXi(np.pi, 0.0), 32))
    assert set(report.criterion_verdicts().values()) == {PASS}
    assert report.verdicts["s_toeplitz"] == PASS


def test_run_all_counterexample_fails_everywhere_but_compression():
    report = run_all(LaurentSymbol({1: 1}), materialize(CanonicalJ(), 32))
    assert set(report.criterion_verdicts().values()) == {FAIL}
    assert report.verdicts["s_toeplitz"] == PASS
    assert all(report.residuals[k] >= 1 - 1e-12 for k in report.criterion_verdicts())


def test_run_all_constant_with_dense_family():
    report = run_all(LaurentSymbol({0: 5}), materialize(Composition(0.3), 32))
    assert set(report.criterion_verdicts().values()) == {PASS}
    assert report.verdicts["s_toeplitz"] == PASS


def test_run_all_flags_basis_completion_in_report():
    cols = np.zeros((25, 2), dtype=complex)
    cols[0, 0] = 1
    cols[1, 1] = 1j
    report = run_all(sym_z_plus_zbar(), materialize(FromBasis(BasisSpec(cols, 24)), 24))
    assert any("completion" in note for note in report.notes)


def test_run_all_accepts_family_spec_and_reports_config():
    report = run_all(sym_z_plus_zbar(), CanonicalJ(), CheckConfig(degree=24))
    assert report.degree == 24
    payload = report.to_json_dict()
    again = json.loads(json.dumps(payload))
    assert again["verdicts"] == payload["verdicts"]
    assert set(again) >= {"verdicts", "residuals", "window", "tail_bound"}


def test_run_all_inconclusive_when_padding_is_capped():
    config = CheckConfig(degree=32, pad_limit=48)
    report = run_all(LaurentSymbol({0: 5}), materialize(Composition(0.6), 32), config)
    verdicts = report.criterion_verdicts()
    # exact criteria stay decisive; the windowed products cannot certify
    assert verdicts["coefficient_equations"] == PASS
    assert verdicts["xy_system"] == PASS
    assert verdicts["definition"] == INCONCLUSIVE
    assert report.tail_bound > report.tolerance.threshold(5.0)


# --- cross-criterion properties --------------------------------------------------


def _random_family(rng, degree):
    kind = rng.integers(0, 5)
    if kind == 0:
        return materialize(CanonicalJ(), degree)
    if kind == 1:
        return materialize(ThetaXi(float(rng.uniform(0, 2 * np.pi)), float(rng.uniform(0, 2 * np.pi))), degree)
    if kind == 2:
        alphas = tuple(np.exp(1j * rng.uniform(0, 2 * np.pi, 6)).tolist())
        return materialize(AlphaDiagonal(alphas, period=6), degree)
    if kind == 3:
        size = int(rng.integers(2, 5))
        cols = np.zeros((degree + 1, size), dtype=complex)
        w, _ = np.linalg.qr(rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size)))
        cols[:size, :] = w
        return materialize(FromBasis(BasisSpec(cols, degree)), degree)
    alpha = (0.15 + 0.45 * rng.random()) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    return materialize(Composition(complex(alpha)), degree)


def _random_symbol(rng, band=4):
    support = rng.integers(-band, band + 1, size=rng.integers(1, 6))
    mags = rng.uniform(0.25, 1.0, size=len(support))
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=len(support)))
    return LaurentSymbol({int(n): complex(m * p) for n, m, p in zip(support, mags, phases)})


def test_criteria_agree_on_random_instances():
    rng = np.random.default_rng(17)
    for _ in range(30):
        conj = _random_family(rng, 28)
        phi = _random_symbol(rng)
        report = run_all(phi, conj, CheckConfig(degree=28))
        assert len(set(report.criterion_verdicts().values())) == 1


def test_pass_implies_compression_pass():
    rng = np.random.default_rng(23)
    for _ in range(10):
        theta = float(rng.uniform(0, 2 * np.pi))
        minus = {-n: complex(*rng.standard_normal(2)) for n in range(1, 4)}
        coeffs = dict(minus)
        coeffs[0] = complex(*rng.standard_normal(2))
        for n in range(1, 4):
            coeffs[n] = minus[-n] * np.exp(-1j * n * theta)
        phi = LaurentSymbol(coeffs)
        report = run_all(phi, materialize(ThetaXi(theta, float(rng.uniform(0, 6))), 32))
        assert set(report.criterion_verdicts().values()) == {PASS}
        assert report.verdicts["s_toeplitz"] == PASS
        assert report.residuals["s_toeplitz"] < 1e-10


def test_symmetric_symbols_form_a_linear_space():
    rng = np.random.default_rng(31)
    theta = 2.2
    conj = materialize(ThetaXi(theta, 0.5), 32)

    def symmetric_symbol():
        minus = {-n: complex(*rng.standard_normal(2)) for n in range(1, 4)}
        coeffs = dict(minus)
        coeffs[0] = complex(*rng.standard_normal(2))
        for n in range(1, 4):
            coeffs[n] = minus[-n] * np.exp(-1j * n * theta)
        return LaurentSymbol(coeffs)

    for _ in range(5):
        phi, psi = symmetric_symbol(), symmetric_symbol()
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        combo = phi.scaled(a).plus(psi.scaled(b))
        report = run_all(combo, conj)
        assert set(report.criterion_verdicts().values()) == {PASS}


def test_verdicts_stable_under_degree_doubling():
    rng = np.random.default_rng(37)
    for _ in range(6):
        phi = _random_symbol(rng, band=3)
        spec = ThetaXi(float(rng.uniform(0, 2 * np.pi)), 0.0)
        small = run_all(phi, materialize(spec, 24))
        large = run_all(phi, materialize(spec, 48))
        assert small.criterion_verdicts() == large.criterion_verdicts()
