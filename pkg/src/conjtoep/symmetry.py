"""Five mutually verifying complex-symmetry criteria for Toeplitz truncations.

For a symbol ``phi`` and a conjugation ``C`` with factorization ``C = U J``
the following are equivalent for the untruncated operators, and each is
implemented here as an independent numerical check:

- ``definition``: the defining identity ``C T* C = T``, evaluated by
  applying the anti-linear composition columnwise (the brute-force oracle);
- ``transpose_basis``: the matrix of T in the basis ``f_n = U z^n`` equals
  the transpose of its canonical Toeplitz matrix;
- ``conjugated_toeplitz``: ``U^H T U`` is again Toeplitz and equals the
  transposed Toeplitz matrix;
- ``coefficient_equations``: the two-sided coefficient identities in the
  conjugation's ``c_{n,m}`` scheme, one equation per pair ``(j, k)``;
- ``xy_system``: the same identities packaged as the linear systems
  ``X(k) Phi+ = Y(k) Phi-``.

A sixth check (``s_toeplitz``) verifies the necessary shift-compression
condition ``S^H T S = T`` with ``S = C M_z C``; it can pass for symbols that
are not symmetric and is never counted toward criterion agreement.

Verdicts are tail-aware.  Banded conjugations give exact finite sums.  Dense
conjugations are re-materialized at an internally padded degree until the
Parseval tail of the dropped columns is negligible at the requested
tolerance; when the padding cap is hit, verdicts inside the remaining
ambiguity band degrade to ``inconclusive`` rather than guessing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .conjugation import Conjugation, materialize, working_coefficients
from .core import (
    ConjtoepError,
    ExactnessError,
    Tolerance,
    DEFAULT_TOLERANCE,
    Window,
)
from .hardy import LaurentSymbol, is_toeplitz, toeplitz_matrix

__all__ = [
    "PASS",
    "FAIL",
    "INCONCLUSIVE",
    "CheckConfig",
    "CriterionResult",
    "XYSystem",
    "SymmetryReport",
    "CriterionDisagreement",
    "definition_residual",
    "check_definition",
    "check_transpose_basis",
    "check_conjugated_toeplitz",
    "check_coefficient_equations",
    "build_xy",
    "check_xy",
    "check_s_toeplitz_necessary",
    "run_all",
]

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

CRITERIA = (
    "definition",
    "transpose_basis",
    "conjugated_toeplitz",
    "coefficient_equations",
    "xy_system",
)

# Conservative multiplier turning a measured column tail into a bound on the
# truncation error of any of the windowed two-sided products used below.
_TAIL_FACTOR = 6.0


class CriterionDisagreement(ConjtoepError):
    """Two criteria proven equivalent returned opposite decisive verdicts.

    This is always a library defect, never a property of the input; the
    diagnostic dump identifies the instance.
    """

    def __init__(self, message: str, dump: dict):
        super().__init__(message)
        self.dump = dump


@dataclass(frozen=True)
class CheckConfig:
    """Degrees, ranges, and tolerances for a criterion run.

    ``window`` and ``jk_max`` default to computed exactness-respecting
    ranges; ``pad_limit`` caps the internal degree used to tame dense
    conjugation tails.
    """

    degree: int = 32
    jk_max: int | None = None
    window: int | None = None
    tolerance: Tolerance = DEFAULT_TOLERANCE
    pad_limit: int = 4096


@dataclass(frozen=True)
class CriterionResult:
    verdict: str
    residual: float
    tail_bound: float = 0.0
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class XYSystem:
    """Truncated matrices and coefficient vectors of one k-indexed system."""

    k: int
    x: np.ndarray
    y: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray


@dataclass(frozen=True)
class SymmetryReport:
    verdicts: dict
    residuals: dict
    window: Window
    tolerance: Tolerance
    tail_bound: float
    jk_max: int
    degree: int
    work_degree: int
    notes: tuple = ()
    details: dict = field(default_factory=dict)

    def criterion_verdicts(self) -> dict:
        return {k: v for k, v in self.verdicts.items() if k in CRITERIA}

    def overall(self) -> str:
        core = self.criterion_verdicts().values()
        if any(v == FAIL for v in core):
            return FAIL
        if any(v == INCONCLUSIVE for v in core):
            return INCONCLUSIVE
        return PASS

    def to_json_dict(self) -> dict:
        return {
            "verdicts": dict(self.verdicts),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "window": [self.window.max_row, self.window.max_col],
            "tolerance": {
                "absolute": self.tolerance.absolute,
                "relative": self.tolerance.relative,
            },
            "tail_bound": float(self.tail_bound),
            "jk_max": self.jk_max,
            "degree": self.degree,
            "work_degree": self.work_degree,
            "notes": list(self.notes),
            "details": _jsonable(self.details),
        }


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _decide(residual: float, threshold: float, tail: float) -> str:
    if tail <= threshold:
        return PASS if residual <= threshold + tail else FAIL
    if residual > threshold + tail:
        return FAIL
    if residual > threshold:
        return INCONCLUSIVE
    return PASS


@dataclass(frozen=True)
class _Plan:
    """Shared working data for one (symbol, conjugation) instance."""

    phi: LaurentSymbol
    conj: Conjugation
    tolerance: Tolerance
    scale: float
    threshold: float
    degree: int
    window: int
    jk_max: int
    a_work: np.ndarray
    t_work: np.ndarray
    work_degree: int
    tail: float
    tail_bound: float


def _make_plan(phi: LaurentSymbol, conj: Conjugation, config: CheckConfig | None) -> _Plan:
    config = config or CheckConfig()
    tol = config.tolerance
    n = conj.degree
    band = phi.band
    scale = max(1.0, phi.l1_norm())
    threshold = tol.threshold(scale)

    band_c = conj.band
    if band_c is not None:
        w_limit = n - (2 * band_c + band)
        window = w_limit if config.window is None else config.window
        if window > w_limit:
            raise ExactnessError("exactness window violated")
        if window < band or window < 0:
            raise ConjtoepError("degree too small for the requested band")
        a_work, work_degree, tail = conj.coeff, n, 0.0
    else:
        window = min(8, n - band - 2) if config.window is None else config.window
        if window < band or window < 0:
            raise ConjtoepError("degree too small for the requested band")
        cap = threshold / (2.0 * _TAIL_FACTOR * (window + 1) * scale)
        a_work, work_degree, tail = working_coefficients(
            conj, cols=window + band + 2, margin=band + 1, cap=cap, limit=config.pad_limit
        )

    jk_max = config.jk_max if config.jk_max is not None else min(8, n - band - 2)
    if jk_max < 0:
        raise ConjtoepError("degree too small for the requested band")
    if jk_max + band > work_degree or jk_max + max(band, 1) > work_degree:
        raise ExactnessError("exactness window violated")

    t_work = toeplitz_matrix(phi, work_degree).matrix
    tail_bound = _TAIL_FACTOR * scale * tail * (window + 1)
    return _Plan(
        phi=phi,
        conj=conj,
        tolerance=tol,
        scale=scale,
        threshold=threshold,
        degree=n,
        window=window,
        jk_max=jk_max,
        a_work=a_work,
        t_work=t_work,
        work_degree=work_degree,
        tail=tail,
        tail_bound=tail_bound,
    )


def definition_residual(a_work: np.ndarray, t_work: np.ndarray, rows, cols) -> float:
    """Frobenius norm of ``(C T* C - T)`` on an index set.

    ``C T* C`` is assembled columnwise as ``A conj(T^H (A e_p))``, stacked
    into one product.  Shared by the one-variable and polydisc definition
    checks so that their one-variable specializations agree bit for bit.
    """
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    image = a_work @ np.conj(t_work.conj().T @ a_work[:, cols])
    diff = image[rows] - t_work[np.ix_(rows, cols)]
    return float(np.linalg.norm(diff))


def _definition(plan: _Plan) -> CriterionResult:
    idx = np.arange(plan.window + 1)
    residual = definition_residual(plan.a_work, plan.t_work, idx, idx)
    verdict = _decide(residual, plan.threshold, plan.tail_bound)
    return CriterionResult(verdict, residual, plan.tail_bound, {"window": plan.window})


def check_definition(
    phi: LaurentSymbol, conj: Conjugation, config: CheckConfig | None = None
) -> CriterionResult:
    """Brute-force check of the defining identity ``C T* C = T`` on the window."""
    return _definition(_make_plan(phi, conj, config))


def _transpose_basis(plan: _Plan) -> CriterionResult:
    w = plan.window
    f = plan.a_work[:, : w + 1]
    gram = f.conj().T @ (plan.t_work @ f)
    target = plan.t_work[: w + 1, : w + 1].T
    residual = float(np.linalg.norm(gram - target))
    verdict = _decide(residual, plan.threshold, plan.tail_bound)
    return CriterionResult(verdict, residual, plan.tail_bound, {"window": w})


def check_transpose_basis(
    phi: LaurentSymbol, conj: Conjugation, config: CheckConfig | None = None
) -> CriterionResult:
    """Compare the matrix of T in the basis ``f_n = U z^n`` with the
    transposed canonical Toeplitz matrix, entry by entry on the window."""
    return _transpose_basis(_make_plan(phi, conj, config))


def _conjugated_toeplitz(plan: _Plan) -> CriterionResult:
    w = plan.window
    we = min(w + 1, plan.work_degree)
    fe = plan.a_work[:, : we + 1]
    product = fe.conj().T @ plan.t_work @ fe
    _, toep_residual = is_toeplitz(product, Window.square(w), plan.tolerance)
    matrix_residual = float(
        np.linalg.norm(product[: w + 1, : w + 1] - plan.t_work[: w + 1, : w + 1].T)
    )
    residual = max(matrix_residual, toep_residual)
    verdict = _decide(residual, plan.threshold, plan.tail_bound)
    toeplitz_flag = _decide(toep_residual, plan.threshold, plan.tail_bound) == PASS
    return CriterionResult(
        verdict,
        residual,
        plan.tail_bound,
        {
            "window": w,
            "is_toeplitz": toeplitz_flag,
            "toeplitz_residual": toep_residual,
            "matrix_residual": matrix_residual,
        },
    )


def check_conjugated_toeplitz(
    phi: LaurentSymbol, conj: Conjugation, config: CheckConfig | None = None
) -> CriterionResult:
    """Form ``U^H T U``; it must be Toeplitz and equal the transposed matrix."""
    return _conjugated_toeplitz(_make_plan(phi, conj, config))


def _coefficient_equations(plan: _Plan) -> CriterionResult:
    a = plan.a_work
    phi = plan.phi
    band = phi.band
    jk = plan.jk_max
    residual = 0.0
    for k in range(jk + 1):
        for j in range(jk + 1):
            lhs = 0j
            for n in range(max(0, k - band), k + band + 1):
                lhs += phi.coefficient(n - k).conjugate() * a[n, j]
            rhs = 0j
            for n in range(1, band + 1):
                rhs += phi.coefficient(n).conjugate() * a[k, n + j]
            for ell in range(0, min(j, band) + 1):
                rhs += phi.coefficient(-ell).conjugate() * a[k, j - ell]
            residual = max(residual, abs(lhs - rhs))
    verdict = _decide(residual, plan.threshold, 0.0)
    return CriterionResult(verdict, residual, 0.0, {"jk_max": jk})


def check_coefficient_equations(
    phi: LaurentSymbol,
    conj: Conjugation,
    config: CheckConfig | None = None,
) -> CriterionResult:
    """Two-sided coefficient identities over all pairs ``0 <= j, k <= jk_max``.

    Every sum is a complete finite sum for a banded symbol, and the
    conjugation coefficients are exact at any index, so this criterion is
    always decisive.
    """
    return _coefficient_equations(_make_plan(phi, conj, config))


def build_xy(
    conj: Conjugation,
    k: int,
    trunc: int,
    phi: LaurentSymbol | None = None,
    rows: int | None = None,
) -> XYSystem:
    """Truncated ``X(k)``/``Y(k)`` system.

    Rows are indexed by ``j`` and columns by the coefficient index ``n >= 1``.
    ``X(k)[j, n-1] = c_{n+k, j} - c_{k, n+j}``; ``Y(k)`` has
    ``c_{k, j-m}`` for ``m <= j`` minus ``c_{k-m, j}`` for ``m <= k``, which
    reproduces the lower-triangular pattern whose columns beyond index k
    vanish on the rows ``j <= k``.  The row equation for ``(j, k)`` equals
    minus the equation for ``(k, j)``, so truncations keep rows beyond ``j = k``
    to cover both orderings.
    """
    if k < 0 or trunc < 1:
        raise ConjtoepError("k must be nonnegative and trunc positive")
    n_rows = (trunc + k) if rows is None else rows
    a = conj.coeff
    needed = max(trunc + k, k, n_rows, trunc + n_rows)
    if needed > conj.degree:
        raise ExactnessError("exactness window violated")
    x = np.zeros((n_rows + 1, trunc), dtype=np.complex128)
    y = np.zeros((n_rows + 1, trunc), dtype=np.complex128)
    for j in range(n_rows + 1):
        for n in range(1, trunc + 1):
            x[j, n - 1] = a[n + k, j] - a[k, n + j]
        for m in range(1, trunc + 1):
            val = 0j
            if m <= j:
                val += a[k, j - m]
            if m <= k:
                val -= a[k - m, j]
            y[j, m - 1] = val
    if phi is None:
        plus = np.zeros(trunc, dtype=np.complex128)
        minus = np.zeros(trunc, dtype=np.complex128)
    else:
        plus = np.array([phi.coefficient(n).conjugate() for n in range(1, trunc + 1)])
        minus = np.array([phi.coefficient(-n).conjugate() for n in range(1, trunc + 1)])
    return XYSystem(k, x, y, plus, minus)


def _xy_residual(a: np.ndarray, phi: LaurentSymbol, k: int, jk: int, trunc: int) -> float:
    residual = 0.0
    for j in range(jk + 1):
        lhs = 0j
        rhs = 0j
        for n in range(1, trunc + 1):
            lhs += (a[n + k, j] - a[k, n + j]) * phi.coefficient(n).conjugate()
        for m in range(1, trunc + 1):
            val = 0j
            if m <= j:
                val += a[k, j - m]
            if m <= k:
                val -= a[k - m, j]
            rhs += val * phi.coefficient(-m).conjugate()
        residual = max(residual, abs(lhs - rhs))
    return residual


def _xy(plan: _Plan) -> CriterionResult:
    trunc = max(plan.phi.band, 1)
    jk = plan.jk_max
    per_k = []
    residual = 0.0
    for k in range(jk + 1):
        rk = _xy_residual(plan.a_work, plan.phi, k, jk, trunc)
        per_k.append(rk)
        residual = max(residual, rk)
    verdict = _decide(residual, plan.threshold, 0.0)
    return CriterionResult(verdict, residual, 0.0, {"per_k": per_k, "trunc": trunc, "k_max": jk})


def check_xy(
    phi: LaurentSymbol,
    conj: Conjugation,
    k_max: int | None = None,
    trunc: int | None = None,
    config: CheckConfig | None = None,
) -> CriterionResult:
    """Verify ``X(k) Phi+ = Y(k) Phi-`` for ``k = 0..k_max``.

    Equivalent, equation by equation, to the coefficient identities; the
    two are cross-asserted as an oracle property in the test suite.
    """
    config = config or CheckConfig()
    if k_max is not None:
        config = CheckConfig(
            degree=config.degree,
            jk_max=k_max,
            window=config.window,
            tolerance=config.tolerance,
            pad_limit=config.pad_limit,
        )
    plan = _make_plan(phi, conj, config)
    if trunc is not None and trunc < phi.band:
        raise ConjtoepError("trunc must cover the symbol band")
    return _xy(plan)


def _shift_columns(a_work: np.ndarray, count: int) -> np.ndarray:
    """Leading columns of ``C M_z C`` without forming the whole matrix."""
    block = a_work[:, :count]
    shifted = np.zeros_like(block)
    shifted[1:, :] = block[:-1, :]
    return a_work @ np.conj(shifted)


def _s_toeplitz(plan: _Plan) -> CriterionResult:
    band_c = plan.conj.band
    if band_c is not None:
        w = max(0, min(plan.window, plan.degree - 1 - (2 * band_c + plan.phi.band)))
    else:
        w = plan.window
    sw = _shift_columns(plan.a_work, w + 1)
    product = sw.conj().T @ (plan.t_work @ sw)
    residual = float(np.linalg.norm(product - plan.t_work[: w + 1, : w + 1]))
    verdict = _decide(residual, plan.threshold, plan.tail_bound)
    return CriterionResult(verdict, residual, plan.tail_bound, {"window": w})


def check_s_toeplitz_necessary(
    phi: LaurentSymbol, conj: Conjugation, config: CheckConfig | None = None
) -> CriterionResult:
    """Necessary-condition filter ``S^H T S = T`` with ``S = C M_z C``.

    A pass here never certifies symmetry (coordinate multiplication by z is
    the standard counterexample with the canonical conjugation); a decisive
    fail refutes it.
    """
    return _s_toeplitz(_make_plan(phi, conj, config))


def run_all(
    phi: LaurentSymbol,
    conj,
    config: CheckConfig | None = None,
) -> SymmetryReport:
    """Run all criteria plus the shift-compression necessity check.

    ``conj`` may be a materialized :class:`Conjugation` or a family spec
    (materialized at ``config.degree``).  A decisive disagreement between
    any two of the five equivalent criteria raises
    :class:`CriterionDisagreement` with a diagnostic dump; inconclusive
    verdicts are compatible with either decisive outcome.
    """
    config = config or CheckConfig()
    if not isinstance(conj, Conjugation):
        conj = materialize(conj, config.degree)
    plan = _make_plan(phi, conj, config)

    results = {
        "definition": _definition(plan),
        "transpose_basis": _transpose_basis(plan),
        "conjugated_toeplitz": _conjugated_toeplitz(plan),
        "coefficient_equations": _coefficient_equations(plan),
        "xy_system": _xy(plan),
    }
    results["s_toeplitz"] = _s_toeplitz(plan)

    core_verdicts = {k: results[k].verdict for k in CRITERIA}
    decisive = set(core_verdicts.values()) - {INCONCLUSIVE}
    if PASS in decisive and FAIL in decisive:
        dump = {
            "symbol": json.loads(phi.to_json()),
            "conjugation": conj.label or "custom",
            "degree": plan.degree,
            "work_degree": plan.work_degree,
            "window": plan.window,
            "jk_max": plan.jk_max,
            "verdicts": core_verdicts,
            "residuals": {k: results[k].residual for k in CRITERIA},
            "tail_bound": plan.tail_bound,
        }
        raise CriterionDisagreement(
            "equivalent criteria disagree; this is a library defect: "
            + json.dumps(_jsonable(dump)),
            dump,
        )

    notes = tuple(conj.notes)
    if plan.work_degree != plan.degree:
        notes = notes + (f"dense tails tamed at internal degree {plan.work_degree}",)
    details = {
        name: {"tail_bound": res.tail_bound, **res.details} for name, res in results.items()
    }
    return SymmetryReport(
        verdicts={k: r.verdict for k, r in results.items()},
        residuals={k: r.residual for k, r in results.items()},
        window=Window.square(plan.window),
        tolerance=plan.tolerance,
        tail_bound=max(r.tail_bound for r in results.values()),
        jk_max=plan.jk_max,
        degree=plan.degree,
        work_degree=plan.work_degree,
        notes=notes,
        details=details,
    )
