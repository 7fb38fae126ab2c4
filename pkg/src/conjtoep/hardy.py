"""Laurent symbols, truncated Toeplitz matrices, and shift-compression tests.

Symbols are trigonometric polynomials (finitely many Fourier coefficients);
every identity checked downstream then reduces to finite sums whose exactness
window can be computed instead of assumed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ConjtoepError,
    ExactnessError,
    Tolerance,
    DEFAULT_TOLERANCE,
    Window,
    require_matrix,
)

__all__ = [
    "LaurentSymbol",
    "TruncatedOperator",
    "ShiftOperator",
    "toeplitz_matrix",
    "is_toeplitz",
    "s_toeplitz_residual",
]


@dataclass(frozen=True)
class LaurentSymbol:
    """Finitely supported Fourier coefficient map ``n -> phi_n``.

    ``band`` is the largest ``|n|`` with a nonzero coefficient; zero
    coefficients are dropped on construction so the support is canonical.
    """

    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for n, v in self.coefficients.items():
            v = complex(v)
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ConjtoepError("symbol coefficients must be finite")
            if v != 0:
                cleaned[int(n)] = v
        object.__setattr__(self, "coefficients", cleaned)

    @property
    def band(self) -> int:
        if not self.coefficients:
            return 0
        return max(abs(n) for n in self.coefficients)

    def coefficient(self, n: int) -> complex:
        return self.coefficients.get(n, 0j)

    def l1_norm(self) -> float:
        """Sum of coefficient magnitudes; dominates the operator norm."""
        return float(sum(abs(v) for v in self.coefficients.values()))

    def scaled(self, factor: complex) -> "LaurentSymbol":
        return LaurentSymbol({n: factor * v for n, v in self.coefficients.items()})

    def plus(self, other: "LaurentSymbol") -> "LaurentSymbol":
        keys = set(self.coefficients) | set(other.coefficients)
        return LaurentSymbol({n: self.coefficient(n) + other.coefficient(n) for n in keys})

    def to_json(self) -> str:
        return json.dumps(
            {"coeffs": {str(n): [v.real, v.imag] for n, v in sorted(self.coefficients.items())}}
        )

    @classmethod
    def from_json_dict(cls, data: dict) -> "LaurentSymbol":
        coeffs = data["coeffs"]
        return cls({int(n): complex(re, im) for n, (re, im) in coeffs.items()})

    @classmethod
    def from_json(cls, text: str) -> "LaurentSymbol":
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class TruncatedOperator:
    """An (N+1) x (N+1) truncation together with its exactness window.

    ``exact`` records which entries equal the untruncated operator's
    entries; operator products shrink it.
    """

    matrix: np.ndarray
    degree: int
    exact: Window

    def __post_init__(self):
        m = require_matrix(self.matrix, square=True)
        object.__setattr__(self, "matrix", m)
        if m.shape[0] != self.degree + 1:
            raise ConjtoepError("matrix size must be degree + 1")
        self.exact.require_fits(m.shape)


@dataclass(frozen=True)
class ShiftOperator:
    """Truncated unilateral shift ``S f_n = f_{n+1}`` for some basis {f_n}.

    ``band`` is the bandwidth of the untruncated matrix when known (None for
    dense shifts); columns ``0..degree-1-band`` are then exactly the columns
    of the untruncated isometry.
    """

    matrix: np.ndarray
    degree: int
    basis_label: str = ""
    band: int | None = None

    def __post_init__(self):
        m = require_matrix(self.matrix, square=True)
        object.__setattr__(self, "matrix", m)
        if m.shape[0] != self.degree + 1:
            raise ConjtoepError("matrix size must be degree + 1")

    def exact_columns(self) -> int | None:
        """Number of leading columns that equal the untruncated shift's."""
        if self.band is None:
            return None
        return max(0, self.degree - self.band)

    def isometry_defect(self, max_col: int) -> float:
        """Frobenius norm of (S^H S - I) on the leading ``max_col+1`` columns."""
        s = self.matrix[:, : max_col + 1]
        gram = s.conj().T @ s
        return float(np.linalg.norm(gram - np.eye(max_col + 1)))


def toeplitz_matrix(phi: LaurentSymbol, degree: int) -> TruncatedOperator:
    """Truncation of the Toeplitz operator with the given symbol.

    Entry ``(q, p)`` is ``phi_{q-p}``; because compressing a multiplication
    operator never mixes the retained coefficients, every entry of the
    truncation equals the untruncated entry and the exact window is full.
    """
    if degree < 0:
        raise ConjtoepError("degree must be nonnegative")
    n = degree + 1
    table = np.zeros(2 * n - 1, dtype=np.complex128)
    for k, v in phi.coefficients.items():
        if -degree <= k <= degree:
            table[k + n - 1] = v
    diff = np.arange(n)[:, None] - np.arange(n)[None, :]
    m = table[diff + n - 1]
    return TruncatedOperator(m, degree, Window.full(n))


def is_toeplitz(t, w: Window, tol: Tolerance = DEFAULT_TOLERANCE) -> tuple[bool, float]:
    """Constant-diagonal test on a window.

    Returns ``(verdict, residual)`` with residual the maximum of
    ``|t[i, j] - t[i+1, j+1]|`` over pairs whose first element lies in the
    window.
    """
    t = require_matrix(t, square=True)
    w.require_fits(t.shape)
    n = t.shape[0]
    top = min(w.max_row + 1, n - 1)
    right = min(w.max_col + 1, n - 1)
    if top == 0 or right == 0:
        return True, 0.0
    diff = t[:top, :right] - t[1 : top + 1, 1 : right + 1]
    residual = float(np.max(np.abs(diff))) if diff.size else 0.0
    scale = float(np.max(np.abs(t))) if t.size else 1.0
    return residual <= tol.threshold(max(1.0, scale)), residual


def s_toeplitz_residual(t: TruncatedOperator, s: ShiftOperator, w: Window) -> float:
    """Frobenius norm of ``S^H T S - T`` restricted to a window.

    For a banded shift the window must satisfy
    ``w.max <= degree - 1 - band`` so that every sum defining the windowed
    entries of the product is complete at this truncation.
    """
    if t.degree != s.degree:
        raise ConjtoepError("operator and shift degrees differ")
    w.require_fits(t.matrix.shape)
    if s.band is not None:
        limit = t.degree - 1 - s.band
        if w.max_row > limit or w.max_col > limit:
            raise ExactnessError("exactness window violated")
        needed = max(w.max_row, w.max_col) + 1 + s.band
        if needed > min(t.exact.max_row, t.exact.max_col):
            raise ExactnessError("exactness window violated")
    product = s.matrix.conj().T @ t.matrix @ s.matrix
    diff = (product - t.matrix)[: w.max_row + 1, : w.max_col + 1]
    return float(np.linalg.norm(diff))
