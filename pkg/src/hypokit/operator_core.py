"""Dense complex linear-algebra kernels used by every other module.

All operators are plain ``numpy.ndarray`` matrices with complex128 entries;
real input is promoted to complex on entry (skew parts generically have
imaginary eigenvalues, so staying complex avoids dtype surprises downstream).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ContractViolationError,
    DimensionError,
    InvalidEntryError,
    NotPSDError,
    NumericalError,
    RangeError,
)

__all__ = [
    "OperatorDecomposition",
    "as_matrix",
    "hermitian_split",
    "hermitian_part",
    "skew_part",
    "matrix_exponential",
    "spectral_norm",
    "min_eig_hermitian",
    "psd_sqrt",
    "spectral_abscissa",
    "matrix_to_json",
    "matrix_from_json",
]


def as_matrix(A, square: bool = False) -> np.ndarray:
    """Validate and return a finite complex128 matrix copy of ``A``."""
    M = np.asarray(A)
    if M.ndim != 2 or M.size == 0:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    M = M.astype(np.complex128, copy=True)
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise InvalidEntryError("matrix contains NaN or infinite entries")
    return M


def hermitian_part(C) -> np.ndarray:
    """Return (C + C*) / 2."""
    C = as_matrix(C, square=True)
    return (C + C.conj().T) / 2.0


def skew_part(C) -> np.ndarray:
    """Return (C - C*) / 2 (the skew-Hermitian part of C)."""
    C = as_matrix(C, square=True)
    return (C - C.conj().T) / 2.0


@dataclass(frozen=True)
class OperatorDecomposition:
    """Unique split C = R - J with R Hermitian (PSD for accretive C) and J skew."""

    C: np.ndarray
    R: np.ndarray
    J: np.ndarray

    @property
    def dim(self) -> int:
        return self.C.shape[0]


def hermitian_split(C) -> OperatorDecomposition:
    """Split a square matrix as C = R - J with R = (C+C*)/2 and J = (C*-C)/2."""
    C = as_matrix(C, square=True)
    R = (C + C.conj().T) / 2.0
    J = (C.conj().T - C) / 2.0
    return OperatorDecomposition(C=C, R=R, J=J)


def matrix_exponential(A, t: float = 1.0) -> np.ndarray:
    """Return exp(A*t) via scaling-and-squaring with a Pade approximant.

    Guards against overflow using the logarithmic norm: ||exp(A t)|| is
    bounded by exp(t * lambda_max(A_H)), so evaluation is refused when that
    exponent would leave double range.
    """
    A = as_matrix(A, square=True)
    if not np.isfinite(t):
        raise InvalidEntryError("time must be finite")
    At = A * t
    mu = np.linalg.eigvalsh((At + At.conj().T) / 2.0)[-1]
    if mu > 700.0:
        raise RangeError(
            f"exp(A t) may overflow: logarithmic norm of A*t is {mu:.3g} > 700"
        )
    return scipy.linalg.expm(At)


def spectral_norm(A) -> float:
    """Largest singular value of A."""
    A = as_matrix(A)
    return float(np.linalg.svd(A, compute_uv=False)[0])


def _symmetrized(A) -> np.ndarray:
    return (A + A.conj().T) / 2.0


def min_eig_hermitian(A, asym_tol: float = 1e-8) -> float:
    """Smallest eigenvalue of the symmetrized matrix (A + A*) / 2.

    Rejects input whose asymmetry exceeds ``asym_tol`` relative to its norm;
    smaller asymmetries are treated as roundoff and symmetrized away.
    """
    A = as_matrix(A, square=True)
    scale = spectral_norm(A)
    if scale > 0.0:
        asym = spectral_norm(A - A.conj().T) / 2.0
        if asym > asym_tol * scale:
            raise ContractViolationError(
                f"matrix is not Hermitian: asymmetry {asym:.3g} exceeds "
                f"{asym_tol:g} * norm {scale:.3g}"
            )
    return float(np.linalg.eigvalsh(_symmetrized(A))[0])


def psd_sqrt(R, clip_tol: float = 1e-10) -> np.ndarray:
    """Hermitian square root S >= 0 with S @ S = R for PSD Hermitian R.

    Eigenvalues in [-clip_tol * ||R||, 0) are treated as roundoff and clipped
    to zero; anything below that raises ``NotPSDError``.
    """
    R = as_matrix(R, square=True)
    w, V = np.linalg.eigh(_symmetrized(R))
    scale = max(abs(w[0]), abs(w[-1]))
    if w[0] < -clip_tol * scale:
        raise NotPSDError(
            f"matrix is not PSD: min eigenvalue {w[0]:.3g} < -{clip_tol:g} * {scale:.3g}"
        )
    w = np.clip(w, 0.0, None)
    S = (V * np.sqrt(w)) @ V.conj().T
    return _symmetrized(S)


def spectral_abscissa(A) -> float:
    """max Re(lambda) over the eigenvalues of A."""
    A = as_matrix(A, square=True)
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare LAPACK failure
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    return float(np.max(ev.real))


def matrix_to_json(A) -> dict:
    """Serialize a matrix to the interchange dict {n_rows, n_cols, entries}.

    Entries are row-major [re, im] pairs; floats round-trip exactly.
    """
    A = as_matrix(A)
    n_rows, n_cols = A.shape
    entries = [[float(z.real), float(z.imag)] for z in A.ravel()]
    return {"n_rows": int(n_rows), "n_cols": int(n_cols), "entries": entries}


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse the interchange dict; bare numbers are accepted for real entries."""
    try:
        n_rows = int(obj["n_rows"])
        n_cols = int(obj["n_cols"])
        raw = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise InvalidEntryError(f"malformed matrix object: {exc}") from exc
    if n_rows <= 0 or n_cols <= 0:
        raise DimensionError("n_rows and n_cols must be positive")
    if len(raw) != n_rows * n_cols:
        raise DimensionError(
            f"expected {n_rows * n_cols} entries, got {len(raw)}"
        )
    flat = np.empty(n_rows * n_cols, dtype=np.complex128)
    for i, item in enumerate(raw):
        if isinstance(item, (int, float)):
            flat[i] = complex(item, 0.0)
        else:
            re, im = item
            flat[i] = complex(re, im)
    return as_matrix(flat.reshape(n_rows, n_cols))
