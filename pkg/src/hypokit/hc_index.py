"""Hypocoercivity index via coercive partial sums, Kalman-rank tests, and
eigenvector obstructions.

The index of an accretive C = R - J is the smallest m such that a partial sum
of the form sum_{j<=m} (C*)^j R C^j (or one of three equivalent families)
becomes coercive.  All four families share the same minimal m; the achieved
coercivity constants may differ.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import operator_core as core
from .errors import DimensionError, PreconditionError

__all__ = [
    "METHODS",
    "IndexReport",
    "ObstructionWitness",
    "AuditReport",
    "index_via_powers",
    "kalman_kernel_defect",
    "eigenvector_obstruction",
    "equivalence_audit",
    "random_accretive",
]

#: The four equivalent coercivity families.
METHODS = ("c_powers_right", "c_powers_left", "j_powers", "commutators")

#: Scale-relative default for deciding "coercive" in floating point.
DEFAULT_KAPPA_RTOL = 1e-9

#: Relative tolerance for accepting C as accretive.
ACCRETIVE_RTOL = 1e-10


@dataclass
class IndexReport:
    """Outcome of an index search up to m_max.

    ``index`` is None when no partial sum reached the threshold ("none up to
    m_max"); ``kappa`` is the smallest eigenvalue achieved at the reported
    index (0.0 when no index was found).
    """

    index: int | None
    kappa: float
    method: str
    per_m_min_eigs: list[float]
    m_max: int
    kappa_threshold: float

    @property
    def found(self) -> bool:
        return self.index is not None

    def to_json_dict(self) -> dict:
        return {
            "index": self.index if self.found else "none-up-to-m_max",
            "kappa": self.kappa,
            "method": self.method,
            "per_m_min_eigs": list(self.per_m_min_eigs),
            "m_max": self.m_max,
            "kappa_threshold": self.kappa_threshold,
        }


@dataclass
class ObstructionWitness:
    """Unit vector v with J v = lambda v and R v = 0 up to the stated residuals."""

    eigenvalue: complex
    vector: np.ndarray
    residual_J: float
    residual_R: float

    def to_json_dict(self) -> dict:
        return {
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "vector": [[z.real, z.imag] for z in self.vector],
            "residual_J": self.residual_J,
            "residual_R": self.residual_R,
        }


def _factor_generator(dec: core.OperatorDecomposition, method: str):
    """Yield factors F_0, F_1, ... with partial sums sum_j F_j* F_j.

    Every coercivity family is a Gram matrix, so its smallest eigenvalue is
    the squared smallest singular value of the stacked factors.  Working on
    the factors keeps the noise floor near machine-epsilon squared, where
    forming the sums explicitly would lose half the digits on the singular
    levels below the index.
    """
    C, R, J = dec.C, dec.R, dec.J
    n = dec.dim
    S = core.psd_sqrt(R)
    if method == "c_powers_right":
        P = np.eye(n, dtype=complex)
        while True:
            yield S @ P  # (C*)^j R C^j = (sqrt(R) C^j)* (sqrt(R) C^j)
            P = C @ P
    elif method == "c_powers_left":
        P = np.eye(n, dtype=complex)
        while True:
            yield S @ P  # C^j R (C*)^j with factor sqrt(R) (C*)^j
            P = C.conj().T @ P
    elif method == "j_powers":
        P = np.eye(n, dtype=complex)
        while True:
            yield S @ P  # J^j R (J*)^j with factor sqrt(R) (J*)^j
            P = J.conj().T @ P
    elif method == "commutators":
        Cj = S
        while True:
            yield Cj
            Cj = J @ Cj - Cj @ J
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def index_via_powers(
    dec: core.OperatorDecomposition,
    method: str = "c_powers_right",
    kappa_threshold: float | None = None,
    m_max: int | None = None,
) -> IndexReport:
    """Smallest m <= m_max whose partial sum has min-eigenvalue >= threshold.

    ``kappa_threshold`` defaults to 1e-9 * ||C|| (an exact-zero test is
    meaningless in floating point); ``m_max`` defaults to the dimension,
    beyond which the rank conditions cannot improve.
    """
    scale = core.spectral_norm(dec.C)
    if core.min_eig_hermitian(dec.R) < -ACCRETIVE_RTOL * max(scale, 1.0):
        raise PreconditionError("C is not accretive: Hermitian part has a negative eigenvalue")
    if kappa_threshold is None:
        kappa_threshold = DEFAULT_KAPPA_RTOL * max(scale, 1.0)
    if kappa_threshold <= 0.0:
        raise PreconditionError("kappa_threshold must be positive")
    if m_max is None:
        m_max = dec.dim
    if m_max < 0:
        raise PreconditionError("m_max must be nonnegative")

    eigs: list[float] = []
    rows: list[np.ndarray] = []
    gen = _factor_generator(dec, method)
    index = None
    kappa = 0.0
    for m in range(m_max + 1):
        rows.append(next(gen))
        sv = np.linalg.svd(np.vstack(rows), compute_uv=False)
        lam = float(sv[-1] ** 2)
        eigs.append(lam)
        if lam >= kappa_threshold:
            index, kappa = m, lam
            break
    return IndexReport(
        index=index,
        kappa=kappa,
        method=method,
        per_m_min_eigs=eigs,
        m_max=m_max,
        kappa_threshold=kappa_threshold,
    )


def kalman_kernel_defect(R, J, m: int, rank_tol: float = 1e-10) -> int:
    """Dimension of the joint kernel of sqrt(R) (J*)^j, j = 0..m.

    Computed as n minus the rank of the stacked observability-style matrix
    [sqrt(R); sqrt(R) J*; ...; sqrt(R) (J*)^m]; defect 0 means the Kalman-type
    spanning condition holds at level m.
    """
    R = core.as_matrix(R, square=True)
    J = core.as_matrix(J, square=True)
    if R.shape != J.shape:
        raise DimensionError(f"shape mismatch: R is {R.shape}, J is {J.shape}")
    n = R.shape[0]
    # The square root must share the rank cut: an eigenvalue of R at roundoff
    # level (say 1e-16) would otherwise contribute a 1e-8 singular value to
    # the stack and silently defeat the rank decision.
    w, V = np.linalg.eigh((R + R.conj().T) / 2.0)
    w = np.where(w >= rank_tol * max(w[-1], 0.0), w, 0.0)
    S = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    blocks = []
    P = np.eye(n, dtype=complex)
    for _ in range(m + 1):
        blocks.append(S @ P)
        P = P @ J.conj().T
    sv = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    if sv[0] == 0.0:
        return n
    rank = int(np.count_nonzero(sv >= rank_tol * sv[0]))
    return n - rank


def _eig_clusters(theta: np.ndarray, width: float) -> list[list[int]]:
    """Group sorted eigenvalues into clusters of gap <= width."""
    groups: list[list[int]] = [[0]]
    for i in range(1, len(theta)):
        if theta[i] - theta[groups[-1][-1]] <= width:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def eigenvector_obstruction(R, J, tol: float = 1e-8) -> ObstructionWitness | None:
    """Search the eigenspaces of skew-Hermitian J for a unit vector killed by R.

    Eigenvalues are clustered within 1e-8 * ||J|| and whole clusters are
    tested at once (a split multiplicity must not hide a genuine invariant
    direction).  Returns a verified witness or None.  In finite dimensions a
    witness exists iff the Kalman spanning condition fails at every level.
    """
    R = core.as_matrix(R, square=True)
    J = core.as_matrix(J, square=True)
    if R.shape != J.shape:
        raise DimensionError(f"shape mismatch: R is {R.shape}, J is {J.shape}")
    scale_J = core.spectral_norm(J)
    scale_R = core.spectral_norm(R)
    # i*J is Hermitian, so its eigenbasis is orthonormal and well conditioned.
    theta, V = np.linalg.eigh(1j * J)
    clusters = _eig_clusters(theta, 1e-8 * max(scale_J, 1.0))

    candidates = []
    for group in clusters:
        Vg = V[:, group]
        G = Vg.conj().T @ R @ Vg
        w, U = np.linalg.eigh((G + G.conj().T) / 2.0)
        candidates.append((w[0], Vg @ U[:, 0]))
    candidates.sort(key=lambda item: item[0])

    for _, v in candidates:
        v = v / np.linalg.norm(v)
        lam = complex(np.vdot(v, J @ v))
        residual_J = float(np.linalg.norm(J @ v - lam * v))
        residual_R = float(np.linalg.norm(R @ v))
        if residual_J <= tol * max(scale_J, 1.0) and residual_R <= tol * max(scale_R, 1.0):
            return ObstructionWitness(
                eigenvalue=lam, vector=v, residual_J=residual_J, residual_R=residual_R
            )
    return None


@dataclass
class AuditReport:
    """Cross-check of the four index methods plus rank/obstruction views."""

    index_per_method: dict[str, int | None]
    kappa_per_method: dict[str, float]
    reports: dict[str, IndexReport] = field(repr=False)
    defect_sweep: list[int]
    obstruction: ObstructionWitness | None
    agree: bool

    def to_json_dict(self) -> dict:
        return {
            "index_per_method": {
                k: (v if v is not None else "none-up-to-m_max")
                for k, v in self.index_per_method.items()
            },
            "kappa_per_method": dict(self.kappa_per_method),
            "defect_sweep": list(self.defect_sweep),
            "obstruction": None if self.obstruction is None else self.obstruction.to_json_dict(),
            "agree": self.agree,
        }


def equivalence_audit(
    dec: core.OperatorDecomposition,
    kappa_threshold: float | None = None,
    m_max: int | None = None,
    rank_tol: float = 1e-10,
) -> AuditReport:
    """Run every index method and assert they report the same index.

    A disagreement is reported, not raised: it signals a tolerance problem in
    the inputs, and the per-method data is exactly what is needed to diagnose
    it.  Coercivity constants are allowed to differ between methods.
    """
    if m_max is None:
        m_max = dec.dim
    reports = {
        method: index_via_powers(dec, method, kappa_threshold, m_max)
        for method in METHODS
    }
    indices = {method: rep.index for method, rep in reports.items()}
    kappas = {method: rep.kappa for method, rep in reports.items()}
    defects = [kalman_kernel_defect(dec.R, dec.J, m, rank_tol) for m in range(m_max + 1)]
    witness = eigenvector_obstruction(dec.R, dec.J)
    agree = len(set(indices.values())) == 1
    return AuditReport(
        index_per_method=indices,
        kappa_per_method=kappas,
        reports=reports,
        defect_sweep=defects,
        obstruction=witness,
        agree=agree,
    )


def random_accretive(
    rng: np.random.Generator, n: int, p_rank_deficient: float = 0.5
) -> core.OperatorDecomposition:
    """Random accretive test instance: R = G*G (optionally rank-deficient), J skew.

    Rank deficiency is injected by zeroing a random number of eigenvalues of
    R, which spans both the generic and the degenerate branches of the index
    theory.
    """
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    R = G.conj().T @ G / n
    if rng.random() < p_rank_deficient:
        w, V = np.linalg.eigh(R)
        k = int(rng.integers(1, n))
        w[:k] = 0.0
        R = (V * w) @ V.conj().T
        R = (R + R.conj().T) / 2.0
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    J = (S - S.conj().T) / 2.0
    return core.OperatorDecomposition(C=R - J, R=R, J=J)
