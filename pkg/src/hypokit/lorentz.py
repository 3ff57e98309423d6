"""Spectrally truncated Lorentz kinetic equation on the 2-torus with unit
speed and unit relaxation rate.

Velocity space is discretized by Fourier modes j in [-M, M]; the collision
part acts as the projection complement R = diag(1 - delta_{j0}) and the
transport part of a spatial mode of magnitude n acts (up to a rotation that
does not affect norms) as n times the tridiagonal skew matrix with -i/2 off
the diagonal.  On top of the modal generators this module provides the
coercivity constant of the mixing form, Lyapunov-weight decay certificates,
the uniform short-time constant pipeline, and full-field simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import operator_core as core
from .decay import DecayCurve
from .errors import (
    DimensionError,
    InvalidEntryError,
    NumericalError,
    PreconditionError,
)

__all__ = [
    "LAMBDA0",
    "KAPPA_LIMIT",
    "VelocityOperators",
    "ModalGenerator",
    "LyapunovWeight",
    "AppendixCConstants",
    "LorentzField",
    "ModalDecayResult",
    "CubicBoundReport",
    "SandwichReport",
    "SimulationReport",
    "build_velocity_operators",
    "modal_generator",
    "lyapunov_weight",
    "essential_block",
    "kappa_truncated",
    "kappa3_truncated",
    "constrained_mixing_infimum",
    "lyapunov_margin",
    "modal_propagator_norm",
    "appendix_constants",
    "cubic_bound_verify",
    "full_propagator_bounds",
    "simulate",
    "simulate_curve",
    "field_to_json",
    "field_from_json",
]

#: Certified exponential decay rate of the weighted norms (not sharp).
LAMBDA0 = 0.5 - 1.0 / (6.0 * math.sqrt(2.0)) - math.sqrt(7.0 / 16.0 + 1.0 / math.sqrt(8.0)) / 3.0

#: Large-cutoff limit of the mixing coercivity constant, (3 - sqrt 5) / 2.
KAPPA_LIMIT = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class VelocityOperators:
    """Collision projection complement and unit transport matrix at cutoff M."""

    M: int
    R: np.ndarray
    J10: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.M + 1


@dataclass(frozen=True)
class ModalGenerator:
    """Generator sigma*R - n_abs*J10 of one spatial mode of magnitude n_abs."""

    n_abs: float
    M: int
    sigma: float
    C: np.ndarray


@dataclass(frozen=True)
class LyapunovWeight:
    """Hermitian weight: identity plus an -i*alpha/n coupling between j=0 and j=1."""

    n_abs: float
    alpha: float
    M: int
    Y: np.ndarray


def build_velocity_operators(M: int) -> VelocityOperators:
    """Velocity-space matrices at Fourier cutoff M (indices j = -M..M)."""
    if M < 1:
        raise DimensionError("M must be at least 1 (the j = +-1 couplings are essential)")
    dim = 2 * M + 1
    R = np.eye(dim, dtype=complex)
    R[M, M] = 0.0
    J10 = np.zeros((dim, dim), dtype=complex)
    for i in range(dim - 1):
        J10[i, i + 1] = -0.5j
        J10[i + 1, i] = -0.5j
    return VelocityOperators(M=M, R=R, J10=J10)


def modal_generator(n_abs: float, M: int, sigma: float = 1.0) -> ModalGenerator:
    """Truncated generator of the spatial mode with Euclidean magnitude n_abs.

    Lattice modes sharing a magnitude evolve identically (the rotation that
    aligns them is unitary), so n_abs may be any positive real.
    """
    if n_abs <= 0:
        raise PreconditionError("n_abs must be positive")
    if sigma <= 0:
        raise PreconditionError("sigma must be positive")
    ops = build_velocity_operators(M)
    return ModalGenerator(n_abs=float(n_abs), M=M, sigma=float(sigma),
                          C=sigma * ops.R - n_abs * ops.J10)


def lyapunov_weight(n_abs: float, alpha: float, M: int) -> LyapunovWeight:
    """Weight matrix with eigenvalues 1 and 1 +- alpha/n_abs (positive definite)."""
    if M < 2:
        raise DimensionError("M must be at least 2")
    if not 0.0 < alpha < n_abs:
        raise PreconditionError("need 0 < alpha < n_abs for a positive definite weight")
    dim = 2 * M + 1
    Y = np.eye(dim, dtype=complex)
    Y[M, M + 1] = -1j * alpha / n_abs
    Y[M + 1, M] = 1j * alpha / n_abs
    return LyapunovWeight(n_abs=float(n_abs), alpha=float(alpha), M=M, Y=Y)


def essential_block(n_abs: float, alpha: float = 0.5) -> np.ndarray:
    """The 4x4 non-diagonal core of C*Y + YC on the j = -1..2 indices.

    Its smallest eigenvalue at n_abs = 1 (with alpha = 1/2) equals three times
    the certified rate LAMBDA0, and it only grows with n_abs.
    """
    n = float(n_abs)
    a = float(alpha)
    return np.array(
        [
            [2.0, 0.0, -a / 2.0, 0.0],
            [0.0, a, -1j * a / n, a / 2.0],
            [-a / 2.0, 1j * a / n, 2.0 - a, 0.0],
            [0.0, a / 2.0, 0.0, 2.0],
        ],
        dtype=complex,
    )


def _windowed(M: int, depth: int, form) -> np.ndarray:
    """Evaluate ``form(R, J10)`` at cutoff M+depth and keep the central window.

    Products of truncated banded operators are wrong in the outermost rows;
    building at a padded cutoff and windowing reproduces the entries of the
    doubly-infinite operator exactly whenever ``form`` couples indices at
    distance <= depth.
    """
    ops = build_velocity_operators(M + depth)
    full = form(ops.R, ops.J10)
    if depth == 0:
        return full
    return full[depth:-depth, depth:-depth]


def kappa_truncated(M: int) -> float:
    """Smallest eigenvalue of the mixing form R + J10 R J10* at cutoff M.

    Monotone nonincreasing in M and converging (exponentially fast, the
    minimizer is localized at j = 0) to (3 - sqrt 5)/2.
    """
    W = _windowed(M, 1, lambda R, J: R + J @ R @ J.conj().T)
    return core.min_eig_hermitian(W)


def kappa3_truncated(M: int, n_abs: float = 1.0) -> float:
    """Smallest eigenvalue of R + C* R C for the magnitude-n_abs generator."""

    def form(R, J):
        C = R - n_abs * J
        return R + C.conj().T @ R @ C

    return core.min_eig_hermitian(_windowed(M, 1, form))


def constrained_mixing_infimum(M: int, delta: float) -> float:
    """inf ||sqrt(R) J10 x|| over unit x with <x, R x> <= delta.

    Evaluated through the concave dual mu -> lambda_min(J10* R J10 +
    mu (R - delta I)), whose maximum equals the constrained minimum for this
    pair of quadratic forms; cross-checked against sampled feasible vectors
    in the tests.
    """
    if not 0.0 < delta < 1.0:
        raise PreconditionError("delta must lie in (0, 1)")
    A = _windowed(M, 1, lambda R, J: J.conj().T @ R @ J)
    R = build_velocity_operators(M).R
    shift = R - delta * np.eye(2 * M + 1)

    def dual(mu: float) -> float:
        return core.min_eig_hermitian(A + mu * shift)

    res = scipy.optimize.minimize_scalar(
        lambda mu: -dual(mu), bounds=(0.0, 1e3), method="bounded",
        options={"xatol": 1e-10},
    )
    best = max(dual(0.0), dual(float(res.x)))
    return math.sqrt(max(best, 0.0))


def lyapunov_margin(n_abs: float, alpha: float, lambda0: float, M: int) -> float:
    """lambda_min of C*Y + YC - 2 lambda0 Y for the magnitude-n_abs generator.

    A margin >= -1e-10 certifies the decay rate lambda0 in the Y-weighted
    norm at this truncation; the truncated form coincides with the window of
    the full operator because the weight is banded.
    """
    if n_abs < 1:
        raise PreconditionError("n_abs must be at least 1")
    gen = modal_generator(n_abs, M)
    Y = lyapunov_weight(n_abs, alpha, M).Y
    C = gen.C
    S = C.conj().T @ Y + Y @ C - 2.0 * lambda0 * Y
    return core.min_eig_hermitian(S)


def _sigma_max(P: np.ndarray) -> float:
    """Largest singular value via the Gram matrix; cheaper than a full SVD
    and accurate to machine precision for the top value."""
    lam = np.linalg.eigvalsh(P.conj().T @ P)[-1]
    return float(math.sqrt(max(lam, 0.0)))


def _norms_over_grid(C: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Spectral norms of exp(-C t) over a grid, reusing powers on uniform grids."""
    ts = np.asarray(times, dtype=float)
    n = C.shape[0]
    if ts.size > 2:
        dt = ts[1] - ts[0]
        uniform = dt > 0 and np.allclose(np.diff(ts), dt, rtol=1e-12, atol=1e-14)
    else:
        uniform = False
    out = np.empty(ts.size)
    if uniform:
        E = core.matrix_exponential(-C, dt)
        P = core.matrix_exponential(-C, ts[0]) if ts[0] != 0.0 else np.eye(n, dtype=complex)
        for i in range(ts.size):
            out[i] = _sigma_max(P)
            if i + 1 < ts.size:
                P = P @ E
    else:
        for i, t in enumerate(ts):
            out[i] = _sigma_max(core.matrix_exponential(-C, t))
    return out


@dataclass
class ModalDecayResult:
    """Propagator-norm curve of one mode plus the uniform decay envelope."""

    curve: DecayCurve
    bounds: np.ndarray
    worst_margin: float
    ok: bool


def modal_propagator_norm(n_abs: float, M: int, times) -> ModalDecayResult:
    """Norm curve of exp(-C_n t) checked against min(1, prefactor * e^(-lambda0 t)).

    The prefactor sqrt((2n+1)/(2n-1)) is the condition number of the
    Lyapunov weight; a violation beyond 1e-8 signals a too-small truncation.
    """
    if n_abs < 1:
        raise PreconditionError("n_abs must be at least 1")
    gen = modal_generator(n_abs, M)
    ts = np.asarray(times, dtype=float)
    norms = _norms_over_grid(gen.C, ts)
    pref = math.sqrt((2.0 * n_abs + 1.0) / (2.0 * n_abs - 1.0))
    bounds = np.minimum(1.0, pref * np.exp(-LAMBDA0 * ts))
    margins = bounds + 1e-8 - norms
    curve = DecayCurve(times=ts, norms=norms, generator_norm=core.spectral_norm(gen.C))
    return ModalDecayResult(
        curve=curve,
        bounds=bounds,
        worst_margin=float(margins.min()),
        ok=bool(margins.min() >= 0.0),
    )


def _exp_tail(z: float, k0: int) -> float:
    """sum_{k >= k0} z^k / k!, stable for small z where naive subtraction cancels."""
    if z <= 0.0:
        return 0.0
    if z < 1.0:
        term = z**k0 / math.factorial(k0)
        total = 0.0
        k = k0
        while term > total * 1e-18 + 1e-320 and k < k0 + 300:
            total += term
            k += 1
            term *= z / k
        return total
    head = sum(z**k / math.factorial(k) for k in range(k0))
    return math.exp(z) - head


def _grow_rate_initial(tau: float) -> float:
    """(e^(4 tau) - 1 - 4 tau) / (2 tau): strictly increasing from 0."""
    return _exp_tail(4.0 * tau, 2) / (2.0 * tau)


def _grow_rate_cubic(tau: float) -> float:
    """(e^(4 tau) - cubic Taylor head) / (2 tau^3): strictly increasing from 0."""
    return _exp_tail(4.0 * tau, 4) / (2.0 * tau**3)


def _bracketed_root(fn, lo: float, hi: float) -> float:
    flo, fhi = fn(lo), fn(hi)
    if not (flo < 0.0 < fhi):
        raise NumericalError(
            f"root bracketing failed on [{lo:g}, {hi:g}]: f(lo)={flo:.3g}, f(hi)={fhi:.3g}"
        )
    return float(scipy.optimize.brentq(fn, lo, hi, xtol=1e-15, rtol=8.9e-16))


@dataclass
class AppendixCConstants:
    """Constant chain certifying the n-uniform cubic short-time bound.

    Fixed relations: delta = min(kappa1/5, kappa3/2), tau = min(tau1, tau2,
    tau3, 1), c1 = delta/12, c2 = c1/(1 + 1/(lambda0 tau))^3, c = min(c2, c3);
    all entries are strictly positive.
    """

    kappa1: float
    kappa3: float
    delta: float
    tau1: float
    tau2: float
    tau3: float
    tau: float
    c1: float
    c2: float
    c3: float
    c: float
    r: float
    lambda0: float

    def relations_hold(self, rtol: float = 1e-12) -> bool:
        close = lambda a, b: abs(a - b) <= rtol * max(abs(a), abs(b), 1e-300)
        return (
            close(self.delta, min(self.kappa1 / 5.0, self.kappa3 / 2.0))
            and close(self.tau, min(self.tau1, self.tau2, self.tau3, 1.0))
            and close(self.c1, self.delta / 12.0)
            and close(self.c2, self.c1 / (1.0 + 1.0 / (self.lambda0 * self.tau)) ** 3)
            and close(self.c, min(self.c2, self.c3))
        )

    def all_positive(self) -> bool:
        return all(
            v > 0.0
            for v in (
                self.kappa1, self.kappa3, self.delta, self.tau1, self.tau2,
                self.tau3, self.tau, self.c1, self.c2, self.c3, self.c,
                self.r, self.lambda0,
            )
        )

    def to_json_dict(self) -> dict:
        return {
            "kappa1": self.kappa1, "kappa3": self.kappa3, "delta": self.delta,
            "tau1": self.tau1, "tau2": self.tau2, "tau3": self.tau3,
            "tau": self.tau, "c1": self.c1, "c2": self.c2, "c3": self.c3,
            "c": self.c, "r": self.r, "lambda0": self.lambda0,
        }


def appendix_constants(M: int) -> AppendixCConstants:
    """Run the four-step constant pipeline at velocity cutoff M.

    Step 1 fixes delta from the two coercivity constants; step 2 turns the
    exponential remainder bounds into the time limits tau1, tau2; step 3 does
    the same for the cubic remainder (tau3); step 4 couples the cubic
    short-time bound with the exponential long-time decay, which costs the
    reduction from c1 to c2 (all modes up to the crossover magnitude r) and
    c3 (beyond it).
    """
    if M < 32:
        raise PreconditionError("M must be at least 32 for the constants to stabilize")
    kappa1 = kappa_truncated(M)
    kappa3 = kappa3_truncated(M)
    delta = min(kappa1 / 5.0, kappa3 / 2.0)

    tau1 = _bracketed_root(lambda t: _grow_rate_initial(t) - delta, 1e-8, 10.0)
    sigma_inf = constrained_mixing_infimum(M, delta)
    tau2 = math.sqrt(12.0 * delta) / (sigma_inf + math.sqrt(delta))
    tau3 = _bracketed_root(lambda t: _grow_rate_cubic(t) - delta / 12.0, 1e-8, 10.0)
    tau = min(tau1, tau2, tau3, 1.0)

    c1 = delta / 12.0
    c2 = c1 / (1.0 + 1.0 / (LAMBDA0 * tau)) ** 3

    def crossover_gap(x: float) -> float:
        # t_x - tau, where t_x is the time the exponential envelope of the
        # magnitude-x mode drops back to one.
        return tau / x + math.log1p(1.0 / (x - 0.5)) / (2.0 * LAMBDA0) - tau

    hi = 2.0
    while crossover_gap(hi) >= 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise NumericalError("no crossover magnitude r found below 1e12")
    r = _bracketed_root(lambda x: -crossover_gap(x), 1.0 + 1e-9, hi)

    # Endpoint comparison at t = tau for the magnitude-r mode.  By the
    # definition of r the envelope factor equals one there, so the exponent
    # s below is zero up to root-finding error; expm1/log1p keep the tiny
    # residual from being swamped by cancellation.
    s = 0.5 * math.log1p(1.0 / (r - 0.5)) - LAMBDA0 * tau * (1.0 - 1.0 / r)
    a = delta * tau**3 / (12.0 * r)
    c3 = (a * math.exp(s) - math.expm1(s)) / tau**3

    c = min(c2, c3)
    consts = AppendixCConstants(
        kappa1=kappa1, kappa3=kappa3, delta=delta,
        tau1=tau1, tau2=tau2, tau3=tau3, tau=tau,
        c1=c1, c2=c2, c3=c3, c=c, r=r, lambda0=LAMBDA0,
    )
    if not consts.all_positive():
        raise NumericalError(f"constant pipeline produced a nonpositive entry: {consts}")
    return consts


@dataclass
class CubicBoundReport:
    """Worst margin of ||P_n(t)|| <= 1 - c t^3 over modes and the time grid."""

    ok: bool
    worst_margin: float
    worst_mode: float
    worst_time: float
    modes: list[float]
    samples: int

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "worst_margin": self.worst_margin,
            "worst_mode": self.worst_mode,
            "worst_time": self.worst_time,
            "modes": list(self.modes),
            "samples": self.samples,
        }


def cubic_bound_verify(
    N: int, M: int, consts: AppendixCConstants, samples: int = 50
) -> CubicBoundReport:
    """Check ||P_n(t)|| <= 1 - c t^3 + 1e-9 on [0, tau] for n = 1..N."""
    if N < 1 or samples < 2:
        raise PreconditionError("need N >= 1 and at least 2 samples")
    ts = np.linspace(0.0, consts.tau, samples)
    bound = 1.0 - consts.c * ts**3
    worst = np.inf
    w_mode, w_time = 1.0, 0.0
    modes = [float(n) for n in range(1, N + 1)]
    for n in modes:
        gen = modal_generator(n, M)
        norms = _norms_over_grid(gen.C, ts)
        margins = bound - norms
        i = int(np.argmin(margins))
        if margins[i] < worst:
            worst, w_mode, w_time = float(margins[i]), n, float(ts[i])
    return CubicBoundReport(
        ok=bool(worst >= -1e-9),
        worst_margin=float(worst),
        worst_mode=w_mode,
        worst_time=w_time,
        modes=modes,
        samples=samples,
    )


@dataclass
class SandwichReport:
    """Envelope of the modal norms against its cubic upper and modal lower bound."""

    ok: bool
    times: np.ndarray
    sup_norms: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    worst_upper_margin: float
    worst_lower_margin: float

    def to_json_dict(self) -> dict:
        return {
            "ok": self.ok,
            "times": [float(t) for t in self.times],
            "sup_norms": [float(v) for v in self.sup_norms],
            "worst_upper_margin": self.worst_upper_margin,
            "worst_lower_margin": self.worst_lower_margin,
        }


def full_propagator_bounds(
    N: int, M: int, consts: AppendixCConstants, times
) -> SandwichReport:
    """sup over modes 1..N of ||P_n(t)|| must lie in [||P_1(t)||, 1 - c t^3]."""
    ts = np.asarray(times, dtype=float)
    if np.any(ts < 0) or np.any(ts > consts.tau + 1e-15):
        raise PreconditionError("times must lie in [0, tau]")
    all_norms = []
    for n in range(1, N + 1):
        gen = modal_generator(float(n), M)
        all_norms.append(_norms_over_grid(gen.C, ts))
    stack = np.vstack(all_norms)
    sup = stack.max(axis=0)
    lower = stack[0]
    upper = 1.0 - consts.c * ts**3
    worst_upper = float((upper + 1e-9 - sup).min())
    worst_lower = float((sup - lower).min())
    return SandwichReport(
        ok=bool(worst_upper >= 0.0 and worst_lower >= -1e-12),
        times=ts,
        sup_norms=sup,
        lower=lower,
        upper=upper,
        worst_upper_margin=worst_upper,
        worst_lower_margin=worst_lower,
    )


class LorentzField:
    """Fourier coefficients of a phase-space field, indexed by spatial mode
    (n1, n2) with |n_i| <= N componentwise and velocity mode j in [-M, M]."""

    def __init__(self, N: int, M: int, coeffs: np.ndarray | None = None):
        if N < 0 or M < 1:
            raise DimensionError("need N >= 0 and M >= 1")
        self.N = N
        self.M = M
        shape = (2 * N + 1, 2 * N + 1, 2 * M + 1)
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != shape:
            raise DimensionError(f"coeffs must have shape {shape}, got {coeffs.shape}")
        if not np.all(np.isfinite(coeffs)):
            raise InvalidEntryError("field coefficients contain NaN or Inf")
        self.coeffs = coeffs

    def copy(self) -> "LorentzField":
        return LorentzField(self.N, self.M, self.coeffs.copy())

    def __getitem__(self, key):
        n1, n2, j = key
        return self.coeffs[n1 + self.N, n2 + self.N, j + self.M]

    def __setitem__(self, key, value):
        n1, n2, j = key
        self.coeffs[n1 + self.N, n2 + self.N, j + self.M] = value

    @property
    def mass(self) -> complex:
        """The (n=0, j=0) coefficient; conserved by the evolution."""
        return complex(self.coeffs[self.N, self.N, self.M])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def distance_to_equilibrium(self) -> float:
        """Norm of the field minus its constant equilibrium component."""
        total = float(np.sum(np.abs(self.coeffs) ** 2))
        return math.sqrt(max(total - abs(self.mass) ** 2, 0.0))

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, M: int) -> "LorentzField":
        shape = (2 * N + 1, 2 * N + 1, 2 * M + 1)
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return cls(N, M, c)


def field_to_json(field: LorentzField) -> dict:
    """Serialize nonzero coefficients, ordered by (n1, n2, j)."""
    items = []
    for n1 in range(-field.N, field.N + 1):
        for n2 in range(-field.N, field.N + 1):
            for j in range(-field.M, field.M + 1):
                z = field[n1, n2, j]
                if z != 0:
                    items.append(
                        {"n": [n1, n2], "j": j, "re": float(z.real), "im": float(z.imag)}
                    )
    return {"N": field.N, "M": field.M, "coeffs": items}


def field_from_json(obj: dict) -> LorentzField:
    try:
        N = int(obj["N"])
        M = int(obj["M"])
        items = obj["coeffs"]
    except (KeyError, TypeError) as exc:
        raise InvalidEntryError(f"malformed field object: {exc}") from exc
    field = LorentzField(N, M)
    for item in items:
        n1, n2 = int(item["n"][0]), int(item["n"][1])
        j = int(item["j"])
        if abs(n1) > N or abs(n2) > N or abs(j) > M:
            raise DimensionError(f"coefficient index ({n1},{n2},{j}) outside cutoffs")
        field[n1, n2, j] = complex(float(item["re"]), float(item["im"]))
    return field


@dataclass
class SimulationReport:
    """Decay and conservation diagnostics of one evolution step."""

    t: float
    distance: float
    bound: float
    initial_distance: float
    mass_drift: float
    bound_ok: bool
    mass_ok: bool


def _mode_groups(N: int) -> dict[float, list[tuple[int, int]]]:
    """Lattice modes grouped by Euclidean magnitude (shared generator)."""
    groups: dict[float, list[tuple[int, int]]] = {}
    for n1 in range(-N, N + 1):
        for n2 in range(-N, N + 1):
            if n1 == 0 and n2 == 0:
                continue
            mag = round(math.hypot(n1, n2), 12)
            groups.setdefault(mag, []).append((n1, n2))
    return groups


def simulate(field0: LorentzField, t: float, sigma: float = 1.0) -> tuple[LorentzField, SimulationReport]:
    """Evolve every spatial mode independently for time t.

    Modes of equal magnitude share one propagator; the zero mode relaxes by
    the diagonal collision semigroup, which fixes the mass exactly.
    """
    if t < 0:
        raise PreconditionError("t must be nonnegative")
    N, M = field0.N, field0.M
    out = field0.copy()
    ops = build_velocity_operators(M)

    # zero mode: exp(-sigma R t) is diagonal.
    diag = np.full(2 * M + 1, math.exp(-sigma * t), dtype=complex)
    diag[M] = 1.0
    out.coeffs[N, N, :] *= diag

    for mag, modes in _mode_groups(N).items():
        C = sigma * ops.R - mag * ops.J10
        P = core.matrix_exponential(-C, t)
        block = np.stack([field0.coeffs[n1 + N, n2 + N, :] for n1, n2 in modes], axis=1)
        evolved = P @ block
        for k, (n1, n2) in enumerate(modes):
            out.coeffs[n1 + N, n2 + N, :] = evolved[:, k]

    d0 = field0.distance_to_equilibrium()
    d = out.distance_to_equilibrium()
    bound = math.sqrt(3.0) * math.exp(-LAMBDA0 * t) * d0
    drift = abs(out.mass - field0.mass)
    report = SimulationReport(
        t=t,
        distance=d,
        bound=bound,
        initial_distance=d0,
        mass_drift=drift,
        bound_ok=d <= bound + 1e-8,
        mass_ok=drift <= 1e-14 * max(1.0, abs(field0.mass)),
    )
    return out, report


def simulate_curve(
    field0: LorentzField, times, sigma: float = 1.0
) -> list[SimulationReport]:
    """Evolve along a uniform grid, reusing one propagator per mode magnitude."""
    ts = np.asarray(times, dtype=float)
    if ts.size == 0 or np.any(ts < 0) or np.any(np.diff(ts) <= 0):
        raise PreconditionError("times must be strictly increasing and nonnegative")
    N, M = field0.N, field0.M
    ops = build_velocity_operators(M)
    groups = _mode_groups(N)
    uniform = ts.size > 2 and np.allclose(np.diff(ts), ts[1] - ts[0], rtol=1e-12, atol=1e-14)

    d0 = field0.distance_to_equilibrium()
    mass0 = field0.mass
    reports = []
    if uniform:
        dt = float(ts[1] - ts[0])
        props = {
            mag: core.matrix_exponential(-(sigma * ops.R - mag * ops.J10), dt)
            for mag in groups
        }
        state = field0.copy()
        if ts[0] > 0:
            state, _ = simulate(field0, float(ts[0]), sigma)
        diag = np.full(2 * M + 1, math.exp(-sigma * dt), dtype=complex)
        diag[M] = 1.0
        for i, t in enumerate(ts):
            d = state.distance_to_equilibrium()
            bound = math.sqrt(3.0) * math.exp(-LAMBDA0 * float(t)) * d0
            drift = abs(state.mass - mass0)
            reports.append(
                SimulationReport(
                    t=float(t), distance=d, bound=bound, initial_distance=d0,
                    mass_drift=drift, bound_ok=d <= bound + 1e-8,
                    mass_ok=drift <= 1e-14 * max(1.0, abs(mass0)),
                )
            )
            if i + 1 < ts.size:
                state.coeffs[N, N, :] *= diag
                for mag, modes in groups.items():
                    block = np.stack(
                        [state.coeffs[n1 + N, n2 + N, :] for n1, n2 in modes], axis=1
                    )
                    evolved = props[mag] @ block
                    for k, (n1, n2) in enumerate(modes):
                        state.coeffs[n1 + N, n2 + N, :] = evolved[:, k]
    else:
        for t in ts:
            _, rep = simulate(field0, float(t), sigma)
            reports.append(rep)
    return reports
