"""Infinite-temperature OTOC of the coupled rotors and its two-phase fits.

C(t) = C2(t) - C4(t) with C2 = Tr[A(t)^2 B^2] and C4 = Tr[A(t) B A(t) B];
A evolves in the Heisenberg picture, one kick per step.  The dense path keeps
A as a full product-space matrix but conjugates through the Kronecker
structure of the propagator, so a step costs O(N^5) instead of O(N^6).  The
stochastic path estimates the same traces with random-phase probe vectors.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j0

from . import bipartite
from .operators import OperatorMatrix, check_budget

# First zero of the Bessel function J0; mu(b) diverges there.
_J0_FIRST_ZERO = 2.404825557695773

# Relative scale below which 1 - C/C_inf is considered saturated on the
# dense path (exact traces, double precision).
DENSE_NOISE_FLOOR = 1e-10


@dataclass
class OtocSeries:
    """Time series of the correlators, plus optional Monte Carlo errors."""

    times: np.ndarray
    c2: np.ndarray
    c4: np.ndarray
    c_infinity: float
    meta: dict = field(default_factory=dict)
    c2_err: np.ndarray = None
    c4_err: np.ndarray = None
    c_err: np.ndarray = None

    @property
    def c(self):
        return self.c2 - self.c4

    @property
    def c_norm(self):
        return self.c / self.c_infinity


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    slope_stderr: float
    window: tuple


def linear_fit(x, y):
    """Least squares line with the usual residual-based slope error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise ValueError("need at least two points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    if len(x) > 2:
        resid = y - (slope * x + intercept)
        sigma = np.sqrt(np.sum(resid**2) / (len(x) - 2))
        stderr = sigma / np.sqrt(np.sum((x - x.mean()) ** 2))
    else:
        stderr = 0.0
    return slope, intercept, stderr


def saturation_value(O1, O2):
    """C_inf = Tr(O1^2) Tr(O2^2) for the subsystem observables."""
    for op in (O1, O2):
        if np.abs(op.entries - op.entries.conj().T).max() > 1e-10:
            raise ValueError("saturation value expects Hermitian observables")
    return float(
        np.sum(np.abs(O1.entries) ** 2) * np.sum(np.abs(O2.entries) ** 2)
    )


def mu_standard_map(N, b):
    """Relaxation rate ln|J0(N b / 2 pi)|^-4 of the coupled standard map."""
    x = N * b / (2 * np.pi)
    if x < 0 or x >= _J0_FIRST_ZERO:
        raise ValueError(
            f"N*b/(2 pi) = {x:.4f} is at or beyond the first zero of J0"
        )
    return float(-4.0 * np.log(np.abs(j0(x))))


def ehrenfest_time(N, K):
    """t_EF = ln N / ln(K/2); K is the kick strength setting the subsystem
    Lyapunov exponent (the larger kick, in the two-rotor runs)."""
    if K <= 2:
        raise ValueError("Ehrenfest estimate needs K > 2")
    return math.log(N) / math.log(K / 2)


def heisenberg_step(A, F):
    """One Heisenberg kick: A -> U^dag A U through the propagator structure."""
    if A.dim != F.N**2:
        raise ValueError(f"operator dimension {A.dim} != N^2 = {F.N ** 2}")
    check_budget(A.dim)
    out = _heisenberg_step_raw(A.entries, F)
    if A.role == "hermitian":
        # conjugation is exactly Hermiticity-preserving; discard roundoff
        out = (out + out.conj().T) / 2
    return OperatorMatrix(out, role=A.role)


def _heisenberg_step_raw(A, F):
    out = bipartite.kron_conjugate(F.U1.entries, F.U2.entries, A)
    return bipartite.diag_conjugate(F.Ub_diag, out)


def _embedded_square(op):
    side, m = op.local
    return side, m, m @ m


def _c2_c4(A, B_side, B_loc, B_loc_sq):
    ab = bipartite.right_multiply_embedded(A, B_loc, B_side)
    ab2 = bipartite.right_multiply_embedded(A, B_loc_sq, B_side)
    c2 = bipartite.trace_product(A, ab2)
    c4 = bipartite.trace_product(ab, ab)
    for name, val in (("C2", c2), ("C4", c4)):
        if abs(val.imag) > 1e-10 * max(abs(val.real), 1.0):
            raise FloatingPointError(f"{name} has a non-negligible imaginary part")
    return c2.real, c4.real


def otoc_series_dense(F, A0, B0, T, meta=None):
    """Exact-trace OTOC series for embedded observables A0, B0.

    Both observables must come from :func:`otoclab.operators.embed` so the
    trace evaluations can use their local factors.
    """
    N = F.N
    check_budget(N**2)
    if A0.dim != N**2 or B0.dim != N**2:
        raise ValueError("observables must live on the product space")
    if B0.local is None:
        raise ValueError("B0 must be an embedded subsystem observable")
    b_side, b_loc, b_loc_sq = _embedded_square(B0)
    # C_inf = Tr(O1^2) Tr(O2^2) = Tr(A0^2) Tr(B0^2) / N^2 for embeddings
    c_inf = (
        np.sum(np.abs(A0.entries) ** 2) * np.sum(np.abs(B0.entries) ** 2) / N**2
    )
    A = A0.entries.copy()
    c2s, c4s = [], []
    for t in range(T + 1):
        if t > 0:
            A = _heisenberg_step_raw(A, F)
            A = (A + A.conj().T) / 2
        c2, c4 = _c2_c4(A, b_side, b_loc, b_loc_sq)
        c2s.append(c2)
        c4s.append(c4)
    info = {"params": F.params, "path": "dense"}
    info.update(meta or {})
    return OtocSeries(
        times=np.arange(T + 1),
        c2=np.array(c2s),
        c4=np.array(c4s),
        c_infinity=float(c_inf),
        meta=info,
    )


def same_subspace_series(F, O1a, O1b, T, meta=None):
    """OTOC with both observables in subsystem 1: A = O1a x I, B = O1b x I."""
    from .operators import embed

    info = {"scenario": "same_subspace"}
    info.update(meta or {})
    return otoc_series_dense(
        F,
        embed(O1a, "left", F.N),
        embed(O1b, "left", F.N),
        T,
        meta=info,
    )


def _apply_embedded(op, batch):
    if op.local is not None:
        side, m = op.local
        if side == "left":
            return bipartite.apply_local(batch, U1=m)
        return bipartite.apply_local(batch, U2=m)
    return op.entries @ batch


def otoc_series_stochastic(F, A0, B0, T, probes, rng, meta=None):
    """Random-phase trace estimation of the OTOC for large N.

    Uses unit-modulus probe vectors z with E[z z^dag] = I, giving unbiased
    estimates of the traces; standard errors come from the probe scatter.
    """
    if probes < 16:
        raise ValueError("need at least 16 probe vectors")
    N = F.N
    dim = N**2

    from .kicked_rotor import apply_floquet

    if B0.local is not None:
        side, m = B0.local
        B0sq = OperatorMatrix(B0.entries, role="general", local=(side, m @ m))
    else:
        B0sq = OperatorMatrix(B0.entries @ B0.entries, role="general")

    Z = np.exp(2j * np.pi * rng.random((dim, probes)))

    def heisenberg_apply(batch, t):
        out = batch
        for _ in range(t):
            out = apply_floquet(F, out, "forward")
        out = _apply_embedded(A0, out)
        for _ in range(t):
            out = apply_floquet(F, out, "adjoint")
        return out

    c_inf = (
        np.sum(np.abs(A0.entries) ** 2) * np.sum(np.abs(B0.entries) ** 2) / N**2
    )
    c2_mean, c2_err, c4_mean, c4_err, c_err = [], [], [], [], []
    for t in range(T + 1):
        y = heisenberg_apply(_apply_embedded(B0sq, Z), t)
        y = heisenberg_apply(y, t)
        e2 = np.einsum("ip,ip->p", Z.conj(), y).real
        y = heisenberg_apply(_apply_embedded(B0, Z), t)
        y = heisenberg_apply(_apply_embedded(B0, y), t)
        e4 = np.einsum("ip,ip->p", Z.conj(), y).real
        for vals, mean_acc, err_acc in ((e2, c2_mean, c2_err), (e4, c4_mean, c4_err)):
            mean_acc.append(vals.mean())
            err_acc.append(vals.std(ddof=1) / np.sqrt(probes))
        diff = e2 - e4
        c_err.append(diff.std(ddof=1) / np.sqrt(probes))
    info = {"params": F.params, "path": "stochastic", "probes": probes}
    info.update(meta or {})
    return OtocSeries(
        times=np.arange(T + 1),
        c2=np.array(c2_mean),
        c4=np.array(c4_mean),
        c_infinity=float(c_inf),
        meta=info,
        c2_err=np.array(c2_err),
        c4_err=np.array(c4_err),
        c_err=np.array(c_err),
    )


def default_lyapunov_window(series):
    """First three kicks with strictly positive C(t): the growth segment.

    C(0) = 0 for disjoint observables, and C(1) = 0 exactly when both
    observables are diagonal in the interaction basis, so the window starts
    at the first informative point.
    """
    c = series.c
    pos = np.flatnonzero((series.times > 0) & (c > 0))
    if len(pos) < 3:
        raise ValueError("series has fewer than three positive points")
    t0 = series.times[pos[0]]
    return (int(t0), int(t0) + 2)


def fit_lyapunov_phase(series, window=None):
    """Slope of ln C(t) in the growth phase; estimates 2 lambda_L."""
    if window is None:
        window = default_lyapunov_window(series)
    t_min, t_max = window
    mask = (series.times >= t_min) & (series.times <= t_max)
    if mask.sum() < 3:
        raise ValueError("fit window must contain at least three points")
    c = series.c[mask]
    if np.any(c <= 0):
        raise ValueError("fit window contains nonpositive C(t)")
    slope, intercept, stderr = linear_fit(series.times[mask], np.log(c))
    return FitResult(slope, intercept, stderr, (int(t_min), int(t_max)))


def relaxation_noise_floor(series):
    if series.c_err is not None:
        return float(max(series.c_err[-1] / series.c_infinity, DENSE_NOISE_FLOOR))
    return DENSE_NOISE_FLOOR


def default_relaxation_window(series, t_ef=None):
    """From just past the Ehrenfest time to the last unsaturated point."""
    if t_ef is None:
        p = series.meta.get("params")
        if p is None:
            raise ValueError("series carries no params; pass t_ef explicitly")
        t_ef = ehrenfest_time(p.N, max(p.K1, p.K2))
    gap = 1.0 - series.c_norm
    floor = 10.0 * relaxation_noise_floor(series)
    t_min = int(np.ceil(t_ef)) + 1
    good = np.flatnonzero((series.times >= t_min) & (gap > floor))
    if len(good) < 3:
        raise ValueError("fewer than three unsaturated points past the Ehrenfest time")
    return (t_min, int(series.times[good[-1]]))


def fit_relaxation_phase(series, window=None, t_ef=None):
    """Slope of ln(1 - C/C_inf) in the second phase; -slope estimates mu."""
    if window is None:
        window = default_relaxation_window(series, t_ef)
    t_min, t_max = window
    mask = (series.times >= t_min) & (series.times <= t_max)
    if mask.sum() < 3:
        raise ValueError("fit window must contain at least three points")
    gap = 1.0 - series.c_norm[mask]
    if np.any(gap <= 0):
        raise ValueError("fit window contains saturated points (1 - C/C_inf <= 0)")
    slope, intercept, stderr = linear_fit(series.times[mask], np.log(gap))
    return FitResult(slope, intercept, stderr, (int(t_min), int(t_max)))
