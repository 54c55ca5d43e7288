"""Hilbert-space building blocks for bipartite torus maps.

Everything works in the discrete position basis ``n = 0..N-1``. The momentum
translation ``T_p`` is diagonal here, the position translation ``T_q`` is the
cyclic shift, and the standard local observable is ``(T_p + T_p^dag)/2``,
i.e. a diagonal cosine. Operators on the product space are built with
:func:`embed`.
"""

from dataclasses import dataclass, field

import numpy as np

# Dense matrices on the product space are allowed up to this dimension by
# default; larger systems must go through the vector-application path.
DEFAULT_MAX_DENSE_DIM = 2**13

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12


class BudgetError(ValueError):
    """Requested dense dimension exceeds the configured memory budget."""


def check_budget(dim, max_dim=None):
    limit = DEFAULT_MAX_DENSE_DIM if max_dim is None else max_dim
    if dim > limit:
        raise BudgetError(
            f"dense dimension {dim} exceeds budget {limit}; "
            "use the vector-application path instead"
        )


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex square matrix with a structural role tag.

    ``role`` is one of ``"unitary"``, ``"hermitian"``, ``"general"``; the
    corresponding structure is checked at construction time.  ``local``
    optionally records that the matrix is an embedding ``O x I`` or ``I x O``
    as ``(side, local_entries)``; the trace routines exploit this.
    """

    entries: np.ndarray
    role: str = "general"
    local: tuple = field(default=None, compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        object.__setattr__(self, "entries", m)
        m.setflags(write=False)
        if self.role == "unitary":
            dev = np.abs(m.conj().T @ m - np.eye(self.dim)).max()
            if dev >= UNITARY_TOL:
                raise ValueError(f"matrix tagged unitary deviates by {dev:.3e}")
        elif self.role == "hermitian":
            dev = np.abs(m - m.conj().T).max()
            if dev >= HERMITIAN_TOL:
                raise ValueError(f"matrix tagged hermitian deviates by {dev:.3e}")
        elif self.role != "general":
            raise ValueError(f"unknown role {self.role!r}")

    @property
    def dim(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class SystemParams:
    """Full parameter set for one coupled-rotor system.

    ``N`` is the Hilbert dimension per subsystem, ``K1``/``K2`` the kick
    strengths, ``b`` the rotor interaction, ``alpha`` the quantum phase
    (0.35 by default, breaking parity), ``epsilon`` the interaction strength
    of the random-matrix model counterpart.
    """

    N: int
    K1: float = 0.0
    K2: float = 0.0
    b: float = 0.0
    alpha: float = 0.35
    epsilon: float = 0.0

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("subsystem dimension must be at least 2")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError("alpha must lie in [0, 1)")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")


def _check_N(N):
    if N < 2:
        raise ValueError("dimension must be at least 2")


def translation_p(N, alpha=0.0):
    """Momentum translation, diagonal in position: exp(2 pi i (n+alpha)/N)."""
    _check_N(N)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    phases = np.exp(2j * np.pi * (np.arange(N) + alpha) / N)
    return OperatorMatrix(np.diag(phases), role="unitary")


def translation_q(N):
    """Cyclic position shift |n> -> |n+1 mod N>."""
    _check_N(N)
    return OperatorMatrix(np.roll(np.eye(N), 1, axis=0), role="unitary")


def cosine_observable(N, alpha=0.0):
    """The observable (T_p + T_p^dag)/2 = diag cos(2 pi (n+alpha)/N)."""
    _check_N(N)
    vals = np.cos(2 * np.pi * (np.arange(N) + alpha) / N)
    return OperatorMatrix(np.diag(vals).astype(complex), role="hermitian")


def gue_observable(N, rng_seed):
    """Hermitian GUE observable (M + M^dag)/2, reproducible from the seed.

    The real and imaginary parts of M are i.i.d. standard normal; no extra
    1/sqrt(N) scaling is applied since the OTOC is normalized by its
    saturation value anyway.
    """
    _check_N(N)
    rng = np.random.default_rng(rng_seed)
    m = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    return OperatorMatrix((m + m.conj().T) / 2, role="hermitian")


def embed(op, side, N_other, max_dim=None):
    """Kronecker-embed a subsystem operator: O x I (left) or I x O (right).

    The result keeps a reference to the local factor so product-space traces
    can avoid full N^2 x N^2 matrix products.
    """
    if op.dim < 2:
        raise ValueError("operator dimension must be at least 2")
    check_budget(op.dim * N_other, max_dim)
    eye = np.eye(N_other)
    if side == "left":
        big = np.kron(op.entries, eye)
    elif side == "right":
        big = np.kron(eye, op.entries)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return OperatorMatrix(big, role=op.role, local=(side, op.entries))
