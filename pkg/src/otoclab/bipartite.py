"""Structure-exploiting linear algebra on the bipartite product space.

Index layout is row-major with the subsystem-1 index outer: a product-space
vector of length N^2 reshapes to an (n1, n2) matrix, and an operator on the
product space reshapes to the four-index tensor T[a1, a2, b1, b2].  All
routines here cost O(N^3)..O(N^5) instead of the naive O(N^4)..O(N^6).
"""

import numpy as np


def split_dim(dim_sq):
    n = round(np.sqrt(dim_sq))
    if n * n != dim_sq:
        raise ValueError(f"dimension {dim_sq} is not a perfect square")
    return n


def apply_local(psi, U1=None, U2=None):
    """Apply (U1 x U2) to one vector or a batch of column vectors."""
    n = split_dim(psi.shape[0])
    batch = psi.reshape(n, n, -1)
    if U1 is not None:
        batch = np.tensordot(U1, batch, axes=(1, 0))
    if U2 is not None:
        batch = np.tensordot(U2, batch, axes=(1, 1)).transpose(1, 0, 2)
    out = batch.reshape(n * n, -1)
    return out[:, 0] if psi.ndim == 1 else out


def kron_conjugate(U1, U2, A):
    """(U1 x U2)^dag A (U1 x U2) without forming the Kronecker product."""
    n = U1.shape[0]
    T = A.reshape(n, n, n, n)
    T = np.tensordot(U1.conj(), T, axes=(0, 0))
    T = np.tensordot(U2.conj(), T, axes=(0, 1)).transpose(1, 0, 2, 3)
    T = np.tensordot(T, U1, axes=(2, 0)).transpose(0, 1, 3, 2)
    T = np.tensordot(T, U2, axes=(3, 0))
    return T.reshape(n * n, n * n)


def diag_conjugate(d, A):
    """D^dag A D for diagonal D with entries d."""
    return d.conj()[:, None] * A * d[None, :]


def right_multiply_embedded(A, M, side):
    """A @ (M x I) or A @ (I x M) for a subsystem matrix M."""
    n = M.shape[0]
    if side == "right":
        return (A.reshape(-1, n, n) @ M).reshape(A.shape)
    T = A.reshape(-1, n, n)
    T = np.tensordot(T, M, axes=(1, 0)).transpose(0, 2, 1)
    return T.reshape(A.shape)


def trace_product(A, B):
    """Tr[A B] via elementwise sum; both arguments dense."""
    return np.sum(A * B.T)


def partial_trace_first(rho):
    """Trace out subsystem 1 of a product-space density matrix."""
    n = split_dim(rho.shape[0])
    return rho.reshape(n, n, n, n).trace(axis1=0, axis2=2)
