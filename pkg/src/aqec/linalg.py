"""Dense complex linear algebra sized for few-qubit operators.

Everything here works on plain complex128 ndarrays; the largest matrices in
the package are 64x64, so no sparsity or blocking is attempted.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import _core
from .exceptions import ConsistencyError

HERMITIAN_TOL = 1e-10


class DimSplit(NamedTuple):
    """Bipartition of a joint space into a left factor a and right factor b."""

    dim_a: int
    dim_b: int

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def check(self, mat: np.ndarray) -> None:
        if self.dim_a < 1 or self.dim_b < 1:
            raise ValueError(f"factor dimensions must be positive, got {self}")
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] != self.dim:
            raise ValueError(
                f"matrix dimension {mat.shape[0]} does not match split "
                f"{self.dim_a}x{self.dim_b}"
            )


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more operators, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operator")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def _require_hermitian(a, tol, what):
    if not is_hermitian(a, tol):
        raise ValueError(f"{what} must be Hermitian to within {tol:g}")


def _axis(which: str) -> str:
    w = str(which).lower()
    if w not in ("a", "b"):
        raise ValueError(f"subsystem must be 'a' or 'b', got {which!r}")
    return w


def partial_transpose(rho: np.ndarray, split: DimSplit, which: str = "b") -> np.ndarray:
    """Transpose one tensor factor of a bipartite operator."""
    split.check(rho)
    r = rho.reshape(split.dim_a, split.dim_b, split.dim_a, split.dim_b)
    if _axis(which) == "a":
        r = r.transpose(2, 1, 0, 3)
    else:
        r = r.transpose(0, 3, 2, 1)
    return r.reshape(split.dim, split.dim)


def partial_trace(rho: np.ndarray, split: DimSplit, traced: str = "a") -> np.ndarray:
    """Trace out one tensor factor, returning the reduced operator."""
    split.check(rho)
    r = rho.reshape(split.dim_a, split.dim_b, split.dim_a, split.dim_b)
    if _axis(traced) == "a":
        return np.trace(r, axis1=0, axis2=2)
    return np.trace(r, axis1=1, axis2=3)


def hermitian_eigenvalues(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    The input is checked for Hermiticity, and the result is checked against
    the trace (the eigenvalue sum must reproduce it).
    """
    a = np.ascontiguousarray(a, dtype=np.complex128)
    _require_hermitian(a, tol, "eigenvalue input")
    w = np.asarray(_core.eigvalsh_herm(a), dtype=float)
    tr = np.trace(a).real
    scale = max(1.0, float(np.abs(a).max()) * a.shape[0])
    if abs(w.sum() - tr) > 1e-10 * scale:
        raise ConsistencyError(
            f"eigenvalue sum {w.sum():.3e} does not match trace {tr:.3e}"
        )
    return w


def trace_norm(a: np.ndarray) -> float:
    """Trace norm ||a||_1, the sum of singular values.

    Hermitian inputs take the eigenvalue fast path.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if is_hermitian(a):
        return float(np.sum(np.abs(_core.eigvalsh_herm(np.ascontiguousarray(a)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def unitary_from_generator(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """exp(i h) for Hermitian h, via the spectral decomposition."""
    h = np.asarray(h, dtype=complex)
    _require_hermitian(h, tol, "generator")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary of size dim, drawn from the given rng.

    QR of a complex Gaussian matrix, with the R diagonal's phases folded
    back into the columns so the distribution is exactly uniform.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    rng = np.random.default_rng(rng)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
