"""NumPy implementations of the numerical kernels.

This is the fallback backend; `aqec._core._kernels` is the compiled
equivalent. Both expose the same four functions with identical semantics,
and the test suite pins them against each other. Inputs are expected as
C-contiguous complex128 arrays; validation lives in the public wrappers.
"""

import numpy as np

BACKEND_NAME = "python"


def eigvalsh_herm(a):
    """Ascending real eigenvalues of a Hermitian matrix."""
    return np.linalg.eigvalsh(a)


def kraus_apply(rho, kraus):
    """Sum_i K_i rho K_i^dagger for a stack of Kraus operators (N, d, d)."""
    out = np.zeros_like(rho)
    for k in kraus:
        out += k @ rho @ k.conj().T
    return out


def _lindblad_rhs(rho, jumps, gram):
    # gram = sum_j L_j^dag L_j, precomputed by the caller
    acc = -(gram @ rho + rho @ gram)
    for lop in jumps:
        acc += 2.0 * (lop @ rho @ lop.conj().T)
    return acc


def lindblad_rk4(rho0, jumps, t, dt):
    """Integrate drho/dt = sum_j [2 L rho L^dag - {L^dag L, rho}] to time t.

    Fixed-step classical RK4; a final fractional step covers t not being a
    multiple of dt. Returns a new array, rho0 is untouched.
    """
    rho = np.array(rho0, dtype=np.complex128)
    if t == 0.0 or len(jumps) == 0:
        return rho
    gram = np.zeros_like(rho)
    for lop in jumps:
        gram += lop.conj().T @ lop
    nsteps = int(t / dt)
    rem = t - nsteps * dt
    hs = [dt] * nsteps
    if rem > 1e-13 * max(1.0, t):
        hs.append(rem)
    for h in hs:
        k1 = _lindblad_rhs(rho, jumps, gram)
        k2 = _lindblad_rhs(rho + (0.5 * h) * k1, jumps, gram)
        k3 = _lindblad_rhs(rho + (0.5 * h) * k2, jumps, gram)
        k4 = _lindblad_rhs(rho + h * k3, jumps, gram)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def deviation_terms(m, kraus):
    """Per-pair deviation data for a state m and Kraus stack (N, d, d).

    Returns (alpha, lam2) where alpha[i, j] = Tr(m K_i^dag K_j m) / Tr(m)
    and lam2[i, j] = ||m K_i^dag K_j m - alpha[i, j] m||_F^2.
    """
    tr_m = np.trace(m).real
    y = kraus @ m
    g = np.einsum("iba,jbc->ijac", y.conj(), y)
    alpha = np.trace(g, axis1=2, axis2=3) / tr_m
    lam = g - alpha[:, :, None, None] * m[None, None, :, :]
    lam2 = np.einsum("ijab,ijab->ij", lam, lam.conj()).real
    return alpha, lam2
