"""Code-quality metrics: deviation functional, negativity, initial rates.

The deviation functional quantifies how far a code sits from the exact
error-correction conditions for a given Kraus set,

    delta_c = sum_ij Tr(Lambda_ij Lambda_ij^dag),
    Lambda_ij = M E_i^dag E_j M - alpha_ij M,
    alpha_ij = Tr(M E_i^dag E_j M) / Tr(M),

with M either the code projector or the ancilla-reduced probe state (the
two give different normalizations; both are accepted). Note this evaluates
the functional literally on the weighted Kraus elements, so its terms scale
with p_i p_j; the closed-form expressions in closed_form_delta carry
sqrt(p_i p_j) instead and are kept as a separate, independently stated
quantity rather than reconciled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import _core
from .channel import KrausSet
from .codes import Code
from .exceptions import ConsistencyError
from .linalg import DimSplit, is_hermitian, partial_transpose

PAIR_TOL = 1e-10


@dataclass(frozen=True)
class DeviationReport:
    """Per-pair deviation data and the summed functional."""

    alpha: np.ndarray
    lambda_norms: np.ndarray
    delta_c: float
    violating_pairs: tuple

    def __post_init__(self):
        if np.max(np.abs(self.alpha - self.alpha.conj().T)) > 1e-10:
            raise ConsistencyError("alpha matrix is not Hermitian")
        if abs(self.delta_c - float(self.lambda_norms.sum())) > 1e-12:
            raise ConsistencyError("delta_c does not match the summed pair norms")


def deviation(state: np.ndarray, kset: KrausSet, pair_tol: float = PAIR_TOL) -> DeviationReport:
    """Evaluate the deviation functional for a projector or reduced state.

    state must be Hermitian and supported on the code space; pass either the
    rank-2 projector (trace 2) or the reduced probe state (trace 1).
    violating_pairs lists the ordered index pairs with pair norm above
    pair_tol.
    """
    state = np.ascontiguousarray(state, dtype=np.complex128)
    if not is_hermitian(state):
        raise ValueError("deviation input must be Hermitian")
    if state.shape != kset.elements.shape[1:]:
        raise ValueError(
            f"state dimension {state.shape} does not match the channel "
            f"dimension {kset.dim}"
        )
    alpha, lam2 = _core.deviation_terms(state, kset.elements)
    alpha = np.asarray(alpha)
    lam2 = np.asarray(lam2)
    pairs = tuple(
        (int(i), int(j)) for i, j in np.argwhere(lam2 > pair_tol)
    )
    return DeviationReport(
        alpha=alpha,
        lambda_norms=lam2,
        delta_c=float(lam2.sum()),
        violating_pairs=pairs,
    )


class KLResult(NamedTuple):
    ok: bool
    max_violation: float


def kl_check(code: Code, errors, tol: float = 1e-10) -> KLResult:
    """Test the exact error-correction conditions for an error set.

    Checks max-entry norm of P A_i^dag A_j P - alpha_ij P over all pairs,
    with alpha_ij = Tr(P A_i^dag A_j P) / Tr(P). The error set need not be
    trace preserving or normalized.
    """
    p = code.projector
    errors = np.asarray(errors, dtype=complex)
    if errors.ndim != 3 or errors.shape[1:] != p.shape:
        raise ValueError(
            f"expected an (N, {code.dim}, {code.dim}) error stack, got {errors.shape}"
        )
    y = errors @ p
    worst = 0.0
    tr_p = np.trace(p).real
    for i in range(len(errors)):
        yi = y[i].conj().T
        for j in range(len(errors)):
            g = yi @ y[j]
            lam = g - (np.trace(g) / tr_p) * p
            worst = max(worst, float(np.max(np.abs(lam))))
    return KLResult(ok=worst <= tol, max_violation=worst)


def negativity(rho: np.ndarray, split: DimSplit, which: str = "b") -> float:
    """Entanglement negativity across the split, two routes cross-checked.

    Computed as the trace norm of the partial transpose minus one (singular
    values) and as the summed magnitude of the negative eigenvalues; the two
    must agree to 1e-10 or a ConsistencyError is raised.
    """
    pt = partial_transpose(rho, split, which)
    singular_route = float(np.sum(np.linalg.svd(pt, compute_uv=False))) - 1.0
    w = np.asarray(_core.eigvalsh_herm(np.ascontiguousarray(pt)))
    eigen_route = float(np.sum(np.abs(w) - w))
    if abs(singular_route - eigen_route) > 1e-10:
        raise ConsistencyError(
            f"negativity routes disagree: {singular_route!r} vs {eigen_route!r}"
        )
    return eigen_route


class RateEstimate(NamedTuple):
    forward: float
    richardson: float
    h: float


def initial_rate(
    curve: Callable[[float], float],
    h: float = 1e-3,
    rel_tol: float = 0.02,
    check: bool = True,
) -> RateEstimate:
    """One-sided derivative of curve at 0 by forward difference.

    Evaluates the curve at 0, h/2 and h; returns the plain forward
    difference along with its two-step Richardson refinement. The h and h/2
    estimates must agree to rel_tol relatively (skipped for rates at
    roundoff level), otherwise the curve is too nonlinear at this h and a
    ConsistencyError is raised.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    f0 = float(curve(0.0))
    fh = float(curve(h))
    fhalf = float(curve(h / 2.0))
    d_full = (fh - f0) / h
    d_half = (fhalf - f0) / (h / 2.0)
    scale = max(abs(d_full), abs(d_half))
    if check and scale > 1e-9 and abs(d_full - d_half) > rel_tol * scale:
        raise ConsistencyError(
            f"step-halving check failed: {d_full!r} vs {d_half!r} at h={h:g}"
        )
    return RateEstimate(forward=d_full, richardson=2.0 * d_half - d_full, h=h)


CLOSED_FORM_KINDS = ("standard", "rotated")


def closed_form_delta(code_kind: str, probs) -> float:
    """Stated closed-form deviation for the three-qubit code families.

    standard: 2 (sqrt(p0 p3) + 3 sqrt(p1 p2))
    rotated:  2 (sqrt(p0 p1) + 2 sqrt(p1 p2) + sqrt(p2 p3))

    These carry sqrt(p_i p_j) weights and therefore differ from the literal
    functional computed by deviation(); see the module docstring.
    """
    p = np.maximum(np.asarray(getattr(probs, "p", probs), dtype=float), 0.0)
    if p.shape != (4,):
        raise ValueError("closed_form_delta is defined for n = 3 only")
    if code_kind == "standard":
        return 2.0 * (math.sqrt(p[0] * p[3]) + 3.0 * math.sqrt(p[1] * p[2]))
    if code_kind == "rotated":
        return 2.0 * (
            math.sqrt(p[0] * p[1])
            + 2.0 * math.sqrt(p[1] * p[2])
            + math.sqrt(p[2] * p[3])
        )
    raise ValueError(f"code_kind must be one of {CLOSED_FORM_KINDS}, got {code_kind!r}")


@dataclass(frozen=True)
class RegimeReport:
    lhs: float
    rhs: float
    rotated_optimal: bool


def regime_inequality(probs) -> RegimeReport:
    """Compare the two code families' closed-form deviations at any n.

    lhs = sum_i C(n, i) sqrt(p_i p_{n-i}) (standard code),
    rhs = 2 sum_i C(n-1, i) sqrt(p_i p_{i+1}) (rotated code);
    lhs > rhs marks the regime where the rotated family wins.
    """
    p = np.maximum(np.asarray(getattr(probs, "p", probs), dtype=float), 0.0)
    n = p.shape[0] - 1
    lhs = sum(
        math.comb(n, i) * math.sqrt(p[i] * p[n - i]) for i in range(n + 1)
    )
    rhs = 2.0 * sum(
        math.comb(n - 1, i) * math.sqrt(p[i] * p[i + 1]) for i in range(n)
    )
    return RegimeReport(lhs=float(lhs), rhs=float(rhs), rotated_optimal=lhs > rhs)
