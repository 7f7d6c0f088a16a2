"""Correlated dephasing and bitflip channels on n qubits.

The noise model attaches one jump operator to every nonempty qubit subset S,
L_S = sqrt(gamma_|S|) P_S, where P_S is the sigma_z (dephasing) or sigma_x
(bitflip) string on S and the rate depends only on the subset size. The
master equation convention carries a factor 2 on the sandwich term and no
1/2 on the anticommutator:

    drho/dt = sum_S [ 2 L_S rho L_S^dag - {L_S^dag L_S, rho} ].

Closed under this evolution, a weight-w coherence decays by
f_w(t) = exp(-4 t sum_k gamma_k N(k, w, n)) with N counting size-k subsets
overlapping a fixed weight-w set an odd number of times. The channel is a
random Pauli-string channel whose configuration probabilities p_k follow
from the decay factors by Krawtchouk inversion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import _core
from .exceptions import ConsistencyError
from .linalg import DimSplit, kron

ERROR_KINDS = ("dephasing", "bitflip")

MIN_QUBITS = 2
MAX_QUBITS = 6


@dataclass(frozen=True)
class RateProfile:
    """Rates gamma_1..gamma_n for correlated noise on n qubits."""

    n: int
    gamma: tuple
    kind: str = "dephasing"

    def __post_init__(self):
        if not MIN_QUBITS <= self.n <= MAX_QUBITS:
            raise ValueError(f"n must be in [{MIN_QUBITS}, {MAX_QUBITS}], got {self.n}")
        gamma = tuple(float(g) for g in self.gamma)
        if len(gamma) != self.n:
            raise ValueError(f"expected {self.n} rates, got {len(gamma)}")
        for g in gamma:
            if not math.isfinite(g) or g < 0.0:
                raise ValueError(f"rates must be finite and nonnegative, got {g}")
        if self.kind not in ERROR_KINDS:
            raise ValueError(f"kind must be one of {ERROR_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "gamma", gamma)

    @property
    def dim(self) -> int:
        return 2**self.n


def subsets_by_weight(n: int):
    """All qubit subsets of {0..n-1} ordered by (weight, lexicographic).

    Qubit 0 is the leftmost tensor factor. The empty subset comes first, so
    index 0 of every subset-ordered collection is the identity string.
    """
    out = []
    for k in range(n + 1):
        out.extend(combinations(range(n), k))
    return out


def _subset_mask(n, subset):
    # qubit 0 = leftmost factor = most significant bit
    mask = 0
    for q in subset:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for n={n}")
        mask |= 1 << (n - 1 - q)
    return mask


def pauli_z_string(n: int, subset) -> np.ndarray:
    """sigma_z on the given qubits, identity elsewhere (diagonal, exact)."""
    mask = _subset_mask(n, subset)
    x = np.arange(2**n)
    signs = np.where(np.bitwise_count(x & mask) % 2, -1.0, 1.0)
    return np.diag(signs).astype(complex)


def pauli_x_string(n: int, subset) -> np.ndarray:
    """sigma_x on the given qubits, identity elsewhere (a permutation, exact)."""
    mask = _subset_mask(n, subset)
    d = 2**n
    x = np.arange(d)
    m = np.zeros((d, d), dtype=complex)
    m[x ^ mask, x] = 1.0
    return m


def pauli_string(n: int, subset, kind: str) -> np.ndarray:
    if kind == "dephasing":
        return pauli_z_string(n, subset)
    if kind == "bitflip":
        return pauli_x_string(n, subset)
    raise ValueError(f"kind must be one of {ERROR_KINDS}, got {kind!r}")


def odd_overlap_count(k: int, w: int, n: int) -> int:
    """Number of size-k subsets meeting a fixed weight-w set an odd number of times."""
    return sum(
        math.comb(w, j) * math.comb(n - w, k - j) for j in range(1, min(w, k) + 1, 2)
    )


def decay_factors(profile: RateProfile, t: float) -> np.ndarray:
    """Coherence decay factors f_0..f_n at time t; f_0 is always 1."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    n = profile.n
    exponents = np.array(
        [
            sum(
                profile.gamma[k - 1] * odd_overlap_count(k, w, n)
                for k in range(1, n + 1)
            )
            for w in range(n + 1)
        ]
    )
    return np.exp(-4.0 * t * exponents)


def krawtchouk_matrix(n: int) -> np.ndarray:
    """Matrix A with A[w, k] = sum_j (-1)^j C(w, j) C(n-w, k-j).

    Maps configuration probabilities to decay factors, f = A p, and is an
    involution up to scale: A A = 2^n I, so p = A f / 2^n.
    """
    a = np.zeros((n + 1, n + 1))
    for w in range(n + 1):
        for k in range(n + 1):
            a[w, k] = sum(
                (-1) ** j * math.comb(w, j) * math.comb(n - w, k - j)
                for j in range(0, min(w, k) + 1)
            )
    return a


@dataclass(frozen=True)
class ErrorProbabilities:
    """Per-configuration probabilities p_0..p_n at a fixed time.

    p_k applies to each individual weight-k Pauli string; the C(n, k)-fold
    multiplicities make the grouped values sum to one.
    """

    n: int
    t: float
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.shape != (self.n + 1,):
            raise ValueError(f"expected {self.n + 1} probabilities, got {p.shape}")
        if p.min() < -1e-12:
            raise ConsistencyError(
                f"negative probability {p.min():.3e} exceeds roundoff; "
                "the decay model is internally inconsistent"
            )
        total = self.grouped_from(p).sum()
        if abs(total - 1.0) > 1e-10:
            raise ConsistencyError(f"grouped probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "p", p)

    def grouped_from(self, p):
        return np.array([math.comb(self.n, k) * p[k] for k in range(self.n + 1)])

    def grouped(self) -> np.ndarray:
        """C(n, k) p_k for k = 0..n; sums to one."""
        return self.grouped_from(self.p)


def error_probabilities(profile: RateProfile, t: float) -> ErrorProbabilities:
    """Configuration probabilities at time t, by Krawtchouk inversion."""
    f = decay_factors(profile, t)
    p = krawtchouk_matrix(profile.n) @ f / profile.dim
    return ErrorProbabilities(n=profile.n, t=float(t), p=p)


def closed_form_probabilities_3q(gamma, t: float) -> np.ndarray:
    """Closed-form p_0..p_3 for three qubits, written out exponential by
    exponential. Solves the same master equation by hand and serves as an
    independent cross-check for the Krawtchouk route.
    """
    g1, g2, g3 = (float(g) for g in gamma)
    e = math.exp
    p0 = (
        e(-8.0 * (3 * g1 + 2 * g2 + g3) * t)
        * (
            3 * e(8.0 * (2 * g1 + g2 + g3) * t)
            + e(8.0 * (3 * g1 + 2 * g2 + g3) * t)
            + 3 * e(4.0 * (5 * g1 + 2 * g2 + g3) * t)
            + e(4.0 * (3 * g1 + 4 * g2 + g3) * t)
        )
        / 8.0
    )
    ea = e(-8.0 * (g1 + g2) * t)
    eb = e(-4.0 * (3 * g1 + g3) * t)
    ec = e(-4.0 * (g1 + 2 * g2 + g3) * t)
    p1 = (1.0 - ea - eb + ec) / 8.0
    p2 = (1.0 - ea + eb - ec) / 8.0
    p3 = (1.0 + 3 * ea - eb - 3 * ec) / 8.0
    return np.array([p0, p1, p2, p3])


@dataclass(frozen=True)
class KrausSet:
    """Weighted Pauli-string Kraus decomposition of the channel at time t.

    elements[i] = sqrt(p_{|S_i|}) P_{S_i} with subsets in (weight, lex)
    order, so element 0 is sqrt(p_0) times the identity.
    """

    profile: RateProfile
    t: float
    probabilities: ErrorProbabilities
    subsets: tuple
    elements: np.ndarray
    _extended: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def dim(self) -> int:
        return self.profile.dim

    def completeness_defect(self) -> float:
        """Max deviation of sum_i E_i^dag E_i from the identity."""
        acc = np.einsum("iba,ibc->ac", self.elements.conj(), self.elements)
        return float(np.max(np.abs(acc - np.eye(self.dim))))

    def index_map(self):
        """Rows (index, weight, qubits) documenting the element ordering."""
        return [(i, len(s), s) for i, s in enumerate(self.subsets)]

    def extended(self, dim_a: int) -> np.ndarray:
        """Elements embedded as identity_a (x) E_i, cached per left dimension."""
        if dim_a == 1:
            return self.elements
        if dim_a not in self._extended:
            eye = np.eye(dim_a)
            self._extended[dim_a] = np.stack(
                [kron(eye, el) for el in self.elements]
            )
        return self._extended[dim_a]


def kraus_set(profile: RateProfile, t: float) -> KrausSet:
    """The channel's 2^n Kraus operators at time t."""
    probs = error_probabilities(profile, t)
    subsets = tuple(subsets_by_weight(profile.n))
    roots = np.sqrt(np.maximum(probs.p, 0.0))
    elements = np.stack(
        [roots[len(s)] * pauli_string(profile.n, s, profile.kind) for s in subsets]
    )
    return KrausSet(
        profile=profile, t=float(t), probabilities=probs, subsets=subsets,
        elements=elements,
    )


def apply_channel(rho: np.ndarray, kset: KrausSet, split: DimSplit | None = None) -> np.ndarray:
    """Apply the channel to rho, acting on the rightmost 2^n dimensions.

    split defaults to (rho_dim / 2^n, 2^n); pass it explicitly when the
    inference would be ambiguous. Anything tensored on the left is treated
    as an untouched spectator (the Kraus elements are embedded as
    identity (x) E_i).
    """
    rho = np.ascontiguousarray(rho, dtype=np.complex128)
    d = kset.dim
    if split is None:
        if rho.shape[0] % d:
            raise ValueError(
                f"state dimension {rho.shape[0]} is not a multiple of {d}"
            )
        split = DimSplit(rho.shape[0] // d, d)
    split.check(rho)
    if split.dim_b != d:
        raise ValueError(
            f"split.dim_b = {split.dim_b} does not match the channel dimension {d}"
        )
    return _core.kraus_apply(rho, kset.extended(split.dim_a))


def superoperator_matrix(kset: KrausSet) -> np.ndarray:
    """Row-major superoperator: vec(E rho E^dag) = (E (x) conj(E)) vec(rho)."""
    d = kset.dim
    s = np.zeros((d * d, d * d), dtype=complex)
    for el in kset.elements:
        s += np.kron(el, el.conj())
    return s


@dataclass(frozen=True)
class LindbladGenerator:
    """Jump operators for the master equation, one per nonempty subset.

    The operators act on the rightmost 2^n dimensions; dim_a extends them as
    identity (x) L for a spectator factor on the left (an ancilla qubit in
    the entanglement experiments).
    """

    profile: RateProfile
    dim_a: int = 1

    def __post_init__(self):
        if self.dim_a < 1:
            raise ValueError("dim_a must be positive")

    @property
    def dim(self) -> int:
        return self.dim_a * self.profile.dim

    def system_jump_operators(self) -> np.ndarray:
        subsets = subsets_by_weight(self.profile.n)[1:]
        return np.stack(
            [
                math.sqrt(self.profile.gamma[len(s) - 1])
                * pauli_string(self.profile.n, s, self.profile.kind)
                for s in subsets
            ]
        )

    def jump_operators(self) -> np.ndarray:
        """The 2^n - 1 jump operators on the (possibly extended) space."""
        sys_ops = self.system_jump_operators()
        if self.dim_a == 1:
            return sys_ops
        eye = np.eye(self.dim_a)
        return np.stack([kron(eye, op) for op in sys_ops])


def lindblad_generator(profile: RateProfile, dim_a: int = 1) -> LindbladGenerator:
    return LindbladGenerator(profile=profile, dim_a=dim_a)


def integrate_lindblad(
    gen: LindbladGenerator, rho0: np.ndarray, t: float, dt: float = 1e-3
) -> np.ndarray:
    """Fixed-step RK4 integration of the master equation from 0 to t.

    Serves as the dynamical oracle for the Kraus route; the two must agree
    to solver accuracy (see the consistency tests). dt = 1e-3 keeps the RK4
    truncation error orders of magnitude below the 1e-6 comparison budget
    for the rate magnitudes used here.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if dt <= 0:
        raise ValueError("dt must be positive")
    rho0 = np.ascontiguousarray(rho0, dtype=np.complex128)
    if rho0.shape != (gen.dim, gen.dim):
        raise ValueError(
            f"state shape {rho0.shape} does not match generator dimension {gen.dim}"
        )
    return _core.lindblad_rk4(rho0, gen.jump_operators(), float(t), float(dt))
