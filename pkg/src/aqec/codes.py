"""Two-dimensional codes built from product states, and their probe states.

The repetition code spans |+>^n and |->^n; the rotated variant replaces one
qubit by |0>/|1>. The probe state entangles an ancilla qubit with the two
codewords so entanglement negativity can track how well the code protects
a logical qubit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .linalg import DimSplit

KET_0 = np.array([1.0, 0.0], dtype=complex)
KET_1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)

ORTHONORMAL_TOL = 1e-12


def _product_state(factors) -> np.ndarray:
    return reduce(np.kron, factors)


@dataclass(frozen=True)
class Code:
    """A two-dimensional code given by an orthonormal pair of codewords."""

    n: int
    words: np.ndarray
    label: str = ""

    def __post_init__(self):
        words = np.asarray(self.words, dtype=complex)
        if words.shape != (2, 2**self.n):
            raise ValueError(
                f"expected codeword array of shape (2, {2**self.n}), got {words.shape}"
            )
        gram = words.conj() @ words.T
        if np.max(np.abs(gram - np.eye(2))) > ORTHONORMAL_TOL:
            raise ValueError("codewords must be orthonormal")
        object.__setattr__(self, "words", words)

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def projector(self) -> np.ndarray:
        """Rank-2 projector onto the code space (trace 2)."""
        return self.words.T @ self.words.conj()

    def reduced_state(self) -> np.ndarray:
        """The probe state reduced over the ancilla: projector / 2."""
        return self.projector / 2.0


def repetition_code(n: int) -> Code:
    words = np.stack(
        [_product_state([KET_PLUS] * n), _product_state([KET_MINUS] * n)]
    )
    return Code(n=n, words=words, label="repetition")


def rotated_code(n: int, position: int = 0) -> Code:
    """Repetition code with the qubit at `position` rotated to the z basis."""
    if not 0 <= position < n:
        raise ValueError(f"position must be in [0, {n - 1}], got {position}")
    first = [KET_PLUS] * n
    second = [KET_MINUS] * n
    first[position] = KET_0
    second[position] = KET_1
    words = np.stack([_product_state(first), _product_state(second)])
    return Code(n=n, words=words, label=f"rotated[{position}]")


def anti_aligned_code4() -> Code:
    """Four-qubit code spanning |+,-,-,-> and |+,+,+,->."""
    words = np.stack(
        [
            _product_state([KET_PLUS, KET_MINUS, KET_MINUS, KET_MINUS]),
            _product_state([KET_PLUS, KET_PLUS, KET_PLUS, KET_MINUS]),
        ]
    )
    return Code(n=4, words=words, label="anti4")


def transform_code(code: Code, u: np.ndarray, label: str | None = None) -> Code:
    """Apply a unitary on the code's n qubits to both codewords."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (code.dim, code.dim):
        raise ValueError(f"unitary shape {u.shape} does not match dim {code.dim}")
    if np.max(np.abs(u.conj().T @ u - np.eye(code.dim))) > 1e-10:
        raise ValueError("transform must be unitary")
    words = code.words @ u.T
    return Code(n=code.n, words=words, label=label or f"{code.label}*u")


@dataclass(frozen=True)
class ProbeState:
    """Maximally entangled state of an ancilla qubit with the code space.

    kappa = (|0>|word_1> + |1>|word_2>) / sqrt(2); pure, unit trace, and
    negativity 1 across the ancilla|system cut at construction.
    """

    rho: np.ndarray
    split: DimSplit

    def __post_init__(self):
        self.split.check(self.rho)


def probe_state(code: Code) -> ProbeState:
    kappa = np.concatenate([code.words[0], code.words[1]]) / np.sqrt(2.0)
    rho = np.outer(kappa, kappa.conj())
    return ProbeState(rho=rho, split=DimSplit(2, code.dim))


_PRESET_RE = re.compile(
    r"^(?P<name>repetition|rotated|anti4|random)"
    r"(?:\[(?P<pos>\d+)\]|\((?P<seed>\d+)\))?$"
)


def code_from_preset(preset: str, n: int) -> Code:
    """Build a code from a preset string.

    Accepts: repetition, rotated, rotated[k], anti4, random(seed).
    """
    from .linalg import haar_unitary  # local import avoids a cycle at module load

    m = _PRESET_RE.match(preset.strip())
    if m is None:
        raise ValueError(f"unknown code preset {preset!r}")
    name = m.group("name")
    if name == "repetition":
        if m.group("pos") or m.group("seed"):
            raise ValueError(f"repetition takes no argument: {preset!r}")
        return repetition_code(n)
    if name == "rotated":
        if m.group("seed"):
            raise ValueError(f"rotated takes [position], not (seed): {preset!r}")
        pos = int(m.group("pos") or 0)
        return rotated_code(n, position=pos)
    if name == "anti4":
        if n != 4:
            raise ValueError("anti4 requires n = 4")
        return anti_aligned_code4()
    if m.group("pos"):
        raise ValueError(f"random takes (seed), not [position]: {preset!r}")
    seed = int(m.group("seed") or 0)
    u = haar_unitary(2**n, seed)
    return transform_code(repetition_code(n), u, label=f"random({seed})")
