"""Two-parameter recovery error set for the rotated three-qubit code.

The set {A_0..A_3} below satisfies the exact error-correction conditions
for the rotated code at every admissible (q2, q3), while the plain
repetition code fails them whenever the set contains any weight-3 string
component. It is a bare error set, not a normalized channel
(sum A_i^dag A_i = 4 I), and is meant to be fed to metrics.kl_check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import pauli_string

RADICAND_TOL = 1e-12


@dataclass(frozen=True)
class RecoveryParams:
    """Admissible parameters: 0 <= q2 <= 2/3, 0 <= q3 <= 1, and both
    radicands 2 - 3 q2 - q3 and 3 q2 + q3 - 1 nonnegative."""

    q2: float
    q3: float

    def __post_init__(self):
        object.__setattr__(self, "q2", float(self.q2))
        object.__setattr__(self, "q3", float(self.q3))
        if not 0.0 <= self.q2 <= 2.0 / 3.0 + RADICAND_TOL:
            raise ValueError(f"q2 must lie in [0, 2/3], got {self.q2}")
        if not 0.0 <= self.q3 <= 1.0 + RADICAND_TOL:
            raise ValueError(f"q3 must lie in [0, 1], got {self.q3}")
        if self.radicand_high < -RADICAND_TOL:
            raise ValueError(
                f"radicand 2 - 3*q2 - q3 = {self.radicand_high} is negative"
            )
        if self.radicand_low < -RADICAND_TOL:
            raise ValueError(
                f"radicand 3*q2 + q3 - 1 = {self.radicand_low} is negative"
            )

    @property
    def radicand_high(self) -> float:
        return 2.0 - 3.0 * self.q2 - self.q3

    @property
    def radicand_low(self) -> float:
        return 3.0 * self.q2 + self.q3 - 1.0


def recovery_error_set(params: RecoveryParams, kind: str = "dephasing") -> np.ndarray:
    """The four operators A_0..A_3 on three qubits, stacked (4, 8, 8).

    With Z_S the dephasing string on subset S (X_S for bitflip):
      A_0 = I
      A_1 = Z_{1}
      A_2 = sqrt(2 - 3 q2 - q3) Z_{2} - i sqrt(3 q2 + q3 - 1) Z_{0,2}
      A_3 = sqrt(1 - q3) Z_{1,2} - i sqrt(q3) Z_{0,1,2}
    (qubit 0 is the leftmost factor, the rotated position of the code).
    """
    a = math.sqrt(max(params.radicand_high, 0.0))
    b = math.sqrt(max(params.radicand_low, 0.0))
    c = math.sqrt(max(1.0 - params.q3, 0.0))
    d = math.sqrt(max(params.q3, 0.0))
    s = lambda subset: pauli_string(3, subset, kind)
    return np.stack(
        [
            s(()),
            s((1,)),
            a * s((2,)) - 1j * b * s((0, 2)),
            c * s((1, 2)) - 1j * d * s((0, 1, 2)),
        ]
    )


def optimal_q(probs) -> RecoveryParams:
    """Parameter choice minimizing the post-recovery infidelity.

    p2 > p3 selects the pure two-qubit corrector (2/3, 0); p2 < p3 the pure
    three-qubit corrector (1/3, 1). An exact tie keeps (2/3, 0).
    """
    p = np.asarray(getattr(probs, "p", probs), dtype=float)
    if p.shape != (4,):
        raise ValueError("optimal_q is defined for n = 3 only")
    if p[2] >= p[3]:
        return RecoveryParams(q2=2.0 / 3.0, q3=0.0)
    return RecoveryParams(q2=1.0 / 3.0, q3=1.0)
