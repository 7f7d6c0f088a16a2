"""Search for code transformations that survive the channel best.

A candidate code is U base_code U^dag with U = exp(i H); the Hermitian
generator H is parameterized by d^2 real numbers and minimized with a
derivative-free simplex. Two deterministic starts are always included, the
identity generator and the Hadamard rotation of qubit 0 (which maps the
repetition code onto its rotated variant), so the optimizer can never
return anything worse than either.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .channel import RateProfile, apply_channel, kraus_set
from .codes import Code, probe_state, transform_code
from .linalg import unitary_from_generator
from .metrics import deviation, initial_rate, negativity

OBJECTIVE_KINDS = ("neg_at_t", "delta_slope")

DEFAULT_TSTAR = 0.5
DEFAULT_MAXFEV = 5000
DEFAULT_XATOL = 1e-6
RANDOM_START_SCALE = 0.5


def pack_hermitian(h: np.ndarray) -> np.ndarray:
    """Flatten a Hermitian d x d matrix to d^2 reals.

    Layout: the d diagonal entries, then (re, im) for each upper-triangle
    entry in row-major order.
    """
    h = np.asarray(h, dtype=complex)
    d = h.shape[0]
    iu = np.triu_indices(d, k=1)
    upper = h[iu]
    return np.concatenate([h.diagonal().real, upper.real, upper.imag])


def unpack_hermitian(x: np.ndarray, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d * d,):
        raise ValueError(f"expected {d * d} parameters, got {x.shape}")
    h = np.zeros((d, d), dtype=complex)
    np.fill_diagonal(h, x[:d])
    m = d * (d - 1) // 2
    iu = np.triu_indices(d, k=1)
    upper = x[d : d + m] + 1j * x[d + m :]
    h[iu] = upper
    h[iu[1], iu[0]] = upper.conj()
    return h


def hadamard_generator(n: int) -> np.ndarray:
    """Hermitian G with exp(i G) = Hadamard on qubit 0, identity elsewhere."""
    had = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    w = had
    for _ in range(n - 1):
        w = np.kron(w, np.eye(2))
    return (math.pi / 2.0) * (np.eye(2**n) - w)


def random_generator(d: int, rng, scale: float = RANDOM_START_SCALE) -> np.ndarray:
    rng = np.random.default_rng(rng)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (a + a.conj().T) / 2.0


def _objective_closure(profile, base_code, kind, tstar, h):
    """Build the scalar objective over packed generator parameters."""
    if kind not in OBJECTIVE_KINDS:
        raise ValueError(f"kind must be one of {OBJECTIVE_KINDS}, got {kind!r}")
    d = base_code.dim
    kraus_cache = {}

    def kraus_at(t):
        if t not in kraus_cache:
            kraus_cache[t] = kraus_set(profile, t)
        return kraus_cache[t]

    if kind == "neg_at_t":
        kset = kraus_at(tstar)

        def evaluate(x):
            u = unitary_from_generator(unpack_hermitian(x, d))
            code = transform_code(base_code, u)
            probe = probe_state(code)
            evolved = apply_channel(probe.rho, kset, probe.split)
            return -negativity(evolved, probe.split)

    else:

        def evaluate(x):
            u = unitary_from_generator(unpack_hermitian(x, d))
            code = transform_code(base_code, u)
            red = code.reduced_state()

            def curve(t):
                if t == 0.0:
                    return 0.0
                return deviation(red, kraus_at(t)).delta_c

            return initial_rate(curve, h=h).forward

    return evaluate


def objective(
    generator: np.ndarray,
    profile: RateProfile,
    base_code: Code,
    kind: str = "neg_at_t",
    tstar: float = DEFAULT_TSTAR,
    h: float = 1e-3,
) -> float:
    """Objective value for one Hermitian generator (lower is better)."""
    evaluate = _objective_closure(profile, base_code, kind, tstar, h)
    return float(evaluate(pack_hermitian(generator)))


def _initial_simplex(x0, step=0.25):
    # explicit simplex keeps runs reproducible across scipy versions
    dim = x0.size
    simplex = np.tile(x0, (dim + 1, 1))
    for i in range(dim):
        simplex[i + 1, i] += step
    return simplex


def minimize_generator(
    x0: np.ndarray,
    evaluate,
    maxfev: int = DEFAULT_MAXFEV,
    xatol: float = DEFAULT_XATOL,
):
    """One simplex descent from x0. Returns (x, value, nfev, history)."""
    history = []
    best = [math.inf]

    def wrapped(x):
        v = float(evaluate(x))
        if v < best[0]:
            best[0] = v
        history.append(best[0])
        return v

    res = minimize(
        wrapped,
        x0,
        method="Nelder-Mead",
        options={
            "maxfev": maxfev,
            "xatol": xatol,
            "fatol": 1e-12,
            "adaptive": True,
            "initial_simplex": _initial_simplex(np.asarray(x0, dtype=float)),
        },
    )
    return np.asarray(res.x), float(res.fun), int(res.nfev), history


@dataclass(frozen=True)
class OptimizationResult:
    """Best transformation found, with bookkeeping for reproducibility.

    objective_history is the running best across all evaluations in run
    order, so it is nonincreasing. start_values maps each start label to
    its converged objective; the winner is the minimum, ties resolved by
    start order (deterministic starts first, then random restarts by index).
    """

    best_generator: np.ndarray
    best_unitary: np.ndarray
    best_objective: float
    objective_history: np.ndarray
    evaluations: int
    start_values: tuple
    kind: str
    tstar: float
    seed: int
    restarts: int


def optimize_code(
    profile: RateProfile,
    base_code: Code,
    kind: str = "neg_at_t",
    tstar: float = DEFAULT_TSTAR,
    restarts: int = 8,
    seed: int = 0,
    maxfev: int = DEFAULT_MAXFEV,
    xatol: float = DEFAULT_XATOL,
    h: float = 1e-3,
    workers: int = 1,
) -> OptimizationResult:
    """Multi-start simplex search over code transformations.

    restarts counts the random starts; the identity and Hadamard-on-qubit-0
    generators are always prepended as deterministic starts. Random start
    k draws its generator from default_rng([seed, k]), so runs are
    reproducible and order-independent. Starts run on a thread pool when
    workers > 1; results are merged in start order, so the outcome does not
    depend on scheduling.
    """
    if restarts < 0:
        raise ValueError("restarts must be nonnegative")
    d = base_code.dim
    evaluate = _objective_closure(profile, base_code, kind, tstar, h)
    starts = [
        ("identity", np.zeros(d * d)),
        ("hadamard0", pack_hermitian(hadamard_generator(base_code.n))),
    ]
    for k in range(restarts):
        rng = np.random.default_rng([seed, k])
        starts.append((f"random{k}", pack_hermitian(random_generator(d, rng))))

    def run_one(start):
        return minimize_generator(start[1], evaluate, maxfev=maxfev, xatol=xatol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_one, starts))
    else:
        outcomes = [run_one(start) for start in starts]

    history = []
    best_value = math.inf
    best_x = starts[0][1]
    start_values = []
    evaluations = 0
    for (label, _), (x, value, nfev, run_history) in zip(starts, outcomes):
        evaluations += nfev
        for v in run_history:
            best_value_so_far = min(v, history[-1]) if history else v
            history.append(best_value_so_far)
        start_values.append((label, value))
        if value < best_value:
            best_value = value
            best_x = x

    generator = unpack_hermitian(best_x, d)
    return OptimizationResult(
        best_generator=generator,
        best_unitary=unitary_from_generator(generator),
        best_objective=float(best_value),
        objective_history=np.asarray(history),
        evaluations=evaluations,
        start_values=tuple(start_values),
        kind=kind,
        tstar=tstar,
        seed=seed,
        restarts=restarts,
    )
