"""The absorbing birth-death chain over battlefields ``0..m+n``.

From an interior state ``i`` the chain moves to ``i-1`` when Movement 1 wins
the battle (probability ``p_i``) and to ``i+1`` otherwise.  State 0 is
Movement 1's victory, state ``m+n`` Movement 2's; play starts at ``n``.
"""

import math
import numbers
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from ._errors import DomainError, check_open_unit, check_positive_int
from .battle import BattleModel, _check_convention, battle_p_general

__all__ = [
    "ConflictShape",
    "ConflictChain",
    "StateDistribution",
    "McEstimate",
    "build_chain",
    "evolve",
    "absorption_probabilities",
    "absorption_q_solve",
    "simulate",
    "GENERATOR_NAME",
    "SPLITTING_RULE",
]

GENERATOR_NAME = "numpy.random.PCG64"
SPLITTING_RULE = "numpy.random.SeedSequence(seed).spawn(workers); trials split as evenly as possible, earlier workers take the remainder"

MAX_WALK_STEPS = 10**9
_BATCH = 1 << 20


@dataclass(frozen=True)
class ConflictShape:
    m: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "m", check_positive_int("m", self.m))
        object.__setattr__(self, "n", check_positive_int("n", self.n))

    @property
    def n_states(self):
        return self.m + self.n + 1

    @property
    def initial_state(self):
        return self.n


@dataclass(frozen=True)
class ConflictChain:
    shape: ConflictShape
    p: tuple

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        expected = self.shape.m + self.shape.n - 1
        if len(p) != expected:
            raise DomainError(f"chain needs {expected} battle probabilities, got {len(p)}")
        for i, x in enumerate(p, start=1):
            check_open_unit(f"p_{i}", x)
        object.__setattr__(self, "p", p)

    def transition_matrix(self):
        """Column-stochastic matrix ``P`` with ``P[j, i] = Pr(i -> j)``."""
        N = self.shape.m + self.shape.n
        P = np.zeros((N + 1, N + 1))
        P[0, 0] = 1.0
        P[N, N] = 1.0
        for i, pi in enumerate(self.p, start=1):
            P[i - 1, i] = pi
            P[i + 1, i] = 1.0 - pi
        return P


@dataclass(frozen=True)
class StateDistribution:
    probabilities: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probabilities, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "probabilities", arr)

    def __getitem__(self, state):
        return float(self.probabilities[state])

    def __len__(self):
        return len(self.probabilities)


@dataclass(frozen=True)
class McEstimate:
    q_hat: float
    std_error: float
    trials: int
    seed: int
    workers: int = 1
    generator: str = field(default=GENERATOR_NAME)


def build_chain(shape, p_source, convention="eq10"):
    """Build the chain for ``shape`` from a constant probability or a :class:`BattleModel`."""
    N = shape.m + shape.n
    if isinstance(p_source, BattleModel):
        _check_convention(convention)
        p = [battle_p_general(p_source, shape.m, shape.n, i, convention) for i in range(1, N)]
    elif isinstance(p_source, numbers.Real):
        check_open_unit("p", p_source)
        p = [float(p_source)] * (N - 1)
    else:
        raise DomainError(f"p_source must be a probability or a BattleModel (got {type(p_source).__name__})")
    return ConflictChain(shape, tuple(p))


def evolve(chain, steps):
    """Distribution over states after ``steps`` battles, starting from state ``n``."""
    if isinstance(steps, bool) or not isinstance(steps, numbers.Integral) or steps < 0:
        raise DomainError(f"steps must be a non-negative integer (got {steps!r})")
    N = chain.shape.m + chain.shape.n
    p = np.array(chain.p)
    v = np.zeros(N + 1)
    v[chain.shape.n] = 1.0
    for _ in range(steps):
        interior = v[1:N]
        nxt = np.zeros_like(v)
        nxt[0] = v[0]
        nxt[N] = v[N]
        nxt[0:N - 1] += p * interior
        nxt[2:N + 1] += (1.0 - p) * interior
        v = nxt
    return StateDistribution(v)


def absorption_probabilities(chain):
    """Probability of reaching state 0 before ``m+n``, from every state.

    Solves ``h_i = p_i h_{i-1} + (1 - p_i) h_{i+1}`` with ``h_0 = 1`` and
    ``h_{m+n} = 0`` as a banded system over the interior states.
    """
    N = chain.shape.m + chain.shape.n
    h = np.zeros(N + 1)
    h[0] = 1.0
    if N == 1:
        return h
    p = np.array(chain.p)
    k = N - 1
    ab = np.zeros((3, k))
    ab[0, 1:] = -(1.0 - p[:-1])   # super-diagonal: coefficient of h_{i+1} in row i
    ab[1, :] = 1.0
    ab[2, :-1] = -p[1:]           # sub-diagonal: coefficient of h_{i-1} in row i
    rhs = np.zeros(k)
    rhs[0] = p[0]
    h[1:N] = solve_banded((1, 1), ab, rhs)
    return h


def absorption_q_solve(chain):
    """Movement 1's overall win probability by direct linear solve."""
    return float(absorption_probabilities(chain)[chain.shape.n])


def _partition(trials, workers):
    base, extra = divmod(trials, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _count_wins(p_left, start, N, trials, rng):
    wins = 0
    remaining = trials
    while remaining:
        size = min(remaining, _BATCH)
        remaining -= size
        state = np.full(size, start, dtype=np.int64)
        steps = 0
        while state.size:
            steps += 1
            if steps > MAX_WALK_STEPS:
                raise RuntimeError(f"walk exceeded {MAX_WALK_STEPS} steps without absorption")
            u = rng.random(state.size)
            state = np.where(u < p_left[state], state - 1, state + 1)
            wins += int(np.count_nonzero(state == 0))
            state = state[(state != 0) & (state != N)]
    return wins


def simulate(chain, trials, seed, workers=1):
    """Monte Carlo estimate of the win probability from ``trials`` independent walks.

    The result is a pure function of ``(seed, trials, workers)``: each worker
    partition draws from its own PCG64 stream spawned from ``SeedSequence(seed)``.
    Partitions are evaluated in order, so no threading is involved.
    """
    trials = check_positive_int("trials", trials)
    workers = check_positive_int("workers", workers)
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral) or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an unsigned 64-bit integer (got {seed!r})")
    N = chain.shape.m + chain.shape.n
    p_left = np.zeros(N + 1)
    p_left[1:N] = chain.p
    children = np.random.SeedSequence(int(seed)).spawn(workers)
    wins = 0
    for child, share in zip(children, _partition(trials, workers)):
        if share:
            rng = np.random.Generator(np.random.PCG64(child))
            wins += _count_wins(p_left, chain.shape.n, N, share, rng)
    q_hat = wins / trials
    return McEstimate(
        q_hat=q_hat,
        std_error=math.sqrt(q_hat * (1.0 - q_hat) / trials),
        trials=trials,
        seed=int(seed),
        workers=workers,
    )
