"""Unity-optimality checks, strength thresholds, optimal structure, and grid sweeps."""

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._errors import DomainError, check_finite, check_positive, check_positive_int
from .battle import BattleModel, q_general, q_simple
from .game import MemberProfile, UnityDecision, incentive, perceived_q

__all__ = [
    "MonotonicityReport",
    "SweepSpec",
    "SweepResult",
    "q_curve",
    "q_curve_real",
    "verify_unity_optimal",
    "find_critical_strength",
    "optimal_m",
    "sweep",
    "AXES",
    "QUANTITIES",
]


@dataclass(frozen=True)
class MonotonicityReport:
    s: float
    n: int
    R: float
    gamma: float
    m_max: int
    monotone_decreasing: bool
    first_violation: Optional[tuple]  # (m, q(m), q(m+1))
    q_tail: float
    q_values: tuple = field(repr=False, default=())


def _q(s, m, n, R, gamma, convention):
    if R == 1.0 and gamma == 0.0:
        return q_simple(s, m, n)
    return q_general(BattleModel(s, R, gamma), m, n, convention)


def q_curve(s, n, R=1.0, gamma=0.0, m_max=50, convention="eq10"):
    """``q(m)`` for ``m = 1..m_max``."""
    m_max = check_positive_int("m_max", m_max)
    n = check_positive_int("n", n)
    BattleModel(s, R, gamma)
    return np.array([_q(s, m, n, R, gamma, convention) for m in range(1, m_max + 1)])


def q_curve_real(s, n, m_grid):
    """``q`` on a real-valued grid of ``m`` (proportional-force model only), for plotting."""
    return np.array([q_simple(s, float(m), n) for m in m_grid])


def verify_unity_optimal(s, n, R=1.0, gamma=0.0, m_max=50, convention="eq10"):
    """Check that ``q(m)`` strictly decreases over ``m = 1..m_max``.

    Only integer ``m`` are checked.  The report records the first ``m``
    with ``q(m) >= q(m+1)`` and the tail value ``q(m_max)``.
    """
    if check_positive_int("m_max", m_max) < 2:
        raise DomainError(f"m_max must be >= 2 (got {m_max})")
    qs = q_curve(s, n, R, gamma, m_max, convention)
    violation = None
    for m in range(1, m_max):
        if not qs[m] < qs[m - 1]:
            violation = (m, float(qs[m - 1]), float(qs[m]))
            break
    return MonotonicityReport(
        s=s, n=n, R=R, gamma=gamma, m_max=m_max,
        monotone_decreasing=violation is None,
        first_violation=violation,
        q_tail=float(qs[-1]),
        q_values=tuple(float(q) for q in qs),
    )


def _passes(s, n, R, gamma, m_max, convention):
    return verify_unity_optimal(s, n, R, gamma, m_max, convention).monotone_decreasing


def find_critical_strength(n, R=1.0, gamma=0.0, m_max=50, s_lo=0.5, s_hi=1e4,
                           tolerance=1e-6, convention="eq10", samples=64):
    """Smallest strength ``s`` at which unity is optimal over ``1..m_max``, by bisection.

    The predicate must fail at ``s_lo`` and hold at ``s_hi``.  Before
    bisecting it is sampled at ``samples`` log-spaced points in the bracket;
    a pass followed by a fail raises instead of returning a meaningless
    threshold.  The returned ``s`` passes and ``s - tolerance`` fails.
    """
    check_positive("s_lo", s_lo)
    check_positive("s_hi", s_hi)
    check_positive("tolerance", tolerance)
    if not s_lo < s_hi:
        raise DomainError(f"need s_lo < s_hi (got {s_lo}, {s_hi})")
    if _passes(s_lo, n, R, gamma, m_max, convention):
        raise DomainError(f"bracket invalid: unity already optimal at s_lo={s_lo}")
    if not _passes(s_hi, n, R, gamma, m_max, convention):
        raise DomainError(f"bracket invalid: unity not optimal at s_hi={s_hi}")

    grid = np.geomspace(s_lo, s_hi, samples)
    seen_pass = None
    for s in grid:
        ok = _passes(float(s), n, R, gamma, m_max, convention)
        if ok and seen_pass is None:
            seen_pass = float(s)
        elif not ok and seen_pass is not None:
            raise DomainError(
                f"predicate not monotone in s over [{s_lo}, {s_hi}]: passes at {seen_pass}, fails at {float(s)}"
            )

    lo, hi = s_lo, s_hi
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _passes(mid, n, R, gamma, m_max, convention):
            hi = mid
        else:
            lo = mid
    return hi


def optimal_m(s, n, R=1.0, gamma=0.0, m_max=50, convention="eq10"):
    """Part count in ``1..m_max`` maximising ``q``; ties go to the smaller ``m``."""
    qs = q_curve(s, n, R, gamma, m_max, convention)
    # np.argmax returns the first maximum
    return int(np.argmax(qs)) + 1


# --- sweeps -----------------------------------------------------------------

AXES = ("s", "s_hat", "m", "n", "R", "gamma", "r", "b_c", "m0", "m1")
_INTEGER_AXES = {"m", "n", "m0", "m1"}
_POSITIVE_AXES = {"s", "s_hat", "m", "n", "R", "r", "m0", "m1"}

# quantity -> (required axes, optional axes with defaults, output columns)
QUANTITIES = {
    "q_simple": (("s", "m", "n"), {}, ("q",)),
    "q_general": (("s", "m", "n"), {"R": 1.0, "gamma": 0.0}, ("q",)),
    "incentive": (("r", "b_c", "m0", "m1", "n", "s_hat"), {"R": 1.0, "gamma": 0.0},
                  ("q_m0", "q_m1", "delta_q", "incentive", "defects")),
    "optimal_m": (("s", "n"), {"R": 1.0, "gamma": 0.0}, ("optimal_m", "q_optimal")),
    "q_loss_vs_optimal": (("s", "s_hat", "n"), {"R": 1.0, "gamma": 0.0},
                          ("m_optimal", "m_chosen", "q_optimal", "q_chosen", "q_loss")),
}


@dataclass(frozen=True)
class SweepSpec:
    """Named axis grids plus the quantity to evaluate at every grid point.

    Axes are iterated in the order given; ``b_c`` is the benefit/cost ratio.
    """

    axes: dict
    quantity: str
    m_max: int = 50
    convention: str = "eq10"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise DomainError(f"unknown quantity {self.quantity!r}; expected one of {sorted(QUANTITIES)}")
        required, optional, _ = QUANTITIES[self.quantity]
        axes = {}
        for name, values in dict(self.axes).items():
            if name not in AXES:
                raise DomainError(f"unknown axis {name!r}; expected one of {list(AXES)}")
            if name not in required and name not in optional:
                raise DomainError(f"axis {name!r} is not used by quantity {self.quantity!r}")
            values = tuple(values)
            if not values:
                raise DomainError(f"axis {name!r} is empty")
            for v in values:
                if name in _INTEGER_AXES:
                    check_positive_int(name, v)
                elif name in _POSITIVE_AXES:
                    check_positive(name, v)
                else:
                    check_finite(name, v)
            if name in _INTEGER_AXES:
                values = tuple(int(v) for v in values)
            axes[name] = values
        missing = [a for a in required if a not in axes]
        if missing:
            raise DomainError(f"quantity {self.quantity!r} needs axes {missing}")
        if self.quantity == "incentive":
            if any(m1 >= m0 for m0 in axes["m0"] for m1 in axes["m1"]):
                raise DomainError("every m1 in the grid must be < every m0")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "m_max", check_positive_int("m_max", self.m_max))

    @property
    def n_rows(self):
        return math.prod(len(v) for v in self.axes.values())


@dataclass(frozen=True)
class SweepResult:
    header: tuple
    rows: tuple
    notes: tuple = ()


def _evaluate(quantity, point, m_max, convention):
    _, optional, _ = QUANTITIES[quantity]
    params = {**optional, **point}
    R, gamma = params.get("R", 1.0), params.get("gamma", 0.0)
    if quantity == "q_simple":
        return (q_simple(params["s"], params["m"], params["n"]),)
    if quantity == "q_general":
        return (q_general(BattleModel(params["s"], R, gamma), params["m"], params["n"], convention),)
    if quantity == "incentive":
        member = MemberProfile(r=params["r"], b=params["b_c"], c=1.0, s_hat=params["s_hat"])
        decision = UnityDecision(params["m0"], params["m1"])
        n = params["n"]
        q0 = perceived_q(member.s_hat, decision.m0, n, R, gamma, convention)
        q1 = perceived_q(member.s_hat, decision.m1, n, R, gamma, convention)
        value = incentive(member, decision, n, R, gamma, convention)
        return (q0, q1, q1 - q0, value, value < 1.0)
    if quantity == "optimal_m":
        qs = q_curve(params["s"], params["n"], R, gamma, m_max, convention)
        best = int(np.argmax(qs))
        return (best + 1, float(qs[best]))
    if quantity == "q_loss_vs_optimal":
        actual = q_curve(params["s"], params["n"], R, gamma, m_max, convention)
        perceived = q_curve(params["s_hat"], params["n"], R, gamma, m_max, convention)
        best, chosen = int(np.argmax(actual)), int(np.argmax(perceived))
        return (best + 1, chosen + 1, float(actual[best]), float(actual[chosen]),
                float(actual[best] - actual[chosen]))
    raise AssertionError(quantity)


def sweep(spec):
    """Evaluate ``spec.quantity`` over the Cartesian product of the axes.

    Rows come out in lexicographic order of the axes as declared (last axis
    fastest).
    """
    names = list(spec.axes)
    columns = QUANTITIES[spec.quantity][2]
    rows = []
    for combo in itertools.product(*(spec.axes[a] for a in names)):
        point = dict(zip(names, combo))
        values = _evaluate(spec.quantity, point, spec.m_max, spec.convention)
        for v in values:
            if isinstance(v, float) and not math.isfinite(v):
                raise ArithmeticError(f"non-finite {spec.quantity} at {point}")
        rows.append(combo + tuple(values))

    notes = []
    if spec.quantity == "incentive":
        col = len(names) + columns.index("delta_q")
        negative = sum(1 for row in rows if row[col] < 0)
        if negative:
            notes.append(
                f"delta_q < 0 in {negative} of {len(rows)} rows: greater unity lowers the perceived "
                "win probability there, so the incentive is negative whenever b/c > 0"
            )
    return SweepResult(header=tuple(names) + columns, rows=tuple(rows), notes=tuple(notes))
