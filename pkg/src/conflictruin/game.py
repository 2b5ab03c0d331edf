"""Coalition payoffs, the defection test, and the unanimity vote.

A member of Movement 1 compares the status quo (``m0`` parts, no cost) with
greater unity (``m1 < m0`` parts, up-front cost ``c``).  A victory pays ``b``
every period, discounted at rate ``r``.  Each member judges the win
probabilities with their own perceived strength ``s_hat``.
"""

import math
from dataclasses import dataclass

from ._errors import DomainError, check_finite, check_positive, check_positive_int
from .battle import BattleModel, q_general, q_simple

__all__ = [
    "MemberProfile",
    "UnityDecision",
    "PayoffPair",
    "ArchetypeFlags",
    "ClassificationThresholds",
    "CoalitionVote",
    "MemberVerdict",
    "NashReport",
    "discounted_total_benefit",
    "perceived_q",
    "expected_payoffs",
    "incentive",
    "defects",
    "unanimous_unity_is_nash",
    "classify",
]


@dataclass(frozen=True)
class MemberProfile:
    r: float
    b: float
    c: float
    s_hat: float

    def __post_init__(self):
        check_positive("r", self.r)
        check_finite("b", self.b)
        check_positive("c", self.c)
        check_positive("s_hat", self.s_hat)


@dataclass(frozen=True)
class UnityDecision:
    m0: int
    m1: int

    def __post_init__(self):
        m0 = check_positive_int("m0", self.m0)
        m1 = check_positive_int("m1", self.m1)
        if not m1 < m0:
            raise DomainError(f"greater unity needs m1 < m0 (got m0={m0}, m1={m1})")
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "m1", m1)


@dataclass(frozen=True)
class PayoffPair:
    status_quo: float
    greater_unity: float


@dataclass(frozen=True)
class ArchetypeFlags:
    myopic: bool
    naive: bool
    collaborationist: bool
    defeatist: bool
    complacent: bool


@dataclass(frozen=True)
class ClassificationThresholds:
    """Cutoffs turning the archetype limits into yes/no flags.

    The library has no defaults; the CLI documents its own.
    """

    r_myopic: float
    bc_naive: float
    s_defeatist: float
    s_complacent: float

    def __post_init__(self):
        check_positive("r_myopic", self.r_myopic)
        check_finite("bc_naive", self.bc_naive)
        check_positive("s_defeatist", self.s_defeatist)
        check_positive("s_complacent", self.s_complacent)
        if self.s_complacent >= self.s_defeatist:
            raise DomainError(
                f"s_complacent must be < s_defeatist (got {self.s_complacent} >= {self.s_defeatist})"
            )


@dataclass(frozen=True)
class CoalitionVote:
    members: tuple
    decision: UnityDecision
    n: int
    actual_s: float

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "n", check_positive_int("n", self.n))
        check_positive("actual_s", self.actual_s)


@dataclass(frozen=True)
class MemberVerdict:
    member: MemberProfile
    q_m0_perceived: float
    q_m1_perceived: float
    q_m0_actual: float
    q_m1_actual: float
    incentive: float
    defects: bool


@dataclass(frozen=True)
class NashReport:
    is_nash: bool
    verdicts: tuple

    def __bool__(self):
        return self.is_nash


def discounted_total_benefit(b, r):
    """Present value ``b / (e**r - 1)`` of receiving ``b`` every period from the next one on."""
    check_finite("b", b)
    check_positive("r", r)
    if r < 1.0:
        return b / math.expm1(r)
    # e^-r / (1 - e^-r) never overflows
    return b * math.exp(-r) / -math.expm1(-r)


def perceived_q(s, m, n, R=1.0, gamma=0.0, convention="eq10"):
    """Win probability ``q(m)`` used inside a member's decision."""
    if R == 1.0 and gamma == 0.0:
        return q_simple(s, m, n)
    return q_general(BattleModel(s, R, gamma), m, n, convention)


def expected_payoffs(member, q0, q1):
    """Expected payoff under the status quo (win prob ``q0``) and greater unity (``q1``)."""
    for name, q in (("q0", q0), ("q1", q1)):
        if not 0.0 <= q <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1] (got {q!r})")
    value = discounted_total_benefit(member.b, member.r)
    return PayoffPair(status_quo=q0 * value, greater_unity=-member.c + q1 * value)


def _delta_q(member, decision, n, R, gamma, convention):
    q0 = perceived_q(member.s_hat, decision.m0, n, R, gamma, convention)
    q1 = perceived_q(member.s_hat, decision.m1, n, R, gamma, convention)
    return q0, q1


def incentive(member, decision, n, R=1.0, gamma=0.0, convention="eq10"):
    """Left-hand side of the defection test: ``(b/c) (q(m1) - q(m0)) / (e**r - 1)``.

    ``q`` is evaluated at the member's perceived strength.  With the default
    ``R=1, gamma=0`` it is the proportional-force model; otherwise the
    general model.  The member defects when the result is below 1.
    """
    n = check_positive_int("n", n)
    q0, q1 = _delta_q(member, decision, n, R, gamma, convention)
    return discounted_total_benefit(member.b / member.c, member.r) * (q1 - q0)


def defects(member, decision, n, R=1.0, gamma=0.0, convention="eq10"):
    # exact indifference counts as voting for unity
    return incentive(member, decision, n, R, gamma, convention) < 1.0


def unanimous_unity_is_nash(vote, R=1.0, gamma=0.0, convention="eq10"):
    """Check whether everyone voting for greater unity is a Nash equilibrium.

    Unity needs unanimity, so a single defector breaks it.  Each member
    decides with their own perceived parameters; the actual ``s`` is only
    reported next to them.  An empty vote is vacuously an equilibrium.
    """
    d, n = vote.decision, vote.n
    q0_actual = perceived_q(vote.actual_s, d.m0, n, R, gamma, convention)
    q1_actual = perceived_q(vote.actual_s, d.m1, n, R, gamma, convention)
    verdicts = []
    for member in vote.members:
        q0, q1 = _delta_q(member, d, n, R, gamma, convention)
        value = discounted_total_benefit(member.b / member.c, member.r) * (q1 - q0)
        verdicts.append(MemberVerdict(member, q0, q1, q0_actual, q1_actual, value, value < 1.0))
    return NashReport(not any(v.defects for v in verdicts), tuple(verdicts))


def classify(member, thresholds):
    """Flag which wait-and-see archetypes a member falls into.

    Flags may overlap, except that nobody is both defeatist and complacent
    (the thresholds enforce ``s_complacent < s_defeatist``).
    """
    return ArchetypeFlags(
        myopic=member.r >= thresholds.r_myopic,
        naive=member.b > 0 and member.b / member.c <= thresholds.bc_naive,
        collaborationist=member.b < 0,
        defeatist=member.s_hat >= thresholds.s_defeatist,
        complacent=member.s_hat <= thresholds.s_complacent,
    )
