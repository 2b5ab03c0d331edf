"""Per-battle win probabilities and closed-form overall win probabilities.

Every closed form here is a ratio of the shape ``(1 - rho**k) / (1 - rho**t)``
with ``rho`` the odds against Movement 1 in a single battle.  These are
evaluated through ``L = log(rho)`` so that large strength ratios do not
overflow: for ``rho > 1`` numerator and denominator are divided by
``rho**t`` first, keeping every exponential at most one.
"""

import math
from dataclasses import dataclass

from ._errors import DomainError, check_finite, check_open_unit, check_positive, check_positive_int

__all__ = [
    "GAMMA_CONVENTIONS",
    "BattleModel",
    "WinProbabilityResult",
    "sigmoid",
    "logit",
    "battle_p_simple",
    "battle_p_general",
    "q_constant_p",
    "q_simple",
    "E",
    "q_general",
    "q_general_expanded",
    "win_probability",
]

#: ``"eq10"`` shifts the log-odds by ``+gamma * sgn(i - n)``; ``"appendix"``
#: flips the sign, so states toward 0 receive ``+gamma``.
GAMMA_CONVENTIONS = ("eq10", "appendix")

# |log rho| below this switches to the tie limit with a first-order correction.
NEAR_TIE = 1e-10


@dataclass(frozen=True)
class BattleModel:
    """Battle model parameters: strength ``s``, randomness ``R``, advantage ``gamma``.

    ``s`` is Movement 2's total force relative to Movement 1's.  ``gamma > 0``
    favours whichever side is defending its own territory.
    """

    s: float
    R: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        check_positive("s", self.s)
        check_positive("R", self.R)
        check_finite("gamma", self.gamma)

    @property
    def is_simple(self):
        return self.R == 1.0 and self.gamma == 0.0


@dataclass(frozen=True)
class WinProbabilityResult:
    q: float
    method: str  # closed_form_constant_p | closed_form_simple | closed_form_general | linear_solve


def sigmoid(x):
    """Logistic function, evaluated without overflow for large ``|x|``."""
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def logit(p):
    """Inverse of :func:`sigmoid` on ``(0, 1)``."""
    check_open_unit("p", p)
    return math.log(p) - math.log1p(-p)


def _check_convention(convention):
    if convention not in GAMMA_CONVENTIONS:
        raise DomainError(f"gamma convention must be one of {GAMMA_CONVENTIONS} (got {convention!r})")


def _log_strength_ratio(s, m, n, R=1.0):
    # log((s*m/n) ** (1/R)) without forming the power
    return (math.log(s) + math.log(m) - math.log(n)) / R


def _log_power_ratio(L, k, t):
    """``log((1 - e**(k*L)) / (1 - e**(t*L)))`` for ``0 <= k <= t``, ``t > 0``."""
    if k == 0:
        return -math.inf
    if abs(L) < NEAR_TIE:
        # (1 - e^{kL}) / (1 - e^{tL}) = (k/t) * (1 + (k - t) L / 2 + O(L^2))
        return math.log(k / t) + math.log1p((k - t) * L / 2.0)
    if L < 0:
        return math.log(-math.expm1(k * L)) - math.log(-math.expm1(t * L))
    return -(t - k) * L + math.log(-math.expm1(-k * L)) - math.log(-math.expm1(-t * L))


def _power_ratio(L, k, t):
    if k == 0:
        return 0.0
    if abs(L) < NEAR_TIE:
        return (k / t) * (1.0 + (k - t) * L / 2.0)
    if L < 0:
        return math.expm1(k * L) / math.expm1(t * L)
    return math.exp(-(t - k) * L) * (math.expm1(-k * L) / math.expm1(-t * L))


def battle_p_simple(s, m, n):
    """Battle-win probability ``1 / (1 + s*m/n)`` of Movement 1.

    Movement 1 fights with parts of strength ``F/m`` against Movement 2's
    parts of strength ``s*F/n``.
    """
    check_positive("s", s)
    check_positive("m", m)
    check_positive("n", n)
    return 1.0 / (1.0 + s * m / n)


def _state_sign(i, n, convention):
    sign = (i > n) - (i < n)
    return sign if convention == "eq10" else -sign


def battle_p_general(model, m, n, i, convention="eq10"):
    """Battle-win probability at state ``i`` under randomness and territorial advantage.

    The base probability ``1 / (1 + (s*m/n)**(1/R))`` is shifted on the logit
    scale by ``sgn(i - n) * gamma``; ``convention="appendix"`` uses the
    opposite sign.
    """
    check_positive("m", m)
    check_positive("n", n)
    _check_convention(convention)
    base_logit = -_log_strength_ratio(model.s, m, n, model.R)
    p = sigmoid(base_logit + _state_sign(i, n, convention) * model.gamma)
    if not 0.0 < p < 1.0:
        raise DomainError(f"battle probability at state {i} rounds to {p} in double precision")
    return p


def q_constant_p(p, m, n):
    """Overall win probability of Movement 1 when every battle is won with probability ``p``.

    Parameters
    ----------
    p : float
        Battle-win probability of Movement 1, in ``(0, 1)``.
    m, n : float
        Part counts of Movements 1 and 2.  Real values are accepted so that
        curves in ``m`` can be drawn.

    Returns
    -------
    float
        ``(1 - rho**m) / (1 - rho**(m+n))`` with ``rho = (1-p)/p``, or
        ``m/(m+n)`` at ``p = 1/2``.
    """
    check_open_unit("p", p)
    check_positive("m", m)
    check_positive("n", n)
    L = math.log1p(-p) - math.log(p)
    return _power_ratio(L, m, m + n)


def q_simple(s, m, n):
    """Overall win probability under the proportional-force battle model.

    Equal to ``q_constant_p(battle_p_simple(s, m, n), m, n)`` but computed
    from ``log(s*m/n)`` directly, so extreme strengths stay finite.  At the
    tie ``s = n/m`` the result is ``m/(m+n)``.
    """
    check_positive("s", s)
    check_positive("m", m)
    check_positive("n", n)
    return _power_ratio(_log_strength_ratio(s, m, n), m, m + n)


def _check_distances(j, k):
    for name, v in (("j", j), ("k", k)):
        if isinstance(v, bool) or not float(v).is_integer() or v < 0:
            raise DomainError(f"{name} must be a non-negative integer (got {v!r})")
    if j + k < 1:
        raise DomainError("E requires j + k >= 1")


def E(x, j, k):
    """Win probability of Player 1 in a gambler's ruin with battle-win probability ``x``.

    Player 1's winning state is ``j`` steps away and Player 2's is ``k``
    steps away.
    """
    check_open_unit("x", x)
    _check_distances(j, k)
    L = math.log1p(-x) - math.log(x)
    return _power_ratio(L, k, j + k)


def _log_E_from_logit(ell, j, k):
    # log E(sigmoid(ell), j, k); the odds against Player 1 are exp(-ell)
    return _log_power_ratio(-ell, k, j + k)


def q_general(model, m, n, convention="eq10"):
    """Overall win probability under the general battle model, by first-step decomposition.

    From the starting state ``n`` the first battle is fought at the base
    probability ``p``.  A win leads into the sub-chain ``0..n`` (win
    distance ``n-1``, return distance 1); a loss leads into ``n..m+n``
    (return distance 1, loss distance ``m-1``).  Each sub-chain has a
    constant battle probability, so::

        q = p*E(p_near, n-1, 1) / (p*E(p_near, n-1, 1) + (1-p)*(1 - E(p_far, 1, m-1)))

    where ``p_near`` is the probability on states ``i < n``.  Under
    ``convention="eq10"`` those states carry ``-gamma`` and ``p_near = p_-``;
    under ``"appendix"`` they carry ``+gamma``, i.e. ``p_near = p_+`` as in
    ``E(p_+, n-1, 1)``.

    The ratio is assembled in log space and is finite for any valid model.
    """
    m = check_positive_int("m", m)
    n = check_positive_int("n", n)
    _check_convention(convention)
    ell = -_log_strength_ratio(model.s, m, n, model.R)
    near_shift = -model.gamma if convention == "eq10" else model.gamma
    ell_near = ell + near_shift
    ell_far = ell - near_shift

    # log p and log(1-p) for the base battle
    log_p = -math.log1p(math.exp(-ell)) if ell > -700 else ell
    log_1mp = -math.log1p(math.exp(ell)) if ell < 700 else -ell
    log_win = log_p + _log_E_from_logit(ell_near, n - 1, 1)
    # 1 - E(x, 1, m-1) = E(1 - x, m-1, 1)
    log_lose = log_1mp + _log_E_from_logit(-ell_far, m - 1, 1)
    if log_win == -math.inf:
        return 0.0
    return sigmoid(log_win - log_lose)


def q_general_expanded(model, m, n):
    """Expanded rational form of the general win probability, evaluated as written.

    Kept as an independent cross-check of :func:`q_general`.  It uses raw
    powers and overflows for large ``(s*m/n)**(m+n)``; use only on small
    shapes.  The form is 0/0 when ``rho * exp(-gamma)`` or
    ``rho * exp(gamma)`` equals one; those points raise :class:`DomainError`.
    """
    m = check_positive_int("m", m)
    n = check_positive_int("n", n)
    rho = (model.s * m / n) ** (1.0 / model.R)
    eg = math.exp(model.gamma)
    a = rho / eg
    b = rho * eg
    if abs(a - 1.0) < 1e-12 or abs(b - 1.0) < 1e-12:
        raise DomainError("expanded form is singular at rho * exp(+-gamma) == 1")
    numerator = (-1.0 + a**m) * (-1.0 + b)
    denominator = (
        1.0
        + eg * (a**m + eg * a ** (1 + m) - a**m * b**n - rho)
        - a**m
        + eg * a ** (1 + m) * (b**n - 1.0)
    )
    return numerator / denominator


def win_probability(m, n, *, s=None, p=None, model=None, convention="eq10"):
    """Dispatch to the right closed form and tag the result with its method."""
    given = sum(x is not None for x in (s, p, model))
    if given != 1:
        raise DomainError("exactly one of s, p, model must be given")
    if p is not None:
        return WinProbabilityResult(q_constant_p(p, m, n), "closed_form_constant_p")
    if s is not None:
        return WinProbabilityResult(q_simple(s, m, n), "closed_form_simple")
    return WinProbabilityResult(q_general(model, m, n, convention), "closed_form_general")
