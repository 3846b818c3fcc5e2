"""Online policies for knapsack with reservations and the optimal ratio curve.

Three policies come from the analysis:

* ``alg1`` reserves while the reserve is cheap, packs optimally as soon as a
  good enough packing exists and otherwise rejects (ratio ``max{2, ...}``
  for alpha up to sqrt(2)-1);
* ``threshold-2a`` reserves until ``x + (1-alpha) R >= 1/(2+alpha)``;
* ``threshold-1a`` is the same rule with threshold ``1-alpha``.

``take-first-fit`` and ``reject-all`` are naive baselines.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import enclosure as enc
from .enclosure import DEFAULT_DIGITS, RatioValue
from .errors import OutOfDomain
from .model import PACK, REJECT, RESERVE, Finalize, RunState, as_alpha, to_fraction
from .oracle import popt

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


# constants -------------------------------------------------------------------


@lru_cache(maxsize=None)
def sqrt2_minus_1(digits: int = DEFAULT_DIGITS) -> RatioValue:
    return enc.sqrt(2, digits) - 1


@lru_cache(maxsize=None)
def phi_minus_1(digits: int = DEFAULT_DIGITS) -> RatioValue:
    """Golden ratio minus one, the positive root of a**2 + a - 1."""
    return (enc.sqrt(5, digits) - 1) / 2


@lru_cache(maxsize=None)
def alpha4(digits: int = DEFAULT_DIGITS) -> RatioValue:
    """Positive root of 1 - 2a - a**2 + a**3 (about 0.445).

    Below it at most one large item can be reserved before a
    ``threshold-2a`` run triggers; up to 1/2 at most two.
    """
    return enc.bisect_root([1, -2, -1, 1], Fraction(44, 100), Fraction(45, 100), digits)


@lru_cache(maxsize=None)
def alpha0(digits: int = DEFAULT_DIGITS) -> RatioValue:
    """Smallest alpha (about 0.224) at which the four-item bound reaches its target.

    It is the root in (0.22, 0.23) of a**4 - 2a**3 - 2a**2 + 5a - 1, the
    point where the two ``u`` leaves of the four-item tree meet the
    closed-form ratio.
    """
    return enc.bisect_root([-1, 5, -2, -2, 1], Fraction(22, 100), Fraction(23, 100), digits)


# the ratio curve ---------------------------------------------------------------


def ratio_sqrt_piece(alpha, digits: int = DEFAULT_DIGITS) -> RatioValue:
    """(1 + sqrt(5 - 4a)) / (2 (1 - a)); accepts a rational or an enclosure."""
    a = enc.lift(alpha)
    return (1 + enc.sqrt(5 - 4 * a, digits)) / (2 * (1 - a))


def ratio_linear_piece(alpha) -> RatioValue:
    return 2 + enc.lift(alpha)


def ratio_divergent_piece(alpha) -> RatioValue:
    return 1 / (1 - enc.lift(alpha))


def rho_star(alpha, digits: int = DEFAULT_DIGITS) -> RatioValue:
    """Best achievable competitive ratio for reservation factor ``alpha``."""
    alpha = to_fraction(alpha)
    if not 0 < alpha < 1:
        raise OutOfDomain(f"rho_star is defined for 0 < alpha < 1, got {alpha}")
    if alpha <= QUARTER:
        return RatioValue.exact(2)
    if enc.le(alpha, sqrt2_minus_1(digits)):
        return ratio_sqrt_piece(alpha, digits)
    if enc.lt(alpha, phi_minus_1(digits)):
        return ratio_linear_piece(alpha)
    return ratio_divergent_piece(alpha)


# item classes ----------------------------------------------------------------


class ItemClass(enum.Enum):
    SMALL = "small"
    LARGE = "large"


def small_item_threshold(alpha) -> RatioValue:
    """(1 - a - a**2) / ((2 + a)(1 - a)): room left after packing 1/((2+a)(1-a))."""
    a = enc.lift(alpha)
    return (1 - a - a * a) / ((2 + a) * (1 - a))


def classify_item(size, alpha, digits: int = DEFAULT_DIGITS) -> ItemClass:
    size = to_fraction(size)
    phi = phi_minus_1(digits)
    if isinstance(alpha, RatioValue):
        # an enclosure of phi-1 itself is accepted: the threshold is then ~0
        valid = alpha.upper > 0 and alpha.lower <= phi.upper
    else:
        alpha = to_fraction(alpha)
        valid = alpha > 0 and enc.le(alpha, phi)
    if not valid:
        raise OutOfDomain(f"item classes need 0 < alpha <= phi-1, got {alpha!r}")
    threshold = small_item_threshold(alpha)
    return ItemClass.SMALL if enc.lt(size, threshold) else ItemClass.LARGE


# policies --------------------------------------------------------------------


class PolicyKind(str, enum.Enum):
    ALG1 = "alg1"
    THRESHOLD = "threshold"
    TAKE_FIRST_FIT = "take-first-fit"
    REJECT_ALL = "reject-all"


@dataclass(frozen=True)
class PolicyConfig:
    alpha: Fraction
    kind: PolicyKind
    rho: Optional[RatioValue] = None
    mu: Optional[RatioValue] = None
    threshold: Optional[RatioValue] = None


class Policy:
    """An online decision rule.

    ``decide`` maps the current state and the arriving item to an action;
    ``final_selection`` picks reserved items to pack after the last item.
    Policies hold no mutable state, so one instance can serve many runs.
    """

    def __init__(self, config: PolicyConfig, name: str):
        self.config = config
        self.name = name

    @property
    def alpha(self) -> Fraction:
        return self.config.alpha

    @property
    def kind(self) -> str:
        return self.config.kind.value

    def decide(self, state: RunState, item: Fraction):
        raise NotImplementedError

    def final_selection(self, state: RunState) -> tuple[Fraction, ...]:
        return popt(state.reserved, capacity=state.remaining).selection

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} alpha={self.alpha}>"


class Alg1Policy(Policy):
    def __init__(self, config: PolicyConfig, name: str = "alg1"):
        super().__init__(config, name)
        self._target = 1 / config.rho  # the gain we want to secure
        self._big = 1 - config.mu  # reserved items above this block the cheap exit

    def decide(self, state, item):
        alpha = self.alpha
        reserve = state.reserved_total
        if enc.lt(item + reserve * (1 - alpha), self._target):
            return RESERVE
        pool = state.reserved + (item,)
        if item + reserve <= state.remaining:
            return Finalize(popt(pool, capacity=state.remaining).selection)
        if all(enc.le(x, self._big) for x in state.reserved):
            return Finalize(popt(pool, capacity=state.remaining).selection)
        best = popt(pool, capacity=state.remaining)
        if enc.ge(best.total - alpha * reserve, self._target):
            return Finalize(best.selection)
        return REJECT


class ThresholdPolicy(Policy):
    def decide(self, state, item):
        if enc.ge(item + (1 - self.alpha) * state.reserved_total, self.config.threshold):
            pool = state.reserved + (item,)
            return Finalize(popt(pool, capacity=state.remaining).selection)
        return RESERVE


class TakeFirstFit(Policy):
    def decide(self, state, item):
        return PACK if item <= state.remaining else REJECT

    def final_selection(self, state):
        return ()


class RejectAll(Policy):
    def decide(self, state, item):
        return REJECT

    def final_selection(self, state):
        return ()


def _open_unit(alpha) -> Fraction:
    alpha = as_alpha(alpha)
    if not 0 < alpha < 1:
        raise OutOfDomain(f"expected 0 < alpha < 1, got {alpha}")
    return alpha


def make_policy_alg1(alpha, digits: int = DEFAULT_DIGITS) -> Alg1Policy:
    alpha = _open_unit(alpha)
    if enc.gt(alpha, sqrt2_minus_1(digits)):
        raise OutOfDomain(f"alg1 needs alpha <= sqrt(2)-1, got {alpha}")
    rho = enc.rmax(2, ratio_sqrt_piece(alpha, digits))
    mu = 1 / (rho * (1 - alpha))
    config = PolicyConfig(alpha, PolicyKind.ALG1, rho=rho, mu=mu, threshold=1 / rho)
    return Alg1Policy(config)


def make_policy_threshold(alpha, threshold, name: str = "threshold", rho=None) -> ThresholdPolicy:
    alpha = _open_unit(alpha)
    threshold = enc.lift(threshold)
    if not (threshold.lower > 0 and threshold.upper <= 1):
        raise OutOfDomain(f"threshold must lie in (0, 1], got {threshold!r}")
    config = PolicyConfig(alpha, PolicyKind.THRESHOLD, rho=rho, threshold=threshold)
    return ThresholdPolicy(config, name)


def threshold_2a(alpha) -> ThresholdPolicy:
    alpha = _open_unit(alpha)
    return make_policy_threshold(alpha, 1 / (2 + alpha), "threshold-2a", rho=RatioValue.exact(2 + alpha))


def threshold_1a(alpha) -> ThresholdPolicy:
    alpha = _open_unit(alpha)
    return make_policy_threshold(alpha, 1 - alpha, "threshold-1a", rho=RatioValue.exact(1 / (1 - alpha)))


def take_first_fit(alpha) -> TakeFirstFit:
    return TakeFirstFit(PolicyConfig(as_alpha(alpha), PolicyKind.TAKE_FIRST_FIT), "take-first-fit")


def reject_all(alpha) -> RejectAll:
    return RejectAll(PolicyConfig(as_alpha(alpha), PolicyKind.REJECT_ALL), "reject-all")


def select_policy(alpha, digits: int = DEFAULT_DIGITS) -> Policy:
    """The policy matching the optimal ratio for ``alpha``."""
    alpha = _open_unit(alpha)
    if enc.le(alpha, sqrt2_minus_1(digits)):
        return make_policy_alg1(alpha, digits)
    if enc.lt(alpha, phi_minus_1(digits)):
        return threshold_2a(alpha)
    return threshold_1a(alpha)


POLICY_NAMES = ("alg1", "auto", "reject-all", "take-first-fit", "threshold-1a", "threshold-2a")
CATALOG = ("alg1", "threshold-2a", "threshold-1a", "take-first-fit", "reject-all")


def make_policy(name: str, alpha, digits: int = DEFAULT_DIGITS) -> Policy:
    if name == "alg1":
        return make_policy_alg1(alpha, digits)
    if name == "auto":
        return select_policy(alpha, digits)
    if name == "threshold-2a":
        return threshold_2a(alpha)
    if name == "threshold-1a":
        return threshold_1a(alpha)
    if name == "take-first-fit":
        return take_first_fit(alpha)
    if name == "reject-all":
        return reject_all(alpha)
    raise KeyError(f"unknown policy {name!r}; choose from {', '.join(POLICY_NAMES)}")


def policy_available(name: str, alpha, digits: int = DEFAULT_DIGITS) -> bool:
    try:
        make_policy(name, alpha, digits)
    except OutOfDomain:
        return False
    return True
