"""Adaptive adversaries and the duel engine.

An adversary looks at the history of ``(item, action)`` pairs played so far
and returns the next item size, or ``None`` to end the sequence.  The
action recorded for an item that arrives after the policy stopped is
``None``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import enclosure as enc
from .algorithms import phi_minus_1, sqrt2_minus_1
from .enclosure import DEFAULT_DIGITS
from .errors import DeltaOutOfRange, OutOfDomain, OutOfRange
from .model import (
    PACK,
    REJECT,
    RESERVE,
    Finalize,
    Instance,
    PackItem,
    Reject,
    Reserve,
    Run,
    RunState,
    Trace,
    apply_action,
    apply_final_selection,
    as_alpha,
    competitive_ratio,
    final_gain,
    takes,
    to_fraction,
)
from .oracle import opt_gain, popt

ONE = Fraction(1)
HALF = Fraction(1, 2)
FOUR_ITEM_FLOOR = Fraction(225, 1000)
EPSILON_CEILING = Fraction(1, 1000)


@dataclass(frozen=True)
class AdversaryParams:
    alpha: Fraction
    delta: Optional[Fraction] = None
    epsilon: Optional[Fraction] = None
    s: Optional[Fraction] = None
    t: Optional[Fraction] = None
    u: Optional[Fraction] = None

    def __post_init__(self):
        s, t, u = self.s, self.t, self.u
        if t is not None and not (s < t and s + t > 1 and t < 1):
            raise ValueError(f"need s < t < 1 and s + t > 1, got s={s}, t={t}")
        if u is not None and not (t < u < 1):
            raise ValueError(f"need t < u < 1, got t={t}, u={u}")


def _first_take(history) -> Optional[int]:
    for i, (_, action) in enumerate(history):
        if action is not None and takes(action):
            return i
    return None


class Adversary:
    name = "adversary"

    def __init__(self, params: AdversaryParams):
        self.params = params

    @property
    def alpha(self) -> Fraction:
        return self.params.alpha

    # longest sequence this adversary can ever present
    max_length: int = 0

    def next_item(self, history: Sequence) -> Optional[Fraction]:
        raise NotImplementedError

    def _after_take(self, history) -> tuple[bool, Optional[Fraction]]:
        """Shared rule: once the algorithm takes an item, show a full item and end."""
        i = _first_take(history)
        if i is None:
            return False, None
        return True, (ONE if len(history) == i + 1 else None)

    def __repr__(self):
        return f"<{type(self).__name__} alpha={self.alpha}>"


class ChainAdversary(Adversary):
    """Keeps offering items just above one half while the algorithm reserves.

    Round ``i`` offers ``1/2 + delta**i``.  Taking any item is answered by a
    full item.  Rejecting the first item ends the game; rejecting the bait
    of round ``i >= 2`` is answered by ``1/2 - delta**i``, which fits only
    with the rejected item.  Bait stops once the reservation cost alone
    reaches one half.
    """

    name = "chain"

    def __init__(self, alpha, delta):
        alpha, delta = as_alpha(alpha), to_fraction(delta)
        if not 0 < alpha:
            raise OutOfDomain(f"chain adversary needs alpha > 0, got {alpha}")
        if not 0 < delta <= Fraction(1, 100):
            raise DeltaOutOfRange(f"delta must lie in (0, 1/100], got {delta}")
        super().__init__(AdversaryParams(alpha, delta=delta))
        self.rounds = self._stop_round()
        # rounds of bait, one closing item, one full item
        self.max_length = self.rounds + 2

    def bait(self, i: int) -> Fraction:
        return HALF + self.params.delta ** i

    def _stop_round(self) -> int:
        cost, i = Fraction(0), 0
        while True:
            i += 1
            cost += self.alpha * self.bait(i)
            if cost >= HALF:
                return i

    def next_item(self, history):
        if not history:
            return self.bait(1)
        taken, item = self._after_take(history)
        if taken:
            return item
        n = len(history)
        last_item, last_action = history[-1]
        closing = n >= 2 and last_item == HALF - self.params.delta ** (n - 1)
        if closing or last_action is None:
            return None
        if isinstance(last_action, Reject):
            return None if n == 1 else HALF - self.params.delta ** n
        if n >= self.rounds:
            return None
        return self.bait(n + 1)


def _four_item_sizes(alpha: Fraction, epsilon: Fraction, digits: int):
    denominator = 10 ** digits
    if enc.le(alpha, sqrt2_minus_1(digits)):
        q = enc.sqrt(5 - 4 * alpha, digits)
        s = 2 / (3 + q)
        t = (q - 1 + 2 * alpha) / (2 * (1 + alpha))
        t_rounded = enc.round_to_denominator(t, denominator)
        u = (alpha + enc.sqrt(4 * (t_rounded - alpha) + alpha * alpha, digits)) / 2
        return (
            enc.round_to_denominator(s, denominator) + epsilon,
            t_rounded,
            enc.round_to_denominator(u, denominator),
        )
    if enc.le(alpha, phi_minus_1(digits)):
        s = 1 / (2 + alpha)
        return s, 1 - s + epsilon, None
    return 1 - alpha, None, None


class FourItemAdversary(Adversary):
    """Offers s, then t, then u while the algorithm keeps reserving.

    Rejecting ends the game, taking is answered by a full item.  Which of
    t and u exist depends on the range of alpha.
    """

    name = "four-item"

    def __init__(self, alpha, epsilon, digits: int = DEFAULT_DIGITS):
        alpha, epsilon = as_alpha(alpha), to_fraction(epsilon)
        if not FOUR_ITEM_FLOOR < alpha < 1:
            raise OutOfRange(f"four-item adversary needs 0.225 < alpha < 1, got {alpha}")
        if not 0 < epsilon < EPSILON_CEILING:
            raise OutOfDomain(f"epsilon must lie in (0, 1/1000), got {epsilon}")
        s, t, u = _four_item_sizes(alpha, epsilon, digits)
        super().__init__(AdversaryParams(alpha, epsilon=epsilon, s=s, t=t, u=u))
        self.sequence = tuple(x for x in (s, t, u) if x is not None)
        self.max_length = len(self.sequence) + 1

    def next_item(self, history):
        if not history:
            return self.sequence[0]
        taken, item = self._after_take(history)
        if taken:
            return item
        _, last_action = history[-1]
        if not isinstance(last_action, Reserve):
            return None
        n = len(history)
        return self.sequence[n] if n < len(self.sequence) else None


class NonrejectingAdversary(Adversary):
    """Strategy against algorithms that never reject before they stop.

    First ``1/(2+a)``, then ``(1+a)/(2+a) + eps`` again and again while the
    algorithm reserves.  No two of these items fit together, so every extra
    reservation lowers the best reachable gain; the sequence ends once even
    the best remaining outcome has ratio at least ``2 + a - 10 eps``.  A
    rejection ends the sequence (the strategy has no answer for it).
    """

    name = "nonrejecting"

    def __init__(self, alpha, epsilon):
        alpha, epsilon = as_alpha(alpha), to_fraction(epsilon)
        if not 0 < alpha <= 1:
            raise OutOfDomain(f"nonrejecting adversary needs 0 < alpha <= 1, got {alpha}")
        if not 0 < epsilon < EPSILON_CEILING:
            raise OutOfDomain(f"epsilon must lie in (0, 1/1000), got {epsilon}")
        super().__init__(AdversaryParams(alpha, epsilon=epsilon))
        self.first = 1 / (2 + alpha)
        self.repeat = (1 + alpha) / (2 + alpha) + epsilon
        self.horizon = self._horizon()
        self.max_length = self.horizon + 1

    def _done(self, reserved_total: Fraction) -> bool:
        best = self.repeat - self.alpha * reserved_total
        if best <= 0:
            return True
        return self.repeat / best >= 2 + self.alpha - 10 * self.params.epsilon

    def _horizon(self) -> int:
        k, reserved = 2, self.first + self.repeat
        while not self._done(reserved):
            k += 1
            reserved += self.repeat
        return k

    def next_item(self, history):
        if not history:
            return self.first
        taken, item = self._after_take(history)
        if taken:
            return item
        _, last_action = history[-1]
        if not isinstance(last_action, Reserve):
            return None
        return self.repeat if len(history) < self.horizon else None


ADVERSARY_NAMES = ("chain", "four-item", "nonrejecting")
DEFAULT_DELTA = Fraction(1, 1000)
DEFAULT_EPSILON = Fraction(1, 10 ** 6)


def chain_adversary(alpha, delta) -> ChainAdversary:
    return ChainAdversary(alpha, delta)


def four_item_adversary(alpha, epsilon, digits: int = DEFAULT_DIGITS) -> FourItemAdversary:
    return FourItemAdversary(alpha, epsilon, digits)


def nonrejecting_adversary(alpha, epsilon) -> NonrejectingAdversary:
    return NonrejectingAdversary(alpha, epsilon)


def make_adversary(name: str, alpha, delta=DEFAULT_DELTA, epsilon=DEFAULT_EPSILON,
                   digits: int = DEFAULT_DIGITS) -> Adversary:
    if name == "chain":
        return chain_adversary(alpha, delta)
    if name == "four-item":
        return four_item_adversary(alpha, epsilon, digits)
    if name == "nonrejecting":
        return nonrejecting_adversary(alpha, epsilon)
    raise KeyError(f"unknown adversary {name!r}; choose from {', '.join(ADVERSARY_NAMES)}")


def adversary_available(name: str, alpha) -> bool:
    alpha = to_fraction(alpha)
    if name == "four-item":
        return FOUR_ITEM_FLOOR < alpha < 1
    if name == "nonrejecting":
        return 0 < alpha <= 1
    if name == "chain":
        return 0 < alpha <= 1
    raise KeyError(f"unknown adversary {name!r}")


# duels -------------------------------------------------------------------------


@dataclass
class DuelResult:
    instance: Instance
    trace: Trace
    gain: Fraction
    opt: Fraction
    ratio: object  # Fraction, or math.inf
    notes: tuple[str, ...] = field(default_factory=tuple)


def duel(policy, adversary: Adversary, alpha) -> DuelResult:
    alpha = as_alpha(alpha)
    if policy.alpha != alpha or adversary.alpha != alpha:
        raise ValueError(
            f"policy (alpha={policy.alpha}) and adversary (alpha={adversary.alpha}) "
            f"must both be built for alpha={alpha}"
        )
    run = Run(policy, alpha, instance_id=adversary.name)
    history = []
    notes = []
    while True:
        item = adversary.next_item(history)
        if item is None:
            break
        if len(history) >= adversary.max_length:
            raise RuntimeError(f"{adversary.name} exceeded its horizon of {adversary.max_length}")
        history.append((item, run.offer(item)))
    if isinstance(adversary, NonrejectingAdversary) and any(isinstance(a, Reject) for _, a in history):
        notes.append("ended-on-reject")
    trace = run.close()
    gain = trace.outcome().gain
    opt = opt_gain(trace.instance)
    return DuelResult(trace.instance, trace, gain, opt, competitive_ratio(opt, gain), tuple(notes))


# exhaustive play -----------------------------------------------------------------


def _finalize_options(pool, remaining):
    seen = set()
    for r in range(len(pool) + 1):
        for combo in itertools.combinations(sorted(pool), r):
            if combo in seen or sum(combo, Fraction(0)) > remaining:
                continue
            seen.add(combo)
            yield Finalize(combo)


def enumerate_strategies(adversary: Adversary, alpha, max_depth: int = 6):
    """Every way an algorithm can play against ``adversary``.

    At each item the algorithm may reject, reserve, pack (when it fits) or
    finalize with any fitting selection of the reserve and the item; after
    the last item it packs its reserve optimally.  Returns a list of
    ``(actions, ratio)`` pairs, one per leaf of the game tree.
    """
    alpha = as_alpha(alpha)
    leaves = []

    def settle(history, state):
        while True:
            item = adversary.next_item(history)
            if item is None:
                break
            history = history + [(item, None)]
        if not state.stopped:
            state = apply_final_selection(state, popt(state.reserved, capacity=state.remaining).selection)
        instance = Instance(tuple(x for x, _ in history))
        gain = final_gain(state.packed_total, state.reserved_total, alpha)
        leaves.append((tuple(a for _, a in history if a is not None), competitive_ratio(opt_gain(instance), gain)))

    def explore(history, state):
        if state.stopped:
            settle(history, state)
            return
        item = adversary.next_item(history)
        if item is None:
            settle(history, state)
            return
        if len(history) >= max_depth:
            raise RuntimeError(f"game deeper than {max_depth} items")
        options = [REJECT, RESERVE]
        if item <= state.remaining:
            options.append(PACK)
        options.extend(_finalize_options(state.reserved + (item,), state.remaining))
        for action in options:
            explore(history + [(item, action)], apply_action(state, item, action))

    explore([], RunState())
    return leaves


def chain_leaf_bound(alpha, sizes: Sequence[Fraction]):
    """Smallest leaf ratio of the reserve-until-reject tree over increasing ``sizes``.

    Assumes no two sizes fit together.  Leaves: taking item ``i`` (a full
    item follows), rejecting item ``i`` (the sequence ends) and reserving
    everything.
    """
    alpha = to_fraction(alpha)
    leaves = []
    reserved = Fraction(0)
    for i, x in enumerate(sizes):
        leaves.append(competitive_ratio(ONE, x - alpha * reserved))
        if i == 0:
            leaves.append(math.inf)
        else:
            leaves.append(competitive_ratio(x, max(sizes[:i]) - alpha * reserved))
        reserved += x
    leaves.append(competitive_ratio(max(sizes), max(sizes) - alpha * reserved))
    return min(leaves)


def min_expression(alpha, s, t, u):
    """The six-term lower bound of the full four-item tree."""
    alpha, s, t, u = map(to_fraction, (alpha, s, t, u))
    terms = [
        competitive_ratio(ONE, s),
        competitive_ratio(t, (1 - alpha) * s),
        competitive_ratio(ONE, t - alpha * s),
        competitive_ratio(u, t - alpha * (s + t)),
        competitive_ratio(ONE, u - alpha * (s + t)),
        competitive_ratio(u, u - alpha * (s + t + u)),
    ]
    return min(terms)
