"""The online game: items arrive one by one and are packed, rejected or reserved.

Reserving an item costs ``alpha * size`` immediately; reserved items may be
packed when the algorithm stops (a ``Finalize`` action) or after the last
item.  The gain of a run is ``packed_total - alpha * reserved_total``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    AlreadyStopped,
    CapacityExceeded,
    InvalidAction,
    OutOfDomain,
    PolicyFault,
    SizeOutOfRange,
)

CAPACITY = Fraction(1)

Ratio = Union[Fraction, float]  # float only ever carries math.inf


def to_fraction(value) -> Fraction:
    """Coerce ints, Fractions, Decimals and strings like ``"3/10"`` or ``"0.35"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (Rational, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__} {value!r}")


def as_alpha(value) -> Fraction:
    alpha = to_fraction(value)
    if not 0 <= alpha <= 1:
        raise OutOfDomain(f"reservation factor {alpha} outside [0, 1]")
    return alpha


@dataclass(frozen=True)
class Instance:
    items: tuple[Fraction, ...]
    id: str = ""

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def validate_instance(sizes: Iterable, id: str = "") -> Instance:
    items = []
    for index, raw in enumerate(sizes):
        size = to_fraction(raw)
        if not 0 < size <= 1:
            raise SizeOutOfRange(index, size)
        items.append(size)
    return Instance(tuple(items), id)


def parse_instance_text(text: str, id: str = "") -> Instance:
    sizes = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        sizes.append(line)
    return validate_instance(sizes, id)


def read_instance(path) -> Instance:
    path = Path(path)
    return parse_instance_text(path.read_text(), id=path.stem)


def format_instance(instance: Instance) -> str:
    lines = [f"# {instance.id}"] if instance.id else []
    lines.extend(str(x) for x in instance.items)
    return "\n".join(lines) + "\n"


# actions -------------------------------------------------------------------


@dataclass(frozen=True)
class PackItem:
    def __str__(self):
        return "pack"


@dataclass(frozen=True)
class Reject:
    def __str__(self):
        return "reject"


@dataclass(frozen=True)
class Reserve:
    def __str__(self):
        return "reserve"


@dataclass(frozen=True)
class Finalize:
    """Pack ``selection`` (taken from the reserve and the current item) and stop."""

    selection: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "selection", tuple(sorted(self.selection)))

    def __str__(self):
        return "finalize{" + ", ".join(map(str, self.selection)) + "}"


PACK = PackItem()
REJECT = Reject()
RESERVE = Reserve()

StepAction = Union[PackItem, Reject, Reserve, Finalize]


def takes(action) -> bool:
    """True for actions an adversary treats as the algorithm taking an item."""
    return isinstance(action, (PackItem, Finalize))


@dataclass(frozen=True)
class RunState:
    step: int = 0
    packed: tuple[Fraction, ...] = ()
    reserved: tuple[Fraction, ...] = ()
    packed_total: Fraction = Fraction(0)
    reserved_total: Fraction = Fraction(0)
    stopped: bool = False

    @property
    def remaining(self) -> Fraction:
        return CAPACITY - self.packed_total


def _check_sub_multiset(selection, pool):
    missing = Counter(selection) - Counter(pool)
    if missing:
        raise InvalidAction(f"selection uses items not available: {sorted(missing.elements())}")


def apply_action(state: RunState, item: Fraction, action: StepAction) -> RunState:
    if state.stopped:
        raise AlreadyStopped(f"run already stopped at step {state.step}")
    step = state.step + 1
    if isinstance(action, PackItem):
        if state.packed_total + item > CAPACITY:
            raise CapacityExceeded(f"packing {item} onto {state.packed_total} exceeds capacity")
        return RunState(
            step,
            state.packed + (item,),
            state.reserved,
            state.packed_total + item,
            state.reserved_total,
        )
    if isinstance(action, Reject):
        return RunState(step, state.packed, state.reserved, state.packed_total, state.reserved_total)
    if isinstance(action, Reserve):
        return RunState(
            step,
            state.packed,
            state.reserved + (item,),
            state.packed_total,
            state.reserved_total + item,
        )
    if isinstance(action, Finalize):
        _check_sub_multiset(action.selection, state.reserved + (item,))
        return _pack_and_stop(state, action.selection, step)
    raise InvalidAction(f"unknown action {action!r}")


def _pack_and_stop(state: RunState, selection, step: int) -> RunState:
    total = sum(selection, Fraction(0))
    if state.packed_total + total > CAPACITY:
        raise CapacityExceeded(f"selection of total {total} does not fit into {state.remaining}")
    return RunState(
        step,
        state.packed + tuple(selection),
        state.reserved,
        state.packed_total + total,
        state.reserved_total,
        stopped=True,
    )


def apply_final_selection(state: RunState, selection: Sequence[Fraction]) -> RunState:
    """End-of-sequence packing of reserved items; the run is stopped afterwards."""
    if state.stopped:
        raise AlreadyStopped(f"run already stopped at step {state.step}")
    selection = tuple(sorted(selection))
    _check_sub_multiset(selection, state.reserved)
    return _pack_and_stop(state, selection, state.step)


def final_gain(packed_total, reserved_total, alpha) -> Fraction:
    return to_fraction(packed_total) - to_fraction(alpha) * to_fraction(reserved_total)


def competitive_ratio(opt: Fraction, gain: Fraction) -> Ratio:
    """OPT / gain, with 1 for the empty instance and +inf for a nonpositive gain."""
    if opt == 0 and gain == 0:
        return Fraction(1)
    if gain <= 0:
        return math.inf
    return Fraction(opt) / gain


@dataclass(frozen=True)
class Outcome:
    packed_total: Fraction
    reserved_total: Fraction
    gain: Fraction


@dataclass(frozen=True)
class TraceStep:
    item: Fraction
    action: StepAction
    state: RunState


@dataclass
class Trace:
    instance: Instance
    alpha: Fraction
    policy: str
    kind: str
    steps: list[TraceStep] = field(default_factory=list)
    final_selection: Optional[tuple[Fraction, ...]] = None
    final_state: RunState = field(default_factory=RunState)

    @property
    def trigger_index(self) -> Optional[int]:
        """1-based index of the item whose decision was Finalize, if any."""
        for i, step in enumerate(self.steps, start=1):
            if isinstance(step.action, Finalize):
                return i
        return None

    @property
    def actions(self) -> list[StepAction]:
        return [s.action for s in self.steps]

    def states(self) -> list[RunState]:
        return [s.state for s in self.steps]

    def outcome(self) -> Outcome:
        st = self.final_state
        return Outcome(
            st.packed_total,
            st.reserved_total,
            final_gain(st.packed_total, st.reserved_total, self.alpha),
        )


def replay(trace: Trace) -> list[RunState]:
    """Re-apply the recorded actions from the empty state."""
    state = RunState()
    states = []
    for step in trace.steps:
        state = apply_action(state, step.item, step.action)
        states.append(state)
    if trace.final_selection is not None:
        state = apply_final_selection(state, trace.final_selection)
    states.append(state)
    return states


class Run:
    """Drives one policy through a stream of items, one item at a time.

    ``offer`` returns the action taken, or ``None`` once the policy has
    stopped.  ``close`` performs the end-of-sequence packing and returns
    the finished :class:`Trace`.
    """

    def __init__(self, policy, alpha, instance_id: str = ""):
        self.policy = policy
        self.alpha = as_alpha(alpha)
        self.instance_id = instance_id
        self.items: list[Fraction] = []
        self.state = RunState()
        self.steps: list[TraceStep] = []
        self.final_selection = None
        self.closed = False

    def offer(self, item) -> Optional[StepAction]:
        if self.closed:
            raise AlreadyStopped("run is closed")
        item = to_fraction(item)
        self.items.append(item)
        if self.state.stopped:
            return None
        action = self.policy.decide(self.state, item)
        try:
            self.state = apply_action(self.state, item, action)
        except (CapacityExceeded, InvalidAction, AlreadyStopped) as exc:
            raise PolicyFault(f"{self.policy.name} chose {action} on {item}: {exc}") from exc
        self.steps.append(TraceStep(item, action, self.state))
        return action

    def close(self) -> Trace:
        if not self.closed:
            if not self.state.stopped:
                selection = tuple(sorted(self.policy.final_selection(self.state)))
                try:
                    self.state = apply_final_selection(self.state, selection)
                except (CapacityExceeded, InvalidAction) as exc:
                    raise PolicyFault(f"{self.policy.name} final selection: {exc}") from exc
                self.final_selection = selection
            self.closed = True
        return Trace(
            instance=Instance(tuple(self.items), self.instance_id),
            alpha=self.alpha,
            policy=self.policy.name,
            kind=self.policy.kind,
            steps=list(self.steps),
            final_selection=self.final_selection,
            final_state=self.state,
        )


def run_on_instance(policy, instance: Instance, alpha) -> tuple[Trace, Outcome]:
    alpha = as_alpha(alpha)
    if getattr(policy, "alpha", alpha) != alpha:
        raise ValueError(f"policy {policy.name} was built for alpha={policy.alpha}, not {alpha}")
    run = Run(policy, alpha, instance.id)
    for item in instance.items:
        if run.offer(item) is None:
            break
    trace = run.close()
    # later items are ignored by the policy but still belong to the instance
    trace.instance = instance
    return trace, trace.outcome()
