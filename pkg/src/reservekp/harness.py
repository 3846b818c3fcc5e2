"""Measurement, sweeps, lemma checks and CSV output."""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import enclosure as enc
from .adversaries import (
    ADVERSARY_NAMES,
    DEFAULT_DELTA,
    DEFAULT_EPSILON,
    adversary_available,
    duel,
    make_adversary,
)
from .algorithms import ItemClass, alpha4, classify_item, make_policy, policy_available
from .enclosure import DEFAULT_DIGITS
from .errors import NotApplicable
from .model import Instance, Reject, Trace, as_alpha, competitive_ratio, run_on_instance, to_fraction
from .oracle import opt_gain

log = logging.getLogger(__name__)

CSV_HEADER = (
    "alpha", "policy", "opponent", "gain", "opt", "ratio",
    "alpha_decimal", "gain_decimal", "opt_decimal", "ratio_decimal",
)


@dataclass(frozen=True)
class RatioRecord:
    alpha: Fraction
    policy: str
    opponent: str
    gain: Fraction
    opt: Fraction
    ratio: object  # Fraction, or math.inf

    def sort_key(self):
        return (self.alpha, self.policy, self.opponent)


def measure_ratio(policy, instance: Instance, alpha, policy_name: Optional[str] = None) -> RatioRecord:
    alpha = as_alpha(alpha)
    _, outcome = run_on_instance(policy, instance, alpha)
    opt = opt_gain(instance)
    return RatioRecord(
        alpha,
        policy_name or policy.name,
        instance.id,
        outcome.gain,
        opt,
        competitive_ratio(opt, outcome.gain),
    )


def random_instance(n: int, seed: int, max_denominator: int = 1000) -> Instance:
    """``n`` sizes drawn uniformly from {1/d, 2/d, ..., d/d}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if max_denominator < 2:
        raise ValueError("max_denominator must be at least 2")
    rng = random.Random(seed)
    d = max_denominator
    items = tuple(Fraction(rng.randint(1, d), d) for _ in range(n))
    return Instance(items, f"random-n{n}-s{seed}-d{d}")


def derived_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labels (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(":".join(map(str, parts)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def cell_instances(seed: int, alpha, count: int, n_max: int = 15, max_denominator: int = 1000):
    """The random instances shared by every policy in one sweep cell."""
    instances = []
    for i in range(count):
        s = derived_seed(seed, alpha, i)
        n = random.Random(s).randint(1, n_max)
        inst = random_instance(n, s, max_denominator)
        instances.append(Instance(inst.items, f"random-{i:04d}"))
    return instances


# sweeps --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    start: Fraction
    end: Fraction
    step: Fraction
    policies: tuple[str, ...] = ("auto",)
    opponents: tuple[str, ...] = ("four-item",)
    seed: int = 0
    instances: int = 0
    n_max: int = 15
    max_denominator: int = 1000
    epsilon: Fraction = DEFAULT_EPSILON
    delta: Fraction = DEFAULT_DELTA
    digits: int = DEFAULT_DIGITS

    def __post_init__(self):
        for name in ("start", "end", "step", "epsilon", "delta"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if not 0 < self.start <= self.end < 1:
            raise ValueError(f"need 0 < start <= end < 1, got [{self.start}, {self.end}]")
        if self.step <= 0:
            raise ValueError("step must be positive")
        unknown = [o for o in self.opponents if o not in ADVERSARY_NAMES]
        if unknown:
            raise ValueError(f"unknown adversaries: {unknown}")
        object.__setattr__(self, "policies", tuple(self.policies))
        object.__setattr__(self, "opponents", tuple(self.opponents))

    def grid(self) -> list[Fraction]:
        points, a = [], self.start
        while a <= self.end:
            points.append(a)
            a += self.step
        return points


@dataclass(frozen=True)
class Skip:
    alpha: Fraction
    policy: str
    opponent: str
    reason: str


@dataclass
class SweepResult:
    records: list[RatioRecord] = field(default_factory=list)
    skips: list[Skip] = field(default_factory=list)


def _sweep_cell(spec: SweepSpec, alpha: Fraction) -> SweepResult:
    result = SweepResult()
    instances = cell_instances(spec.seed, alpha, spec.instances, spec.n_max, spec.max_denominator)
    for name in sorted(spec.policies):
        opponents = list(spec.opponents) + [inst.id for inst in instances]
        if not policy_available(name, alpha, spec.digits):
            for opp in opponents:
                result.skips.append(Skip(alpha, name, opp, f"policy {name} undefined at alpha={alpha}"))
            continue
        policy = make_policy(name, alpha, spec.digits)
        for adv_name in spec.opponents:
            if not adversary_available(adv_name, alpha):
                result.skips.append(Skip(alpha, name, adv_name, f"{adv_name} invalid at alpha={alpha}"))
                continue
            adversary = make_adversary(adv_name, alpha, spec.delta, spec.epsilon, spec.digits)
            d = duel(policy, adversary, alpha)
            result.records.append(RatioRecord(alpha, name, adv_name, d.gain, d.opt, d.ratio))
        for inst in instances:
            result.records.append(measure_ratio(policy, inst, alpha, policy_name=name))
    result.records.sort(key=RatioRecord.sort_key)
    return result


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Evaluate every cell of the grid; output order never depends on ``jobs``."""
    grid = spec.grid()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_sweep_cell, [spec] * len(grid), grid))
    else:
        cells = [_sweep_cell(spec, a) for a in grid]
    merged = SweepResult()
    for cell in cells:
        merged.records.extend(cell.records)
        merged.skips.extend(cell.skips)
    for skip in merged.skips:
        log.info("skipped %s vs %s at alpha=%s: %s", skip.policy, skip.opponent, skip.alpha, skip.reason)
    return merged


def sweep(spec: SweepSpec, jobs: int = 1) -> list[RatioRecord]:
    return run_sweep(spec, jobs).records


# lemma checks ------------------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    check: str
    reference: str
    passed: bool
    witness: dict = field(default_factory=dict)


def _ref(trace: Trace) -> str:
    return f"{trace.policy}@{trace.alpha}:{trace.instance.id or '?'}"


def _reserve_bound(trace, alpha, check, bound, strict):
    for i, step in enumerate(trace.steps, start=1):
        r = step.state.reserved_total
        if (r >= bound) if strict else (r > bound):
            return VerificationReport(check, _ref(trace), False, {
                "step": i, "R": r, "t": step.state.packed_total, "alpha": alpha, "bound": bound,
            })
    return VerificationReport(check, _ref(trace), True)


def _large_count(trace, alpha, digits):
    if alpha > Fraction(1, 2):
        return None
    limit = 1 if enc.le(alpha, alpha4(digits)) else 2
    # a finalize never adds to the reserve, so this is the pre-trigger reserve
    st = trace.final_state
    large = [x for x in st.reserved if classify_item(x, alpha, digits) is ItemClass.LARGE]
    ok = len(large) <= limit
    witness = {} if ok else {
        "large": large, "limit": limit, "alpha": alpha,
        "R": st.reserved_total, "t": st.packed_total,
    }
    return VerificationReport("large-item-count", _ref(trace), ok, witness)


def verify_lemmas(traces: Iterable[Trace], alpha=None, digits: int = DEFAULT_DIGITS) -> list[VerificationReport]:
    """Check the reserve bounds, large-item counts and nonrejection on traces.

    Which checks apply is decided by the policy name stored in each trace.
    """
    reports = []
    for trace in traces:
        a = trace.alpha if alpha is None else as_alpha(alpha)
        if trace.alpha != a:
            raise ValueError(f"trace {_ref(trace)} was recorded at alpha={trace.alpha}, not {a}")
        if trace.policy == "threshold-2a":
            bound = 1 / ((2 + a) * (1 - a))
            reports.append(_reserve_bound(trace, a, "reserve-bound-2a", bound, strict=True))
            counted = _large_count(trace, a, digits)
            if counted is not None:
                reports.append(counted)
            packed = trace.final_state.packed_total
            if packed >= bound:
                gain = trace.outcome().gain
                ok = gain >= 1 / (2 + a)
                reports.append(VerificationReport("min-pack-gain", _ref(trace), ok, {} if ok else {
                    "t": packed, "R": trace.final_state.reserved_total, "gain": gain, "alpha": a,
                }))
        elif trace.policy == "threshold-1a":
            reports.append(_reserve_bound(trace, a, "reserve-bound-1a", Fraction(1), strict=False))
        if trace.kind == "threshold":
            rejects = [i for i, s in enumerate(trace.steps, start=1) if isinstance(s.action, Reject)]
            ok = not rejects
            witness = {} if ok else {
                "step": rejects[0], "R": trace.steps[rejects[0] - 1].state.reserved_total,
                "t": trace.steps[rejects[0] - 1].state.packed_total, "alpha": a,
            }
            reports.append(VerificationReport("nonrejection", _ref(trace), ok, witness))
    return reports


def sorted_prefix_check(policy, instance: Instance, alpha) -> VerificationReport:
    """Sorting the items before the trigger in decreasing order changes nothing."""
    if policy.kind != "threshold":
        raise NotApplicable(f"{policy.name} is not a threshold policy")
    trace, outcome = run_on_instance(policy, instance, alpha)
    k = trace.trigger_index
    if k is None:
        raise NotApplicable(f"{policy.name} never triggers on {instance.id or 'instance'}")
    items = instance.items
    rearranged = Instance(tuple(sorted(items[: k - 1], reverse=True)) + items[k - 1:], instance.id + "-sorted")
    trace2, outcome2 = run_on_instance(policy, rearranged, alpha)
    ok = trace2.trigger_index == k and outcome2.gain == outcome.gain
    witness = {} if ok else {
        "trigger": k, "trigger_sorted": trace2.trigger_index,
        "gain": outcome.gain, "gain_sorted": outcome2.gain, "alpha": to_fraction(alpha),
    }
    return VerificationReport("sorted-prefix", instance.id, ok, witness)


# output -------------------------------------------------------------------------


def _decimal(value) -> str:
    if value == math.inf:
        return "inf"
    q = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 15
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return f"{d:.15g}"


def _rational(value) -> str:
    return "inf" if value == math.inf else str(Fraction(value))


def format_curve(records: Sequence[RatioRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow([
            _rational(r.alpha), r.policy, r.opponent, _rational(r.gain), _rational(r.opt), _rational(r.ratio),
            _decimal(r.alpha), _decimal(r.gain), _decimal(r.opt), _decimal(r.ratio),
        ])
    return buf.getvalue()


def emit_curve(records: Sequence[RatioRecord], path) -> Path:
    path = Path(path)
    path.write_text(format_curve(records))
    return path


GNUPLOT_TEMPLATE = """\
# ratio against reservation factor, one series per policy/opponent pair
set datafile separator ","
set key autotitle columnhead
set xlabel "alpha"
set ylabel "competitive ratio"
set xrange [0:{xmax}]
set yrange [1:5]
set grid
rho(a) = a <= 0.25 ? 2 : a <= sqrt(2)-1 ? (1+sqrt(5-4*a))/(2-2*a) : a < (sqrt(5)-1)/2 ? 2+a : 1/(1-a)
plot "{csv}" using 7:10 with linespoints title "measured", rho(x) with lines title "optimal ratio"
"""


def emit_gnuplot_script(csv_path, script_path, xmax: float = 0.8) -> Path:
    script_path = Path(script_path)
    script_path.write_text(GNUPLOT_TEMPLATE.format(csv=Path(csv_path).name, xmax=xmax))
    return script_path
