"""Parallel-execution time and speed-up models.

All models take a block of ``x`` unit-cost transactions and a core count
``n`` and predict the parallel execution time ``new_time``; the speed-up is
``x / new_time``. Arithmetic is exact (rationals), so model identities hold
with equality in tests rather than within a float tolerance.

Models:

* SPECULATIVE: run optimistically, re-run every conflicted transaction
  serially afterwards.
* PERFECT_INFO: pay an up-front analysis cost, run the independent
  transactions in parallel and the conflicted ones serially.
* GROUP_BOUND: lower-bound time from the largest dependency group, which
  cannot be split across cores.
* SCHEDULED_LPT: longest-processing-time list scheduling of whole dependency
  groups onto cores.
* SCHEDULED_OPT: provably optimal group schedule by exhaustive search
  (small blocks only).
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .graph import BlockGraph
from .metrics import BlockMetrics, format_decimal

SPEEDUP_CSV_FIELDS = ("block_number", "model", "cores", "preproc_cost",
                      "new_time", "speedup")

# Exhaustive scheduling is exponential; refuse instances beyond this size.
MAX_OPT_TOTAL = 24
MAX_OPT_COMPONENTS = 12


class SpeedupModel(Enum):
    SPECULATIVE = "speculative"
    PERFECT_INFO = "perfect_info"
    GROUP_BOUND = "group_bound"
    SCHEDULED_LPT = "scheduled_lpt"
    SCHEDULED_OPT = "scheduled_opt"


class OversizeScheduleError(ValueError):
    """Raised when an instance is too large for exhaustive scheduling."""


@dataclass(frozen=True, slots=True)
class SpeedupEstimate:
    block_number: int
    model: SpeedupModel
    cores: int
    preproc_cost: Fraction
    new_time: Fraction
    speedup: Fraction


@dataclass(frozen=True, slots=True)
class Schedule:
    """Assignment of group sizes to cores; loads are indexed by core."""

    core_loads: tuple[int, ...]
    assignment: tuple[int, ...]
    makespan: int


def _check_cores(n: int) -> None:
    if n < 1:
        raise ValueError(f"core count must be >= 1, got {n}")


def _check_tx_count(x: int) -> None:
    if x < 1:
        raise ValueError(f"transaction count must be >= 1, got {x}")


def _check_preproc(k) -> Fraction:
    k = Fraction(k)
    if k < 0:
        raise ValueError(f"preprocessing cost must be >= 0, got {k}")
    return k


def speculative_time(x, c, n) -> Fraction:
    """ceil(x / n) + c * x, on rationals."""
    x, c, n = Fraction(x), Fraction(c), Fraction(n)
    return math.ceil(x / n) + c * x


def perfect_info_time(x, c, n, preproc) -> Fraction:
    """preproc + ceil((1 - c) * x / n) + c * x, on rationals."""
    x, c, n = Fraction(x), Fraction(c), Fraction(n)
    return Fraction(preproc) + math.ceil((1 - c) * x / n) + c * x


def group_bound_time(x, l, n, preproc) -> Fraction:
    """preproc + max(x / n, l * x), on rationals."""
    x, l, n = Fraction(x), Fraction(l), Fraction(n)
    return Fraction(preproc) + max(x / n, l * x)


def speculative_speedup(x: int, c, n: int, *,
                        block_number: int = 0) -> SpeedupEstimate:
    """Optimistic execution with serial re-runs of the conflicted share.

    ``c * x`` must be a whole number of transactions.
    """
    _check_tx_count(x)
    _check_cores(n)
    c = Fraction(c)
    if not 0 <= c <= 1:
        raise ValueError(f"conflict rate must be in [0, 1], got {c}")
    if (c * x).denominator != 1:
        raise ValueError(f"conflicted share c*x = {c * x} is not an integer")
    new_time = speculative_time(x, c, n)
    return SpeedupEstimate(block_number, SpeedupModel.SPECULATIVE, n,
                           Fraction(0), new_time, Fraction(x) / new_time)


def perfect_info_speedup(x: int, c, n: int, preproc=0, *,
                         block_number: int = 0) -> SpeedupEstimate:
    """Clairvoyant split: conflicted transactions serial, the rest spread evenly."""
    _check_tx_count(x)
    _check_cores(n)
    preproc = _check_preproc(preproc)
    c = Fraction(c)
    if not 0 <= c <= 1:
        raise ValueError(f"conflict rate must be in [0, 1], got {c}")
    if (c * x).denominator != 1:
        raise ValueError(f"conflicted share c*x = {c * x} is not an integer")
    new_time = perfect_info_time(x, c, n, preproc)
    return SpeedupEstimate(block_number, SpeedupModel.PERFECT_INFO, n,
                           preproc, new_time, Fraction(x) / new_time)


def group_bound_speedup(x: int, l, n: int, preproc=0, *,
                        block_number: int = 0) -> SpeedupEstimate:
    """Bound from the largest group: time is at least l*x and at least x/n.

    With zero preprocessing the speed-up reduces to min(n, 1/l).
    """
    _check_tx_count(x)
    _check_cores(n)
    preproc = _check_preproc(preproc)
    l = Fraction(l)
    if not Fraction(1, x) <= l <= 1:
        raise ValueError(f"group conflict rate must be in [1/{x}, 1], got {l}")
    new_time = group_bound_time(x, l, n, preproc)
    return SpeedupEstimate(block_number, SpeedupModel.GROUP_BOUND, n,
                           preproc, new_time, Fraction(x) / new_time)


def schedule_lpt(sizes: Sequence[int], n: int) -> Schedule:
    """Longest-processing-time list schedule of group sizes onto n cores.

    Groups are placed in decreasing size order (ties keep input order), each
    on the currently least-loaded core (ties on the lowest core index).
    """
    _check_cores(n)
    if any(s < 1 for s in sizes):
        raise ValueError("group sizes must be >= 1")
    loads = [0] * n
    assignment = [0] * len(sizes)
    heap = [(0, core) for core in range(n)]
    for idx in sorted(range(len(sizes)), key=lambda i: (-sizes[i], i)):
        load, core = heapq.heappop(heap)
        assignment[idx] = core
        loads[core] = load + sizes[idx]
        heapq.heappush(heap, (loads[core], core))
    return Schedule(tuple(loads), tuple(assignment), max(loads, default=0))


def schedule_optimal(sizes: Sequence[int], n: int) -> Schedule:
    """Minimum-makespan schedule by branch and bound.

    Exhaustive, so only small instances are accepted: total size at most
    MAX_OPT_TOTAL or at most MAX_OPT_COMPONENTS groups. Larger input raises
    OversizeScheduleError.
    """
    _check_cores(n)
    if any(s < 1 for s in sizes):
        raise ValueError("group sizes must be >= 1")
    total = sum(sizes)
    if total > MAX_OPT_TOTAL and len(sizes) > MAX_OPT_COMPONENTS:
        raise OversizeScheduleError(
            f"instance too large for exhaustive scheduling: {len(sizes)} "
            f"groups totalling {total} (limits: {MAX_OPT_TOTAL} total or "
            f"{MAX_OPT_COMPONENTS} groups)")
    if not sizes:
        return Schedule((0,) * n, (), 0)

    order = sorted(range(len(sizes)), key=lambda i: (-sizes[i], i))
    incumbent = schedule_lpt(sizes, n)
    best_makespan = incumbent.makespan
    best_assignment = list(incumbent.assignment)
    lower = max(sizes[order[0]], -(-total // n))
    if best_makespan == lower:
        return incumbent

    loads = [0] * n
    chosen = [0] * len(sizes)

    def descend(pos: int) -> None:
        nonlocal best_makespan, best_assignment
        if best_makespan == lower:
            return
        if pos == len(order):
            best_makespan = max(loads)
            best_assignment = chosen.copy()
            return
        idx = order[pos]
        size = sizes[idx]
        tried = set()
        for core in range(n):
            load = loads[core]
            if load in tried or load + size >= best_makespan:
                continue
            tried.add(load)
            loads[core] = load + size
            chosen[idx] = core
            descend(pos + 1)
            loads[core] = load
            if load == 0:
                break  # further empty cores are symmetric
    descend(0)

    final = [0] * n
    for idx, core in enumerate(best_assignment):
        final[core] += sizes[idx]
    return Schedule(tuple(final), tuple(best_assignment), best_makespan)


def _scheduled_estimate(model: SpeedupModel, sizes: Sequence[int], x: int,
                        n: int, preproc: Fraction,
                        block_number: int) -> SpeedupEstimate:
    if model is SpeedupModel.SCHEDULED_LPT:
        makespan = schedule_lpt(sizes, n).makespan
    else:
        makespan = schedule_optimal(sizes, n).makespan
    new_time = preproc + makespan
    return SpeedupEstimate(block_number, model, n, preproc, new_time,
                           Fraction(x) / new_time)


def evaluate_block(metrics: BlockMetrics, graph: BlockGraph, cores: Sequence[int],
                   preproc_cost=0,
                   models: Sequence[SpeedupModel] | None = None,
                   ) -> list[SpeedupEstimate]:
    """Estimate every requested model at every core count for one block.

    Results are ordered model-major (declaration order) and core-minor (given
    order). Empty blocks produce no estimates. Exhaustive scheduling is
    skipped, not failed, when the block exceeds its size limits.
    """
    if metrics.block_number != graph.block_number:
        raise ValueError(f"metrics are for block {metrics.block_number}, "
                         f"graph for block {graph.block_number}")
    x = metrics.tx_count
    if x == 0:
        return []
    preproc = _check_preproc(preproc_cost)
    if models is None:
        models = tuple(SpeedupModel)
    else:
        models = tuple(sorted(set(models), key=tuple(SpeedupModel).index))
    sizes = [c.tx_count for c in graph.components]
    out: list[SpeedupEstimate] = []
    for model in models:
        for n in cores:
            if model is SpeedupModel.SPECULATIVE:
                est = speculative_speedup(x, metrics.single_conflict_rate, n,
                                          block_number=metrics.block_number)
            elif model is SpeedupModel.PERFECT_INFO:
                est = perfect_info_speedup(x, metrics.single_conflict_rate, n,
                                           preproc,
                                           block_number=metrics.block_number)
            elif model is SpeedupModel.GROUP_BOUND:
                est = group_bound_speedup(x, metrics.group_conflict_rate, n,
                                          preproc,
                                          block_number=metrics.block_number)
            else:
                try:
                    est = _scheduled_estimate(model, sizes, x, n, preproc,
                                              metrics.block_number)
                except OversizeScheduleError:
                    break  # same sizes at every core count; skip the model
            out.append(est)
    return out


def export_speedup_csv(estimates: Iterable[SpeedupEstimate], path) -> None:
    """Write one row per estimate in the given order."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SPEEDUP_CSV_FIELDS)
        for e in estimates:
            writer.writerow([e.block_number, e.model.name, e.cores,
                             format_decimal(e.preproc_cost),
                             format_decimal(e.new_time),
                             format_decimal(e.speedup)])
