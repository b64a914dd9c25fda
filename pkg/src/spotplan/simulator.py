"""Price-ceiling sweeps: evaluate every policy across a PW grid.

Each policy's recommended configuration at each grid point is scored with a
common performance metric (trainer count times eflops times the scaling
factor), and curves are normalized to the full planner's value at the top of
the grid.  Grid values are exact decimals, so a 0.1 step never drifts.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Callable, Optional

from .baselines import plan_cost_first, plan_noscale, plan_performance_first
from .catalog import Catalog, as_price
from .planner import ClusterPlan, PlanRequest, recommend
from .saturation import SaturationTable, default_saturation_table
from .scaling import ScalingSource

__all__ = [
    "DEFAULT_POLICIES",
    "SweepSpec",
    "SweepPoint",
    "SweepResult",
    "evaluate_performance",
    "run_sweep",
    "estimate_cost",
    "sweep_rows",
    "sweep_to_csv",
    "sweep_to_json",
]

PLANNER_POLICY = "planner"

DEFAULT_POLICIES = (PLANNER_POLICY, "noscale", "cost_first", "performance_first")


def _first(plans: list[ClusterPlan]) -> Optional[ClusterPlan]:
    return plans[0] if plans else None


_POLICY_FUNCS: dict[str, Callable] = {
    PLANNER_POLICY: lambda cat, req, scaling, sat: _first(recommend(cat, req, scaling, sat)),
    "noscale": lambda cat, req, scaling, sat: _first(plan_noscale(cat, req, sat)),
    "cost_first": lambda cat, req, scaling, sat: plan_cost_first(cat, req, scaling),
    "performance_first": lambda cat, req, scaling, sat: plan_performance_first(cat, req, scaling),
}


def evaluate_performance(plan: Optional[ClusterPlan], scaling: ScalingSource | None = None) -> float:
    """Common evaluation metric: trainer count x eflops x scaling factor.

    The single-anchor On-Demand node trains, so it counts; tiering CPU
    memory nodes do not.  An infeasible (None) plan scores 0.
    """
    if plan is None:
        return 0.0
    scaling = scaling or ScalingSource()
    v = plan.gpu_instance
    return plan.n_gpu * v.eflops * scaling.factor(v, plan.n_gpu)


def estimate_cost(
    plan: ClusterPlan, total_ops: float, scaling: ScalingSource | None = None
) -> tuple[float, float]:
    """(makespan_hours, total_cost) to push total_ops through the plan."""
    if not total_ops > 0:
        raise ValueError("total_ops must be positive")
    performance = evaluate_performance(plan, scaling)
    if not performance > 0:
        raise ValueError("configuration cannot make progress")
    makespan_hours = total_ops / (performance * 3600.0)
    return makespan_hours, makespan_hours * float(plan.hourly_price)


@dataclass(frozen=True)
class SweepSpec:
    """A PW grid plus the request template shared by every grid point."""

    pw_min: Decimal = Decimal("0")
    pw_max: Decimal = Decimal("10")
    pw_step: Decimal = Decimal("0.1")
    policies: tuple[str, ...] = DEFAULT_POLICIES
    ckpt_size: float = 0.5
    buffer_count: int = 2
    max_instances: int = 256

    def __post_init__(self):
        object.__setattr__(self, "pw_min", as_price(self.pw_min))
        object.__setattr__(self, "pw_max", as_price(self.pw_max))
        object.__setattr__(self, "pw_step", as_price(self.pw_step))
        object.__setattr__(self, "policies", tuple(self.policies))
        if self.pw_min < 0 or self.pw_min >= self.pw_max:
            raise ValueError("need 0 <= pw_min < pw_max")
        if not self.pw_step > 0:
            raise ValueError("pw_step must be positive")
        unknown = [p for p in self.policies if p not in _POLICY_FUNCS]
        if unknown:
            raise ValueError(f"unknown policies: {unknown}")

    def grid(self) -> tuple[Decimal, ...]:
        """Exact-decimal grid pw_min, pw_min + step, ... up to pw_max."""
        points = []
        i = 0
        while True:
            pw = self.pw_min + i * self.pw_step
            if pw > self.pw_max:
                break
            points.append(pw)
            i += 1
        return tuple(points)

    def request_at(self, pw: Decimal) -> PlanRequest:
        return PlanRequest(
            pw=pw,
            ckpt_size=self.ckpt_size,
            buffer_count=self.buffer_count,
            max_instances=self.max_instances,
            top_k=1,
        )


@dataclass(frozen=True)
class SweepPoint:
    pw: Decimal
    raw: float
    normalized: float
    plan: Optional[ClusterPlan]


@dataclass(frozen=True)
class SweepResult:
    grid: tuple[Decimal, ...]
    curves: dict[str, tuple[SweepPoint, ...]] = field(default_factory=dict)
    normalizer: float = 0.0

    def curve(self, policy: str) -> tuple[SweepPoint, ...]:
        return self.curves[policy]


def _plan_at(
    catalog: Catalog,
    spec: SweepSpec,
    pw: Decimal,
    policy: str,
    scaling: ScalingSource,
    sat: SaturationTable,
) -> tuple[Optional[ClusterPlan], float]:
    if pw <= 0:
        # All prices are positive, so a zero ceiling admits no plan.
        return None, 0.0
    plan = _POLICY_FUNCS[policy](catalog, spec.request_at(pw), scaling, sat)
    return plan, evaluate_performance(plan, scaling)


def run_sweep(
    catalog: Catalog,
    spec: SweepSpec,
    scaling: ScalingSource | None = None,
    sat: SaturationTable | None = None,
    workers: int | None = None,
) -> SweepResult:
    """Evaluate every policy at every grid point.

    With ``workers`` set, grid points are evaluated in a thread pool; the
    result is identical to sequential evaluation (grid order is preserved
    and planning is a pure function).  The normalizer is the full planner's
    raw performance at the last grid point.
    """
    scaling = scaling or ScalingSource()
    sat = sat or default_saturation_table()
    grid = spec.grid()

    def evaluate_point(pw: Decimal) -> dict[str, tuple[Optional[ClusterPlan], float]]:
        return {p: _plan_at(catalog, spec, pw, p, scaling, sat) for p in spec.policies}

    if workers:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(evaluate_point, grid))
    else:
        per_point = [evaluate_point(pw) for pw in grid]

    if PLANNER_POLICY in spec.policies:
        normalizer = per_point[-1][PLANNER_POLICY][1]
    else:
        normalizer = _plan_at(catalog, spec, grid[-1], PLANNER_POLICY, scaling, sat)[1]

    curves: dict[str, tuple[SweepPoint, ...]] = {}
    for policy in spec.policies:
        points = []
        for pw, results in zip(grid, per_point):
            plan, raw = results[policy]
            normalized = raw / normalizer if normalizer > 0 else 0.0
            points.append(SweepPoint(pw=pw, raw=raw, normalized=normalized, plan=plan))
        curves[policy] = tuple(points)
    return SweepResult(grid=grid, curves=curves, normalizer=normalizer)


_CSV_COLUMNS = [
    "pw",
    "policy",
    "raw",
    "normalized",
    "architecture",
    "gpu",
    "gpu_count",
    "cpu",
    "cpu_count",
    "hourly_price",
]


def sweep_rows(result: SweepResult) -> list[dict]:
    """Flatten a sweep into one row per (grid point, policy)."""
    rows = []
    for policy, points in result.curves.items():
        for point in points:
            plan = point.plan
            rows.append(
                {
                    "pw": float(point.pw),
                    "policy": policy,
                    "raw": point.raw,
                    "normalized": point.normalized,
                    "architecture": plan.architecture if plan else None,
                    "gpu": plan.gpu_instance.name if plan else None,
                    "gpu_count": plan.n_gpu if plan else None,
                    "cpu": plan.cpu_instance.name if plan and plan.cpu_instance else None,
                    "cpu_count": plan.m_cpu if plan and plan.cpu_instance else None,
                    "hourly_price": float(plan.hourly_price) if plan else None,
                }
            )
    rows.sort(key=lambda r: (r["pw"], _policy_order(r["policy"])))
    return rows


def _policy_order(policy: str) -> int:
    try:
        return DEFAULT_POLICIES.index(policy)
    except ValueError:
        return len(DEFAULT_POLICIES)


def sweep_to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in sweep_rows(result):
        writer.writerow({k: ("" if row[k] is None else row[k]) for k in _CSV_COLUMNS})
    return buf.getvalue()


def sweep_to_json(result: SweepResult) -> str:
    """JSON variant carrying the full plan objects alongside the flat rows."""
    payload = {
        "grid": [float(pw) for pw in result.grid],
        "normalizer": result.normalizer,
        "rows": sweep_rows(result),
        "plans": {
            policy: [
                {"pw": float(pt.pw), "plan": pt.plan.summary() if pt.plan else None}
                for pt in points
            ]
            for policy, points in result.curves.items()
        },
    }
    return json.dumps(payload, indent=2)
