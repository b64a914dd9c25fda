"""Comparison policies: cost-first, performance-first, and no-scale."""
from __future__ import annotations

from typing import Optional

from .catalog import Catalog, InstanceSpec
from .planner import (
    SINGLE_ANCHOR,
    ClusterPlan,
    PlanRequest,
    flopp,
    recommend,
)
from .saturation import SaturationTable
from .scaling import ScalingSource, UnitScaling

__all__ = ["plan_cost_first", "plan_performance_first", "plan_noscale"]


def _single_anchor_at_max_n(
    v: InstanceSpec, req: PlanRequest, scaling: ScalingSource
) -> Optional[ClusterPlan]:
    # Largest n with (n-1) spot nodes plus one on-demand anchor within budget.
    spot_budget = req.pw - v.od_price
    if spot_budget < 0:
        return None
    n = min(req.max_instances, 1 + int(spot_budget // v.spot_price))
    score = flopp(v)
    z = ((n - 1) * score.spfp + score.odfp) * scaling.factor(v, n)
    return ClusterPlan(
        architecture=SINGLE_ANCHOR,
        gpu_instance=v,
        n_gpu=n,
        cpu_instance=None,
        m_cpu=None,
        hourly_price=v.od_price + (n - 1) * v.spot_price,
        score_z=z,
    )


def plan_cost_first(
    catalog: Catalog, req: PlanRequest, scaling: ScalingSource | None = None
) -> Optional[ClusterPlan]:
    """Cheapest-spot GPU as a single anchor, packed with as many nodes as fit."""
    gpus = catalog.gpu_view
    if not gpus:
        return None
    scaling = scaling or ScalingSource()
    v = min(enumerate(gpus), key=lambda iv: (iv[1].spot_price, -iv[1].eflops, iv[0]))[1]
    return _single_anchor_at_max_n(v, req, scaling)


def plan_performance_first(
    catalog: Catalog, req: PlanRequest, scaling: ScalingSource | None = None
) -> Optional[ClusterPlan]:
    """Highest-eflops GPU as a single anchor; no fallback when unaffordable."""
    gpus = catalog.gpu_view
    if not gpus:
        return None
    scaling = scaling or ScalingSource()
    v = min(enumerate(gpus), key=lambda iv: (-iv[1].eflops, iv[1].spot_price, iv[0]))[1]
    return _single_anchor_at_max_n(v, req, scaling)


def plan_noscale(
    catalog: Catalog, req: PlanRequest, sat: SaturationTable | None = None
) -> list[ClusterPlan]:
    """Full search, but scoring every candidate as if speedup were linear."""
    return recommend(catalog, req, scaling=UnitScaling(), sat=sat)
