"""Cluster planning: price-performance search under an hourly budget.

The search enumerates, for every registered architecture, all feasible
(instance, count) combinations whose exact hourly price stays within the
user's pricing willingness, scores each with the performance-per-price
function Z, and ranks deterministically: higher Z first, then lower price,
then architecture registration order, then catalog order.

Two architectures ship by default:

* single_anchor: one On-Demand GPU trainer (the checkpoint target) plus
  n - 1 Spot GPU trainers of the same type.
* tiering: n Spot GPU trainers plus m On-Demand CPU memory nodes that
  receive sharded checkpoints; m is the minimum count that keeps the
  sender/receiver ratio below the network saturation point, since memory
  nodes add cost but no training throughput.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterator, NamedTuple, Optional

from .catalog import Catalog, InstanceSpec, Kind, as_price
from .saturation import SaturationTable, default_saturation_table, min_cpu_count, n_sat_lookup
from .scaling import ScalingSource

__all__ = [
    "PlanRequest",
    "FloppScore",
    "ClusterPlan",
    "Architecture",
    "SingleAnchor",
    "Tiering",
    "SINGLE_ANCHOR",
    "TIERING",
    "architectures",
    "register_architecture",
    "flopp",
    "plan_single_anchor",
    "plan_tiering",
    "recommend",
]

SINGLE_ANCHOR = "single_anchor"
TIERING = "tiering"


@dataclass(frozen=True)
class PlanRequest:
    """User inputs for one planning run.

    pw is the hourly price ceiling (pricing willingness), ckpt_size the
    checkpoint file size in GiB, buffer_count the number of checkpoints a
    memory node must buffer, and max_instances the cap on any single count
    variable.
    """

    pw: Decimal
    ckpt_size: float = 0.5
    buffer_count: int = 2
    max_instances: int = 256
    top_k: int = 3

    def __post_init__(self):
        object.__setattr__(self, "pw", as_price(self.pw))
        object.__setattr__(self, "ckpt_size", float(self.ckpt_size))
        if not self.pw > 0:
            raise ValueError("pw must be positive")
        if not self.ckpt_size > 0:
            raise ValueError("ckpt_size must be positive")
        if self.buffer_count < 1:
            raise ValueError("buffer_count must be >= 1")
        if self.max_instances < 1:
            raise ValueError("max_instances must be >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")

    @property
    def required_memory(self) -> float:
        """Memory a checkpoint node must offer, GiB."""
        return self.ckpt_size * self.buffer_count


@dataclass(frozen=True)
class FloppScore:
    """Operations per currency unit for one GPU instance."""

    instance: InstanceSpec
    spfp: float
    odfp: float


def flopp(instance: InstanceSpec) -> FloppScore:
    """Spot and On-Demand floating-point operations per unit price."""
    if instance.kind is not Kind.GPU:
        raise ValueError(f"flopp is only defined for gpu instances, got {instance.name!r}")
    return FloppScore(
        instance=instance,
        spfp=instance.eflops / float(instance.spot_price),
        odfp=instance.eflops / float(instance.od_price),
    )


@dataclass(frozen=True)
class ClusterPlan:
    """A concrete recommendation produced by one architecture."""

    architecture: str
    gpu_instance: InstanceSpec
    n_gpu: int
    cpu_instance: Optional[InstanceSpec]
    m_cpu: Optional[int]
    hourly_price: Decimal
    score_z: float

    def summary(self) -> dict:
        return {
            "architecture": self.architecture,
            "gpu": self.gpu_instance.name,
            "gpu_count": self.n_gpu,
            "cpu": self.cpu_instance.name if self.cpu_instance else None,
            "cpu_count": self.m_cpu,
            "hourly_price": float(self.hourly_price),
            "score_z": self.score_z,
        }


class _Candidate(NamedTuple):
    z: float
    price: Decimal
    arch_rank: int
    v_idx: int
    w_idx: int
    n: int
    m: int
    arch_name: str
    v: InstanceSpec
    w: Optional[InstanceSpec]


def _sort_key(c: _Candidate):
    return (-c.z, c.price, c.arch_rank, c.v_idx, c.w_idx, c.n, c.m)


def _materialize(c: _Candidate) -> ClusterPlan:
    return ClusterPlan(
        architecture=c.arch_name,
        gpu_instance=c.v,
        n_gpu=c.n,
        cpu_instance=c.w,
        m_cpu=c.m if c.w is not None else None,
        hourly_price=c.price,
        score_z=c.z,
    )


class Architecture:
    """One entry of the architecture registry.

    Subclasses supply the feasibility constraints and the Z evaluator by
    generating every feasible candidate for a request.
    """

    name: str = "abstract"

    def __init__(self):
        self.rank = -1  # assigned by register_architecture

    def candidates(
        self,
        catalog: Catalog,
        req: PlanRequest,
        scaling: ScalingSource,
        sat: SaturationTable,
    ) -> Iterator[_Candidate]:
        raise NotImplementedError


class SingleAnchor(Architecture):
    """One On-Demand GPU anchor plus n - 1 Spot GPUs of the same type."""

    name = SINGLE_ANCHOR

    def candidates(self, catalog, req, scaling, sat):
        for v_idx, v in enumerate(catalog.gpu_view):
            spot_budget = req.pw - v.od_price
            if spot_budget < 0:
                continue
            n_hi = min(req.max_instances, 1 + int(spot_budget // v.spot_price))
            if n_hi < 1:
                continue
            score = flopp(v)
            for n in range(1, n_hi + 1):
                z = ((n - 1) * score.spfp + score.odfp) * scaling.factor(v, n)
                price = v.od_price + (n - 1) * v.spot_price
                yield _Candidate(z, price, self.rank, v_idx, -1, n, 0, self.name, v, None)


class Tiering(Architecture):
    """n Spot GPU trainers plus m On-Demand CPU checkpoint receivers."""

    name = TIERING

    def candidates(self, catalog, req, scaling, sat):
        needed_mem = req.required_memory
        for v_idx, v in enumerate(catalog.gpu_view):
            score = flopp(v)
            for w_idx, w in enumerate(catalog.cpu_view):
                if w.memory < needed_mem:
                    continue
                n_sat = n_sat_lookup(sat, v, w)
                for m in range(1, req.max_instances + 1):
                    n_lo = max(1, (m - 1) * n_sat)
                    if n_lo > req.max_instances:
                        break
                    gpu_budget = req.pw - m * w.od_price
                    if gpu_budget < v.spot_price:
                        break
                    n_hi = min(
                        req.max_instances,
                        m * n_sat - 1,
                        int(gpu_budget // v.spot_price),
                    )
                    if n_hi < n_lo:
                        break
                    cpu_price = m * w.od_price
                    for n in range(n_lo, n_hi + 1):
                        z = n * score.spfp * scaling.factor(v, n)
                        price = n * v.spot_price + cpu_price
                        yield _Candidate(
                            z, price, self.rank, v_idx, w_idx, n, m, self.name, v, w
                        )


_REGISTRY: list[Architecture] = []


def register_architecture(arch: Architecture) -> Architecture:
    """Append an architecture to the registry; rank fixes tie-break order."""
    arch.rank = len(_REGISTRY)
    _REGISTRY.append(arch)
    return arch


register_architecture(SingleAnchor())
register_architecture(Tiering())


def architectures() -> tuple[Architecture, ...]:
    return tuple(_REGISTRY)


def _all_candidates(catalog, req, scaling, sat) -> Iterator[_Candidate]:
    for arch in _REGISTRY:
        yield from arch.candidates(catalog, req, scaling, sat)


def _defaults(scaling, sat):
    if scaling is None:
        scaling = ScalingSource()
    if sat is None:
        sat = default_saturation_table()
    return scaling, sat


def plan_single_anchor(
    catalog: Catalog, req: PlanRequest, scaling: ScalingSource | None = None
) -> Optional[ClusterPlan]:
    """Best single-anchor plan under the budget, or None if infeasible."""
    scaling, sat = _defaults(scaling, None)
    arch = next(a for a in _REGISTRY if a.name == SINGLE_ANCHOR)
    best = min(arch.candidates(catalog, req, scaling, sat), key=_sort_key, default=None)
    return _materialize(best) if best else None


def plan_tiering(
    catalog: Catalog,
    req: PlanRequest,
    scaling: ScalingSource | None = None,
    sat: SaturationTable | None = None,
) -> Optional[ClusterPlan]:
    """Best tiering plan under budget, memory, and saturation constraints."""
    scaling, sat = _defaults(scaling, sat)
    arch = next(a for a in _REGISTRY if a.name == TIERING)
    best = min(arch.candidates(catalog, req, scaling, sat), key=_sort_key, default=None)
    return _materialize(best) if best else None


def recommend(
    catalog: Catalog,
    req: PlanRequest,
    scaling: ScalingSource | None = None,
    sat: SaturationTable | None = None,
) -> list[ClusterPlan]:
    """Pool every architecture's feasible candidates and return the top_k.

    The returned list is sorted by Z descending with fully deterministic
    tie-breaking (price, architecture order, catalog order).  Empty when no
    configuration fits the budget.
    """
    scaling, sat = _defaults(scaling, sat)
    top = heapq.nsmallest(req.top_k, _all_candidates(catalog, req, scaling, sat), key=_sort_key)
    return [_materialize(c) for c in top]
