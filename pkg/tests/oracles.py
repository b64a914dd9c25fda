"""Independent brute-force reference implementations used by the tests.

Everything here is a literal, unpruned translation of the feasibility
constraints and objectives; it shares no search code with the package.
"""
from __future__ import annotations

import random
from decimal import Decimal

from spotplan import Catalog, InstanceSpec, Kind, PlanRequest, ScalingSource
from spotplan.saturation import SaturationTable, n_sat_lookup

SINGLE_ANCHOR_RANK = 0
TIERING_RANK = 1


def brute_force_candidates(catalog, req, scaling, sat):
    """Yield (sort_key, descriptor) for every feasible configuration.

    descriptor = (arch, v_name, n, w_name, m). Tiering enumerates every m,
    not just the minimum; the sort key's price component prefers smaller m.
    """
    needed_mem = req.ckpt_size * req.buffer_count
    for v_idx, v in enumerate(catalog.gpu_view):
        spfp = v.eflops / float(v.spot_price)
        odfp = v.eflops / float(v.od_price)
        for n in range(1, req.max_instances + 1):
            price = v.od_price + (n - 1) * v.spot_price
            if price <= req.pw:
                z = ((n - 1) * spfp + odfp) * scaling.factor(v, n)
                key = (-z, price, SINGLE_ANCHOR_RANK, v_idx, -1, n, 0)
                yield key, ("single_anchor", v.name, n, None, None)

    for v_idx, v in enumerate(catalog.gpu_view):
        spfp = v.eflops / float(v.spot_price)
        for w_idx, w in enumerate(catalog.cpu_view):
            if w.memory < needed_mem:
                continue
            n_sat = n_sat_lookup(sat, v, w)
            for n in range(1, req.max_instances + 1):
                for m in range(1, req.max_instances + 1):
                    price = n * v.spot_price + m * w.od_price
                    if price > req.pw:
                        break  # price grows with m
                    if not n < n_sat * m:  # n/m < n_sat, in exact integers
                        continue
                    z = n * spfp * scaling.factor(v, n)
                    key = (-z, price, TIERING_RANK, v_idx, w_idx, n, m)
                    yield key, ("tiering", v.name, n, w.name, m)


def brute_force_best(catalog, req, scaling=None, sat=None):
    """Best configuration by exhaustive enumeration, or None."""
    from spotplan import default_saturation_table

    scaling = scaling or ScalingSource()
    sat = sat or default_saturation_table()
    best = min(brute_force_candidates(catalog, req, scaling, sat), default=None)
    if best is None:
        return None
    key, desc = best
    return {"z": -key[0], "price": key[1], "config": desc}


def plan_tuple(plan):
    """Comparable descriptor of a planner result."""
    if plan is None:
        return None
    return (
        plan.architecture,
        plan.gpu_instance.name,
        plan.n_gpu,
        plan.cpu_instance.name if plan.cpu_instance else None,
        plan.m_cpu,
    )


def random_catalog(rng: random.Random, max_gpu=5, max_cpu=5) -> Catalog:
    """A small random catalog with 4-decimal prices and spot <= od."""
    specs = []
    bandwidths = [0.3, 1.7, 5, 10, 12.5, 15, 25, 30, 40, 2.2]
    n_gpu = rng.randint(1, max_gpu)
    n_cpu = rng.randint(0, max_cpu)
    for i in range(n_gpu):
        od = Decimal(rng.randint(500, 40000)) / 10000
        spot = Decimal(rng.randint(100, int(od * 10000))) / 10000
        specs.append(
            InstanceSpec(
                name=f"g{i}",
                kind=Kind.GPU,
                od_price=od,
                spot_price=spot,
                network_bw=rng.choice(bandwidths),
                eflops=rng.randint(20, 1200),
                memory=rng.choice([8, 16, 32]),
            )
        )
    for i in range(n_cpu):
        od = Decimal(rng.randint(300, 8000)) / 10000
        spot = Decimal(rng.randint(100, int(od * 10000))) / 10000
        specs.append(
            InstanceSpec(
                name=f"c{i}",
                kind=Kind.CPU,
                od_price=od,
                spot_price=spot,
                network_bw=rng.choice(bandwidths),
                eflops=0,
                memory=rng.choice([0.5, 2, 8, 16]),
            )
        )
    return Catalog(tuple(specs))


def random_request(rng: random.Random, max_instances=64) -> PlanRequest:
    return PlanRequest(
        pw=Decimal(rng.randint(2, 12000)) / 1000,
        ckpt_size=rng.choice([0.3, 0.5, 1.0, 2.0]),
        buffer_count=rng.choice([1, 2, 4]),
        max_instances=rng.randint(1, max_instances),
        top_k=rng.randint(1, 5),
    )
