"""Network saturation policy for N-to-1 checkpoint shard transfer.

A single CPU receiver only tolerates so many GPU senders before transfer
time stops improving.  The measured saturation points are keyed by link
bandwidth; the effective bandwidth of a (sender, receiver) pair is the
bottleneck (minimum) of the two, and lookups floor to the nearest lower key.
"""
from __future__ import annotations

import json
from bisect import bisect_right
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from typing import IO, Union

from .catalog import InstanceSpec

__all__ = [
    "SaturationTable",
    "n_sat_lookup",
    "min_cpu_count",
    "load_saturation",
    "load_saturation_file",
    "default_saturation_table",
]


@dataclass(frozen=True)
class SaturationTable:
    """(bandwidth Gbps, n_sat) pairs, ascending by bandwidth."""

    entries: tuple[tuple[float, int], ...]

    def __post_init__(self):
        normalized = tuple((float(bw), int(n)) for bw, n in self.entries)
        object.__setattr__(self, "entries", normalized)
        prev_bw, prev_n = 0.0, 0
        for bw, n in normalized:
            if bw <= prev_bw:
                raise ValueError("saturation bandwidths must be strictly increasing")
            if n < max(prev_n, 1):
                raise ValueError("n_sat values must be >= 1 and non-decreasing")
            prev_bw, prev_n = bw, n


def n_sat_lookup(table: SaturationTable, v: InstanceSpec, w: InstanceSpec) -> int:
    """Saturation point for GPU senders v feeding one CPU receiver w.

    Keys on the bottleneck bandwidth min(v, w); floors to the nearest lower
    table key, or the smallest key when below the table.
    """
    if not table.entries:
        raise ValueError("saturation table is empty")
    beta = min(v.network_bw, w.network_bw)
    keys = [bw for bw, _ in table.entries]
    idx = bisect_right(keys, beta) - 1
    if idx < 0:
        idx = 0
    return table.entries[idx][1]


def min_cpu_count(n_gpu: int, n_sat: int) -> int:
    """Smallest receiver count m >= 1 with n_gpu / m strictly below n_sat."""
    if n_gpu < 1 or n_sat < 1:
        raise ValueError("n_gpu and n_sat must be >= 1")
    return n_gpu // n_sat + 1


def load_saturation(source: Union[bytes, str, IO]) -> SaturationTable:
    """Parse a saturation table document: {"entries": [[bw, n_sat], ...]}."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    doc = json.loads(source, parse_float=Decimal)
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ValueError('saturation document must contain an "entries" list')
    return SaturationTable(tuple((float(bw), int(n)) for bw, n in doc["entries"]))


def load_saturation_file(path) -> SaturationTable:
    with open(path, "rb") as fh:
        return load_saturation(fh)


def default_saturation_table() -> SaturationTable:
    """The bundled measured table."""
    data = resources.files("spotplan").joinpath("data/saturation.json")
    return load_saturation(data.read_bytes())
