"""Instance catalogs: validated VM specs plus the two bundled datasets.

Prices are held as exact ``Decimal`` values so that budget comparisons never
suffer binary-float drift.  A catalog is immutable after loading and safe to
share across concurrent planner workers.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum
from importlib import resources
from typing import IO, Any, Union

from .scaling import LogisticParams

__all__ = [
    "Kind",
    "InstanceSpec",
    "Catalog",
    "CatalogError",
    "CatalogParseError",
    "CatalogValidationError",
    "as_price",
    "load_catalog",
    "load_catalog_file",
    "bundled_simulated_catalog",
    "bundled_aws_catalog",
]


class CatalogError(Exception):
    """Base class for catalog problems."""


class CatalogParseError(CatalogError):
    """The document is not well-formed."""


class CatalogValidationError(CatalogError):
    """The document parsed but violates an instance or catalog invariant."""


class Kind(Enum):
    GPU = "gpu"
    CPU = "cpu"


def as_price(value: Union[Decimal, int, str, float]) -> Decimal:
    """Convert a price-like value to an exact Decimal.

    Floats are routed through their shortest repr, so ``as_price(0.1941)``
    gives exactly ``Decimal("0.1941")``.
    """
    if isinstance(value, Decimal):
        return value
    if isinstance(value, float):
        return Decimal(str(value))
    try:
        return Decimal(value)
    except InvalidOperation as exc:
        raise CatalogParseError(f"not a valid price: {value!r}") from exc


@dataclass(frozen=True)
class InstanceSpec:
    """One VM type: prices, network bandwidth, training throughput, memory.

    ``eflops`` is the benchmarked deep-learning throughput index; it must be
    positive for available GPU instances and zero for CPU instances (CPU-VMs
    never train).  An optional per-instance logistic parameter set overrides
    the default speedup model.
    """

    name: str
    kind: Kind
    od_price: Decimal
    spot_price: Decimal
    network_bw: float
    eflops: float = 0.0
    memory: float = 8.0
    available: bool = True
    scaling_params: LogisticParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "od_price", as_price(self.od_price))
        object.__setattr__(self, "spot_price", as_price(self.spot_price))
        object.__setattr__(self, "network_bw", float(self.network_bw))
        object.__setattr__(self, "eflops", float(self.eflops))
        object.__setattr__(self, "memory", float(self.memory))
        self._validate()

    def _validate(self) -> None:
        def bad(reason: str) -> CatalogValidationError:
            return CatalogValidationError(f"instance {self.name!r}: {reason}")

        if not self.name:
            raise CatalogValidationError("instance with empty name")
        if not self.od_price > 0:
            raise bad("od_price must be positive")
        if not self.spot_price > 0:
            raise bad("spot_price must be positive")
        if self.spot_price > self.od_price:
            raise bad("spot_price exceeds od_price")
        if not self.network_bw > 0:
            raise bad("network_bw must be positive")
        if not self.memory > 0:
            raise bad("memory must be positive")
        if self.kind is Kind.GPU:
            # Unavailable GPU entries may lack a benchmark (eflops 0); they
            # are excluded from planning anyway.
            if self.available and not self.eflops > 0:
                raise bad("eflops must be positive for an available gpu instance")
            if self.eflops < 0:
                raise bad("eflops must not be negative")
        elif self.eflops != 0:
            raise bad("eflops must be 0 for cpu instances")


@dataclass(frozen=True)
class Catalog:
    """An immutable, validated collection of instance specs."""

    instances: tuple[InstanceSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        seen: set[str] = set()
        for spec in self.instances:
            if spec.name in seen:
                raise CatalogValidationError(f"duplicate instance name {spec.name!r}")
            seen.add(spec.name)

    @property
    def gpu_view(self) -> tuple[InstanceSpec, ...]:
        """Available GPU instances, in catalog order."""
        return tuple(s for s in self.instances if s.kind is Kind.GPU and s.available)

    @property
    def cpu_view(self) -> tuple[InstanceSpec, ...]:
        """Available CPU instances, in catalog order."""
        return tuple(s for s in self.instances if s.kind is Kind.CPU and s.available)

    def by_name(self, name: str) -> InstanceSpec:
        for spec in self.instances:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def to_document(self) -> dict:
        """Plain-JSON representation (round-trips through load_catalog)."""
        entries = []
        for s in self.instances:
            entry: dict[str, Any] = {
                "name": s.name,
                "kind": s.kind.value,
                "od_price": float(s.od_price),
                "spot_price": float(s.spot_price),
                "network_gbps": s.network_bw,
                "eflops": s.eflops,
                "memory_gib": s.memory,
                "available": s.available,
            }
            if s.scaling_params is not None:
                p = s.scaling_params
                entry["scaling"] = {"a": p.a, "b": p.b, "c": p.c}
            entries.append(entry)
        return {"instances": entries}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_document(), indent=indent)


_KNOWN_ENTRY_KEYS = {
    "name",
    "kind",
    "od_price",
    "spot_price",
    "network_gbps",
    "eflops",
    "memory_gib",
    "available",
    "scaling",
    "comment",
}
_KNOWN_TOP_KEYS = {"instances", "comment"}


def load_catalog(source: Union[bytes, str, IO]) -> Catalog:
    """Parse and validate a catalog document (JSON text, bytes, or file).

    Unknown fields are ignored with a warning.  ``memory_gib`` defaults to
    8 GiB and ``eflops`` to 0 when omitted.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source, parse_float=Decimal)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CatalogParseError(f"malformed catalog document: {exc}") from exc
    if not isinstance(doc, dict):
        raise CatalogParseError("catalog document must be a JSON object")

    unknown_top = set(doc) - _KNOWN_TOP_KEYS
    if unknown_top:
        warnings.warn(
            f"ignoring unknown catalog field(s): {sorted(unknown_top)}", stacklevel=2
        )
    if "instances" not in doc or not isinstance(doc["instances"], list):
        raise CatalogParseError('catalog document must contain an "instances" list')

    specs = []
    for idx, entry in enumerate(doc["instances"]):
        if not isinstance(entry, dict):
            raise CatalogParseError(f"instance entry #{idx} is not an object")
        specs.append(_parse_entry(idx, entry))
    return Catalog(tuple(specs))


def _parse_entry(idx: int, entry: dict) -> InstanceSpec:
    label = entry.get("name", f"#{idx}")
    unknown = set(entry) - _KNOWN_ENTRY_KEYS
    if unknown:
        warnings.warn(
            f"instance {label!r}: ignoring unknown field(s) {sorted(unknown)}",
            stacklevel=3,
        )
    try:
        name = entry["name"]
        kind = Kind(entry["kind"])
        od_price = as_price(entry["od_price"])
        spot_price = as_price(entry["spot_price"])
        network = float(entry["network_gbps"])
    except KeyError as exc:
        raise CatalogParseError(f"instance {label!r}: missing required field {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise CatalogParseError(f"instance {label!r}: {exc}") from exc

    scaling = None
    if entry.get("scaling") is not None:
        raw = entry["scaling"]
        try:
            scaling = LogisticParams(
                a=float(raw["a"]), b=float(raw["b"]), c=float(raw["c"])
            )
        except KeyError as exc:
            raise CatalogParseError(
                f"instance {label!r}: scaling object missing key {exc}"
            ) from exc
        except (ValueError, TypeError) as exc:
            raise CatalogValidationError(f"instance {label!r}: {exc}") from exc

    return InstanceSpec(
        name=name,
        kind=kind,
        od_price=od_price,
        spot_price=spot_price,
        network_bw=network,
        eflops=float(entry.get("eflops", 0.0)),
        memory=float(entry.get("memory_gib", 8.0)),
        available=bool(entry.get("available", True)),
        scaling_params=scaling,
    )


def load_catalog_file(path) -> Catalog:
    """Load a catalog from a filesystem path."""
    with open(path, "rb") as fh:
        return load_catalog(fh)


def _bundled(name: str) -> Catalog:
    data = resources.files("spotplan").joinpath(f"data/catalogs/{name}")
    return load_catalog(data.read_bytes())


def bundled_simulated_catalog() -> Catalog:
    """The 17-instance simulated catalog (10 GPU types A-J, 7 CPU types K-Q)."""
    return _bundled("simulated.json")


def bundled_aws_catalog() -> Catalog:
    """AWS N.Virginia instance types and prices as listed in October 2023."""
    return _bundled("aws-2023-10.json")
