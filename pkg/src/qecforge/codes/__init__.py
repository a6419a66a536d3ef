"""Encoded-memory circuit generators and code-parameter arithmetic."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from ..circuit import Circuit
from .families import (
    bacon_shor_layout,
    bivariate_bicycle_layout,
    repetition_layout,
    rotated_surface_layout,
    steane_concat_layout,
)
from .layout import Check, CodeLayout, default_schedule, memory_circuit

FAMILIES = ("repetition", "rotated_surface", "bacon_shor", "steane_concat", "bivariate_bicycle", "color", "heavy_hex")
GENERATED = FAMILIES[:5]
FORMULA_ONLY = ("color", "heavy_hex")
_ALIASES = {"surface": "rotated_surface", "rep": "repetition", "bb": "bivariate_bicycle", "gross": "bivariate_bicycle",
            "steane": "steane_concat", "bacon-shor": "bacon_shor", "baconshor": "bacon_shor"}


class CodeError(ValueError):
    """Unsupported family or parameter combination."""


def canonical_family(name: str) -> str:
    name = name.lower().replace("-", "_")
    name = _ALIASES.get(name, name)
    if name not in FAMILIES:
        raise CodeError(f"unknown code family {name!r}")
    return name


@dataclass(frozen=True)
class CodeSpec:
    """Which code to build.

    ``distance`` is required except for Steane (derived from ``level``) and
    the gross bivariate bicycle preset (12).  ``rounds`` defaults to the
    distance.  ``flags`` adds a flag qubit to every Steane check, which
    makes single circuit faults distinguishable at the cost of more qubits
    and gates; off by default.
    """

    family: str
    distance: Optional[int] = None
    rounds: Optional[int] = None
    m1: Optional[int] = None
    m2: Optional[int] = None
    level: Optional[int] = None
    bb_l: int = 12
    bb_m: int = 6
    bb_a: Tuple[Tuple[str, int], ...] = (("x", 3), ("y", 1), ("y", 2))
    bb_b: Tuple[Tuple[str, int], ...] = (("y", 3), ("x", 1), ("x", 2))
    bb_k: int = 12
    flags: bool = False

    def __post_init__(self):
        object.__setattr__(self, "family", canonical_family(self.family))
        fam = self.family
        d = self.distance
        if fam == "steane_concat":
            level = self.level
            if level is None:
                if d is None:
                    raise CodeError("steane_concat needs level or distance")
                level = _steane_level(d)
            if d is not None and d != 3 ** level:
                raise CodeError(f"steane_concat level {level} has distance {3 ** level}, not {d}")
            object.__setattr__(self, "level", level)
            object.__setattr__(self, "distance", 3 ** level)
        elif fam == "bivariate_bicycle":
            if d is None:
                d = 12 if (self.bb_l, self.bb_m) == (12, 6) else None
                if d is None:
                    raise CodeError("non-gross bivariate bicycle codes need an explicit distance")
                object.__setattr__(self, "distance", d)
        elif fam == "bacon_shor":
            if self.m1 is not None or self.m2 is not None:
                m1 = self.m1 if self.m1 is not None else self.m2
                m2 = self.m2 if self.m2 is not None else self.m1
                object.__setattr__(self, "m1", m1)
                object.__setattr__(self, "m2", m2)
                if d is None:
                    object.__setattr__(self, "distance", min(m1, m2))
                elif d != min(m1, m2):
                    raise CodeError(f"bacon_shor {m1}x{m2} has distance {min(m1, m2)}, not {d}")
            elif d is None:
                raise CodeError("bacon_shor needs a distance or m1/m2")
            else:
                object.__setattr__(self, "m1", d)
                object.__setattr__(self, "m2", d)
        elif d is None:
            raise CodeError(f"{fam} needs a distance")
        d = self.distance
        if d < 1:
            raise CodeError("distance must be positive")
        if fam in ("repetition", "rotated_surface", "color", "heavy_hex") and d % 2 == 0:
            raise CodeError(f"{fam} is only generated at odd distance")
        if fam == "bacon_shor" and d % 2 == 0:
            raise CodeError("bacon_shor is only generated at odd distance")
        if fam == "rotated_surface" and d < 3:
            raise CodeError("rotated_surface needs d >= 3")
        if fam == "repetition" and d < 3:
            raise CodeError("repetition needs d >= 3")
        if self.rounds is None:
            object.__setattr__(self, "rounds", d)
        if self.rounds < 1:
            raise CodeError("rounds must be positive")


def _steane_level(d: int) -> int:
    level = 0
    x = 1
    while x < d:
        x *= 3
        level += 1
    if x != d or level < 1:
        raise CodeError(f"steane_concat distance must be a power of 3 (3, 9, 27), got {d}")
    return level


def build_layout(spec: CodeSpec) -> CodeLayout:
    fam = spec.family
    if fam == "repetition":
        return repetition_layout(spec.distance)
    if fam == "rotated_surface":
        return rotated_surface_layout(spec.distance)
    if fam == "bacon_shor":
        return bacon_shor_layout(spec.m1, spec.m2)
    if fam == "steane_concat":
        return steane_concat_layout(spec.level, spec.flags)
    if fam == "bivariate_bicycle":
        return bivariate_bicycle_layout(spec.bb_l, spec.bb_m, spec.bb_a, spec.bb_b)
    raise CodeError(f"{fam} has formulas only; its circuits are not generated")


def generate_memory(spec: CodeSpec) -> Circuit:
    """Noiseless, annotated Z-basis memory circuit for ``spec``."""
    return memory_circuit(build_layout(spec), spec.rounds)


def qubit_count(family: str, d: int, count: str = "total", flags: bool = False) -> int:
    """Physical qubits of one instance as the generators emit it.

    ``count="data"`` counts data qubits only.  Color and heavy-hex codes
    use the totals implied by their encoding-rate formulas.  ``flags``
    counts the optional Steane flag qubits.
    """
    fam = canonical_family(family)
    if count not in ("total", "data"):
        raise ValueError("count must be 'total' or 'data'")
    data = {
        "repetition": lambda: d,
        "rotated_surface": lambda: d * d,
        "bacon_shor": lambda: d * d,
        "steane_concat": lambda: 7 ** _steane_level(d),
        "bivariate_bicycle": lambda: 144,
        "color": lambda: (3 * d * d + 1) // 4,
        "heavy_hex": lambda: d * d,
    }[fam]()
    if count == "data":
        return data
    total = {
        "repetition": 2 * d - 1,
        "rotated_surface": 2 * d * d - 1,
        "bacon_shor": 3 * d * d - 2 * d,
        "steane_concat": (3 if flags else 2) * data - (2 if flags else 1),  # one ancilla (and flag) per check
        "bivariate_bicycle": 288,
        "color": ((3 * d - 1) ** 2) // 4,
        "heavy_hex": (5 * d * d - 2 * d - 1) // 2,
    }[fam]
    return total


def encoding_rate(spec_or_family, d: Optional[int] = None, level: Optional[int] = None, k: int = 12,
                  n: int = 144) -> Fraction:
    """Logical-to-physical qubit ratio from the family formulas (exact).

    Accepts a :class:`CodeSpec`, or a family name plus ``d`` (``level``
    for Steane; ``k``/``n`` for bivariate bicycle codes).
    """
    if isinstance(spec_or_family, CodeSpec):
        spec = spec_or_family
        fam, d, level = spec.family, spec.distance, spec.level
        if fam == "bivariate_bicycle":
            k, n = spec.bb_k, 2 * spec.bb_l * spec.bb_m
    else:
        fam = canonical_family(spec_or_family)
    if fam == "rotated_surface":
        return Fraction(1, 2 * d * d - 1)
    if fam == "bacon_shor":
        return Fraction(1, d * d)
    if fam == "bivariate_bicycle":
        return Fraction(k, 2 * n)
    if fam == "steane_concat":
        if level is None:
            level = _steane_level(d)
        return Fraction(1, 2 * 7 ** level)
    if fam == "color":
        return Fraction(4, (3 * d - 1) ** 2)
    if fam == "heavy_hex":
        return Fraction(2, 5 * d * d - 2 * d - 1)
    raise CodeError(f"no encoding-rate formula for {fam}")


def _candidate_distances(fam: str):
    if fam == "steane_concat":
        return [3, 9, 27]
    if fam == "bivariate_bicycle":
        return [12]
    return list(range(3, 1001, 2))


def max_distance(family: str, qubit_budget: int, count: str = "total") -> Optional[int]:
    """Largest valid distance whose qubit total fits in ``qubit_budget``."""
    fam = canonical_family(family)
    best = None
    for d in _candidate_distances(fam):
        if qubit_count(fam, d, count) <= qubit_budget:
            best = d
        else:
            break
    return best


def correctable_errors(d: int) -> int:
    if d < 1:
        raise ValueError("distance must be at least 1")
    return (d - 1) // 2


__all__ = [
    "Check",
    "CodeError",
    "CodeLayout",
    "CodeSpec",
    "FAMILIES",
    "build_layout",
    "canonical_family",
    "correctable_errors",
    "default_schedule",
    "encoding_rate",
    "generate_memory",
    "max_distance",
    "memory_circuit",
    "qubit_count",
]
