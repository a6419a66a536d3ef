"""Layout, routing and gate-set translation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..arch import Device
from ..circuit import Circuit
from .gatesets import GATESETS, GateSet, get_gateset
from .layout import LAYOUTS, LayoutError, LayoutMap, dense_subset, layout
from .route import ROUTINGS, RoutingError, SwapMetrics, TrackerLog, full_layout, route
from .translate import TranslationError, split_groups, translate


@dataclass(frozen=True)
class OverheadMetrics:
    """Routing and translation overhead of one compiled circuit.

    ``pct`` is the SWAP overhead as a percentage of the original two-qubit
    gates, counting three two-qubit gates per SWAP;
    ``gates_added_per_original`` is ``(after - before) / before`` over all
    unitary gate applications.
    """

    swaps_inserted: int
    original_2q: int
    gates_before: int
    gates_after: int
    two_qubit_after: int

    @property
    def extra_2q(self) -> int:
        return 3 * self.swaps_inserted

    @property
    def pct(self) -> float:
        return 100.0 * self.extra_2q / self.original_2q if self.original_2q else 0.0

    @property
    def gates_added_per_original(self) -> float:
        return (self.gates_after - self.gates_before) / self.gates_before if self.gates_before else 0.0

    def as_dict(self) -> dict:
        return {
            "swaps_inserted": self.swaps_inserted,
            "extra_2q": self.extra_2q,
            "original_2q": self.original_2q,
            "pct_2q_overhead": self.pct,
            "gates_before": self.gates_before,
            "gates_after": self.gates_after,
            "two_qubit_after": self.two_qubit_after,
            "gates_added_per_original": self.gates_added_per_original,
        }


def overhead_metrics(before: Circuit, after: Circuit, swaps_inserted: Optional[int] = None) -> OverheadMetrics:
    """Overhead of ``after`` relative to ``before``.

    ``swaps_inserted`` defaults to the number of SWAP gates left in
    ``after`` minus those already in ``before``.
    """
    if swaps_inserted is None:
        swaps_inserted = max(after.count("SWAP") - before.count("SWAP"), 0)
    return OverheadMetrics(int(swaps_inserted), before.two_qubit_gate_count(), before.gate_count(),
                           after.gate_count(), after.two_qubit_gate_count())


@dataclass(frozen=True)
class TranspileResult:
    circuit: Circuit
    layout: LayoutMap
    tracker: TrackerLog
    swaps: SwapMetrics
    metrics: OverheadMetrics


def transpile(c: Circuit, device: Device, layout_strategy: str = "trivial", routing: str = "sabre",
              gateset=None, optimize: bool = False, seed: int = 0) -> TranspileResult:
    """Translate, place, route and translate again.

    The second translation expands the inserted SWAPs into three entangler
    blocks each.  ``gateset`` defaults to the device's native set.
    """
    g = get_gateset(gateset or device.gateset)
    pre = translate(c, g, optimize)
    lay = layout(pre, device, layout_strategy, seed, routing)
    routed, tracker, swaps = route(pre, device, lay, routing, seed)
    out = translate(routed, g, optimize)
    return TranspileResult(out, lay, tracker, swaps, overhead_metrics(c, out, swaps.swaps_inserted))


__all__ = [
    "GATESETS", "GateSet", "get_gateset", "LAYOUTS", "LayoutError", "LayoutMap", "dense_subset", "layout",
    "ROUTINGS", "RoutingError", "SwapMetrics", "TrackerLog", "full_layout", "route", "TranslationError",
    "split_groups", "translate", "OverheadMetrics", "overhead_metrics", "TranspileResult", "transpile",
]
