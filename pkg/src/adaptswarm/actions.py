"""The discrete adaptation action vocabulary shared by simulator and planners."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class ActionKind(Enum):
    NOOP_PRESERVE_STATE = "noop_preserve_state"
    SCALE_OUT = "scale_out"
    SCALE_IN = "scale_in"
    SCALE_UP_CPU = "scale_up_cpu"
    SCALE_DOWN_CPU = "scale_down_cpu"
    SCALE_UP_MEM = "scale_up_mem"
    SCALE_DOWN_MEM = "scale_down_mem"
    COMPOSE_SPLIT = "compose_split"
    COMPOSE_MERGE = "compose_merge"
    AUTO_RECOVER = "auto_recover"


@dataclass(frozen=True)
class AdaptationAction:
    kind: ActionKind
    service: int | None = None  # target service id for service-scoped kinds

    @property
    def key(self) -> str:
        if self.service is None:
            return self.kind.value
        return f"{self.kind.value}:{self.service}"


# Simulated seconds charged per attempted action (accounting only; the
# cluster still advances one tick per step).
DEFAULT_DURATIONS: dict[str, float] = {
    ActionKind.NOOP_PRESERVE_STATE.value: 1.0,
    ActionKind.SCALE_OUT.value: 5.0,
    ActionKind.SCALE_IN.value: 5.0,
    ActionKind.SCALE_UP_CPU.value: 3.0,
    ActionKind.SCALE_DOWN_CPU.value: 3.0,
    ActionKind.SCALE_UP_MEM.value: 3.0,
    ActionKind.SCALE_DOWN_MEM.value: 3.0,
    ActionKind.COMPOSE_SPLIT.value: 8.0,
    ActionKind.COMPOSE_MERGE.value: 8.0,
    ActionKind.AUTO_RECOVER.value: 10.0,
}

# Which service each service-scoped action index targets.  The default
# two-service layout gives service 0 the horizontal and memory knobs and
# service 1 the cpu-vertical and composition knobs, so both services'
# cpu utilisation stays controllable.
DEFAULT_BINDINGS: dict[str, int] = {
    ActionKind.SCALE_OUT.value: 0,
    ActionKind.SCALE_IN.value: 0,
    ActionKind.SCALE_UP_CPU.value: 1,
    ActionKind.SCALE_DOWN_CPU.value: 1,
    ActionKind.SCALE_UP_MEM.value: 0,
    ActionKind.SCALE_DOWN_MEM.value: 0,
    ActionKind.COMPOSE_SPLIT.value: 1,
    ActionKind.COMPOSE_MERGE.value: 1,
}

_ORDER = list(ActionKind)


def build_action_table(bindings: dict[str, int] | None = None) -> list[AdaptationAction]:
    """The fixed 10-entry action table; index in the list is the action index."""
    bound = dict(DEFAULT_BINDINGS)
    if bindings:
        for key, svc in bindings.items():
            if key not in bound:
                raise ValueError(f"unknown action binding {key!r}")
            bound[key] = int(svc)
    table = []
    for kind in _ORDER:
        svc = bound.get(kind.value)
        table.append(AdaptationAction(kind=kind, service=svc))
    return table
