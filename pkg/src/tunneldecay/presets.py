"""Named scenario bundles for the six standard comparison plots.

Each preset expands deterministically to (label, config) pairs sharing the
default mesh; only the barrier differs between scenarios.  Labels encode the
barrier parameters ("h10_w0.6") or "nobarrier" for free decay.
"""

from __future__ import annotations

from .model import BarrierSpec, DEFAULT_CONFIG, ScenarioConfig

# (height, width) pairs per preset; None means no barrier.  Where a bundle
# mixes free and barrier decay the free run comes first.
_PRESET_BARRIERS: dict[str, tuple[tuple[float, float] | None, ...]] = {
    "fig1": ((10.0, 0.6),),
    "fig2": ((10.0, 0.6), (20.0, 0.6), (30.0, 0.6)),
    "fig3": ((15.0, 0.6), (15.0, 0.8), (15.0, 1.8)),
    "fig4": (None, (10.0, 0.2), (20.0, 0.2), (30.0, 0.2)),
    "fig5": (None, (10.0, 0.2)),
    "fig6": (None, (10.0, 0.2), (10.0, 0.4), (10.0, 0.6)),
    "nobarrier": (None,),
}

PRESET_NAMES = tuple(_PRESET_BARRIERS)


def scenario_label(barrier: BarrierSpec | None) -> str:
    if barrier is None:
        return "nobarrier"
    return f"h{barrier.h:g}_w{barrier.w:g}"


def expand_preset(
    name: str, base: ScenarioConfig = DEFAULT_CONFIG
) -> list[tuple[str, ScenarioConfig]]:
    """Expand a preset name into labeled configs derived from the base."""
    if name not in _PRESET_BARRIERS:
        known = ", ".join(PRESET_NAMES)
        raise ValueError(f"unknown preset {name!r}; choose one of: {known}")
    out = []
    for hw in _PRESET_BARRIERS[name]:
        barrier = None if hw is None else BarrierSpec(h=hw[0], w=hw[1])
        cfg = base.with_overrides(barrier=barrier)
        out.append((scenario_label(barrier), cfg))
    return out
