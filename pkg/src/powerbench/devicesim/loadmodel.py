"""Device state to instantaneous current mapping."""

from __future__ import annotations

from dataclasses import dataclass

CURRENT_CLAMP_MA = 6000.0


@dataclass(frozen=True)
class LoadModel:
    i_base_ma: float = 40.0
    i_screen_ma: float = 60.0
    i_cpu_ma_per_pct: float = 12.0
    mirror_cpu_overhead_pct: float = 5.0
    noise_sigma_ma: float = 2.0

    def __post_init__(self):
        for name in ("i_base_ma", "i_screen_ma", "i_cpu_ma_per_pct",
                     "mirror_cpu_overhead_pct", "noise_sigma_ma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def instantaneous_current(state, model: LoadModel, noise_ma: float = 0.0) -> float:
    """Noiseless (by default) current draw for the given device state, in mA.

    Per-sample noise is injected downstream by the sample stream so that the
    same state yields reproducible, seed-controlled traces.
    """
    effective_cpu = state.cpu_pct + (model.mirror_cpu_overhead_pct if state.mirroring else 0.0)
    i = model.i_base_ma
    if state.screen_on:
        i += model.i_screen_ma
    i += model.i_cpu_ma_per_pct * effective_cpu
    i += noise_ma
    return min(max(i, 0.0), CURRENT_CLAMP_MA)
