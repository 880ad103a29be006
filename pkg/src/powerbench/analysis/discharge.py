"""Charge integration over traces."""

from __future__ import annotations

import numpy as np

from ..errors import LossyTrace, TooFewSamples
from .trace import Trace

DEFAULT_LOSS_THRESHOLD = 0.001


def integrate_discharge(trace: Trace, loss_threshold: float = DEFAULT_LOSS_THRESHOLD,
                        force: bool = False) -> float:
    """Trapezoidal discharge in mAh, skipping intervals that span sample gaps.

    Gap intervals contribute zero charge; their presence is surfaced through
    the trace's sample_loss_fraction rather than interpolated over.
    """
    if len(trace.t) < 2:
        raise TooFewSamples(f"{len(trace.t)} samples")
    loss = trace.meta.sample_loss_fraction
    if loss > loss_threshold and not force:
        raise LossyTrace(f"loss fraction {loss:.6f} above {loss_threshold}")
    dt = np.diff(trace.t)
    if trace.meta.gaps and trace.meta.rate:
        # Lost samples leave holes wider than the nominal grid spacing.
        dt = np.where(dt > 1.5 / trace.meta.rate, 0.0, dt)
    mids = (trace.current_ma[:-1] + trace.current_ma[1:]) / 2.0
    return float(np.sum(mids * dt) / 3600.0)


def energy_mwh(trace: Trace, loss_threshold: float = DEFAULT_LOSS_THRESHOLD,
               force: bool = False) -> float:
    """Voltage-weighted energy; supply voltage is fixed per run."""
    if len(trace.t) < 2:
        raise TooFewSamples(f"{len(trace.t)} samples")
    loss = trace.meta.sample_loss_fraction
    if loss > loss_threshold and not force:
        raise LossyTrace(f"loss fraction {loss:.6f} above {loss_threshold}")
    dt = np.diff(trace.t)
    if trace.meta.gaps and trace.meta.rate:
        dt = np.where(dt > 1.5 / trace.meta.rate, 0.0, dt)
    power_mw = trace.current_ma * trace.voltage_v
    mids = (power_mw[:-1] + power_mw[1:]) / 2.0
    return float(np.sum(mids * dt) / 3600.0)
