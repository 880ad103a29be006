from .rig import (
    BATTERY,
    VOUT,
    CURRENT_CLAMP_MA,
    MAX_RATE_HZ,
    VOLTAGE_MAX,
    VOLTAGE_MIN,
    MeasurementRig,
    MeterState,
    RigConfig,
    SocketState,
)
from .sampling import PowerSample, SampleStream, TraceStats
from .tracefile import TraceMeta, TraceWriter, read_trace

__all__ = [
    "BATTERY", "VOUT", "CURRENT_CLAMP_MA", "MAX_RATE_HZ", "VOLTAGE_MAX",
    "VOLTAGE_MIN", "MeasurementRig", "MeterState", "RigConfig", "SocketState",
    "PowerSample", "SampleStream", "TraceStats", "TraceMeta", "TraceWriter",
    "read_trace",
]
