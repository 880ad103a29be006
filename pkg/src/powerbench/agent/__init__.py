from .channels import (
    BLUETOOTH,
    CHANNELS,
    USB,
    WIFI,
    ChannelRequirements,
    feasible_channels,
    select_channel,
)
from .config import AgentConfig, DeviceSpec
from .controller import AgentController
from .runner import DONE, FAILED, ExecutionRecord, handle_dispatch
from .telemetry import ControllerTelemetry, TelemetrySample

__all__ = [
    "BLUETOOTH", "CHANNELS", "USB", "WIFI", "ChannelRequirements",
    "feasible_channels", "select_channel", "AgentConfig", "DeviceSpec",
    "AgentController", "DONE", "FAILED", "ExecutionRecord", "handle_dispatch",
    "ControllerTelemetry", "TelemetrySample",
]
