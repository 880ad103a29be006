from .commands import AutomationCommand, parse_script
from .device import HOME, SimDevice
from .loadmodel import LoadModel, instantaneous_current
from .profiles import (
    DEFAULT_NETWORK,
    VPN_PROFILES,
    AppProfile,
    NetworkProfile,
    default_app_profiles,
    default_network_profiles,
    effective_byte_scale,
    page_load_time,
)

__all__ = [
    "AutomationCommand", "parse_script", "HOME", "SimDevice", "LoadModel",
    "instantaneous_current", "DEFAULT_NETWORK", "VPN_PROFILES", "AppProfile",
    "NetworkProfile", "default_app_profiles", "default_network_profiles",
    "effective_byte_scale", "page_load_time",
]
