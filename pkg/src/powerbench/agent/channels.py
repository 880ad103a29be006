"""Automation channel selection.

USB is never a valid measurement channel (its supply current corrupts the
meter reading); WiFi is incompatible with cellular experiments; Bluetooth
keyboard automation cannot carry ADB on unrooted devices and cannot carry
screen mirroring at all.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ChannelInfeasible

USB = "USB"
WIFI = "WIFI"
BLUETOOTH = "BLUETOOTH"
CHANNELS = (USB, WIFI, BLUETOOTH)

CONNECTIVITY_WIFI = "WIFI"
CONNECTIVITY_CELLULAR = "CELLULAR"


@dataclass(frozen=True)
class ChannelRequirements:
    connectivity: str = CONNECTIVITY_WIFI
    adb_required: bool = False
    mirroring: bool = False
    device_rooted: bool = False

    def __post_init__(self):
        if self.connectivity not in (CONNECTIVITY_WIFI, CONNECTIVITY_CELLULAR):
            raise ValueError(f"bad connectivity {self.connectivity}")
        if self.mirroring and not self.adb_required:
            # Mirroring runs atop the debug bridge.
            object.__setattr__(self, "adb_required", True)


def feasible_channels(req: ChannelRequirements) -> list[str]:
    """All measurement-safe channels satisfying the requirements, preferred first."""
    out = []
    if req.connectivity != CONNECTIVITY_CELLULAR:
        out.append(WIFI)
    bt_ok = not req.mirroring and (not req.adb_required or req.device_rooted)
    if bt_ok:
        out.append(BLUETOOTH)
    return out


def select_channel(req: ChannelRequirements) -> str:
    modes = feasible_channels(req)
    if not modes:
        if req.connectivity == CONNECTIVITY_CELLULAR and req.mirroring:
            raise ChannelInfeasible("mirroring requires ADB, unavailable over Bluetooth")
        if req.connectivity == CONNECTIVITY_CELLULAR and req.adb_required:
            raise ChannelInfeasible("ADB over Bluetooth requires a rooted device")
        raise ChannelInfeasible("no channel satisfies the requirements")
    return modes[0]
