"""Agent configuration: devices, calibration, ports, coordinator endpoint."""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path

from ..devicesim.loadmodel import LoadModel
from ..devicesim.profiles import (
    AppProfile,
    NetworkProfile,
    default_app_profiles,
    default_network_profiles,
)

DEFAULT_COORDINATOR_PORT = 2222
DEFAULT_HTTP_PORT = 8080
DEFAULT_STREAM_PORT = 6081


@dataclass
class DeviceSpec:
    device_id: str
    model: str = "generic"
    os: str = "ANDROID"
    os_api_level: int = 26
    rooted: bool = False
    nominal_voltage: float = 4.0
    supported_channels: tuple = ("USB", "WIFI", "BLUETOOTH")

    @property
    def mirroring_capable(self) -> bool:
        return self.os == "ANDROID" and self.os_api_level >= 21

    def to_dict(self) -> dict:
        return {
            "device_id": self.device_id, "model": self.model, "os": self.os,
            "os_api_level": self.os_api_level, "rooted": self.rooted,
            "nominal_voltage": self.nominal_voltage,
            "supported_channels": list(self.supported_channels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceSpec":
        d = dict(d)
        if "supported_channels" in d:
            d["supported_channels"] = tuple(d["supported_channels"])
        return cls(**d)


@dataclass
class AgentConfig:
    vp_id: str = "node1"
    coordinator_host: str = "127.0.0.1"
    coordinator_port: int = DEFAULT_COORDINATOR_PORT
    token: str = ""
    port_http: int = DEFAULT_HTTP_PORT
    port_stream: int = DEFAULT_STREAM_PORT
    workdir: Path = Path("agent-work")
    settle_delay_s: float = 1.0
    devices: list = field(default_factory=lambda: [DeviceSpec("j7duo", model="Samsung J7 Duo")])
    load_model: LoadModel = field(default_factory=LoadModel)
    apps: dict = field(default_factory=default_app_profiles)
    networks: dict = field(default_factory=default_network_profiles)
    heartbeat_interval_s: float = 10.0

    @classmethod
    def from_toml(cls, path: Path) -> "AgentConfig":
        raw = tomllib.loads(Path(path).read_text())
        cfg = cls()
        a = raw.get("agent", {})
        cfg.vp_id = a.get("vp_id", cfg.vp_id)
        coord = a.get("coordinator", f"{cfg.coordinator_host}:{cfg.coordinator_port}")
        host, _, port = coord.rpartition(":")
        cfg.coordinator_host = host or cfg.coordinator_host
        cfg.coordinator_port = int(port) if port else cfg.coordinator_port
        cfg.token = a.get("token", cfg.token)
        cfg.port_http = int(a.get("port_http", cfg.port_http))
        cfg.port_stream = int(a.get("port_stream", cfg.port_stream))
        cfg.workdir = Path(a.get("workdir", str(cfg.workdir)))
        cfg.settle_delay_s = float(a.get("settle_delay_s", cfg.settle_delay_s))
        cfg.heartbeat_interval_s = float(a.get("heartbeat_interval_s", cfg.heartbeat_interval_s))
        if "load_model" in raw:
            cfg.load_model = LoadModel(**raw["load_model"])
        if "device" in raw:
            cfg.devices = [DeviceSpec.from_dict(d) for d in raw["device"]]
        for app_id, spec in raw.get("apps", {}).items():
            cfg.apps[app_id] = AppProfile(app_id=app_id, **spec)
        for name, spec in raw.get("networks", {}).items():
            cfg.networks[name] = NetworkProfile(name=name, **spec)
        return cfg
