"""App and network profiles plus the page-load timing model."""

from __future__ import annotations

from dataclasses import dataclass, field

MAX_PAGE_LOAD_S = 30.0


@dataclass(frozen=True)
class NetworkProfile:
    name: str
    down_mbps: float
    up_mbps: float
    rtt_ms: float
    byte_scale: float = 1.0

    def __post_init__(self):
        if self.down_mbps <= 0 or self.up_mbps <= 0:
            raise ValueError("bandwidth must be positive")
        if self.rtt_ms < 0:
            raise ValueError("rtt must be nonnegative")
        if not (0 < self.byte_scale <= 2):
            raise ValueError("byte_scale outside (0, 2]")


@dataclass(frozen=True)
class AppProfile:
    app_id: str
    median_cpu_pct: float
    page_bytes: int = 0
    interaction_bump_pct: float = 5.0
    is_browser: bool = False
    # Per-network overrides of the transfer byte multiplier (e.g. a browser
    # that fetches systematically lighter pages at one location).
    byte_scale_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0 <= self.median_cpu_pct <= 100):
            raise ValueError("median_cpu_pct outside [0, 100]")


def page_load_time(profile: NetworkProfile, page_bytes: int,
                   byte_scale: float | None = None,
                   cap_s: float = MAX_PAGE_LOAD_S) -> float:
    """RTT plus transfer time at the profile's download bandwidth, capped."""
    if page_bytes < 0:
        raise ValueError("page_bytes must be nonnegative")
    scale = profile.byte_scale if byte_scale is None else byte_scale
    t = profile.rtt_ms / 1000.0 + (page_bytes * scale * 8.0) / (profile.down_mbps * 1e6)
    return min(t, cap_s)


def effective_byte_scale(app: AppProfile, profile: NetworkProfile) -> float:
    return profile.byte_scale * app.byte_scale_overrides.get(profile.name, 1.0)


# Speedtest-derived VPN exit profiles (down Mbps, up Mbps, RTT ms).
VPN_PROFILES = {
    "johannesburg": NetworkProfile("johannesburg", 6.26, 9.77, 222.04),
    "hongkong": NetworkProfile("hongkong", 7.64, 7.77, 286.32),
    "bunkyo": NetworkProfile("bunkyo", 9.68, 7.76, 239.38),
    "saopaulo": NetworkProfile("saopaulo", 9.75, 8.82, 235.05),
    "santaclara": NetworkProfile("santaclara", 10.63, 14.87, 215.16),
}

# Local fast WiFi, the baseline when no profile is requested.
DEFAULT_NETWORK = NetworkProfile("default", 50.0, 20.0, 20.0)


def default_network_profiles() -> dict:
    profiles = dict(VPN_PROFILES)
    profiles["default"] = DEFAULT_NETWORK
    return profiles


def default_app_profiles() -> dict:
    """Calibrated app mix: four browsers plus a local video player.

    Browser CPU medians are ordered brave < edge < chrome < firefox; brave
    fetches far lighter pages (ad blocking), chrome the heaviest. Chrome's
    pages shrink 20% under the bunkyo network.
    """
    return {
        "brave": AppProfile("brave", 12.0, page_bytes=600_000,
                            interaction_bump_pct=8.0, is_browser=True),
        "edge": AppProfile("edge", 16.0, page_bytes=1_800_000,
                           interaction_bump_pct=10.0, is_browser=True),
        "chrome": AppProfile("chrome", 20.0, page_bytes=2_500_000,
                             interaction_bump_pct=20.0, is_browser=True,
                             byte_scale_overrides={"bunkyo": 0.8}),
        "firefox": AppProfile("firefox", 24.0, page_bytes=2_200_000,
                              interaction_bump_pct=14.0, is_browser=True),
        "videoplayer": AppProfile("videoplayer", 5.0, interaction_bump_pct=3.0),
    }
