"""Automation command vocabulary shared by scripts, the agent, and sessions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

KINDS = {
    "launch_app", "load_url", "wait", "scroll", "tap", "key",
    "clean_state", "play_video",
}


@dataclass(frozen=True)
class AutomationCommand:
    kind: str
    args: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown command kind {self.kind!r}")
        validate_args(self.kind, self.args)

    def to_dict(self) -> dict:
        return {"cmd": self.kind, **self.args}

    @classmethod
    def from_dict(cls, d: dict) -> "AutomationCommand":
        d = dict(d)
        kind = d.pop("cmd")
        return cls(kind=kind, args=d)


def validate_args(kind: str, args: dict[str, Any]):
    if kind == "launch_app" and not args.get("app"):
        raise ValueError("launch_app requires app")
    if kind == "clean_state" and not args.get("app"):
        raise ValueError("clean_state requires app")
    if kind == "wait":
        if float(args.get("s", -1)) < 0:
            raise ValueError("wait requires s >= 0")
    if kind == "scroll":
        if int(args.get("count", 1)) < 1:
            raise ValueError("scroll count must be >= 1")
    if kind == "load_url" and "bytes" in args and int(args["bytes"]) < 0:
        raise ValueError("load_url bytes must be >= 0")
    if kind == "play_video" and float(args.get("duration", 0)) <= 0:
        raise ValueError("play_video requires positive duration")


def parse_script(items: list[dict]) -> list[AutomationCommand]:
    return [AutomationCommand.from_dict(i) for i in items]
