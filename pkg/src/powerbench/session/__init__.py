from .session import (
    FRAME_RATE,
    SCREEN_H,
    SCREEN_W,
    ChannelDelayModel,
    FrameEvent,
    Session,
    SessionManager,
)
from .server import RealTimeDriver, SessionHttpApi, SessionStreamServer

__all__ = [
    "FRAME_RATE", "SCREEN_H", "SCREEN_W", "ChannelDelayModel", "FrameEvent",
    "Session", "SessionManager", "RealTimeDriver", "SessionHttpApi",
    "SessionStreamServer",
]
