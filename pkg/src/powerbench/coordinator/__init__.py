from .httpapi import HttpApi
from .protocol import AgentChannel, CoordinatorServer, recv_msg, send_msg
from .roles import (
    ACTIONS,
    ADMIN,
    EXPERIMENTER,
    TESTER,
    Principal,
    TokenRegistry,
    authorize,
)
from .scheduler import Dispatch, device_matches, schedule
from .service import Coordinator
from .store import JobStore
from .types import (
    CANCELLED,
    DONE,
    FAILED,
    OFFLINE,
    ONLINE,
    QUEUED,
    RUNNING,
    JobRecord,
    VantagePointRecord,
    validate_manifest,
    validate_vp_id,
)

__all__ = [
    "HttpApi", "AgentChannel", "CoordinatorServer", "recv_msg", "send_msg",
    "ACTIONS", "ADMIN", "EXPERIMENTER", "TESTER", "Principal", "TokenRegistry",
    "authorize", "Dispatch", "device_matches", "schedule", "Coordinator",
    "JobStore", "CANCELLED", "DONE", "FAILED", "OFFLINE", "ONLINE", "QUEUED",
    "RUNNING", "JobRecord", "VantagePointRecord", "validate_manifest",
    "validate_vp_id",
]
