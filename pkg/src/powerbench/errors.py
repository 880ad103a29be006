"""Domain error hierarchy.

Every error carries a short machine-readable ``code`` that is stable across
the wire protocol, the HTTP API, and the CLI output.
"""


class PowerbenchError(Exception):
    code = "Error"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(f"{self.code}: {detail}" if detail else self.code)


# -- authorization / registry --------------------------------------------------

class Unauthorized(PowerbenchError):
    code = "Unauthorized"


class DuplicateId(PowerbenchError):
    code = "DuplicateId"


class Unreachable(PowerbenchError):
    code = "Unreachable"


# -- job lifecycle -------------------------------------------------------------

class InvalidManifest(PowerbenchError):
    code = "InvalidManifest"

    def __init__(self, field: str, detail: str = ""):
        self.field = field
        super().__init__(f"{field}" + (f" ({detail})" if detail else ""))


class NoMatchingDevice(PowerbenchError):
    code = "NoMatchingDevice"


class UnknownJob(PowerbenchError):
    code = "UnknownJob"


class IllegalTransition(PowerbenchError):
    code = "IllegalTransition"


class NotReady(PowerbenchError):
    code = "NotReady"


class Expired(PowerbenchError):
    code = "Expired"


# -- agent / hardware ----------------------------------------------------------

class ChannelInfeasible(PowerbenchError):
    code = "ChannelInfeasible"


class UnknownDevice(PowerbenchError):
    code = "UnknownDevice"


class MeterOff(PowerbenchError):
    code = "MeterOff"


class Busy(PowerbenchError):
    code = "Busy"


class VoltageOutOfRange(PowerbenchError):
    code = "VoltageOutOfRange"


class RelayConflict(PowerbenchError):
    code = "RelayConflict"


class SamplingActive(PowerbenchError):
    code = "SamplingActive"


class SocketOff(PowerbenchError):
    code = "SocketOff"


class NoLoad(PowerbenchError):
    code = "NoLoad"


class AlreadySampling(PowerbenchError):
    code = "AlreadySampling"


class BadRate(PowerbenchError):
    code = "BadRate"


class NotSampling(PowerbenchError):
    code = "NotSampling"


# -- device simulator ----------------------------------------------------------

class UnknownApp(PowerbenchError):
    code = "UnknownApp"


class InvalidInState(PowerbenchError):
    code = "InvalidInState"


class ScreenOff(PowerbenchError):
    code = "ScreenOff"


# -- session -------------------------------------------------------------------

class SessionExists(PowerbenchError):
    code = "SessionExists"


class SessionClosed(PowerbenchError):
    code = "SessionClosed"


class ToolbarHidden(PowerbenchError):
    code = "ToolbarHidden"


class OutOfBounds(PowerbenchError):
    code = "OutOfBounds"


class ProbeTimeout(PowerbenchError):
    code = "Timeout"


# -- analysis ------------------------------------------------------------------

class TooFewSamples(PowerbenchError):
    code = "TooFewSamples"


class LossyTrace(PowerbenchError):
    code = "LossyTrace"


class EmptyInput(PowerbenchError):
    code = "EmptyInput"


class BadQ(PowerbenchError):
    code = "BadQ"


class NoValidTraces(PowerbenchError):
    code = "NoValidTraces"


class NegativeLatency(PowerbenchError):
    code = "NegativeLatency"


class TooFewGroups(PowerbenchError):
    code = "TooFewGroups"
