"""Role-based authorization matrix."""

from __future__ import annotations

from dataclasses import dataclass

ADMIN = "ADMIN"
EXPERIMENTER = "EXPERIMENTER"
TESTER = "TESTER"

SUBMIT = "SUBMIT"
VIEW = "VIEW"
EDIT = "EDIT"
CANCEL = "CANCEL"
FETCH = "FETCH"
REGISTER_VP = "REGISTER_VP"
JOIN_SESSION = "JOIN_SESSION"

ACTIONS = (SUBMIT, VIEW, EDIT, CANCEL, FETCH, REGISTER_VP, JOIN_SESSION)

# Actions an experimenter may take on their own resources only.
_OWNER_SCOPED = {VIEW, EDIT, CANCEL, FETCH, JOIN_SESSION}


@dataclass(frozen=True)
class Principal:
    principal_id: str
    role: str


class TokenRegistry:
    def __init__(self, tokens: dict[str, Principal] | None = None):
        self._tokens = dict(tokens or {})

    def add(self, token: str, principal_id: str, role: str):
        self._tokens[token] = Principal(principal_id, role)

    def resolve(self, token: str) -> Principal | None:
        return self._tokens.get(token)


def authorize(principal: Principal | None, action: str, resource=None) -> bool:
    """Pure allow/deny decision. Unknown principals and actions are denied.

    ``resource`` exposes ``owner`` (principal id) and optionally
    ``shared_with`` (set of principal ids) when ownership matters.
    """
    if principal is None or action not in ACTIONS:
        return False
    if principal.role == ADMIN:
        return True
    if principal.role == EXPERIMENTER:
        if action == SUBMIT:
            return True
        if action in _OWNER_SCOPED:
            if resource is None:
                return False
            if getattr(resource, "owner", None) == principal.principal_id:
                return True
            return principal.principal_id in getattr(resource, "shared_with", ())
        return False
    if principal.role == TESTER:
        if action == JOIN_SESSION:
            return principal.principal_id in getattr(resource, "shared_with", ())
        return False
    return False
