"""Bearer-token sessions minted at login."""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass


@dataclass(frozen=True)
class Session:
    token: str
    user_id: str
    issued_at_ms: int
    expires_at_ms: int


class SessionManager:
    def __init__(self, ttl_s: float = 8 * 3600, clock=time.time):
        self.ttl_s = ttl_s
        self.clock = clock
        self._sessions: dict[str, Session] = {}

    def issue(self, user_id: str) -> Session:
        now = int(self.clock() * 1000)
        session = Session(
            token=secrets.token_urlsafe(24),
            user_id=user_id,
            issued_at_ms=now,
            expires_at_ms=now + int(self.ttl_s * 1000),
        )
        self._sessions[session.token] = session
        return session

    def resolve(self, token: str) -> Session | None:
        session = self._sessions.get(token)
        if session is None:
            return None
        if session.expires_at_ms <= int(self.clock() * 1000):
            del self._sessions[token]
            return None
        return session
