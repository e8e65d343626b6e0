"""Request/response environment server.

Wire format: newline-delimited JSON, one session per connection. Requests are
``{"v":1,"cmd":"make","config":{…}}``, ``{"v":1,"cmd":"reset","seed":123}``,
``{"v":1,"cmd":"step","action":[dx,dy]}``, plus ``config`` and ``close``.
Responses are ``{"ok":true, …}`` or ``{"ok":false,"code":…,"msg":…}``. A
malformed message earns an error response but never disturbs the environment,
so the next valid request behaves as if it never arrived.
"""

from __future__ import annotations

import json
import socketserver
import sys
import uuid

import numpy as np

from .config import ConfigError, EnvConfig
from .env import Circle2DEnv

PROTOCOL_VERSION = 1

_SPACE = {"type": "box", "low": [-1.0, -1.0], "high": [1.0, 1.0], "shape": [2]}


def _error(code: str, msg: str) -> dict:
    return {"ok": False, "code": code, "msg": msg}


class Session:
    """One environment driven by a sequence of request dicts."""

    def __init__(self, default_config: EnvConfig | None = None):
        self.default_config = default_config
        self.session_id = "s-" + uuid.uuid4().hex[:12]
        self.env: Circle2DEnv | None = None
        self._was_reset = False
        self._seed_rng = np.random.default_rng()

    def handle(self, request) -> tuple[dict, bool]:
        """Process one request; returns (response, close_connection)."""
        if not isinstance(request, dict):
            return _error("bad_request", "request must be a JSON object"), False
        version = request.get("v")
        if version != PROTOCOL_VERSION:
            return (
                _error("unsupported_version", f"expected v={PROTOCOL_VERSION}, got {version!r}"),
                False,
            )
        cmd = request.get("cmd")
        if cmd == "make":
            return self._make(request), False
        if cmd == "reset":
            return self._reset(request), False
        if cmd == "step":
            return self._step(request), False
        if cmd == "config":
            return self._config(), False
        if cmd == "close":
            self.env = None
            return {"ok": True, "closed": True}, True
        return _error("unknown_command", f"unknown cmd {cmd!r}"), False

    def _make(self, request) -> dict:
        if self.env is not None:
            return _error("session_exists", "this session already has an environment")
        doc = request.get("config", {})
        if not isinstance(doc, dict):
            return _error("invalid_config", "config must be a JSON object")
        try:
            if doc:
                config = EnvConfig.from_dict(doc)
            elif self.default_config is not None:
                config = self.default_config
            else:
                config = EnvConfig()
            self.env = Circle2DEnv(config)
        except ConfigError as exc:
            return _error("invalid_config", str(exc))
        return {
            "ok": True,
            "session_id": self.session_id,
            "observation_space": dict(_SPACE),
            "action_space": dict(_SPACE),
        }

    def _reset(self, request) -> dict:
        if self.env is None:
            return _error("no_session", "call make first")
        seed = request.get("seed")
        if seed is None:
            seed = int(self._seed_rng.integers(0, 2**31 - 1))
        elif not isinstance(seed, int) or isinstance(seed, bool):
            return _error("bad_request", "seed must be an integer")
        observation = self.env.reset(seed=seed)
        self._was_reset = True
        return {
            "ok": True,
            "observation": [float(v) for v in observation],
            "seed": seed,
            "env_config_digest": self.env.config.digest(),
        }

    def _step(self, request) -> dict:
        if self.env is None:
            return _error("no_session", "call make first")
        if not self._was_reset:
            return _error("no_episode", "call reset before step")
        if not self.env.episode_active:
            return _error("episode_over", "episode finished; call reset")
        action = request.get("action")
        if (
            not isinstance(action, (list, tuple))
            or len(action) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in action)
        ):
            return _error("invalid_action", "action must be a list of two numbers")
        try:
            result = self.env.step(action)
        except ValueError as exc:
            return _error("invalid_action", str(exc))
        return {
            "ok": True,
            "observation": [float(v) for v in result.observation],
            "reward": float(result.reward),
            "cost": float(result.cost),
            "terminated": result.terminated,
            "truncated": result.truncated,
        }

    def _config(self) -> dict:
        if self.env is None:
            return _error("no_session", "call make first")
        return {"ok": True, "config": self.env.config.to_dict()}


def _respond(session: Session, line: str) -> tuple[str, bool]:
    try:
        request = json.loads(line)
    except json.JSONDecodeError as exc:
        response, close = _error("bad_request", f"not valid JSON: {exc.msg}"), False
    else:
        response, close = session.handle(request)
    return json.dumps(response, separators=(",", ":")), close


class _Handler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        session = Session(self.server.default_config)  # type: ignore[attr-defined]
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            payload, close = _respond(session, line)
            try:
                self.wfile.write(payload.encode("utf-8") + b"\n")
                self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                return
            if close:
                return


class EnvServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0,
                 default_config: EnvConfig | None = None):
        self.default_config = default_config
        super().__init__((host, port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]


def serve_stdio(default_config: EnvConfig | None = None, stdin=None, stdout=None) -> None:
    """Serve a single session over standard input/output (for subprocess use)."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    session = Session(default_config)
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        payload, close = _respond(session, line)
        stdout.write(payload + "\n")
        stdout.flush()
        if close:
            return
