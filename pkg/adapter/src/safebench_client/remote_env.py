"""Remote Circle2D environment speaking the newline-delimited JSON protocol.

The client is a thin relay: every observable field comes verbatim from the
server, with no clipping, scaling, or reward shaping on this side. By default
``step`` returns the SafetyGymnasium-style 6-tuple (observation, reward, cost,
terminated, truncated, info); ``cost_in_info=True`` collapses to the plain
5-tuple Gymnasium convention with the cost only under ``info["cost"]``.
"""

from __future__ import annotations

import json
import os
import socket

import numpy as np

ENDPOINT_ENV_VAR = "SAFEBENCH_SERVER"
PROTOCOL_VERSION = 1


class RemoteEnvError(RuntimeError):
    """Error response from the server; carries the wire error code verbatim."""

    def __init__(self, code: str, msg: str):
        super().__init__(f"{code}: {msg}")
        self.code = code
        self.msg = msg


def _parse_endpoint(endpoint: str) -> tuple[str, int]:
    host, _, port = endpoint.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"endpoint must look like host:port, got {endpoint!r}")
    return host, int(port)


class RemoteCircleEnv:
    """One remote environment session over one TCP connection.

    Not thread-safe: a handle sends at most one request at a time. Use one
    handle per thread or process.
    """

    def __init__(
        self,
        config: dict | None = None,
        endpoint: str | None = None,
        cost_in_info: bool = False,
        timeout: float = 10.0,
    ):
        endpoint = endpoint or os.environ.get(ENDPOINT_ENV_VAR)
        if not endpoint:
            raise ValueError(
                f"no endpoint given and {ENDPOINT_ENV_VAR} is not set"
            )
        host, port = _parse_endpoint(endpoint)
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._file = self._sock.makefile("rw", encoding="utf-8")
        self._closed = False
        self.cost_in_info = cost_in_info

        made = self._rpc({"cmd": "make", "config": dict(config or {})})
        self.session_id = made["session_id"]
        self.observation_space = made["observation_space"]
        self.action_space = made["action_space"]

    def _rpc(self, payload: dict) -> dict:
        if self._closed:
            raise RuntimeError("handle is closed")
        payload = {"v": PROTOCOL_VERSION, **payload}
        try:
            self._file.write(json.dumps(payload) + "\n")
            self._file.flush()
            line = self._file.readline()
        except OSError as exc:
            raise ConnectionError(f"transport failure: {exc}") from exc
        if not line:
            raise ConnectionError("server closed the connection")
        response = json.loads(line)
        if not response.get("ok"):
            raise RemoteEnvError(response.get("code", "unknown"), response.get("msg", ""))
        return response

    def reset(self, seed: int | None = None):
        request: dict = {"cmd": "reset"}
        if seed is not None:
            request["seed"] = int(seed)
        response = self._rpc(request)
        observation = np.asarray(response["observation"], dtype=np.float64)
        info = {
            "seed": response["seed"],
            "env_config_digest": response["env_config_digest"],
        }
        return observation, info

    def step(self, action):
        response = self._rpc(
            {"cmd": "step", "action": [float(action[0]), float(action[1])]}
        )
        observation = np.asarray(response["observation"], dtype=np.float64)
        reward = response["reward"]
        cost = response["cost"]
        terminated = response["terminated"]
        truncated = response["truncated"]
        info = {"cost": cost}
        if self.cost_in_info:
            return observation, reward, terminated, truncated, info
        return observation, reward, cost, terminated, truncated, info

    def config(self) -> dict:
        return self._rpc({"cmd": "config"})["config"]

    def close(self) -> None:
        if self._closed:
            return
        try:
            self._rpc({"cmd": "close"})
        except (ConnectionError, RemoteEnvError):
            pass
        finally:
            self._closed = True
            try:
                self._file.close()
                self._sock.close()
            except OSError:
                pass

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
