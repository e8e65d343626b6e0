"""Gymnasium-style client for the safebench environment server."""

from .remote_env import ENDPOINT_ENV_VAR, RemoteCircleEnv, RemoteEnvError

__all__ = ["ENDPOINT_ENV_VAR", "RemoteCircleEnv", "RemoteEnvError"]
