import time
from typing import Any, Dict, Optional, Tuple

import requests


class TransportError(RuntimeError):
    """The harness could not be reached within the retry budget."""


class HarnessError(RuntimeError):
    def __init__(self, status: int, body: Any):
        super().__init__(f"harness answered {status}: {body}")
        self.status = status
        self.body = body


class HarnessClient:
    """Thin wrapper over the harness endpoints with bounded retries on
    connection failures. HTTP error statuses are returned, not retried."""

    def __init__(self, base_url: str, timeout_s: float = 10.0, retries: int = 3, backoff_s: float = 0.2):
        self.base_url = base_url.rstrip("/")
        self.timeout_s = timeout_s
        self.retries = retries
        self.backoff_s = backoff_s
        self.session = requests.Session()

    def _request(self, method: str, path: str, **kw: Any) -> requests.Response:
        last: Optional[Exception] = None
        for attempt in range(self.retries):
            try:
                return self.session.request(method, self.base_url + path, timeout=self.timeout_s, **kw)
            except (requests.ConnectionError, requests.Timeout) as e:
                last = e
                if attempt + 1 < self.retries:
                    time.sleep(self.backoff_s * (2**attempt))
        raise TransportError(f"{method} {path}: {last}")

    def _json(self, method: str, path: str, **kw: Any) -> Dict[str, Any]:
        r = self._request(method, path, **kw)
        body = r.json()
        if r.status_code >= 400:
            raise HarnessError(r.status_code, body)
        return body

    def reset(self, force: bool = False, seed: Optional[int] = None) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"force": force}
        if seed is not None:
            payload["seed"] = seed
        return self._json("POST", "/task/reset", json=payload)

    def status(self) -> Dict[str, Any]:
        return self._json("GET", "/task/status")

    def state(self) -> Dict[str, Any]:
        return self._json("GET", "/state")

    def observation(self) -> Dict[str, Any]:
        return self._json("GET", "/observation")

    def image(self) -> Tuple[bytes, Dict[str, Any]]:
        """PPM bytes and the JSON sidecar from /get_image."""
        import json

        r = self._request("GET", "/get_image")
        if r.status_code >= 400:
            raise HarnessError(r.status_code, r.text)
        return r.content, json.loads(r.headers["x-observation"])

    def prompt(self) -> str:
        r = self._request("GET", "/prompt")
        if r.status_code >= 400:
            raise HarnessError(r.status_code, r.text)
        return r.text

    def act(self, reply: str) -> Tuple[int, Dict[str, Any]]:
        """Posts a verbatim reply; rejections come back as (4xx, body)."""
        r = self._request("POST", "/action", data=reply.encode("utf-8"), headers={"content-type": "text/plain"})
        return r.status_code, r.json()
