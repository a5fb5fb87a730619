import json
import os
import socket
import subprocess
from pathlib import Path
from typing import Any, Dict, List

import jsonschema
import pytest

REPO = Path(__file__).resolve().parents[2]
SCHEMA = REPO / "schemas" / "agent_action.schema.json"
BINARY = Path(os.environ.get("DRONEBENCH_BIN", REPO / "target" / "debug" / "dronebench"))

CONFIG = {"image_width": 640, "image_height": 480, "hfov_deg": 90.0, "cruise_altitude": 50.0}


@pytest.fixture(scope="session")
def action_validator():
    with open(SCHEMA, encoding="utf-8") as f:
        schema = json.load(f)
    return jsonschema.Draft202012Validator(schema)


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


class FakeHarness:
    """In-memory stand-in for HarnessClient with a scripted episode."""

    def __init__(self, terminal_after: Dict[str, str] = None, step_limit: int = 25):
        self.terminal_after = terminal_after or {}
        self.step_limit = step_limit
        self.replies: List[str] = []
        self.terminal = "running"
        self.resets: List[Dict[str, Any]] = []

    def _status(self) -> Dict[str, Any]:
        return {"terminal": self.terminal, "steps_used": len(self.replies)}

    def reset(self, force=False, seed=None):
        self.resets.append({"force": force, "seed": seed})
        return {"status": self._status()}

    def status(self):
        return {"running": self.terminal == "running", "status": self._status()}

    def observation(self):
        return {"camera": "front", "regions": [], "tick": len(self.replies), "uav_pose": {"x": 0, "y": 0, "z": 50, "yaw": 0}}

    def state(self):
        return {"uav": {"x": 0.0, "y": 0.0, "z": 50.0, "yaw": 0.0}, "config": CONFIG, "active_camera": "front"}

    def prompt(self):
        return "[dronebench-prompt/1]\nfly somewhere"

    def act(self, reply):
        if self.terminal != "running":
            return 409, {"error": {"code": "episode_not_running", "message": "episode is not running"}}
        self.replies.append(reply)
        name = json.loads(reply).get("action_name")
        if name in self.terminal_after:
            self.terminal = self.terminal_after[name]
        elif len(self.replies) >= self.step_limit:
            self.terminal = "failure"
        return 200, {"tick": len(self.replies), "outcome": {"status": "accepted"}, "status": self._status()}


@pytest.fixture
def harness_server(tmp_path):
    """Starts `dronebench serve` on an ephemeral port; yields (url, log path)."""
    if not BINARY.exists():
        pytest.skip(f"harness binary not built at {BINARY}")

    def start(task: str = "cargo_end_to_end"):
        log = tmp_path / "episode.jsonl"
        env = {**os.environ, "DRONEBENCH_ADDR": "127.0.0.1:0"}
        proc = subprocess.Popen(
            [str(BINARY), "serve", "--task", task, "--log", str(log)],
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
        )
        line = proc.stdout.readline().strip()
        assert line.startswith("listening on "), line
        procs.append(proc)
        return line.removeprefix("listening on "), log

    procs: List[subprocess.Popen] = []
    yield start
    for p in procs:
        p.terminate()
        p.wait(timeout=10)
