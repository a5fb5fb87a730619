import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Protocol

from .client import HarnessClient, HarnessError, TransportError
from .config import AgentConfig


@dataclass
class StepContext:
    step: int
    observation: Dict[str, Any]
    state: Dict[str, Any]
    prompt: Optional[str]
    history: List[Dict[str, Any]]


class Policy(Protocol):
    # set to False to skip fetching /prompt each step
    needs_prompt: bool

    def reply(self, ctx: StepContext) -> str: ...


@dataclass
class Transcript:
    config: Dict[str, Any]
    steps: List[Dict[str, Any]] = field(default_factory=list)
    final_status: Optional[Dict[str, Any]] = None
    aborted: Optional[str] = None

    @property
    def actions_taken(self) -> int:
        return len(self.steps)

    @property
    def terminal(self) -> Optional[str]:
        if self.final_status is None:
            return None
        return self.final_status.get("terminal")

    def lines(self) -> List[Dict[str, Any]]:
        out: List[Dict[str, Any]] = [{"type": "config", **self.config}]
        out += [{"type": "step", **s} for s in self.steps]
        out.append(
            {
                "type": "end",
                "actions_taken": self.actions_taken,
                "final_status": self.final_status,
                "aborted": self.aborted,
            }
        )
        return out

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for line in self.lines():
                f.write(json.dumps(line, sort_keys=True) + "\n")


def run_episode(
    config: AgentConfig,
    policy: Policy,
    client: Optional[HarnessClient] = None,
    transcript_path: Optional[Path] = None,
) -> Transcript:
    """Resets the harness and alternates observe, reply, act until the
    episode ends or `max_steps` replies were posted. Transport failures
    abort the run and keep whatever was exchanged so far."""
    client = client or HarnessClient(config.harness_url, config.timeout_s, config.retries)
    t = Transcript(config=config.public())
    try:
        client.reset(force=config.force_reset, seed=config.seed)
        for step in range(1, config.max_steps + 1):
            status = client.status()
            t.final_status = status["status"]
            if not status["running"]:
                break
            ctx = StepContext(
                step=step,
                observation=client.observation(),
                state=client.state(),
                prompt=client.prompt() if getattr(policy, "needs_prompt", True) else None,
                history=t.steps,
            )
            reply = policy.reply(ctx)
            code, body = client.act(reply)
            t.steps.append(
                {
                    "step": step,
                    "observation": ctx.observation,
                    "prompt": ctx.prompt,
                    "reply": reply,
                    "http_status": code,
                    "response": body,
                }
            )
            if "status" in body:
                t.final_status = body["status"]
            if code == 409:
                break
        else:
            t.final_status = client.status()["status"]
    except TransportError as e:
        t.aborted = f"transport: {e}"
    except HarnessError as e:
        t.aborted = f"harness: {e}"
    if transcript_path is not None:
        t.save(transcript_path)
    return t
