import json
from typing import Any, Dict, List, Optional

import requests

from .config import AgentConfig
from .driver import StepContext


class LLMError(RuntimeError):
    pass


class LLMPolicy:
    """Forwards the harness prompt to an OpenAI-compatible chat endpoint and
    returns the model's text untouched; malformed output is the harness's
    business to score."""

    needs_prompt = True

    def __init__(self, config: AgentConfig, session: Optional[requests.Session] = None):
        if not config.model_base_url:
            raise LLMError("the llm policy needs model_base_url")
        self.config = config
        self.session = session or requests.Session()

    def messages(self, ctx: StepContext) -> List[Dict[str, Any]]:
        obs = json.dumps(ctx.observation, sort_keys=True)
        return [{"role": "user", "content": f"{ctx.prompt}\n\nObservation: {obs}"}]

    def reply(self, ctx: StepContext) -> str:
        headers = {"content-type": "application/json"}
        if self.config.api_key:
            headers["authorization"] = f"Bearer {self.config.api_key}"
        url = self.config.model_base_url.rstrip("/") + "/chat/completions"
        body = {"model": self.config.model, "messages": self.messages(ctx)}
        r = self.session.post(url, json=body, headers=headers, timeout=self.config.timeout_s)
        if r.status_code >= 400:
            raise LLMError(f"model endpoint answered {r.status_code}: {r.text[:200]}")
        try:
            return r.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise LLMError(f"unexpected completion payload: {e}") from e
