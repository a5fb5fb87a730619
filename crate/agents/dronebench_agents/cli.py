import argparse
import json
import os
import sys
from typing import List, Optional

from .config import AgentConfig
from .driver import run_episode
from .llm import LLMError, LLMPolicy
from .scripted import ScriptedPlan, ScriptedPolicy


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="agent")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="play one episode against a running harness")
    run.add_argument("--harness", help="harness base URL, overrides the config")
    run.add_argument("--policy", choices=["scripted", "llm"], required=True)
    run.add_argument("--config", required=True)
    run.add_argument("--transcript", default="transcript.jsonl")
    args = ap.parse_args(argv)

    try:
        cfg = AgentConfig.from_file(
            args.config,
            harness_url=args.harness,
            model_base_url=os.environ.get("BASE_URL"),
            api_key=os.environ.get("API_KEY"),
        )
    except (OSError, ValueError, TypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if args.policy == "scripted":
        if "waypoint" not in cfg.policy:
            print("error: the scripted policy needs policy.waypoint in the config", file=sys.stderr)
            return 2
        policy = ScriptedPolicy(ScriptedPlan.from_dict(cfg.policy))
    else:
        try:
            policy = LLMPolicy(cfg)
        except LLMError as e:
            print(f"error: {e}", file=sys.stderr)
            return 2

    t = run_episode(cfg, policy, transcript_path=args.transcript)
    print(json.dumps({"actions_taken": t.actions_taken, "terminal": t.terminal, "aborted": t.aborted}))
    if t.aborted:
        return 1
    return 0 if t.terminal == "success" else 3


if __name__ == "__main__":
    sys.exit(main())
