import json
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .driver import StepContext

Region = Dict[str, Any]


@dataclass
class ScriptedPlan:
    waypoint: Tuple[float, float]
    target_class: str = "vessel"
    target_color: Optional[str] = "red"
    arrive_radius: float = 300.0
    # below this horizontal distance the front camera loses the target
    close_range: float = 30.0
    search_turns: int = 3

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ScriptedPlan":
        d = dict(d)
        d["waypoint"] = tuple(d["waypoint"])
        return cls(**d)


def _action(name: str, params: Optional[Dict[str, Any]] = None, analysis: str = "") -> str:
    return json.dumps({"action_name": name, "params": params or {}, "analysis": analysis})


def _center(bbox: List[int]) -> Tuple[float, float]:
    return ((bbox[0] + bbox[2]) / 2.0, (bbox[1] + bbox[3]) / 2.0)


def estimate_ground(region: Region, uav: Dict[str, float], yaw_offset: float, cfg: Dict[str, Any]) -> Tuple[float, float]:
    """World (x, y) of a region seen through a lateral camera, inverting the
    pinhole projection with the reported slant range."""
    w, h = cfg["image_width"], cfg["image_height"]
    f = (w / 2.0) / math.tan(math.radians(cfg["hfov_deg"] / 2.0))
    u, v = _center(region["bbox"])
    a, b = (u - w / 2.0) / f, (h / 2.0 - v) / f
    df = region["range_m"] / math.sqrt(1.0 + a * a + b * b)
    dr = a * df
    hd = math.radians(uav["yaw"] + yaw_offset)
    s, c = math.sin(hd), math.cos(hd)
    return (uav["x"] + df * s + dr * c, uav["y"] + df * c - dr * s)


def estimate_below(region: Region, uav: Dict[str, float], cfg: Dict[str, Any]) -> Tuple[float, float]:
    w, h = cfg["image_width"], cfg["image_height"]
    ppm = (w / 2.0) / (max(uav["z"], 1.0) * math.tan(math.radians(cfg["hfov_deg"] / 2.0)))
    u, v = _center(region["bbox"])
    right, fwd = (u - w / 2.0) / ppm, (h / 2.0 - v) / ppm
    hd = math.radians(uav["yaw"])
    s, c = math.sin(hd), math.cos(hd)
    return (uav["x"] + fwd * s + right * c, uav["y"] + fwd * c - right * s)


YAW_OFFSET = {"front": 0.0, "right": 90.0, "rear": 180.0, "left": 270.0}


class ScriptedPolicy:
    """Reference cargo-delivery baseline: fly to the port, turn until the target
    class shows up, fly over its estimated position, look down and drop."""

    needs_prompt = False

    def __init__(self, plan: ScriptedPlan):
        self.plan = plan
        self.estimate: Optional[Tuple[float, float]] = None
        self.turns = 0

    def _target(self, regions: List[Region]) -> Optional[Region]:
        hits = [
            r
            for r in regions
            if r["class"] == self.plan.target_class
            and (self.plan.target_color is None or r.get("color") == self.plan.target_color)
        ]
        return min(hits, key=lambda r: r["range_m"]) if hits else None

    def reply(self, ctx: StepContext) -> str:
        p = self.plan
        uav = ctx.state["uav"]
        cfg = ctx.state["config"]
        camera = ctx.observation["camera"]
        target = self._target(ctx.observation["regions"])
        wx, wy = p.waypoint
        if self.estimate is None and target is None and math.hypot(uav["x"] - wx, uav["y"] - wy) > p.arrive_radius:
            return _action("fly_to", {"x": wx, "y": wy}, "Destination is known, flying straight there.")

        if camera == "bottom":
            if target is None:
                return _action("switch_camera", {"view": "front"}, "Nothing below, looking ahead again.")
            x0, y0, x1, y1 = target["bbox"]
            if x0 <= cfg["image_width"] / 2.0 < x1 and y0 <= cfg["image_height"] / 2.0 < y1:
                return _action("release_cargo", {}, f"Region {target['index']} is directly below.")
            self.estimate = estimate_below(target, uav, cfg)
            ex, ey = self.estimate
            return _action("fly_to", {"x": round(ex, 2), "y": round(ey, 2)}, "Centering over the target.")

        if target is not None:
            self.estimate = estimate_ground(target, uav, YAW_OFFSET[camera], cfg)
            ex, ey = self.estimate
            if math.hypot(ex - uav["x"], ey - uav["y"]) <= p.close_range:
                return _action("switch_camera", {"view": "bottom"}, "Target is close, checking below.")
            return _action(
                "fly_to",
                {"x": round(ex, 2), "y": round(ey, 2)},
                f"Target in Region {target['index']} at {target['clock_hour']} o'clock.",
            )

        if self.estimate is not None:
            ex, ey = self.estimate
            if math.hypot(ex - uav["x"], ey - uav["y"]) <= p.close_range:
                return _action("switch_camera", {"view": "bottom"}, "Target left the view up close; it should be below.")
            return _action("fly_to", {"x": round(ex, 2), "y": round(ey, 2)}, "Returning to the last sighting.")

        if self.turns < p.search_turns:
            self.turns += 1
            return _action("turn_left", {}, "No target in view, scanning.")
        self.turns = 0
        return _action("fly", {"direction": "forward"}, "Scan found nothing, moving on.")
