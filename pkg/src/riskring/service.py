"""HTTP/WebSocket service around one live session.

One session at a time; a background stepper advances simulated time in
real time (scaled by `time_scale` for tests and fast-forward use) while
request handlers and the 2 Hz stream read consistent snapshots under the
session lock.  Commands go through the same lock, so operator input is
serialized with stepping.

All endpoints live under /api/v1.  Errors are structured:
{"error": {"code": ..., "message": ...}} with codes bad_scenario,
no_session, terminal_session, no_ring and bad_command.
"""

from __future__ import annotations

import asyncio
import math
import threading
import time

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from .awareness import ring_to_dict
from .flightdyn import PolicyId
from .scenario import ScenarioFormatError, load_scenario, parse_scenario
from .session import (
    OUTCOME_ONGOING,
    SessionState,
    TerminalSessionError,
    apply_heading_command,
    create_session,
    engage_policy,
    session_step,
)
from .surrogate import load_model_set

API_PREFIX = "/api/v1"
STREAM_PERIOD_S = 0.5  # 2 Hz
STEP_PERIOD_S = 0.05


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


class SessionManager:
    """Owns the single live session and its stepper thread."""

    def __init__(self, time_scale: float = 1.0):
        self.lock = threading.Lock()
        self.session: SessionState | None = None
        self.time_scale = time_scale
        self._stepper: threading.Thread | None = None
        self._stop = threading.Event()

    def load(self, scenario, models) -> None:
        with self.lock:
            self.session = create_session(scenario, models)

    def start(self) -> None:
        with self.lock:
            if self.session is None:
                raise LookupError("no session")
            if self.session.outcome != OUTCOME_ONGOING:
                raise TerminalSessionError(self.session.outcome)
            self.session.paused = False
        if self._stepper is None or not self._stepper.is_alive():
            self._stop.clear()
            self._stepper = threading.Thread(target=self._run, daemon=True)
            self._stepper.start()

    def pause(self) -> None:
        with self.lock:
            if self.session is None:
                raise LookupError("no session")
            self.session.paused = True

    def stop(self) -> None:
        self._stop.set()

    def _run(self) -> None:
        while not self._stop.is_set():
            time.sleep(STEP_PERIOD_S)
            with self.lock:
                s = self.session
                if s is None or s.paused or s.outcome != OUTCOME_ONGOING:
                    continue
                session_step(s, STEP_PERIOD_S * self.time_scale)

    def snapshot(self) -> dict:
        with self.lock:
            s = self.session
            if s is None:
                raise LookupError("no session")
            u = s.uav
            return {
                "clock_s": s.clock_s,
                "outcome": s.outcome,
                "paused": s.paused,
                "uav": {
                    "x_m": u.x_m,
                    "y_m": u.y_m,
                    "z_m": u.z_m,
                    "heading_deg": math.degrees(u.heading_rad),
                    "pitch_deg": math.degrees(u.pitch_rad),
                    "roll_deg": math.degrees(u.roll_rad),
                    "speed_mps": u.speed_mps,
                },
                "commanded_heading_deg": None
                if s.desired_heading_rad is None
                else math.degrees(s.desired_heading_rad),
                "engaged_policy": None if s.engaged_policy is None else s.engaged_policy.name,
                "threats": [
                    {
                        "launch_time_s": t.launch.time_s,
                        "position_m": list(t.launch.position_m),
                        "speed_mps": t.launch.speed_mps,
                        "active": t.missile.active,
                    }
                    for t in s.threats
                ],
                "pending_launches": len(s.pending),
                "ring": None
                if s.ring is None
                else ring_to_dict(s.ring, s.scenario.red_below_m, s.scenario.orange_below_m),
            }


def create_app(time_scale: float = 1.0) -> FastAPI:
    app = FastAPI(title="riskring service", version="1")
    manager = SessionManager(time_scale=time_scale)
    app.state.manager = manager

    @app.post(API_PREFIX + "/scenario")
    async def load(body: dict):
        try:
            if "text" in body:
                scenario = parse_scenario(body["text"])
            elif "path" in body:
                scenario = load_scenario(body["path"])
            else:
                return _error(400, "bad_scenario", "provide 'text' or 'path'")
            if "manifest" in body:
                models = load_model_set(body["manifest"])
            elif scenario.manifest_path is not None:
                models = load_model_set(scenario.manifest_path)
            else:
                return _error(400, "bad_scenario", "no model manifest configured")
        except (ScenarioFormatError, OSError, ValueError, KeyError) as exc:
            return _error(400, "bad_scenario", str(exc))
        manager.load(scenario, models)
        return {"loaded": True, "session": manager.snapshot()}

    @app.post(API_PREFIX + "/session/start")
    async def start():
        try:
            manager.start()
        except LookupError:
            return _error(404, "no_session", "load a scenario first")
        except TerminalSessionError as exc:
            return _error(409, "terminal_session", str(exc))
        return {"running": True, "session": manager.snapshot()}

    @app.post(API_PREFIX + "/session/pause")
    async def pause():
        try:
            manager.pause()
        except LookupError:
            return _error(404, "no_session", "load a scenario first")
        return {"running": False, "session": manager.snapshot()}

    @app.get(API_PREFIX + "/session")
    async def snapshot():
        try:
            return manager.snapshot()
        except LookupError:
            return _error(404, "no_session", "load a scenario first")

    @app.post(API_PREFIX + "/session/command")
    async def command(body: dict):
        with manager.lock:
            s = manager.session
            if s is None:
                return _error(404, "no_session", "load a scenario first")
            try:
                if "heading_deg" in body:
                    apply_heading_command(s, math.radians(float(body["heading_deg"])))
                elif "engage_policy" in body:
                    name = str(body["engage_policy"]).upper()
                    if name == "AUTO":
                        if s.outcome != OUTCOME_ONGOING:
                            raise TerminalSessionError(s.outcome)
                        s.auto_engage = True
                    else:
                        engage_policy(s, PolicyId[name])
                else:
                    return _error(400, "bad_command", "provide heading_deg or engage_policy")
            except TerminalSessionError as exc:
                return _error(409, "terminal_session", str(exc))
            except (KeyError, ValueError) as exc:
                return _error(400, "bad_command", str(exc))
        return manager.snapshot()

    @app.get(API_PREFIX + "/ring")
    async def ring():
        try:
            snap = manager.snapshot()
        except LookupError:
            return _error(404, "no_session", "load a scenario first")
        if snap["ring"] is None:
            return _error(404, "no_ring", "no threat has been observed yet")
        return snap["ring"]

    @app.websocket(API_PREFIX + "/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        last_clock = None
        try:
            while True:
                try:
                    snap = manager.snapshot()
                except LookupError:
                    await ws.send_json({"error": {"code": "no_session", "message": "no session"}})
                    await asyncio.sleep(STREAM_PERIOD_S)
                    continue
                # stream clocks are strictly increasing: a paused or finished
                # session stops producing messages instead of repeating one
                if last_clock is None or snap["clock_s"] > last_clock:
                    last_clock = snap["clock_s"]
                    await ws.send_json(
                        {
                            "clock_s": snap["clock_s"],
                            "uav": snap["uav"],
                            "ring": snap["ring"],
                            "outcome": snap["outcome"],
                            "engaged_policy": snap["engaged_policy"],
                            "commanded_heading_deg": snap["commanded_heading_deg"],
                            "threats": snap["threats"],
                        }
                    )
                await asyncio.sleep(STREAM_PERIOD_S)
        except WebSocketDisconnect:
            return

    return app
