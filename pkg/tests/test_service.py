import time

import pytest
from fastapi.testclient import TestClient

from riskring.service import create_app

SCENARIO_TEXT = """
format_version = 1
seed = 11

[uav]
altitude_m = 8000
speed_mps = 330
heading_deg = 0

[launch]
time_s = 0
range_km = 75
bearing_deg = 20
altitude_m = 10000
speed_mps = 300

[launch]
time_s = 1
range_km = 78
bearing_deg = 200
altitude_m = 10500
speed_mps = 310

[launch]
time_s = 2
range_km = 70
bearing_deg = 90
altitude_m = 9500
speed_mps = 300
"""


@pytest.fixture()
def client(shared_manifest):
    app = create_app(time_scale=40.0)
    with TestClient(app) as c:
        yield c
    app.state.manager.stop()


def load(client, shared_manifest):
    r = client.post(
        "/api/v1/scenario", json={"text": SCENARIO_TEXT, "manifest": shared_manifest}
    )
    assert r.status_code == 200, r.text
    return r.json()


class TestScenarioLoading:
    def test_load_returns_snapshot(self, client, shared_manifest):
        body = load(client, shared_manifest)
        assert body["loaded"] is True
        assert body["session"]["clock_s"] == 0.0
        assert body["session"]["paused"] is True
        assert body["session"]["outcome"] == "ongoing"

    def test_bad_scenario_is_structured_error(self, client):
        r = client.post("/api/v1/scenario", json={"text": "not a scenario"})
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "bad_scenario"

    def test_no_session_errors(self, client):
        assert client.get("/api/v1/session").json()["error"]["code"] == "no_session"
        assert client.get("/api/v1/ring").json()["error"]["code"] == "no_session"
        r = client.post("/api/v1/session/command", json={"heading_deg": 10})
        assert r.json()["error"]["code"] == "no_session"


class TestLiveSession:
    def test_start_steps_and_produces_ring(self, client, shared_manifest):
        load(client, shared_manifest)
        assert client.get("/api/v1/ring").json()["error"]["code"] == "no_ring"
        client.post("/api/v1/session/start")
        time.sleep(0.5)
        snap = client.get("/api/v1/session").json()
        assert snap["clock_s"] > 0.0
        assert snap["ring"] is not None
        assert len(snap["ring"]["entries"]) == 8
        assert snap["threats"]
        ring = client.get("/api/v1/ring").json()
        assert ring["safest"] in [e["policy"] for e in ring["entries"]]
        client.post("/api/v1/session/pause")
        c1 = client.get("/api/v1/session").json()["clock_s"]
        time.sleep(0.2)
        assert client.get("/api/v1/session").json()["clock_s"] == c1

    def test_heading_command_converges(self, client, shared_manifest):
        load(client, shared_manifest)
        client.post("/api/v1/session/start")
        r = client.post("/api/v1/session/command", json={"heading_deg": 135.0})
        assert r.status_code == 200
        assert r.json()["commanded_heading_deg"] == 135.0
        err0 = None
        for _ in range(12):
            time.sleep(0.25)
            snap = client.get("/api/v1/session").json()
            if snap["outcome"] != "ongoing":
                break
            err = abs((snap["uav"]["heading_deg"] - 135.0 + 180.0) % 360.0 - 180.0)
            if err0 is None:
                err0 = err
            if err < 3.0:
                break
        assert err < err0 or err < 3.0

    def test_engage_policy_command(self, client, shared_manifest):
        load(client, shared_manifest)
        client.post("/api/v1/session/start")
        r = client.post("/api/v1/session/command", json={"engage_policy": "SW"})
        assert r.status_code == 200
        assert r.json()["engaged_policy"] == "SW"

    def test_bad_command(self, client, shared_manifest):
        load(client, shared_manifest)
        r = client.post("/api/v1/session/command", json={"engage_policy": "XX"})
        assert r.status_code == 400
        assert r.json()["error"]["code"] == "bad_command"


class TestStream:
    def test_messages_carry_increasing_clock(self, client, shared_manifest):
        load(client, shared_manifest)
        client.post("/api/v1/session/start")
        clocks = []
        with client.websocket_connect("/api/v1/stream") as ws:
            for _ in range(3):
                msg = ws.receive_json()
                assert "uav" in msg and "outcome" in msg
                clocks.append(msg["clock_s"])
        assert clocks == sorted(clocks)
        assert clocks[-1] > clocks[0]

    def test_stream_carries_ring_payload(self, client, shared_manifest):
        load(client, shared_manifest)
        client.post("/api/v1/session/start")
        time.sleep(0.3)
        with client.websocket_connect("/api/v1/stream") as ws:
            msg = ws.receive_json()
        assert msg["ring"] is not None
        entry = msg["ring"]["entries"][0]
        assert {"policy", "md_m", "category", "extrapolated", "band"} <= set(entry)
