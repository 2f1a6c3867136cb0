"""Record a real 3-threat session stream for the console tests.

Runs the service in-process at high time scale, records stream messages,
issues a heading command partway through, and records the convergence.
Output: frontend/test/fixtures/session_stream.json
"""

import json
import os
import time

from fastapi.testclient import TestClient

from riskring.service import create_app

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")
OUT = os.path.join(HERE, "..", "frontend", "test", "fixtures", "session_stream.json")

SCENARIO = """
format_version = 1
seed = 77

[uav]
altitude_m = 8000
speed_mps = 330
heading_deg = 0

[noise]
sigma_rho_m = 100
sigma_tau_s = 1
sigma_eta_deg = 0.1
sigma_beta_m = 100
sigma_nu_mps = 5
sample_count = 64
quantile = 0.1

[launch]
time_s = 0
range_km = 60
bearing_deg = 25
altitude_m = 10000
speed_mps = 300

[launch]
time_s = 1
range_km = 62
bearing_deg = 150
altitude_m = 9500
speed_mps = 310

[launch]
time_s = 2
range_km = 75
bearing_deg = 265
altitude_m = 10500
speed_mps = 295
"""

COMMAND_HEADING_DEG = 135.0


def main() -> None:
    app = create_app(time_scale=8.0)
    messages = []
    command_response = None
    command_at_index = None
    with TestClient(app) as client:
        r = client.post(
            "/api/v1/scenario",
            json={"text": SCENARIO, "manifest": os.path.join(FIXTURES, "models", "manifest.txt")},
        )
        r.raise_for_status()
        client.post("/api/v1/session/start")
        with client.websocket_connect("/api/v1/stream") as ws:
            for i in range(24):
                msg = ws.receive_json()
                messages.append(msg)
                if i == 3:
                    command_at_index = len(messages)
                    response = client.post(
                        "/api/v1/session/command", json={"heading_deg": COMMAND_HEADING_DEG}
                    )
                    command_response = {
                        "status": response.status_code,
                        "body": response.json(),
                    }
                if msg.get("outcome") not in (None, "ongoing"):
                    break
        client.post("/api/v1/session/pause")
    app.state.manager.stop()

    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w") as fh:
        json.dump(
            {
                "scenario_threats": 3,
                "command": {
                    "type": "heading",
                    "heading_deg": COMMAND_HEADING_DEG,
                    "sent_before_message_index": command_at_index,
                    "response": command_response,
                },
                "messages": messages,
            },
            fh,
            indent=1,
        )
    print(f"recorded {len(messages)} stream messages to {OUT}")
    rings = sum(1 for m in messages if m.get("ring"))
    print(f"messages with rings: {rings}; command sent before message {command_at_index}")


if __name__ == "__main__":
    main()
