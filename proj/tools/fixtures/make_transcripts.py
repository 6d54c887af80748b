"""Writes the recorded-response fixtures used by transcript replay.

There is no live model in the loop here. Responses are authored to look like short chat replies:
mostly the right word in assorted phrasings, some wrong calls, some replies with no usable
keyword, and a few recorded timeouts, so every decide() branch is exercised. Which scenes get
which treatment is fixed below, not random.
"""
import json
import sys
from pathlib import Path

PHRASES = {
    "forward": ["forward", "Forward.", "Path is clear, go straight ahead.", "FORWARD", "Continue forward."],
    "left": ["left", "Left.", "Move left to avoid the obstacle.", "Turn LEFT now.", "Go left; the right side is busy."],
    "right": ["right", "Right.", "Step right around it.", "RIGHT", "Veer right, left is occupied."],
    "stop": ["stop", "STOP", "Stop, both sides are blocked.", "Halt.", "Wait, no safe way through."],
}
OTHER = {"forward": "left", "left": "right", "right": "left", "stop": "forward"}
GIBBERISH = ["I cannot determine a direction from this description.", "Please proceed with caution.", ""]

# scene index -> treatment; anything unlisted is answered correctly.
PLAN = {
    "open": {4: "wrong", 13: "gibberish"},
    "static": {2: "wrong", 9: "timeout", 14: "wrong"},
    "dynamic": {1: "wrong", 6: "gibberish", 11: "wrong", 17: "timeout"},
}


def reply(key, expected, treatment, n):
    latency = 640 + (n * 137) % 900
    if treatment == "timeout":
        return {"key": key, "outcome": "timeout", "latency_ms": 3000}
    if treatment == "gibberish":
        text = GIBBERISH[n % len(GIBBERISH)]
    elif treatment == "wrong":
        text = PHRASES[OTHER[expected]][n % 5]
    else:
        text = PHRASES[expected][n % 5]
    return {"key": key, "text": text, "latency_ms": latency}


def scenario_transcript(labels):
    out = []
    for n, label in enumerate(labels):
        kind, _, index = label["scene_id"].split("-")
        out.append(reply(label["scene_id"], label["expected_command"], PLAN[kind].get(int(index), "ok"), n))
    return {"responses": out}


def replay_transcript(golden_lines):
    out = []
    for n, line in enumerate(golden_lines):
        d = json.loads(line)
        first, last = d["frame_span"]
        treatment = {7: "gibberish", 20: "timeout", 33: "wrong"}.get(n, "ok")
        out.append(reply(f"f{first}-{last}", d["command"], treatment, n))
    return {"responses": out}


def main(data):
    data = Path(data)
    labels = json.loads((data / "scenarios" / "labels.json").read_text())["labels"]
    (data / "transcripts" / "scenarios.json").write_text(json.dumps(scenario_transcript(labels), indent=2) + "\n")
    golden = (data / "golden" / "replay_sample_fallback.ndjson").read_text().splitlines()
    (data / "transcripts" / "replay_sample.json").write_text(json.dumps(replay_transcript(golden), indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
