"""Writes the bundled 50-frame detection log (NDJSON, 5 Hz, 640x480).

A walk down a hallway: a box on the floor drifts from 3 m to 0.6 m dead ahead and is then
stepped around, a trash can waits on the right, a person passes on the left, and a door frame
sits at the top. Boxes carry a little jitter, the box is missed in two frames, and there is one
low-confidence ghost the perception filter should drop.
"""
import json
import random
import sys

FOCAL, W, H = 500.0, 640, 480
PRIORS = {"box": 0.5, "trash can": 0.8, "person": 1.7, "door": 2.0}


def box(label, cx, dist, conf, rng, top=None):
    h = min(0.98, FOCAL * PRIORS[label] / (dist * H))
    half_w = min(0.3, 0.12 / dist) if label != "door" else 0.12
    cx += rng.uniform(-0.01, 0.01)
    y_max = 1.0 if top is None else top + h
    y_min = y_max - h
    bbox = [round(max(0.0, cx - half_w), 4), round(max(0.0, y_min), 4),
            round(min(1.0, cx + half_w), 4), round(min(1.0, y_max), 4)]
    return {"label": label, "bbox": bbox, "confidence": round(conf, 2)}


def main(out):
    rng = random.Random(7)
    lines = []
    for i in range(50):
        t = i * 200
        dets = []
        if i not in (17, 31):
            dist = max(0.6, 3.0 - 0.08 * i) if i < 40 else 0.6
            cx = 0.5 if i < 40 else 0.5 + 0.06 * (i - 39)
            if cx < 0.9:
                dets.append(box("box", cx, dist, 0.82 + rng.uniform(0, 0.1), rng))
        dets.append(box("trash can", 0.83, 1.25 + rng.uniform(-0.03, 0.03), 0.71, rng))
        if 10 <= i < 30:
            dets.append(box("person", 0.12 + 0.005 * (i - 10), 2.6 - 0.05 * (i - 10), 0.9, rng, top=0.18))
        dets.append(box("door", 0.5, 4.5, 0.6, rng, top=0.02))
        if i == 23:
            dets.append({"label": "bicycle", "bbox": [0.05, 0.6, 0.2, 0.9], "confidence": 0.12})
        lines.append(json.dumps({"frame_id": i + 1, "timestamp_ms": t, "image_width_px": W, "image_height_px": H,
                                 "detections": dets}))
    with open(out, "w") as f:
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
