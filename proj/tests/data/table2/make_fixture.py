#!/usr/bin/env python3
"""Regenerates the Table II fixture: one car with a left/right/left history
that ends with three in-window sign changes, then the five tabulated rows."""
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def trajectory():
    cx = {}
    v = 930.0
    for f in range(0, 290):
        cx[f] = v
    for start, stop, step in [(290, 320, -1.0), (320, 360, 1.0),
                              (360, 410, -1.0), (410, 426, 0.0)]:
        for f in range(start, stop):
            v += step
            cx[f] = v
    for f in range(426, 451):
        cx[f] = 890.0 + 0.6 * (f - 425)
    cx.update({451: 905.0, 452: 904.5, 453: 906.0, 454: 906.0, 455: 909.0})
    for f in range(456, 481):
        cx[f] = 909.0
    cx.update({481: 910.0, 482: 911.0, 483: 912.0, 484: 912.0, 485: 915.0})
    cy = {f: 573.0 for f in cx}
    cy.update({482: 572.0, 485: 579.0})
    return [(f, cx[f], cy[f]) for f in sorted(cx)]


def main():
    with open(HERE / "detections.jsonl", "w", newline="\n") as out:
        for f, x, y in trajectory():
            box = [round(x - 10.0, 6), round(y - 33.0, 6), 20.0, 66.0]
            out.write(json.dumps({"frame": f, "class": "car", "bbox": box,
                                  "conf": 0.9}, separators=(",", ":")) + "\n")
    lane = {"constant": {"left": [0.0, 0.0, 866.0],
                         "right": [0.0, 0.0, 966.0]}}
    with open(HERE / "lane.json", "w", newline="\n") as out:
        json.dump(lane, out, indent=2)
        out.write("\n")


if __name__ == "__main__":
    main()
