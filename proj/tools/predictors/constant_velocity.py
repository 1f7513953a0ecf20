#!/usr/bin/env python3
"""Constant-velocity predictor speaking the icpnav command protocol.

Reads the observation window JSON on stdin and prints the prediction JSON.
"""
import json
import sys


def main():
    window = json.load(sys.stdin)
    horizon = window["pred_len"]
    rows = []
    for track in window["humans"]:
        last = track[-1]
        if len(track) >= 3:
            vx = (last[0] - track[-3][0]) / 2
            vy = (last[1] - track[-3][1]) / 2
        elif len(track) == 2:
            vx, vy = last[0] - track[-2][0], last[1] - track[-2][1]
        else:
            vx = vy = 0.0
        rows.append([[last[0] + vx * k, last[1] + vy * k] for k in range(1, horizon + 1)])
    json.dump({"predictions": rows}, sys.stdout)


if __name__ == "__main__":
    main()
