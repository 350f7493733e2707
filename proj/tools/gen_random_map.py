#!/usr/bin/env python3
"""Generate random obstacle maps in the MovingAI .map format.

Blocked cells are sampled uniformly until the requested passable count is
reached and the passable region is a single connected component. The seed is
fixed per map name so the bundled maps under data/maps/ are reproducible.
"""
import argparse
import random
import sys
from collections import deque


def connected(passable, w, h):
    start = next((i for i, p in enumerate(passable) if p), None)
    if start is None:
        return False
    seen = [False] * (w * h)
    seen[start] = True
    q = deque([start])
    count = 1
    while q:
        v = q.popleft()
        x, y = v % w, v // w
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h:
                u = ny * w + nx
                if passable[u] and not seen[u]:
                    seen[u] = True
                    count += 1
                    q.append(u)
    return count == sum(passable)


def generate(w, h, passable_count, seed):
    rng = random.Random(seed)
    blocked_count = w * h - passable_count
    for _ in range(100000):
        cells = list(range(w * h))
        rng.shuffle(cells)
        passable = [True] * (w * h)
        for c in cells[:blocked_count]:
            passable[c] = False
        if connected(passable, w, h):
            return passable
    raise SystemExit("could not find a connected layout")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--width", type=int, required=True)
    ap.add_argument("--height", type=int, required=True)
    ap.add_argument("--passable", type=int, required=True)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    passable = generate(args.width, args.height, args.passable, args.seed)
    with open(args.out, "w") as f:
        f.write("type octile\n")
        f.write(f"height {args.height}\n")
        f.write(f"width {args.width}\n")
        f.write("map\n")
        for y in range(args.height):
            row = "".join(
                "." if passable[y * args.width + x] else "@"
                for x in range(args.width)
            )
            f.write(row + "\n")
    print(f"wrote {args.out}: {sum(passable)} passable cells", file=sys.stderr)


if __name__ == "__main__":
    main()
