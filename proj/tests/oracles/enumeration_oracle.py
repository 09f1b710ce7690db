#!/usr/bin/env python3
"""Exhaustive enumeration oracles for tiny solver instances.

Everything here is brute force over complete assignments, so the numbers it
prints are ground truth for the exact-solver tests:

  * 3x3 floor, one closed room with target area 6: enumerate all 2^9 cell
    labelings, apply the feasibility rules (corridor connectivity via BFS,
    room accessibility), and report the minimum objective and how many
    labelings attain it.
  * 2x2 room tiled by two 2x1 items: enumerate all placements and count the
    distinct cell partitions (unordered) and labeled assignments (ordered).

The frozen output lives in expected_enumeration.json.
"""

import itertools
import json
import sys

from objective_oracle import DEFAULT_WEIGHTS, evaluate, scene_doc, layout_doc


def bfs(start, allowed):
    if start not in allowed:
        return set()
    seen = {start}
    frontier = [start]
    while frontier:
        i, j = frontier.pop()
        for (di, dj) in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            n = (i + di, j + dj)
            if n in allowed and n not in seen:
                seen.add(n)
                frontier.append(n)
    return seen


def corridor_feasible(q_cells, entrance, indoor):
    """Connectivity as the flow constraints state it: either no traversable
    cells at all, or the entrance is traversable, every traversable cell is
    reachable from it, and the supplied flow can exit the grid somewhere."""
    if not q_cells:
        return True
    if entrance not in q_cells:
        return False
    reached = bfs(entrance, q_cells)
    if reached != q_cells:
        return False
    for (i, j) in reached:
        for (di, dj) in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if (i + di, j + dj) not in indoor:
                return True
    return False


def enumerate_3x3():
    scene = scene_doc(
        {
            "width_cells": 3,
            "length_cells": 3,
            "cell_size_m": 1.0,
            "outdoor_cells": [],
            "entrance": [0, 0],
        },
        [
            {
                "id": 1,
                "name": "studio",
                "target_area_cells": 6,
                "open": False,
                "furniture": [],
            }
        ],
        {"privacy_order": [1]},
    )
    indoor = {(i, j) for i in range(3) for j in range(3)}
    entrance = (0, 0)

    best = None
    optima = 0
    feasible = 0
    for bits in itertools.product([0, 1], repeat=9):
        room = {c for c, bit in zip(sorted(indoor), bits) if bit}
        corridor = indoor - room
        if not corridor_feasible(corridor, entrance, indoor):
            continue
        # Closed-room accessibility: some furniture-free room cell must touch
        # a traversable cell. An empty room can never provide one.
        ok = any(
            (i + di, j + dj) in corridor
            for (i, j) in room
            for (di, dj) in ((1, 0), (-1, 0), (0, 1), (0, -1))
        )
        if not ok:
            continue
        feasible += 1
        labels = {c: "corridor" for c in corridor}
        labels.update({c: "room:1" for c in room})
        value = evaluate(scene, layout_doc(scene, labels, []))["total_weighted"]
        if best is None or value < best - 1e-9:
            best = value
            optima = 1
        elif abs(value - best) <= 1e-9:
            optima += 1
    return {
        "feasible_labelings": feasible,
        "optimal_objective": best,
        "optima_count": optima,
        "weights": DEFAULT_WEIGHTS,
    }


def enumerate_tilings():
    room = {(i, j) for i in range(2) for j in range(2)}
    placements = []
    for sigma in (0, 1):
        li, lj = (2, 1) if sigma == 0 else (1, 2)
        for oi in range(0, 3 - li):
            for oj in range(0, 3 - lj):
                cells = frozenset(
                    (oi + a, oj + b) for a in range(li) for b in range(lj)
                )
                if cells <= room:
                    placements.append(cells)
    labeled = 0
    partitions = set()
    for c1 in placements:
        for c2 in placements:
            if not (c1 & c2) and (c1 | c2) == room:
                labeled += 1
                partitions.add(frozenset((c1, c2)))
    return {"labeled_assignments": labeled, "distinct_tilings": len(partitions)}


def main():
    out = {
        "studio_3x3_area6": enumerate_3x3(),
        "two_2x1_in_2x2": enumerate_tilings(),
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
