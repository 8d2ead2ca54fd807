"""Regenerates the bundled instances in data/instances.

Each town instance is a square town around the supply origin plus a few
outlying hamlets, with candidate depot sites ringing the town centre.
Output is deterministic.
"""

import json
import math
import random
import sys
from pathlib import Path

MODES = [
    {"name": "VAN", "letter": "V", "speed": 30, "emission_rate": 180, "fixed_cost": 50, "cost_per_km": 0.5, "capacity": 200},
    {"name": "EV", "letter": "E", "speed": 25, "emission_rate": 40, "fixed_cost": 30, "cost_per_km": 0.3, "capacity": 60},
    {"name": "BIKE", "letter": "B", "speed": 15, "emission_rate": 0, "fixed_cost": 15, "cost_per_km": 0.1, "capacity": 25},
    {"name": "WALK", "letter": "W", "speed": 5, "emission_rate": 0, "fixed_cost": 10, "cost_per_km": 0.05, "capacity": 10},
]


def town(seed, city_customers, city_size, hamlets, hamlet_customers, hamlet_distance, hamlet_radius, depots):
    """A square town around the origin plus outlying hamlets; depots ring the town."""
    rng = random.Random(seed)
    customers = []

    def add(x, y):
        customers.append({"id": len(customers) + 1, "x": round(x, 3), "y": round(y, 3), "demand": rng.randint(1, 2)})

    half = city_size / 2
    for _ in range(city_customers):
        add(rng.uniform(-half, half), rng.uniform(-half, half))
    for h in range(hamlets):
        a = 2 * math.pi * (h + rng.uniform(0.2, 0.8)) / hamlets
        hx, hy = hamlet_distance * math.cos(a), hamlet_distance * math.sin(a)
        for _ in range(hamlet_customers):
            t = rng.uniform(0, 2 * math.pi)
            r = hamlet_radius * math.sqrt(rng.uniform(0, 1.0))
            add(hx + r * math.cos(t), hy + r * math.sin(t))
    sites = []
    for d in range(depots):
        a = 2 * math.pi * d / depots
        sites.append({"id": d + 1, "x": round(0.6 * half * math.cos(a), 3), "y": round(0.6 * half * math.sin(a), 3)})
    return {"schema": 1, "origin": {"x": 0, "y": 0}, "customers": customers, "depots": sites, "modes": MODES}


def square4():
    corners = [(0, 0), (1, 0), (1, 1), (0, 1)]
    return {
        "schema": 1,
        "origin": {"x": 0, "y": 0},
        "customers": [{"id": i + 1, "x": x, "y": y} for i, (x, y) in enumerate(corners)],
        "depots": [{"id": 1, "x": 0.5, "y": 0.5}],
        "modes": MODES,
    }


def write(path, doc):
    path.write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "instances"
    out.mkdir(parents=True, exist_ok=True)
    write(out / "square4.json", square4())
    write(out / "town30.json", town(30, 20, 8.0, 2, 5, 30.0, 2.0, 3))
    write(out / "town50.json", town(50, 35, 10.0, 3, 5, 40.0, 2.0, 4))
