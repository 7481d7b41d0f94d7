"""Writes data/synthetic_interactions.csv, a reproducible interaction log.

Each row is one session spent on a fixed UI configuration. Engagement rates
follow an additive preference per variable plus noise, so grid3/dark/default/
partial is the single most engaging configuration.
"""

import argparse
import csv
import itertools
import random
from pathlib import Path

LAYOUT = {"list": 0.0, "grid2": 1.5, "grid3": 3.0, "grid4": 2.0, "grid5": 0.5}
THEME = {"light": 0.0, "dark": 1.5}
FONT_SIZE = {"small": 0.0, "default": 1.2, "big": 0.6}
INFORMATION = {"show": 0.4, "partial": 1.0, "hide": 0.0}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("data/synthetic_interactions.csv"))
    parser.add_argument("--seed", type=int, default=20240611)
    parser.add_argument("--per-combo", type=int, default=3)
    parser.add_argument("--extra", type=int, default=40)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    combos = list(itertools.product(LAYOUT, THEME, FONT_SIZE, INFORMATION))
    plan = [c for c in combos for _ in range(args.per_combo)]
    plan += [rng.choice(combos) for _ in range(args.extra)]

    args.out.parent.mkdir(parents=True, exist_ok=True)
    with args.out.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["session", "layout", "theme", "font_size", "information",
                         "clicks", "scrolls", "events", "duration_s"])
        for i, (layout, theme, font, info) in enumerate(plan):
            appeal = LAYOUT[layout] + THEME[theme] + FONT_SIZE[font] + INFORMATION[info]
            duration = rng.uniform(120.0, 600.0)
            minutes = duration / 60.0
            per_minute = 2.0 + appeal + rng.gauss(0.0, 0.15)
            clicks = max(0, round(0.5 * per_minute * minutes))
            scrolls = max(0, round(0.3 * per_minute * minutes))
            events = max(0, round(0.2 * per_minute * minutes))
            writer.writerow([f"s{i:04d}", layout, theme, font, info,
                             clicks, scrolls, events, f"{duration:.1f}"])


if __name__ == "__main__":
    main()
