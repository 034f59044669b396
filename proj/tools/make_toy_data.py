# Copyright 2026 The rsbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes data/toy_ratings.csv: a small movielens-style file with taste clusters."""

import argparse
import csv
import random

N_USERS = 500
N_ITEMS = 240
N_CLUSTERS = 8
BASE_TIME = 1_400_000_000


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/toy_ratings.csv")
    parser.add_argument("--seed", type=int, default=20)
    args = parser.parse_args()
    rng = random.Random(args.seed)

    per_cluster = N_ITEMS // N_CLUSTERS
    # Popularity skew inside each cluster.
    weights = [1.0 / (1 + (i % per_cluster)) ** 0.7 for i in range(N_ITEMS)]
    rows = []
    t = BASE_TIME
    for u in range(N_USERS):
        cluster = u % N_CLUSTERS
        # A handful of users are too sparse to survive a 5-core filter.
        n = rng.randint(2, 4) if u % 50 == 49 else rng.randint(12, 45)
        own = list(range(cluster * per_cluster, (cluster + 1) * per_cluster))
        chosen = set()
        while len(chosen) < n:
            if rng.random() < 0.8:
                item = rng.choices(own, weights=[weights[i] for i in own])[0]
            else:
                item = rng.choices(range(N_ITEMS), weights=weights)[0]
            chosen.add(item)
        for item in sorted(chosen):
            liked = item // per_cluster == cluster
            rating = rng.choice([4.0, 4.5, 5.0, 5.0, 3.5]) if liked else rng.choice(
                [1.0, 2.0, 3.0, 3.5, 4.0])
            t += rng.randint(1, 600)
            rows.append((u + 1, item + 1, rating, t))
    rng.shuffle(rows)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["userId", "movieId", "rating", "timestamp"])
        for r in rows:
            w.writerow([r[0], r[1], f"{r[2]:.1f}", r[3]])


if __name__ == "__main__":
    main()
