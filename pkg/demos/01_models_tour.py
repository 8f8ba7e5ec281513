"""Tour of the random-graph models.

Every model is a frozen spec object; `sample(spec, n, seed)` returns a
weighted edge list plus community labels, and `expected_matrix` gives the
matching E[A] without ever materializing an n x n array.
"""

import numpy as np

from specgraph.models import (
    DCSBM,
    ER,
    LSM,
    SBM,
    PlantedPartition,
    Graph,
    expected_matrix,
    max_expected_degree,
    model_to_json,
    sample,
)

n = 400
seed = 20260825

print("=== Erdos-Renyi ===")
spec = ER(6.0 / n)
g, labels = sample(spec, n, seed)
deg = g.degrees()
print(f"n={g.n}  edges={g.m}  mean degree={deg.mean():.3f}  max degree={deg.max():.0f}")
print(f"expected mean degree: {(n - 1) * spec.p:.3f}")

print()
print("=== Planted partition G(n, a/n, b/n) ===")
spec = PlantedPartition(8.0, 2.0)
g, labels = sample(spec, n, seed)
within = g.w[labels[g.i] == labels[g.j]].sum()
print(f"edges={g.m}  within-community={within:.0f}  across={g.m - within:.0f}")
E = expected_matrix(spec, labels)
print(f"E[A] entries: within={E.entries(0, 1):.5f}  across={E.entries(0, n - 1):.5f}")
d_row, d_entry = max_expected_degree(spec, n, labels)
print(f"expected-degree conventions: max row sum={d_row:.3f}  n*max entry={d_entry:.3f}")

print()
print("=== Three-block SBM ===")
B = np.array([[0.30, 0.05, 0.02],
              [0.05, 0.25, 0.04],
              [0.02, 0.04, 0.20]])
spec = SBM(pi=(0.5, 0.3, 0.2), B=B)
g, labels = sample(spec, 300, seed)
sizes = np.bincount(labels)[1:]
print(f"community sizes: {[int(x) for x in sizes]} (target fractions {spec.pi})")

print()
print("=== Degree-corrected SBM ===")
theta = np.tile([0.5, 1.5], 150)
spec = DCSBM(pi=(0.5, 0.5), B=np.array([[0.4, 0.1], [0.1, 0.4]]), theta=theta)
g, _ = sample(spec, 300, seed)
deg = g.degrees()
print(f"mean degree of low-theta nodes : {deg[::2].mean():.3f}")
print(f"mean degree of high-theta nodes: {deg[1::2].mean():.3f}")

print()
print("=== Latent-space model (exp kernel) ===")
rng = np.random.default_rng(seed)
pos = rng.uniform(0, 3, size=(200, 2))
spec = LSM(positions=pos, kernel="exp")
g, _ = sample(spec, 200, seed)
E = expected_matrix(spec, np.ones(200, dtype=np.int64))
print(f"edges={g.m}; nearby pair P={E.entries(0, 1):.4f} "
      f"vs E[m]={sum(E.entries(i, j) for i in range(200) for j in range(i + 1, 200)):.1f}")

print()
print("=== Serialization ===")
doc = model_to_json(PlantedPartition(8.0, 2.0))
print("ModelSpec JSON:", doc)
tsv = g.format_tsv()
round_tripped = Graph.parse_tsv(tsv)
print(f"TSV round trip: {round_tripped == g} ({len(tsv.splitlines())} lines)")
