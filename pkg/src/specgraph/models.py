"""Random-graph models and their expectation matrices.

Every model here draws each upper-triangle entry of the adjacency matrix as
an independent Bernoulli with a model-specific success probability P_ij, so
E[A] = P with a zero diagonal.  Sampling is vectorized: constant-probability
blocks are drawn with geometric skip sampling, degree-corrected blocks by
thinning, and dense-P models row by row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

_TSV_FLOAT = "%.17g"


class Graph:
    """Simple undirected weighted graph stored as its strict upper triangle.

    Args:
        n: number of nodes.
        i, j: edge endpoint arrays with i < j entrywise.
        w: edge weights in (0, 1]; freshly sampled graphs have weight 1.0.

    Edges are kept lexicographically sorted by (i, j), which makes equality,
    serialization, and regularization deterministic.
    """

    def __init__(self, n, i, j, w):
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        if not (len(i) == len(j) == len(w)):
            raise ValueError("edge arrays must have equal length")
        if len(i) and (i.min() < 0 or j.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(i >= j):
            raise ValueError("edges must satisfy i < j (no self-loops)")
        order = np.lexsort((j, i))
        self.n = int(n)
        self.i = i[order]
        self.j = j[order]
        self.w = w[order]
        self._csr = None

    @property
    def m(self):
        """Edge count."""
        return len(self.i)

    def degrees(self):
        """Weighted degree vector (row sums of the symmetric adjacency)."""
        d = np.bincount(self.i, weights=self.w, minlength=self.n)
        d += np.bincount(self.j, weights=self.w, minlength=self.n)
        return d

    def adjacency(self):
        """Symmetric CSR adjacency matrix (cached)."""
        if self._csr is None:
            ii = np.concatenate([self.i, self.j])
            jj = np.concatenate([self.j, self.i])
            ww = np.concatenate([self.w, self.w])
            self._csr = sp.csr_matrix((ww, (ii, jj)), shape=(self.n, self.n))
        return self._csr

    def copy(self):
        return Graph(self.n, self.i.copy(), self.j.copy(), self.w.copy())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.i, other.i)
            and np.array_equal(self.j, other.j)
            and np.array_equal(self.w, other.w)
        )

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def to_tsv(self, path):
        """Write the edge list as `i<TAB>j<TAB>weight` with a `# n=<n>` header."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.format_tsv())

    def format_tsv(self):
        lines = [f"# n={self.n}"]
        for a, b, x in zip(self.i, self.j, self.w):
            lines.append(f"{a}\t{b}\t{_TSV_FLOAT % x}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse_tsv(fh.read())

    @classmethod
    def parse_tsv(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("# n="):
            raise ValueError("missing '# n=<n>' header line")
        n = int(lines[0][4:])
        ii, jj, ww = [], [], []
        for ln in lines[1:]:
            parts = ln.split("\t")
            if len(parts) != 3:
                raise ValueError(f"malformed edge line: {ln!r}")
            a, b, x = int(parts[0]), int(parts[1]), float(parts[2])
            if x <= 0:
                raise ValueError(f"edge weight must be positive: {ln!r}")
            ii.append(a)
            jj.append(b)
            ww.append(x)
        return cls(n, ii, jj, ww)


def write_labels(path, labels):
    """One integer label per line, in node-index order."""
    with open(path, "w", encoding="utf-8") as fh:
        for lab in labels:
            fh.write(f"{int(lab)}\n")


def read_labels(path):
    with open(path, "r", encoding="utf-8") as fh:
        return np.array([int(ln) for ln in fh.read().splitlines() if ln.strip()],
                        dtype=np.int64)


# ---------------------------------------------------------------------------
# Model specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ER:
    """Erdos-Renyi G(n, p): every pair connected independently with probability p."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class PlantedPartition:
    """G(n, a/n, b/n): balanced two-community model.

    Within-community pairs connect with probability a/n, across with b/n.
    The first ceil(n/2) nodes form community 1.
    """

    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b must be nonnegative")


@dataclass(frozen=True)
class SBM:
    """Stochastic block model: labels i.i.d. from pi, P(A_ij=1) = B[c_i, c_j]."""

    pi: tuple
    B: tuple

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        B = np.asarray(self.B, dtype=np.float64)
        if pi.ndim != 1 or len(pi) == 0 or np.any(pi < 0):
            raise ValueError("pi must be a nonnegative vector")
        if abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("pi must sum to 1")
        if B.shape != (len(pi), len(pi)):
            raise ValueError("B must be K x K for K = len(pi)")
        if not np.allclose(B, B.T, atol=1e-12):
            raise ValueError("B must be symmetric")
        if B.min() < 0 or B.max() > 1:
            raise ValueError("entries of B must lie in [0, 1]")
        object.__setattr__(self, "pi", tuple(float(x) for x in pi))
        object.__setattr__(self, "B", tuple(tuple(float(x) for x in row) for row in B))

    @property
    def K(self):
        return len(self.pi)


@dataclass(frozen=True)
class DCSBM:
    """Degree-corrected SBM: P(A_ij=1) = theta_i * theta_j * B[c_i, c_j]."""

    pi: tuple
    B: tuple
    theta: tuple

    def __post_init__(self):
        base = SBM(self.pi, self.B)
        object.__setattr__(self, "pi", base.pi)
        object.__setattr__(self, "B", base.B)
        theta = np.asarray(self.theta, dtype=np.float64)
        if theta.ndim != 1 or np.any(theta <= 0):
            raise ValueError("theta must be a positive vector")
        # any label assignment is reachable under i.i.d. pi labels, so the
        # product constraint must hold for the two largest theta values
        # against the largest reachable block probability
        support = np.asarray(base.pi) > 0
        Bmax = np.asarray(base.B)[np.ix_(support, support)].max() if support.any() else 0.0
        top = np.sort(theta)[::-1]
        worst = top[0] * (top[1] if len(top) > 1 else top[0]) * Bmax
        if worst > 1.0 + 1e-12:
            raise ValueError(
                f"theta_i*theta_j*B must be <= 1 for all pairs (worst case {worst:.6g})")
        object.__setattr__(self, "theta", tuple(float(x) for x in theta))

    @property
    def K(self):
        return len(self.pi)


def _kernel_exp(d):
    return np.exp(-d)


KERNELS = {"exp": _kernel_exp}


@dataclass(frozen=True)
class LSM:
    """Latent space model: P_ij = kernel(||x_i - x_j||) for latent positions x.

    The kernel must map distances to [0, 1] and decrease in distance, so closer
    points connect more often.  Named kernels live in KERNELS ("exp" default);
    a custom callable may be supplied instead of a name.
    """

    positions: tuple
    kernel: object = "exp"

    def __post_init__(self):
        X = np.asarray(self.positions, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("positions must be an n x dim array")
        if isinstance(self.kernel, str) and self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        object.__setattr__(self, "positions",
                           tuple(tuple(float(v) for v in row) for row in X))

    def kernel_fn(self):
        return KERNELS[self.kernel] if isinstance(self.kernel, str) else self.kernel


@dataclass(frozen=True)
class IERM:
    """Inhomogeneous Erdos-Renyi: explicit symmetric P with zero diagonal."""

    P: tuple

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError("P must be square")
        if not np.allclose(P, P.T, atol=1e-12):
            raise ValueError("P must be symmetric")
        if P.min() < 0 or P.max() > 1:
            raise ValueError("entries of P must lie in [0, 1]")
        if np.any(np.abs(np.diag(P)) > 0):
            raise ValueError("P must have a zero diagonal")
        object.__setattr__(self, "P", tuple(tuple(float(v) for v in row) for row in P))


# ---------------------------------------------------------------------------
# JSON round trip for model specs
# ---------------------------------------------------------------------------

def model_to_json(spec):
    """Serialize a model spec to a JSON string (see README for the schema)."""
    if isinstance(spec, ER):
        doc = {"model": "er", "p": spec.p}
    elif isinstance(spec, PlantedPartition):
        doc = {"model": "pp", "a": spec.a, "b": spec.b}
    elif isinstance(spec, DCSBM):
        doc = {"model": "dcsbm", "pi": list(spec.pi),
               "B": [list(r) for r in spec.B], "theta": list(spec.theta)}
    elif isinstance(spec, SBM):
        doc = {"model": "sbm", "pi": list(spec.pi), "B": [list(r) for r in spec.B]}
    elif isinstance(spec, LSM):
        if not isinstance(spec.kernel, str):
            raise ValueError("only named kernels serialize to JSON")
        doc = {"model": "lsm", "positions": [list(r) for r in spec.positions],
               "kernel": spec.kernel}
    elif isinstance(spec, IERM):
        doc = {"model": "ierm", "P": [list(r) for r in spec.P]}
    else:
        raise ValueError(f"not a model spec: {spec!r}")
    return json.dumps(doc)


def model_from_json(text):
    doc = json.loads(text)
    kind = doc.get("model")
    if kind == "er":
        return ER(doc["p"])
    if kind == "pp":
        return PlantedPartition(doc["a"], doc["b"])
    if kind == "sbm":
        return SBM(tuple(doc["pi"]), tuple(tuple(r) for r in doc["B"]))
    if kind == "dcsbm":
        return DCSBM(tuple(doc["pi"]), tuple(tuple(r) for r in doc["B"]),
                     tuple(doc["theta"]))
    if kind == "lsm":
        return LSM(tuple(tuple(r) for r in doc["positions"]),
                   doc.get("kernel", "exp"))
    if kind == "ierm":
        return IERM(tuple(tuple(r) for r in doc["P"]))
    raise ValueError(f"unknown model kind {kind!r}")


# ---------------------------------------------------------------------------
# Expectation matrices
# ---------------------------------------------------------------------------

class ExpectedMatrix:
    """P = E[A], either block structured (labels, B, theta) or dense.

    The block form supports O(n*K) matvecs, which is what makes deviation
    norms at n = 1e5 affordable; the dense form covers LSM/IERM.  The diagonal
    is zero in both representations.
    """

    def __init__(self, n, labels=None, B=None, theta=None, dense=None):
        self.n = int(n)
        if dense is not None:
            P = np.array(dense, dtype=np.float64)
            np.fill_diagonal(P, 0.0)
            self._P = P
            self.labels = None
            self.B = None
            self.theta = None
        else:
            self._P = None
            self.labels = np.asarray(labels, dtype=np.int64)
            self.B = np.asarray(B, dtype=np.float64)
            self.theta = (np.ones(self.n) if theta is None
                          else np.asarray(theta, dtype=np.float64))
            if len(self.labels) != self.n or len(self.theta) != self.n:
                raise ValueError("labels/theta length must equal n")
            K = self.B.shape[0]
            if self.labels.min() < 1 or self.labels.max() > K:
                raise ValueError("label out of range for B")

    @classmethod
    def block(cls, labels, B, theta=None):
        return cls(len(labels), labels=labels, B=B, theta=theta)

    @classmethod
    def from_dense(cls, P):
        return cls(len(P), dense=P)

    @property
    def is_block(self):
        return self._P is None

    def matvec(self, x):
        """P @ x without materializing P (block form) or via the dense array."""
        if self._P is not None:
            return self._P @ x
        c = self.labels - 1
        tx = self.theta * x
        sums = np.bincount(c, weights=tx, minlength=self.B.shape[0])
        y = self.theta * (self.B[c] @ sums)
        # remove the diagonal contribution theta_i^2 * B_cc * x_i
        y -= self.theta ** 2 * self.B[c, c] * x
        return y

    def row_sums(self):
        return self.matvec(np.ones(self.n))

    def row_sq_sums(self):
        """Per-row sums of squared entries, sum_{j != i} P_ij^2."""
        if self._P is not None:
            return (self._P ** 2).sum(axis=1)
        c = self.labels - 1
        t2 = np.bincount(c, weights=self.theta ** 2, minlength=self.B.shape[0])
        y = self.theta ** 2 * ((self.B ** 2)[c] @ t2)
        y -= self.theta ** 4 * self.B[c, c] ** 2
        return y

    def entries(self, i, j):
        """P_ij for paired index arrays (i != j assumed)."""
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if self._P is not None:
            return self._P[i, j]
        ci = self.labels[i] - 1
        cj = self.labels[j] - 1
        return self.theta[i] * self.theta[j] * self.B[ci, cj]

    def max_entry(self):
        """Largest off-diagonal entry of P."""
        if self._P is not None:
            return float(self._P.max()) if self.n > 1 else 0.0
        K = self.B.shape[0]
        best = 0.0
        for k in range(K):
            tk = np.sort(self.theta[self.labels == k + 1])[::-1]
            if len(tk) == 0:
                continue
            for l in range(k, K):
                if l == k:
                    if len(tk) >= 2:
                        best = max(best, tk[0] * tk[1] * self.B[k, k])
                else:
                    tl = self.theta[self.labels == l + 1]
                    if len(tl):
                        best = max(best, tk[0] * tl.max() * self.B[k, l])
        return float(best)

    def to_dense(self, limit=4096):
        if self.n > limit:
            raise ValueError(f"refusing to densify n={self.n} > {limit}")
        if self._P is not None:
            return self._P.copy()
        c = self.labels - 1
        P = self.theta[:, None] * self.theta[None, :] * self.B[np.ix_(c, c)]
        np.fill_diagonal(P, 0.0)
        return P


def expected_matrix(spec, labels):
    """E[A] for the given spec conditioned on the given labels."""
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    if isinstance(spec, ER):
        return ExpectedMatrix.block(np.ones(n, dtype=np.int64), [[spec.p]])
    if isinstance(spec, PlantedPartition):
        a, b = spec.a / n, spec.b / n
        if max(a, b) > 1.0:
            raise ValueError("a/n and b/n must be at most 1")
        return ExpectedMatrix.block(labels, [[a, b], [b, a]])
    if isinstance(spec, DCSBM):
        return ExpectedMatrix.block(labels, spec.B, spec.theta)
    if isinstance(spec, SBM):
        return ExpectedMatrix.block(labels, spec.B)
    if isinstance(spec, LSM):
        X = np.asarray(spec.positions)
        if len(X) != n:
            raise ValueError("LSM position count must equal len(labels)")
        diff = X[:, None, :] - X[None, :, :]
        P = spec.kernel_fn()(np.sqrt((diff ** 2).sum(axis=-1)))
        if P.min() < 0 or P.max() > 1:
            raise ValueError("kernel values must lie in [0, 1]")
        return ExpectedMatrix.from_dense(P)
    if isinstance(spec, IERM):
        P = np.asarray(spec.P)
        if len(P) != n:
            raise ValueError("P size must equal len(labels)")
        return ExpectedMatrix.from_dense(P)
    raise ValueError(f"not a model spec: {spec!r}")


def planted_labels(spec, n, rng=None):
    """Labels drawn (or fixed) ahead of edge sampling.

    ER/LSM/IERM have a single community; the planted partition fixes the first
    ceil(n/2) nodes as community 1; SBM/DCSBM labels are i.i.d. from pi.
    """
    if isinstance(spec, (ER, LSM, IERM)):
        return np.ones(n, dtype=np.int64)
    if isinstance(spec, PlantedPartition):
        labels = np.full(n, 2, dtype=np.int64)
        labels[: (n + 1) // 2] = 1
        return labels
    if isinstance(spec, (SBM, DCSBM)):
        if rng is None:
            raise ValueError("SBM/DCSBM labels require an rng")
        cum = np.cumsum(spec.pi)
        cum[-1] = 1.0
        return np.searchsorted(cum, rng.random(n), side="right").astype(np.int64) + 1
    raise ValueError(f"not a model spec: {spec!r}")


def max_expected_degree(spec, n, labels=None):
    """Both expected-degree conventions as a pair (max row sum, n * max entry).

    With labels the result is exact for the conditional P; without labels,
    block models use the population approximation (i.i.d. labels in
    expectation), which is what a caller knows before sampling.
    """
    if labels is not None:
        E = expected_matrix(spec, labels)
        return float(E.row_sums().max()), float(len(labels) * E.max_entry())
    if isinstance(spec, ER):
        return float((n - 1) * spec.p), float(n * spec.p)
    if isinstance(spec, PlantedPartition):
        n1 = (n + 1) // 2
        n2 = n - n1
        a, b = spec.a / n, spec.b / n
        row1 = (n1 - 1) * a + n2 * b
        row2 = (n2 - 1) * a + n1 * b
        return float(max(row1, row2)), float(n * max(a, b))
    if isinstance(spec, SBM):
        pi = np.asarray(spec.pi)
        B = np.asarray(spec.B)
        sup = pi > 0
        rows = n * (B @ pi) - np.diag(B)
        rowmax = rows[sup].max() if sup.any() else 0.0
        entry = B[np.ix_(sup, sup)].max() if sup.any() else 0.0
        return float(rowmax), float(n * entry)
    if isinstance(spec, DCSBM):
        pi = np.asarray(spec.pi)
        B = np.asarray(spec.B)
        theta = np.asarray(spec.theta)
        sup = pi > 0
        T = theta.sum()
        mean_block = B @ pi  # expected B_{k,c_j} over a random neighbor label
        rows = np.outer(theta, mean_block) * (T - theta)[:, None]
        rowmax = rows[:, sup].max() if sup.any() else 0.0
        top = np.sort(theta)[::-1]
        pair = top[0] * (top[1] if len(top) > 1 else top[0])
        entry = pair * (B[np.ix_(sup, sup)].max() if sup.any() else 0.0)
        return float(rowmax), float(n * entry)
    if isinstance(spec, (LSM, IERM)):
        E = expected_matrix(spec, np.ones(
            len(spec.P) if isinstance(spec, IERM) else len(spec.positions),
            dtype=np.int64))
        return float(E.row_sums().max()), float(E.n * E.max_entry())
    raise ValueError(f"not a model spec: {spec!r}")


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _rng(seed):
    # counter-based bit generator so replicate streams can be split cheaply
    return np.random.Generator(np.random.Philox(seed))


def _skip_indices(N, p, rng):
    """Sorted flat indices of Bernoulli(p) successes among N slots.

    Geometric skip sampling: gaps between successes are Geometric(p), so only
    O(N*p) random draws are needed.
    """
    if N <= 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(N, dtype=np.int64)
    if p < 1e-12:
        # geometric gaps overflow int64 once 1/p nears 2^63; the equivalent
        # count-then-place draw stays exact for arbitrarily small p
        k = rng.binomial(N, p)
        return np.sort(rng.choice(N, size=k, replace=False)).astype(np.int64)
    chunks = []
    pos = -1
    while pos < N:
        remaining = N - pos - 1
        size = int(remaining * p * 1.1) + 16
        gaps = rng.geometric(p, size=size)
        idx = pos + np.cumsum(gaps)
        inside = idx[idx < N]
        chunks.append(inside)
        if len(inside) < len(idx):
            break
        pos = int(idx[-1])
    return np.concatenate(chunks)


def _triangle_pairs(flat, m):
    """Map flat indices over the strict upper triangle of an m x m block."""
    ends = np.cumsum(np.arange(m - 1, 0, -1))
    r = np.searchsorted(ends, flat, side="right")
    prev = np.concatenate(([0], ends[:-1]))[r]
    c = r + 1 + (flat - prev)
    return r, c


def _sample_block_model(n, labels, B, theta, rng):
    """Candidate edges per (community, community) block, thinned for theta."""
    K = B.shape[0]
    groups = [np.flatnonzero(labels == k + 1) for k in range(K)]
    out_i, out_j = [], []
    for k in range(K):
        gk = groups[k]
        for l in range(k, K):
            gl = groups[l]
            if len(gk) == 0 or len(gl) == 0 or B[k, l] <= 0.0:
                continue
            if theta is None:
                cap = B[k, l]
            else:
                tk = np.sort(theta[gk])[::-1]
                if k == l:
                    if len(gk) < 2:
                        continue
                    pair = tk[0] * tk[1]
                else:
                    pair = tk[0] * theta[gl].max()
                cap = min(1.0, B[k, l] * pair)
                if cap <= 0.0:
                    continue
            if k == l:
                m = len(gk)
                flat = _skip_indices(m * (m - 1) // 2, cap, rng)
                r, c = _triangle_pairs(flat, m)
                gi, gj = gk[r], gk[c]
            else:
                m1, m2 = len(gk), len(gl)
                flat = _skip_indices(m1 * m2, cap, rng)
                gi, gj = gk[flat // m2], gl[flat % m2]
            if theta is not None and len(gi):
                accept = theta[gi] * theta[gj] * B[k, l] / cap
                keep = rng.random(len(gi)) < accept
                gi, gj = gi[keep], gj[keep]
            if len(gi):
                swap = gi > gj
                gi2 = np.where(swap, gj, gi)
                gj2 = np.where(swap, gi, gj)
                out_i.append(gi2)
                out_j.append(gj2)
    if out_i:
        return np.concatenate(out_i), np.concatenate(out_j)
    return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)


def _sample_dense(P, rng):
    """Row-major upper-triangle Bernoulli draws against a dense P."""
    n = len(P)
    out_i, out_j = [], []
    for r in range(n - 1):
        row = P[r, r + 1:]
        hits = np.flatnonzero(rng.random(n - 1 - r) < row)
        if len(hits):
            out_i.append(np.full(len(hits), r, dtype=np.int64))
            out_j.append(hits + r + 1)
    if out_i:
        return np.concatenate(out_i), np.concatenate(out_j)
    return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)


def sample(spec, n, seed):
    """Draw (Graph, labels) from the model.

    Labels are drawn first (where random), then each upper-triangle entry is
    an independent Bernoulli(P_ij).  Deterministic given (spec, n, seed).
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = _rng(seed)
    labels = planted_labels(spec, n, rng)
    if isinstance(spec, ER):
        flat = _skip_indices(n * (n - 1) // 2, spec.p, rng)
        gi, gj = _triangle_pairs(flat, n)
    elif isinstance(spec, (PlantedPartition, SBM, DCSBM)):
        E = expected_matrix(spec, labels)  # validates probabilities vs n
        theta = E.theta if isinstance(spec, DCSBM) else None
        gi, gj = _sample_block_model(n, labels, E.B, theta, rng)
    else:
        P = expected_matrix(spec, labels).to_dense(limit=16384)
        gi, gj = _sample_dense(P, rng)
    return Graph(n, gi, gj, np.ones(len(gi))), labels
