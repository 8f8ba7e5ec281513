"""Matrix-free symmetric eigen-computation.

The central object is a SymmetricOperator: a sum of terms, each of the form

    sign * D_s (S + c * P + gamma * 11^T + mu * I) D_s

with S sparse, P a structured ExpectedMatrix, and D_s an optional diagonal
scaling.  That covers every matrix this package cares about: A, A - E[A],
A + (tau/n) 11^T, normalized Laplacians, and differences of Laplacians.

Solvers: power iteration with a two-start agreement certificate for the
spectral norm, and Lanczos with full reorthogonalization for top-k eigenpairs,
with a dense cyclic-Jacobi oracle for testing (independent of LAPACK).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

_DEFAULT_SEED = 0x5EEDED


class NonConvergenceError(RuntimeError):
    """Solver ran out of iterations; carries the best estimate found so far."""

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


@dataclass(frozen=True)
class _Term:
    sign: float = 1.0
    scale: object = None        # diagonal vector applied on both sides, or None
    sparse: object = None       # scipy sparse matrix, or None
    expected: object = None     # ExpectedMatrix, or None
    expected_coef: float = 1.0
    rank_one: float = 0.0       # gamma in gamma * 11^T
    eye: float = 0.0            # mu in mu * I

    def negated(self):
        return _Term(-self.sign, self.scale, self.sparse, self.expected,
                     self.expected_coef, self.rank_one, self.eye)


class SymmetricOperator:
    """Symmetric n x n linear operator represented as a sum of structured terms."""

    def __init__(self, n, terms):
        self.n = int(n)
        self.terms = list(terms)

    @property
    def shape(self):
        return (self.n, self.n)

    @classmethod
    def compose(cls, n, sparse=None, expected=None, expected_coef=1.0,
                rank_one=0.0, eye=0.0, scale=None):
        """Single-term operator sign-positive; see module docstring for the form."""
        if scale is not None:
            scale = np.asarray(scale, dtype=np.float64)
            if len(scale) != n:
                raise ValueError("scale vector length must equal n")
        if sparse is not None:
            sparse = sp.csr_matrix(sparse)
            if sparse.shape != (n, n):
                raise ValueError("sparse part must be n x n")
        return cls(n, [_Term(1.0, scale, sparse, expected, expected_coef,
                             rank_one, eye)])

    @classmethod
    def from_graph(cls, graph):
        return cls.compose(graph.n, sparse=graph.adjacency())

    @classmethod
    def from_matrix(cls, M):
        M = np.asarray(M, dtype=np.float64)
        return cls.compose(M.shape[0], sparse=sp.csr_matrix(M))

    @classmethod
    def centered(cls, graph, expected):
        """A - E[A] with the structured expectation kept matrix-free."""
        return cls.compose(graph.n, sparse=graph.adjacency(),
                           expected=expected, expected_coef=-1.0)

    def __sub__(self, other):
        if not isinstance(other, SymmetricOperator):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("operator size mismatch")
        return SymmetricOperator(self.n, self.terms + [t.negated() for t in other.terms])

    def shifted_negation(self, c):
        """The operator c*I - M, used for smallest-algebraic eigenpairs."""
        terms = [t.negated() for t in self.terms]
        terms.append(_Term(1.0, None, None, None, 1.0, 0.0, float(c)))
        return SymmetricOperator(self.n, terms)

    def matvec(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = np.zeros(self.n)
        for t in self.terms:
            z = t.scale * x if t.scale is not None else x
            acc = np.zeros(self.n)
            if t.sparse is not None:
                acc += t.sparse @ z
            if t.expected is not None:
                acc += t.expected_coef * t.expected.matvec(z)
            if t.rank_one != 0.0:
                acc += t.rank_one * z.sum()
            if t.eye != 0.0:
                acc += t.eye * z
            if t.scale is not None:
                acc *= t.scale
            y += t.sign * acc
        return y

    def to_dense(self, limit=4096):
        """Materialize the operator densely (independent code path from matvec)."""
        if self.n > limit:
            raise ValueError(f"refusing to densify n={self.n} > {limit}")
        M = np.zeros((self.n, self.n))
        for t in self.terms:
            part = np.zeros((self.n, self.n))
            if t.sparse is not None:
                part += t.sparse.toarray()
            if t.expected is not None:
                part += t.expected_coef * t.expected.to_dense(limit=limit)
            if t.rank_one != 0.0:
                part += t.rank_one * np.ones((self.n, self.n))
            if t.eye != 0.0:
                part += t.eye * np.eye(self.n)
            if t.scale is not None:
                part = t.scale[:, None] * part * t.scale[None, :]
            M += t.sign * part
        return M


# ---------------------------------------------------------------------------
# Power iteration
# ---------------------------------------------------------------------------

def spectral_norm(op, tol=1e-7, seed=None, max_iter=None):
    """Estimate max |lambda| by power iteration with an agreement certificate.

    Two independently started runs are advanced in lockstep; each run's norm
    estimate ||M x_k|| is a monotone lower bound, and we stop once both have
    plateaued (per-step increment below 0.02*tol) and agree within tol.

    Raises NonConvergenceError (carrying the best estimate) if the certificate
    is not reached within max_iter iterations.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = op.n
    if max_iter is None:
        max_iter = max(10 * n, 20000)
    rng = np.random.default_rng(_DEFAULT_SEED if seed is None else seed)
    xs = []
    for _ in range(2):
        x = rng.standard_normal(n)
        xs.append(x / np.linalg.norm(x))
    rs = [0.0, 0.0]
    inc = [np.inf, np.inf]
    alive = [True, True]
    for _ in range(max_iter):
        for t in range(2):
            if not alive[t]:
                continue
            y = op.matvec(xs[t])
            r = float(np.linalg.norm(y))
            if r == 0.0 or not np.isfinite(r):
                rs[t] = 0.0 if r == 0.0 else rs[t]
                inc[t] = 0.0
                alive[t] = False
                continue
            inc[t] = (r - rs[t]) / r
            rs[t] = r
            xs[t] = y / r
        scale = max(rs[0], rs[1])
        if scale == 0.0:
            return 0.0
        if max(inc) <= 0.02 * tol and abs(rs[0] - rs[1]) <= tol * scale:
            return scale
    raise NonConvergenceError(
        f"power iteration did not certify within {max_iter} iterations "
        f"(best estimate {max(rs):.12g})", best_estimate=max(rs))


def _norm_upper_estimate(op, seed):
    """Cheap, never-failing overestimate of the spectral radius (for shifting)."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.n)
    x /= np.linalg.norm(x)
    r = 0.0
    for _ in range(60):
        y = op.matvec(x)
        r = np.linalg.norm(y)
        if r == 0.0:
            return 1.0
        x = y / r
    return 1.1 * float(r) + 1.0


# ---------------------------------------------------------------------------
# Lanczos
# ---------------------------------------------------------------------------

def _reorthogonalize(w, Q, m):
    w -= Q[:, :m] @ (Q[:, :m].T @ w)
    return w


def _lanczos_extremes(op, k, need_bottom, need_top, tol, seed, max_basis):
    """Lanczos with full reorthogonalization and random-restart on breakdown.

    Returns (theta, V, m) for the selected extreme Ritz pairs: the k largest,
    k smallest, or both, depending on the flags.  Convergence requires the
    residual estimate beta_m * |s_{m,i}| <= tol * max(1, |theta_i|) for every
    selected pair.  betas[t] links q_t and q_{t+1}; a zero value marks an
    invariant-subspace boundary where the recurrence was restarted with a
    fresh random direction.
    """
    n = op.n
    rng = np.random.default_rng(_DEFAULT_SEED if seed is None else seed)
    max_basis = min(n, max_basis)
    cap = min(max_basis, 64)
    Q = np.zeros((n, cap))
    alphas = np.zeros(max_basis)
    betas = np.zeros(max_basis)
    q = rng.standard_normal(n)
    Q[:, 0] = q / np.linalg.norm(q)
    m = 0
    scale_est = 0.0
    exhausted = False
    while m < max_basis:
        w = op.matvec(Q[:, m])
        alphas[m] = float(Q[:, m] @ w)
        scale_est = max(scale_est, abs(alphas[m]))
        w = _reorthogonalize(w, Q, m + 1)
        w = _reorthogonalize(w, Q, m + 1)
        beta = float(np.linalg.norm(w))
        broke = beta <= 1e-12 * max(1.0, scale_est)
        betas[m] = 0.0 if broke else beta
        m += 1
        if m < max_basis:
            if m == cap:  # grow the basis storage geometrically
                cap = min(max_basis, 2 * cap)
                Q = np.concatenate([Q, np.zeros((n, cap - m))], axis=1)
            if broke:
                fresh = rng.standard_normal(n)
                fresh = _reorthogonalize(fresh, Q, m)
                fresh = _reorthogonalize(fresh, Q, m)
                nf = float(np.linalg.norm(fresh))
                if nf <= 1e-8:
                    exhausted = True  # basis spans the whole space
                else:
                    Q[:, m] = fresh / nf
            else:
                Q[:, m] = w / beta
        last = exhausted or m == max_basis
        if m < k and not last:
            continue
        theta, S = sla.eigh_tridiagonal(alphas[:m], betas[:m - 1])
        scale_est = max(scale_est, float(np.abs(theta).max()))
        sel = []
        if need_bottom:
            sel.extend(range(min(k, m)))
        if need_top:
            sel.extend(range(max(0, m - k), m))
        sel = sorted(set(sel))
        resid = betas[m - 1] * np.abs(S[m - 1, sel])
        if np.all(resid <= tol * np.maximum(1.0, np.abs(theta[sel]))):
            V = Q[:, :m] @ S[:, sel]
            V /= np.linalg.norm(V, axis=0)
            return theta[sel], V, m
        if last:
            break
    raise NonConvergenceError(
        f"Lanczos did not reach residual tolerance {tol} "
        f"with basis size {m}")


_WHICH = ("largest-algebraic", "smallest-algebraic", "largest-magnitude")


def top_eigs(op, k, which="largest-algebraic", tol=1e-8, seed=None, max_basis=None):
    """Top-k eigenpairs of a SymmetricOperator.

    Args:
        op: SymmetricOperator.
        k: number of eigenpairs.
        which: "largest-algebraic", "smallest-algebraic", or "largest-magnitude".
        tol: residual tolerance, ||M v - theta v|| <= tol * max(1, |theta|).
        seed: start-vector seed; eigenvalues are seed-invariant within tol.
        max_basis: Krylov basis cap (default min(n, max(8k + 40, 500))).

    Returns a list of EigenPair sorted per `which` (descending for largest-*,
    ascending for smallest-algebraic).
    """
    if which not in _WHICH:
        raise ValueError(f"which must be one of {_WHICH}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = op.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if max_basis is None:
        max_basis = min(n, max(8 * k + 40, 500))
    if which == "smallest-algebraic":
        # run on c*I - M per the shift construction; same eigenvectors,
        # eigenvalues map theta -> c - theta, largest end <-> smallest end
        c = _norm_upper_estimate(op, _DEFAULT_SEED if seed is None else seed)
        theta, V, _ = _lanczos_extremes(op.shifted_negation(c), k,
                                        need_bottom=False, need_top=True,
                                        tol=tol, seed=seed, max_basis=max_basis)
        vals = c - theta
        order = np.argsort(vals)
    elif which == "largest-algebraic":
        theta, V, _ = _lanczos_extremes(op, k, need_bottom=False, need_top=True,
                                        tol=tol, seed=seed, max_basis=max_basis)
        vals = theta
        order = np.argsort(vals)[::-1]
    else:
        theta, V, _ = _lanczos_extremes(op, k, need_bottom=True, need_top=True,
                                        tol=tol, seed=seed, max_basis=max_basis)
        vals = theta
        order = np.argsort(np.abs(vals))[::-1][:k]
    if len(order) < k or V.shape[1] < k:
        raise NonConvergenceError(
            f"solver produced {V.shape[1]} pairs, needed {k}")
    return [EigenPair(float(vals[i]), V[:, i]) for i in order[:k]]


# ---------------------------------------------------------------------------
# Dense Jacobi oracle
# ---------------------------------------------------------------------------

def dense_eig_oracle(M, max_sweeps=60):
    """Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi.

    Gated to n <= 256; this is the test oracle, deliberately independent of
    both the Lanczos path and LAPACK.  Returns (eigenvalues ascending, V) with
    M = V diag(w) V^T to reconstruction error <= 1e-8 * ||M||.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    n = M.shape[0]
    if n > 256:
        raise ValueError(f"oracle gated to n <= 256, got {n}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if float(np.abs(M - M.T).max(initial=0.0)) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric within 1e-10")
    A = 0.5 * (M + M.T)
    V = np.eye(n)
    fro = float(np.linalg.norm(A))
    if fro == 0.0 or n == 1:
        return np.diag(A).copy(), V
    for _ in range(max_sweeps):
        # direct off-diagonal norm; the sqrt(||A||^2 - ||diag||^2) shortcut
        # cancels catastrophically near convergence
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= 1e-14 * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                diff = A[q, q] - A[p, p]
                if diff == 0.0:
                    t = 1.0
                else:
                    phi = diff / (2.0 * apq)
                    t = np.sign(phi) / (abs(phi) + np.hypot(1.0, phi))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = c * colp - s * colq
                A[:, q] = s * colp + c * colq
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp - s * rowq
                A[q, :] = s * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


if __name__ == "__main__":
    rng = np.random.default_rng(0)
    B = rng.standard_normal((24, 24))
    B = 0.5 * (B + B.T)
    w, V = dense_eig_oracle(B)
    print("oracle reconstruction error:",
          np.linalg.norm(B - V @ np.diag(w) @ V.T) / np.linalg.norm(B))
    op = SymmetricOperator.from_matrix(B)
    print("power-iteration norm vs oracle:",
          spectral_norm(op), np.abs(w).max())
