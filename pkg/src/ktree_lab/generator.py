"""Random k-tree process generator.

The process starts from a complete graph on k+1 vertices and grows one
vertex at a time: each new vertex is joined to all k vertices of a k-clique
drawn uniformly at random from the append-only store of every k-clique
created so far.  Adding a vertex creates exactly k new k-cliques (the
selected clique with one member swapped for the new vertex) and destroys
none, so after growing to n vertices the store holds (n-k-1)*k + (k+1)
cliques.

Performance notes:
  * The store length before step t is k+1+k*t regardless of outcomes, so
    every attachment index can be drawn in one vectorized pass.  numpy's
    ``Generator.integers`` uses Lemire rejection sampling (no modulo bias)
    and consumes the PCG64 stream exactly like the equivalent sequence of
    scalar draws, which keeps ``generate`` bit-compatible with stepping.
  * Store materialization is a numba kernel (pure-python fallback) doing
    O(k) work per added vertex; memory stays linear in k*n.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParameters, MissingHistory, ResourceExhausted

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is installed in normal setups
    def njit(**_kwargs):
        def deco(fn):
            return fn
        return deco

_MASK64 = (1 << 64) - 1

#: Allocation ceiling for a single generation, overridable per call or via
#: the KTREE_LAB_MEMORY_BUDGET environment variable (bytes).
DEFAULT_MEMORY_BUDGET = 8 << 30


def splitmix64(x: int) -> int:
    """One SplitMix64 scramble step; a 64-bit bijection."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def stream_seed(seed: int, index: int) -> int:
    """Seed for an independent RNG stream: splitmix64(seed XOR stream-index).

    Used to give every Monte Carlo trial its own reproducible PCG64 stream.
    """
    return splitmix64((seed ^ index) & _MASK64)


def _rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class ProcessParams:
    """One process instance: tree-likeness k, target size n, PRNG seed."""

    k: int
    n: int
    seed: int

    def __post_init__(self):
        if self.k < 2:
            raise InvalidParameters(
                f"k must be >= 2 (got {self.k}); k=1 degenerates to random recursive trees"
            )
        if self.n < self.k + 1:
            raise InvalidParameters(
                f"n must be >= k+1 = {self.k + 1} (got {self.n}); the process starts from a (k+1)-clique"
            )
        if not 0 <= self.seed <= _MASK64:
            raise InvalidParameters(f"seed must be a 64-bit unsigned integer (got {self.seed})")


def total_cliques_for(k: int, n: int) -> int:
    """Size of the clique store of an n-vertex k-tree: (n-k-1)*k + (k+1)."""
    return (n - k - 1) * k + (k + 1)


def _id_dtype(max_value: int):
    return np.int32 if max_value <= np.iinfo(np.int32).max else np.int64


@njit(cache=True, nogil=True)
def _fill_store(store, attach, k, start):
    # Rows [0, k+1+start*k) are valid; applies attachments start..end.
    # New clique p of step t copies the selected clique and overwrites
    # position p with the new vertex id (creation order, no sorting).
    base = k + 1
    for t in range(start, attach.shape[0]):
        j = attach[t]
        v = base + t
        row = base + t * k
        for p in range(k):
            for c in range(k):
                store[row + p, c] = store[j, c]
            store[row + p, p] = v


class KTree:
    """The evolved graph: clique store, attachment history, derived adjacency.

    Mutable while under construction by a single owner; once grown to
    ``params.n`` vertices the value is effectively immutable (derived views
    are cached) and safe to share across threads.
    """

    def __init__(self, params: ProcessParams, memory_budget_bytes: int | None = None):
        k, n = params.k, params.n
        total = total_cliques_for(k, n)
        id_dt = _id_dtype(n - 1)
        attach_dt = _id_dtype(total - 1)
        budget = _resolve_memory_budget(memory_budget_bytes)
        estimate = _memory_estimate(k, n, total, np.dtype(id_dt).itemsize, np.dtype(attach_dt).itemsize)
        if estimate > budget:
            raise ResourceExhausted(
                f"generating k={k}, n={n} needs ~{estimate / 2**30:.1f} GiB, "
                f"budget is {budget / 2**30:.1f} GiB"
            )
        self.params = params
        self._store = np.empty((total, k), dtype=id_dt)
        self._store[: k + 1] = np.array(
            list(itertools.combinations(range(k + 1), k)), dtype=id_dt
        )
        self._attach = np.empty(n - k - 1, dtype=attach_dt)
        self._steps = 0
        self._degrees = None
        self._edges = None
        self._csr = None

    # -- growth ------------------------------------------------------------

    def _apply_attachments(self, indices: np.ndarray) -> None:
        start = self._steps
        end = start + indices.shape[0]
        if end > self._attach.shape[0]:
            raise InvalidParameters(
                f"cannot grow past the target size n={self.params.n}"
            )
        self._attach[start:end] = indices
        _fill_store(self._store, self._attach[:end], self.params.k, start)
        self._steps = end
        self._degrees = self._edges = self._csr = None

    # -- sizes -------------------------------------------------------------

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def n(self) -> int:
        """Current number of vertices (equals params.n once complete)."""
        return self.params.k + 1 + self._steps

    @property
    def seed(self) -> int:
        return self.params.seed

    @property
    def is_complete(self) -> bool:
        return self.n == self.params.n

    @property
    def clique_count(self) -> int:
        return self.params.k + 1 + self._steps * self.params.k

    @property
    def edge_count(self) -> int:
        k = self.params.k
        return k * (k + 1) // 2 + k * self._steps

    # -- stored history ------------------------------------------------------

    @property
    def clique_store(self) -> np.ndarray:
        """All k-cliques, one row per clique, vertex ids in creation order."""
        return self._store[: self.clique_count]

    @property
    def attachment(self) -> np.ndarray:
        """attachment[t] = clique-store index chosen for vertex k+1+t."""
        return self._attach[: self._steps]

    # -- derived views -------------------------------------------------------

    def degrees(self) -> np.ndarray:
        """Degree of every vertex; vertices start at degree k and gain one
        edge for each later arrival whose selected clique contains them."""
        if self._degrees is not None:
            return self._degrees
        k, n = self.params.k, self.n
        deg = np.full(n, k, dtype=np.int64)
        if self._steps:
            touched = self._store[self.attachment].ravel()
            deg += np.bincount(touched, minlength=n)
        if self.is_complete:
            self._degrees = deg
        return deg

    def degree(self, v: int) -> int:
        return int(self.degrees()[v])

    def edge_array(self) -> np.ndarray:
        """All edges as rows (u, v) with u < v, ascending lexicographic."""
        if self._edges is not None:
            return self._edges
        k, n = self.params.k, self.n
        dt = self._store.dtype
        init = np.array(list(itertools.combinations(range(k + 1), 2)), dtype=dt)
        if self._steps:
            sel = self._store[self.attachment]
            u = sel.ravel()
            v = np.repeat(np.arange(k + 1, n, dtype=dt), k)
            edges = np.concatenate([init, np.column_stack([u, v])])
        else:
            edges = init
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
        if self.is_complete:
            self._edges = edges
        return edges

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency (indptr, neighbors); neighbor lists sorted ascending."""
        if self._csr is not None:
            return self._csr
        csr = _edges_to_csr(self.edge_array(), self.n)
        if self.is_complete:
            self._csr = csr
        return csr

    def neighbors(self, v: int) -> np.ndarray:
        indptr, adj = self.adjacency()
        return adj[indptr[v] : indptr[v + 1]]

    def __repr__(self):
        return (
            f"KTree(k={self.params.k}, n={self.n}/{self.params.n}, "
            f"seed={self.params.seed}, cliques={self.clique_count})"
        )


def _resolve_memory_budget(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("KTREE_LAB_MEMORY_BUDGET")
    return int(env) if env else DEFAULT_MEMORY_BUDGET


def _memory_estimate(k, n, total_cliques, id_bytes, attach_bytes):
    m = n - k - 1
    store = total_cliques * k * id_bytes
    attach = m * (attach_bytes + 8)  # stored indices + the int64 draw buffer
    derived = n * 8 + m * k * id_bytes  # degree counts + one store gather
    return store + attach + derived


def _edges_to_csr(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, dst[order]


# -- process operations ------------------------------------------------------


def new_process(params: ProcessParams, memory_budget_bytes: int | None = None) -> KTree:
    """The process at its start: the complete graph on k+1 vertices, with
    all k+1 of its k-subsets in the clique store and no attachment history."""
    return KTree(params, memory_budget_bytes)


def step(state: KTree, rng: np.random.Generator) -> KTree:
    """Add one vertex: draw a store index uniformly, join the new vertex to
    that clique's k members, append the k derived cliques.  Mutates and
    returns ``state``."""
    if state.is_complete:
        raise InvalidParameters("process already reached its target size")
    idx = rng.integers(0, state.clique_count)
    state._apply_attachments(np.asarray([idx], dtype=np.int64))
    return state


def generate(params: ProcessParams, memory_budget_bytes: int | None = None) -> KTree:
    """Run the full process for ``params``; pure function of (params, seed)."""
    return _generate_with_rng(params, _rng_from_seed(params.seed), memory_budget_bytes)


def _generate_with_rng(params, rng, memory_budget_bytes=None) -> KTree:
    tree = KTree(params, memory_budget_bytes)
    m = params.n - params.k - 1
    if m:
        highs = (params.k + 1) + params.k * np.arange(m, dtype=np.int64)
        tree._apply_attachments(rng.integers(0, highs))
    return tree


@dataclass(frozen=True)
class PartialKTree:
    """A subgraph of a k-tree obtained by thinning attachment edges.

    Exploratory construction: no degree law is asserted for it, the class
    only records what was kept.  ``base`` is the full k-tree it was thinned
    from (useful for width-k tree decompositions, which remain valid for
    any subgraph).
    """

    params: ProcessParams
    b: float
    retained_out_degree: int
    edges: np.ndarray
    base: KTree

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def seed(self) -> int:
        return self.params.seed

    def edge_array(self) -> np.ndarray:
        return self.edges

    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n)
        return deg.astype(np.int64)


def retained_edges_for(b: float, k: int) -> int:
    """Out-edges kept per vertex: round-half-up of b*k."""
    return int(math.floor(b * k + 0.5))


def generate_partial(
    params: ProcessParams, b: float, rng: np.random.Generator | None = None
) -> PartialKTree:
    """Generate a k-tree, then for every vertex added after the initial
    clique delete a uniformly chosen set of k - round(b*k) of its k
    attachment edges.

    Deletion happens after full generation (thinning online would change
    later attachment probabilities and leave the model).  Only attachment
    edges are candidates; edges a vertex later receives from its own
    children are never touched.  By default the deletion draws continue the
    generation stream, so the result is a pure function of (params, b); pass
    ``rng`` to control the deletion stream separately.
    """
    if not 0 < b <= 1:
        raise InvalidParameters(f"b must lie in (0, 1] (got {b})")
    retained = retained_edges_for(b, params.k)
    if retained < 1:
        raise InvalidParameters(f"b={b} with k={params.k} would retain no attachment edges")

    gen_rng = _rng_from_seed(params.seed)
    tree = _generate_with_rng(params, gen_rng)
    del_rng = rng if rng is not None else gen_rng

    k, n = params.k, params.n
    m = n - k - 1
    dt = tree.clique_store.dtype
    init = np.array(list(itertools.combinations(range(k + 1), 2)), dtype=dt)
    if m and retained < k:
        positions = np.tile(np.arange(k), (m, 1))
        kept = del_rng.permuted(positions, axis=1)[:, :retained]
        sel = tree.clique_store[tree.attachment]
        u = sel[np.arange(m)[:, None], kept].ravel()
        v = np.repeat(np.arange(k + 1, n, dtype=dt), retained)
        edges = np.concatenate([init, np.column_stack([u.astype(dt), v])])
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    else:
        edges = tree.edge_array()
    return PartialKTree(params, b, retained, edges, tree)


# -- tree decomposition -------------------------------------------------------


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags of size k+1 arranged in a tree; width = max bag size - 1."""

    bags: np.ndarray        # (num_bags, k+1), each row sorted
    tree_edges: np.ndarray  # (num_bags - 1, 2) bag-index pairs
    width: int

    @property
    def num_bags(self) -> int:
        return self.bags.shape[0]


def build_tree_decomposition(tree: KTree) -> TreeDecomposition:
    """Width-k decomposition read off the attachment history: one bag per
    added vertex (the vertex plus its attachment clique) linked to the bag
    whose creation produced that clique, plus the initial-clique bag."""
    if not isinstance(tree, KTree):
        raise MissingHistory(
            "tree decomposition needs the attachment history of a generated KTree"
        )
    k, n = tree.k, tree.n
    m = n - k - 1
    bags = np.empty((m + 1, k + 1), dtype=tree.clique_store.dtype)
    bags[0] = np.arange(k + 1)
    if m:
        sel = tree.clique_store[tree.attachment]
        bags[1:, :k] = sel
        bags[1:, k] = np.arange(k + 1, n)
        bags[1:] = np.sort(bags[1:], axis=1)
        # clique j < k+1 belongs to the seed graph; clique j >= k+1 was
        # created by the step of vertex k+1 + (j-k-1)//k, i.e. bag index
        # (j-k-1)//k + 1
        attach = tree.attachment.astype(np.int64)
        parents = np.where(attach <= k, 0, (attach - k - 1) // k + 1)
        tree_edges = np.column_stack([np.arange(1, m + 1), parents])
    else:
        tree_edges = np.empty((0, 2), dtype=np.int64)
    return TreeDecomposition(bags=bags, tree_edges=tree_edges, width=k)
