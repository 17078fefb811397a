"""The eight scheme graphs and their commitment/certification rules.

Every scheme is an infinite DAG described analytically: out_neighbors(v)
is computed from the vertex id, never from a materialized graph.  On top
of the raw graph each scheme supplies:

    gcommit(n)            the commit vertex for sequence length n
    dock(n)               a vertex set determining gcommit(n)
    gcertify(ls, lt)      path family from gcommit(lt) exposing dock(ls)
    digest_pool(n)        labels to retain for indefinite appending
    certificate_pool(n)   vertices from which prefix certificates derive
    identifier_paths(n)   path family binding Sink(n) to gcommit(n)

Chain schemes (linear, full, skip list, the two antimonotone binary
schemes) live on Chain(n)/Sink(n) vertices; tree schemes (threaded
authentication trees, hypercore, transparency logs) extend the infinite
Merkle tree of Tree(n, k) vertices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .hashing import PrefixAuthError
from .mdag import Path, PathFamily, TableGraph, UnknownVertexError
from .vertices import (
    VertexId,
    VertexKind,
    canonical_sequence,
    chain,
    ct_internal,
    hyper_digest,
    sink,
    tree,
)


class SchemeRangeError(PrefixAuthError):
    """Sequence lengths start at 1."""


# ---------------------------------------------------------------------------
# numeric helpers

def bits(n: int) -> set[int]:
    """Exponents of the binary representation: sum(2^k for k in bits(n)) == n."""
    if n < 0:
        raise ValueError("bits() is defined on naturals")
    return {k for k in range(n.bit_length()) if n >> k & 1}


def ceil_log2(n: int) -> int:
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n - 1).bit_length()


def antimonotone_g(n: int) -> int:
    """The recursion selecting the skip distance of the simple scheme."""
    if n < 1:
        raise ValueError("n must be >= 1")
    while True:
        k = n.bit_length()
        if n == (1 << k) - 1:
            return k
        n -= (1 << (k - 1)) - 1


def antimonotone_f2(n: int) -> int:
    """Skip target of the simple antimonotone binary scheme (may be < 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = n.bit_length()
    if n == (1 << k) - 1:
        return n - ((1 << (k - 1)) + 1)
    return n - (1 << antimonotone_g(n))


def _ternary_vertebra(k: int) -> int:
    return (3**k - 1) // 2


def antimonotone_h(n: int) -> int:
    """The recursion selecting the skip distance of the optimal scheme."""
    if n < 1:
        raise ValueError("n must be >= 1")
    while True:
        k = 1
        while _ternary_vertebra(k) < n:
            k += 1
        if n == _ternary_vertebra(k):
            return k
        n -= _ternary_vertebra(k - 1)


def antimonotone_f3(n: int) -> int:
    """Skip target of the optimal antimonotone binary scheme (may be < 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = 1
    while _ternary_vertebra(k) < n:
        k += 1
    if n == _ternary_vertebra(k):
        return n - (3 ** (k - 1) + 1)
    return n - (_ternary_vertebra(antimonotone_h(n)) + 1)


# ---------------------------------------------------------------------------
# infinite Merkle tree helpers

@dataclass(frozen=True)
class ForestSummary:
    """Roots of the tree forest for the first n leaves; one tree per binary digit."""

    n: int
    roots: tuple[VertexId, ...]
    tree_sizes: tuple[int, ...]


def forest_roots(n: int) -> list[VertexId]:
    """Roots of the forest over leaves 1..n, largest tree first.

    Tree(m, k) covers leaves (m - 2^k, m]; the sizes are the strictly
    decreasing powers of two summing to n.
    """
    if n < 1:
        raise SchemeRangeError("lengths start at 1")
    roots = []
    pos = 0
    for k in sorted(bits(n), reverse=True):
        pos += 1 << k
        roots.append(tree(pos, k))
    return roots


def tree_forest(n: int) -> ForestSummary:
    roots = forest_roots(n)
    return ForestSummary(n, tuple(roots), tuple(1 << r.b for r in roots))


def nextroot(n: int) -> VertexId:
    """Root of the smallest complete subtree containing both leaf 1 and leaf n."""
    c = ceil_log2(n)
    return tree(1 << c, c)


def nextpower(n: int) -> VertexId:
    c = ceil_log2(n)
    return tree(1 << c, 0)


# ---------------------------------------------------------------------------
# scheme base

class SchemeGraph:
    """Contract shared by all schemes; see the module docstring."""

    scheme_id: int
    name: str

    # raw graph -----------------------------------------------------------
    def contains(self, v: VertexId) -> bool:
        raise NotImplementedError

    def is_sink(self, v: VertexId) -> bool:
        if not self.contains(v):
            raise UnknownVertexError(f"no such vertex: {v}")
        return v.kind == VertexKind.SINK

    def out_neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        raise NotImplementedError

    def out_degree(self, v: VertexId) -> int:
        return len(self.out_neighbors(v))

    # scheme rules ----------------------------------------------------------
    def gcommit(self, n: int) -> VertexId:
        raise NotImplementedError

    def dock(self, n: int) -> frozenset[VertexId]:
        raise NotImplementedError

    def gcertify(self, len_s: int, len_t: int) -> PathFamily:
        raise NotImplementedError

    def certificate_pool(self, n: int) -> frozenset[VertexId]:
        raise NotImplementedError

    def digest_pool(self, n: int) -> list[VertexId]:
        raise NotImplementedError

    def identifier_paths(self, n: int) -> PathFamily:
        raise NotImplementedError

    # shared plumbing -------------------------------------------------------
    @staticmethod
    def _check_length(n: int) -> None:
        if n < 1:
            raise SchemeRangeError("lengths start at 1")

    def _check_pair(self, len_s: int, len_t: int) -> None:
        self._check_length(len_s)
        if len_s >= len_t:
            raise SchemeRangeError(f"not a proper prefix: len_s={len_s} >= len_t={len_t}")

    def __repr__(self) -> str:
        return f"<scheme {self.name}>"


# ---------------------------------------------------------------------------
# chain schemes

class ChainScheme(SchemeGraph):
    """Schemes over Chain(n) commit vertices with dock(n) = {gcommit(n)}."""

    def chain_targets(self, n: int) -> list[int]:
        """Chain indices i < n that Chain(n) points to."""
        raise NotImplementedError

    def contains(self, v: VertexId) -> bool:
        return v.kind in (VertexKind.SINK, VertexKind.CHAIN) and v.a >= 1 and v.b == 0

    def out_neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        if not self.contains(v):
            raise UnknownVertexError(f"no such vertex: {v}")
        if v.kind == VertexKind.SINK:
            return ()
        return tuple(canonical_sequence([sink(v.a)] + [chain(i) for i in self.chain_targets(v.a)]))

    def gcommit(self, n: int) -> VertexId:
        self._check_length(n)
        return chain(n)

    def dock(self, n: int) -> frozenset[VertexId]:
        return frozenset({self.gcommit(n)})

    def gcertify(self, len_s: int, len_t: int) -> PathFamily:
        self._check_pair(len_s, len_t)
        return (self.shortest_path(len_t, len_s),)

    def identifier_paths(self, n: int) -> PathFamily:
        self._check_length(n)
        return ((chain(n),),)

    # shortest chain paths, shared by gcertify and the pools ---------------
    #
    # dist-to-target dynamic programming over the descending DAG; the
    # successor of m is its out-neighbor minimizing (distance, index), which
    # makes every path deterministic and recomputable by verifiers.
    _MAX_DIST_CACHE = 64

    def __init__(self) -> None:
        self._dist_cache: dict[int, list[int | None]] = {}

    def _dist_to(self, target: int, up_to: int) -> list[int | None]:
        cached = self._dist_cache.get(target)
        if cached is not None and len(cached) > up_to:
            return cached
        dist: list[int | None] = [None] * (up_to + 1)
        dist[target] = 0
        for m in range(target + 1, up_to + 1):
            best = None
            for i in self.chain_targets(m):
                if i < target:
                    continue
                d = dist[i]
                if d is not None and (best is None or d < best):
                    best = d
            dist[m] = None if best is None else best + 1
        if len(self._dist_cache) >= self._MAX_DIST_CACHE:
            self._dist_cache.pop(next(iter(self._dist_cache)))
        self._dist_cache[target] = dist
        return dist

    def shortest_path(self, source: int, target: int) -> Path:
        """Shortest chain path Chain(source) -> Chain(target), source >= target."""
        if source < target:
            raise SchemeRangeError(f"no path from p{source} up to p{target}")
        if source == target:
            return (chain(source),)
        dist = self._dist_to(target, source)
        if dist[source] is None:
            raise SchemeRangeError(f"p{target} is not reachable from p{source}")
        path = [source]
        m = source
        while m != target:
            m = min(
                (i for i in self.chain_targets(m) if i >= target and dist[i] is not None),
                key=lambda i: (dist[i], i),
            )
            path.append(m)
        return tuple(chain(i) for i in path)


class LinearScheme(ChainScheme):
    """Merkle linked list: Chain(n) -> Chain(n-1)."""

    scheme_id = 1
    name = "linear"

    def chain_targets(self, n: int) -> list[int]:
        return [n - 1] if n >= 2 else []

    def shortest_path(self, source: int, target: int) -> Path:
        if source < target:
            raise SchemeRangeError(f"no path from p{source} up to p{target}")
        return tuple(chain(i) for i in range(source, target - 1, -1))

    def certificate_pool(self, n: int) -> frozenset[VertexId]:
        # the whole truncated graph: every label below n is needed eventually
        self._check_length(n)
        verts = {chain(i) for i in range(1, n + 1)} | {sink(i) for i in range(1, n + 1)}
        return frozenset(verts)

    def digest_pool(self, n: int) -> list[VertexId]:
        self._check_length(n)
        return [chain(n)]


class FullScheme(ChainScheme):
    """An edge from Chain(j) to every Chain(i), i < j; quadratic, for reference only."""

    scheme_id = 2
    name = "full"

    def chain_targets(self, n: int) -> list[int]:
        return list(range(1, n))

    def out_degree(self, v: VertexId) -> int:
        if v.kind == VertexKind.SINK:
            return 0
        return v.a  # n-1 chain edges plus the sink edge

    def gcertify(self, len_s: int, len_t: int) -> PathFamily:
        self._check_pair(len_s, len_t)
        return ((chain(len_t), chain(len_s)),)

    def certificate_pool(self, n: int) -> frozenset[VertexId]:
        self._check_length(n)
        return frozenset({chain(n)})

    def digest_pool(self, n: int) -> list[VertexId]:
        self._check_length(n)
        return [chain(i) for i in range(1, n + 1)]


class SkipListScheme(ChainScheme):
    """Deterministic skip list: Chain(n) -> Chain(n - 2^i) for every 2^i | n."""

    scheme_id = 3
    name = "skiplist"

    def chain_targets(self, n: int) -> list[int]:
        targets = []
        i = 0
        while n % (1 << i) == 0:
            t = n - (1 << i)
            if t >= 1:
                targets.append(t)
            if 1 << i == n:
                break
            i += 1
        return targets

    def certificate_pool(self, n: int) -> frozenset[VertexId]:
        self._check_length(n)
        top = 1 << ceil_log2(n)
        verts = set(self.shortest_path(top, n)) | set(self.shortest_path(n, 1))
        return frozenset(verts)

    def digest_pool(self, n: int) -> list[VertexId]:
        self._check_length(n)
        return canonical_sequence(self.shortest_path(n, 1))


class AntimonotoneScheme(ChainScheme):
    """Linear edges plus one skip edge Chain(n) -> Chain(f(n)) per vertex."""

    # skip-edge preimages of m live below _PREIMAGE_FACTOR * m + 9 for both
    # variants (largest jumps: f2(2^k - 1) ~ m/1 at j ~ 2m+3, f3 vertebrae at
    # j ~ 3m+5), so a bounded scan finds every future reference
    _PREIMAGE_FACTOR = 3

    def __init__(self) -> None:
        super().__init__()
        self._maxpre: dict[int, int] = {}
        self._maxpre_bound = 0
        self._skip_cache: dict[int, int] = {}

    def _skip_formula(self, n: int) -> int:
        raise NotImplementedError

    def skip_target(self, n: int) -> int:
        v = self._skip_cache.get(n)
        if v is None:
            v = self._skip_cache[n] = self._skip_formula(n)
        return v

    def _max_skip_preimage(self, upto: int) -> dict[int, int]:
        bound = self._PREIMAGE_FACTOR * upto + 9
        if self._maxpre_bound < bound:
            for j in range(self._maxpre_bound + 1, bound + 1):
                v = self.skip_target(j)
                if v >= 1:
                    self._maxpre[v] = j
            self._maxpre_bound = bound
        return self._maxpre

    def digest_pool(self, n: int) -> list[VertexId]:
        """Chain(n) plus every Chain(m), m <= n, still referenced by a later
        skip edge.

        The literature's reduced pools (path to the previous vertebra, or
        one maximum per order) are invalid for the literal f2/f3 formulas
        because some skip edges jump over vertebrae; see the antimonotone
        discrepancy report.  This is the direct reading of "all vertices
        whose label impacts the label of any future vertex" and stays
        within floor(log2 n) + 1 entries.
        """
        self._check_length(n)
        mp = self._max_skip_preimage(n)
        return [chain(m) for m in range(1, n + 1) if m == n or mp.get(m, 0) > n]

    def generation(self, n: int) -> int:
        raise NotImplementedError

    def vertebra(self, t: int) -> int:
        """Chain index of the last vertex of generation t."""
        raise NotImplementedError

    def chain_targets(self, n: int) -> list[int]:
        targets = [n - 1] if n >= 2 else []
        f = self.skip_target(n)
        if f >= 1 and f not in targets:
            targets.append(f)
        return targets

    def certificate_pool(self, n: int) -> frozenset[VertexId]:
        self._check_length(n)
        t = self.generation(n)
        if t == 0:
            return frozenset({chain(1)})
        prev = self.vertebra(t - 1)
        verts = (
            set(self.shortest_path(self.vertebra(t), n))
            | set(self.shortest_path(n, prev))
            | set(self.shortest_path(prev, 1))
        )
        return frozenset(verts)


class AntimonotoneSimpleScheme(AntimonotoneScheme):
    scheme_id = 4
    name = "antimonotone-simple"

    def _skip_formula(self, n: int) -> int:
        return antimonotone_f2(n)

    def generation(self, n: int) -> int:
        return n.bit_length() - 1

    def vertebra(self, t: int) -> int:
        return (1 << (t + 1)) - 1


class AntimonotoneOptimalScheme(AntimonotoneScheme):
    scheme_id = 5
    name = "antimonotone-optimal"

    def _skip_formula(self, n: int) -> int:
        return antimonotone_f3(n)

    def generation(self, n: int) -> int:
        t = 0
        while 3 ** (t + 1) <= 2 * n:
            t += 1
        return t

    def vertebra(self, t: int) -> int:
        return _ternary_vertebra(t + 1)

    def max_of_order(self, n: int, order: int) -> int | None:
        """Largest m <= n with antimonotone_h(m) == order, or None.

        Vertices in a window (vertebra(k-1), vertebra(k)) repeat the order
        pattern of the window (0, 3^(k-1)) shifted by vertebra(k-1), which
        gives an O(log n) descent instead of a scan.
        """
        if n < 1:
            return None
        k = 1
        while _ternary_vertebra(k) < n:
            k += 1
        if n == _ternary_vertebra(k):
            if k == order:
                return n
            return self.max_of_order(n - 1, order)
        prev = _ternary_vertebra(k - 1)
        inner = self.max_of_order(n - prev, order)
        if inner is not None:
            return inner + prev
        return self.max_of_order(prev, order)

    def reduced_digest_pool(self, n: int) -> list[VertexId]:
        """The literature's pool: one maximum per order.  Invalid for the
        literal f3 (discrepancy report); kept for the report itself."""
        self._check_length(n)
        pool = []
        order = 1
        while _ternary_vertebra(order) <= n:
            m = self.max_of_order(n, order)
            if m is not None:
                pool.append(chain(m))
            order += 1
        return canonical_sequence(pool)


# ---------------------------------------------------------------------------
# tree schemes

class TreeScheme(SchemeGraph):
    """Schemes built on the infinite Merkle tree of Tree(n, k) vertices."""

    def _valid_tree(self, v: VertexId) -> bool:
        return v.kind == VertexKind.TREE and v.a >= 1 and v.b >= 0 and v.a % (1 << v.b) == 0

    def contains(self, v: VertexId) -> bool:
        if v.kind == VertexKind.SINK:
            return v.a >= 1 and v.b == 0
        return self._valid_tree(v)

    def _tree_children(self, v: VertexId) -> tuple[VertexId, ...]:
        n, k = v.a, v.b
        if k == 0:
            return (sink(n),) + self._leaf_extras(n)
        half = 1 << (k - 1)
        return (tree(n - half, k - 1), tree(n, k - 1))

    def _leaf_extras(self, n: int) -> tuple[VertexId, ...]:
        """Extra out-neighbors of Tree(n, 0) beyond Sink(n)."""
        return ()

    def out_neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        if not self.contains(v):
            raise UnknownVertexError(f"no such vertex: {v}")
        if v.kind == VertexKind.SINK:
            return ()
        return self._tree_children(v)

    def dock(self, n: int) -> frozenset[VertexId]:
        self._check_length(n)
        return frozenset(forest_roots(n))

    def digest_pool(self, n: int) -> list[VertexId]:
        self._check_length(n)
        return forest_roots(n)

    def certificate_pool(self, n: int) -> frozenset[VertexId]:
        self._check_length(n)
        top = nextroot(n)
        verts = set(self.descend_path(top, tree(n, 0))) | set(self.descend_path(top, tree(1, 0)))
        return frozenset(verts)

    @staticmethod
    def descend_path(ancestor: VertexId, target: VertexId) -> Path:
        """The unique tree path from `ancestor` down to `target`.

        Tree(m, k) covers leaves (m - 2^k, m]; the target's range must be
        contained in the ancestor's.
        """
        m, k = ancestor.a, ancestor.b
        a, c = target.a, target.b
        if not (m - (1 << k) < a <= m and c <= k):
            raise SchemeRangeError(f"{target} is not under {ancestor}")
        path = [ancestor]
        cur_m, cur_k = m, k
        while (cur_m, cur_k) != (a, c):
            half = 1 << (cur_k - 1)
            if a <= cur_m - half:
                cur_m = cur_m - half
            cur_k -= 1
            path.append(tree(cur_m, cur_k))
        return tuple(path)

    def _containing_root(self, n: int, target: VertexId) -> VertexId:
        for r in forest_roots(n):
            if r.a - (1 << r.b) < target.a <= r.a:
                return r
        raise SchemeRangeError(f"{target} is not inside the forest of {n}")

    def _commit_prefix(self, n: int, root: VertexId) -> Path:
        """Path from gcommit(n) to the given forest root (inclusive)."""
        raise NotImplementedError

    def _commit_to_vertex(self, n: int, target: VertexId) -> Path:
        root = self._containing_root(n, target)
        prefix = self._commit_prefix(n, root)
        return prefix + self.descend_path(root, target)[1:]

    def gcertify(self, len_s: int, len_t: int) -> PathFamily:
        # the unique paths from gcommit(len_t) ending just before dock(len_s)
        self._check_pair(len_s, len_t)
        paths = set()
        for r in sorted(self.dock(len_s)):
            full = self._commit_to_vertex(len_t, r)
            paths.add(full[:-1])
        return tuple(sorted(paths))

    def identifier_paths(self, n: int) -> PathFamily:
        self._check_length(n)
        return (self._commit_to_vertex(n, tree(n, 0)),)


class TatScheme(TreeScheme):
    """Threaded authentication trees: every leaf vertex threads back to the
    forest roots one step earlier, making it a linking scheme."""

    scheme_id = 6
    name = "tat"

    def __init__(self) -> None:
        self._parents_cache: dict[int, dict[VertexId, VertexId | None]] = {}

    def _leaf_extras(self, n: int) -> tuple[VertexId, ...]:
        # threading to the forest at n-1; threading to the forest at n would
        # create a cycle through the ancestors of (n, 0)
        if n == 1:
            return ()
        return tuple(forest_roots(n - 1))

    def gcommit(self, n: int) -> VertexId:
        self._check_length(n)
        return tree(n, 0)

    def dock(self, n: int) -> frozenset[VertexId]:
        self._check_length(n)
        return frozenset({self.gcommit(n)})

    def _bfs_parents(self, len_t: int) -> dict[VertexId, VertexId | None]:
        cached = self._parents_cache.get(len_t)
        if cached is not None:
            return cached
        source = self.gcommit(len_t)
        parents: dict[VertexId, VertexId | None] = {source: None}
        dq = deque([source])
        while dq:
            v = dq.popleft()
            for w in self.out_neighbors(v):
                if w.kind == VertexKind.SINK or w in parents:
                    continue
                parents[w] = v
                dq.append(w)
        if len(self._parents_cache) >= 4:
            self._parents_cache.pop(next(iter(self._parents_cache)))
        self._parents_cache[len_t] = parents
        return parents

    def gcertify(self, len_s: int, len_t: int) -> PathFamily:
        self._check_pair(len_s, len_t)
        parents = self._bfs_parents(len_t)
        target = self.gcommit(len_s)
        path = [target]
        while parents[path[-1]] is not None:
            path.append(parents[path[-1]])
        return (tuple(reversed(path)),)

    def identifier_paths(self, n: int) -> PathFamily:
        self._check_length(n)
        return ((tree(n, 0),),)


class HypercoreScheme(TreeScheme):
    """A synthetic digest vertex over the forest roots for every length that
    is not a power of two."""

    scheme_id = 7
    name = "hypercore"

    def contains(self, v: VertexId) -> bool:
        if v.kind == VertexKind.HYPER_DIGEST:
            return v.a >= 1 and v.b == 0 and v.a.bit_count() >= 2
        return super().contains(v)

    def out_neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        if v.kind == VertexKind.HYPER_DIGEST:
            if not self.contains(v):
                raise UnknownVertexError(f"no such vertex: {v}")
            return tuple(forest_roots(v.a))
        return super().out_neighbors(v)

    def gcommit(self, n: int) -> VertexId:
        self._check_length(n)
        if n.bit_count() == 1:
            return tree(n, n.bit_length() - 1)
        return hyper_digest(n)

    def _commit_prefix(self, n: int, root: VertexId) -> Path:
        commit = self.gcommit(n)
        if commit == root:
            return (root,)
        return (commit, root)


class CtScheme(TreeScheme):
    """Transparency logs: the forest roots are merged two-smallest-first by a
    chain of fresh binary parents; the last parent is the commit vertex."""

    scheme_id = 8
    name = "ct"

    def contains(self, v: VertexId) -> bool:
        if v.kind == VertexKind.CT_INTERNAL:
            return v.a >= 1 and 1 <= v.b <= v.a.bit_count() - 1
        return super().contains(v)

    def out_neighbors(self, v: VertexId) -> tuple[VertexId, ...]:
        if v.kind == VertexKind.CT_INTERNAL:
            if not self.contains(v):
                raise UnknownVertexError(f"no such vertex: {v}")
            roots = forest_roots(v.a)
            if v.b == 1:
                return tuple(canonical_sequence(roots[-2:]))
            return tuple(canonical_sequence([roots[-(v.b + 1)], ct_internal(v.a, v.b - 1)]))
        return super().out_neighbors(v)

    def gcommit(self, n: int) -> VertexId:
        self._check_length(n)
        r = n.bit_count()
        if r == 1:
            return tree(n, n.bit_length() - 1)
        return ct_internal(n, r - 1)

    def _commit_prefix(self, n: int, root: VertexId) -> Path:
        r = n.bit_count()
        if r == 1:
            return (root,)
        roots = forest_roots(n)
        i = roots.index(root)
        down_to = 1 if i >= r - 2 else r - 1 - i
        prefix = [ct_internal(n, j) for j in range(r - 1, down_to - 1, -1)]
        return tuple(prefix) + (root,)


# ---------------------------------------------------------------------------
# registry and factories

_SCHEMES: dict[str, SchemeGraph] = {}
for _cls in (
    LinearScheme,
    FullScheme,
    SkipListScheme,
    AntimonotoneSimpleScheme,
    AntimonotoneOptimalScheme,
    TatScheme,
    HypercoreScheme,
    CtScheme,
):
    _inst = _cls()
    _SCHEMES[_inst.name] = _inst

SCHEME_NAMES = tuple(_SCHEMES)
SCHEMES_BY_ID = {s.scheme_id: s for s in _SCHEMES.values()}


def get_scheme(ref: str | int) -> SchemeGraph:
    if isinstance(ref, int):
        if ref not in SCHEMES_BY_ID:
            raise PrefixAuthError(f"unknown scheme id {ref}")
        return SCHEMES_BY_ID[ref]
    if ref not in _SCHEMES:
        raise PrefixAuthError(f"unknown scheme {ref!r} (choose from {', '.join(SCHEME_NAMES)})")
    return _SCHEMES[ref]


def all_schemes() -> list[SchemeGraph]:
    return list(_SCHEMES.values())


def linear_graph() -> SchemeGraph:
    return _SCHEMES["linear"]


def full_graph() -> SchemeGraph:
    return _SCHEMES["full"]


def skiplist_graph() -> SchemeGraph:
    return _SCHEMES["skiplist"]


def antimonotone_simple_graph() -> SchemeGraph:
    return _SCHEMES["antimonotone-simple"]


def antimonotone_optimal_graph() -> SchemeGraph:
    return _SCHEMES["antimonotone-optimal"]


def tat_graph() -> SchemeGraph:
    return _SCHEMES["tat"]


def hypercore_graph() -> SchemeGraph:
    return _SCHEMES["hypercore"]


def ct_graph() -> SchemeGraph:
    return _SCHEMES["ct"]


# ---------------------------------------------------------------------------
# truncation

@dataclass(frozen=True)
class TruncatedGraph:
    """The finite graph needed for a sequence of length n: the union of
    everything reachable from gcommit(1..n)."""

    scheme_id: int
    n: int
    vertices: frozenset[VertexId]
    edges: frozenset[tuple[VertexId, VertexId]]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def to_table(self) -> TableGraph:
        adj: dict[VertexId, list[VertexId]] = {v: [] for v in self.vertices}
        for a, b in self.edges:
            adj[a].append(b)
        return TableGraph(adj)


def truncate(scheme: SchemeGraph, n: int) -> TruncatedGraph:
    scheme._check_length(n)
    vertices: set[VertexId] = set()
    edges: set[tuple[VertexId, VertexId]] = set()
    for i in range(1, n + 1):
        stack = [scheme.gcommit(i)]
        while stack:
            v = stack.pop()
            if v in vertices:
                continue
            vertices.add(v)
            for w in scheme.out_neighbors(v):
                edges.add((v, w))
                stack.append(w)
    return TruncatedGraph(scheme.scheme_id, n, frozenset(vertices), frozenset(edges))


# ---------------------------------------------------------------------------
# antimonotone recursive construction and the discrepancy report

def antimonotone_recursive_graph(variant: str, t: int) -> TruncatedGraph:
    """Build the antimonotone graph of the first t generations by the
    recursive-copy construction instead of the f2/f3 formulas.

    One step copies the previous graph (twice for the simple scheme, three
    times for the optimal one), shifts copied skip edges with the copy,
    replaces the skip edges of the copies' spines by an edge to the
    original generation-(t-1) vertebra, and appends the new vertebra with
    its formula edge.  Used only for comparison against the formula-built
    graphs; differences land in the discrepancy report.
    """
    if variant not in ("simple", "optimal"):
        raise PrefixAuthError("variant must be 'simple' or 'optimal'")
    if t > 12:
        raise PrefixAuthError("recursive construction is desk-scale only (t <= 12)")
    copies = 2 if variant == "simple" else 3
    size = (lambda g: (1 << (g + 1)) - 1) if variant == "simple" else (lambda g: _ternary_vertebra(g + 1))
    new_vertebra_target = (
        (lambda g: size(g) - ((1 << g) + 1)) if variant == "simple" else (lambda g: size(g) - (3**g + 1))
    )
    skip: dict[int, int] = {}
    for gen in range(1, t + 1):
        prev = size(gen - 1)
        spine = {size(s) for s in range(gen)}
        for c in range(1, copies):
            offset = c * prev
            for m in range(1, prev + 1):
                if m in spine:
                    skip[m + offset] = prev
                elif m in skip:
                    skip[m + offset] = skip[m] + offset
        v = size(gen)
        f = new_vertebra_target(gen)
        if f >= 1:
            skip[v] = f
    n = size(t)
    vertices = {chain(i) for i in range(1, n + 1)} | {sink(i) for i in range(1, n + 1)}
    edges = {(chain(i), sink(i)) for i in range(1, n + 1)}
    edges |= {(chain(i), chain(i - 1)) for i in range(2, n + 1)}
    edges |= {(chain(m), chain(f)) for m, f in skip.items()}
    scheme_id = 4 if variant == "simple" else 5
    return TruncatedGraph(scheme_id, n, frozenset(vertices), frozenset(edges))


def _pool_determines(scheme: SchemeGraph, u: set[VertexId], v: VertexId) -> bool:
    from . import mdag

    return mdag.determines(scheme, u, v)


@dataclass(frozen=True)
class DiscrepancyEntry:
    entry_id: str
    kind: str
    detail: str

    def as_line(self) -> str:
        return f"{self.entry_id}\t{self.kind}\t{self.detail}"


def antimonotone_discrepancy_report(n_scan: int = 512, t_simple: int = 6, t_optimal: int = 4) -> list[DiscrepancyEntry]:
    """Stable report of every known gap between the antimonotone formulas,
    the stated antimonotonicity property, and the recursive construction."""
    entries: list[DiscrepancyEntry] = []

    def add(kind: str, detail: str) -> None:
        entries.append(DiscrepancyEntry(f"AM{len(entries) + 1:03d}", kind, detail))

    for label, fn in (("f2", antimonotone_f2), ("f3", antimonotone_f3)):
        values = [fn(i) for i in range(1, n_scan + 1)]
        violations = [n for n in range(1, n_scan) if values[n - 1] < values[n]]
        if violations:
            first = ", ".join(
                f"{label}({n})={values[n - 1]} < {label}({n + 1})={values[n]}" for n in violations[:5]
            )
            add(
                f"{label}-antimonotonicity",
                f"{label}(n) >= {label}(m) for n<m fails at {len(violations)} adjacent pairs <= {n_scan}; first: {first}",
            )

    add("f3-vertebra-skip", "f3(13) = 3 skips the previous vertebra p4; literal formula kept")

    simple = antimonotone_simple_graph()
    opt = antimonotone_optimal_graph()
    reductions = (
        ("simple-digest-pool", simple, lambda n: canonical_sequence(simple.shortest_path(n, simple.vertebra(simple.generation(n) - 1))) if simple.generation(n) else [chain(1)], "shortest path to the previous vertebra"),
        ("optimal-digest-pool", opt, opt.reduced_digest_pool, "one maximum per order"),
    )
    for entry_kind, scheme, reduced, desc in reductions:
        broken = []
        for n in range(2, min(n_scan, 128) + 1):
            u = set(reduced(n - 1)) | {sink(n)}
            targets = [scheme.gcommit(n)] + list(reduced(n))
            if not all(_pool_determines(scheme, u, v) for v in targets):
                broken.append(n)
        if broken:
            add(
                entry_kind,
                f"reduced pool ({desc}) fails the append recurrence at {len(broken)} lengths <= {min(n_scan, 128)}"
                f" (first: {broken[:5]}); skip edges jump over vertebrae under the literal formulas, so the"
                f" scheme uses the forward-reference pool instead",
            )
        else:
            add(entry_kind, f"reduced pool ({desc}) passes the append recurrence up to {min(n_scan, 128)}")

    from . import mdag

    for entry_kind, scheme in (("simple-certificate-pool", simple), ("optimal-certificate-pool", opt)):
        n_pairs = min(n_scan, 48)
        closed: dict[int, set[VertexId]] = {}
        bad_pairs = []
        for lt in range(2, n_pairs + 1):
            for ls in range(1, lt):
                for m in (ls, lt):
                    if m not in closed:
                        closed[m] = mdag.closed_out_neighborhood(scheme, scheme.certificate_pool(m))
                u = closed[ls] | closed[lt]
                cover = mdag.closed_out_neighborhood(scheme, mdag.family_vertices(scheme.gcertify(ls, lt)))
                memo: dict[VertexId, bool] = {}
                if not all(mdag.determines(scheme, u, v, memo) for v in cover):
                    bad_pairs.append((ls, lt))
        if bad_pairs:
            add(
                entry_kind,
                f"certificate pools cannot derive gcertify for {len(bad_pairs)} of {n_pairs * (n_pairs - 1) // 2}"
                f" pairs <= {n_pairs} (first: {bad_pairs[:5]}); under the literal formulas the shortest path"
                f" between commit vertices crosses generations whose interiors neither pool visits",
            )
        else:
            add(entry_kind, f"certificate pools derive gcertify for every pair <= {n_pairs}")

    for variant, t_max, scheme in (("simple", t_simple, antimonotone_simple_graph()), ("optimal", t_optimal, antimonotone_optimal_graph())):
        rec = antimonotone_recursive_graph(variant, t_max)
        formula_edges = set()
        for i in range(1, rec.n + 1):
            for w in scheme.out_neighbors(chain(i)):
                formula_edges.add((chain(i), w))
        only_formula = sorted(formula_edges - rec.edges)
        only_recursive = sorted(rec.edges - formula_edges)
        if only_formula or only_recursive:
            def fmt(es):
                shown = ", ".join(f"{a}->{b}" for a, b in es[:8])
                return shown + ("" if len(es) <= 8 else f" (+{len(es) - 8} more)")

            add(
                f"{variant}-recursion-vs-formula",
                f"first {t_max} generations (n={rec.n}): {len(only_formula)} edges only in formula graph"
                f" [{fmt(only_formula)}]; {len(only_recursive)} only in recursive graph [{fmt(only_recursive)}]",
            )
        else:
            add(f"{variant}-recursion-vs-formula", f"first {t_max} generations (n={rec.n}): edge sets identical")
    return entries


# ---------------------------------------------------------------------------
# DOT export

def export_dot(scheme: SchemeGraph, n: int) -> str:
    """Graphviz rendering of the truncated graph: sinks as boxes, commit
    vertices for lengths 1..n highlighted."""
    g = truncate(scheme, n)
    commits = {scheme.gcommit(i) for i in range(1, n + 1)}
    lines = [f'digraph "{scheme.name}_{n}" {{', "  rankdir=RL;"]
    for v in canonical_sequence(g.vertices):
        attrs = [f'label="{v}"']
        if v.kind == VertexKind.SINK:
            attrs.append("shape=box")
        else:
            attrs.append("shape=ellipse")
        if v in commits:
            attrs.append("style=filled")
            attrs.append("fillcolor=lightblue")
        lines.append(f'  "{v}" [{", ".join(attrs)}];')
    for a, b in sorted(g.edges):
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
