"""Brute-force reference checks for every scheme contract claim.

Everything here recomputes results along an independent code path from
the production one: labels via an explicit topological sweep instead of
memoized recursion, reachability and determination on materialized
truncations, and (at desk scale) determination certified by exhaustive
maximal-path enumeration.  Violations are data, not exceptions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

from . import mdag
from .hashing import Hasher, default_hasher
from .mdag import Labeling, Path
from .schemes import SchemeGraph, TruncatedGraph, truncate
from .vertices import VertexId, VertexKind, canonical_sequence, sink


@dataclass
class OracleReport:
    scheme_name: str
    n_range: tuple[int, int]
    violations: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def flag(self, invariant: str, witness: str) -> None:
        self.violations.append((invariant, witness))

    def to_text(self) -> str:
        head = f"oracle {self.scheme_name} n={self.n_range[0]}..{self.n_range[1]}: "
        if self.ok:
            return head + "all checks passed"
        lines = [head + f"{len(self.violations)} violation(s)"]
        lines += [f"  {inv}: {wit}" for inv, wit in self.violations]
        return "\n".join(lines)

    def to_rows(self) -> list[str]:
        """Machine-readable rows: invariant, scheme, range, witness."""
        return [
            f"{inv}\t{self.scheme_name}\t{self.n_range[0]}..{self.n_range[1]}\t{wit}"
            for inv, wit in self.violations
        ]


# ---------------------------------------------------------------------------
# independent label computation

def full_relabel(scheme: SchemeGraph, items: list[bytes], hasher: Hasher | None = None) -> Labeling:
    """Label every vertex of the truncated graph bottom-up in an explicit
    topological order (Kahn), sharing only the hash primitive with the
    production path."""
    if len(items) > 4096:
        raise ValueError("full_relabel is desk-scale only (|items| <= 4096)")
    if not items:
        raise ValueError("length must be >= 1")
    hasher = hasher if hasher is not None else default_hasher()
    g = truncate(scheme, len(items))
    out: dict[VertexId, list[VertexId]] = {v: [] for v in g.vertices}
    indeg: dict[VertexId, int] = {v: 0 for v in g.vertices}
    for a, b in g.edges:
        out[a].append(b)
        indeg[b] += 1
    order: list[VertexId] = [v for v in g.vertices if indeg[v] == 0]
    i = 0
    while i < len(order):
        for w in out[order[i]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
        i += 1
    if len(order) != len(g.vertices):
        raise mdag.CycleError(f"{scheme.name}: truncation at {len(items)} is not acyclic")
    labels: Labeling = {}
    for v in reversed(order):
        if v.kind == VertexKind.SINK:
            payload = items[v.a - 1] if v.a <= len(items) else b""
            labels[v] = hasher.sink_label(payload)
        else:
            labels[v] = hasher.inner_label([labels[w] for w in canonical_sequence(out[v])])
    return labels


def all_maximal_paths(graph, v: VertexId, limit: int = 200_000) -> Iterator[Path]:
    """Every maximal path from v; exponential, for graphs of ~12 vertices."""
    count = 0
    stack: list[list[VertexId]] = [[v]]
    while stack:
        path = stack.pop()
        outs = graph.out_neighbors(path[-1])
        if not outs:
            count += 1
            if count > limit:
                raise ValueError("too many maximal paths")
            yield tuple(path)
        else:
            for w in outs:
                stack.append(path + [w])


def determines_by_enumeration(graph, vertex_set: Iterable[VertexId], v: VertexId) -> bool:
    """Literal reading of determination: every maximal path intersects U."""
    u = set(vertex_set)
    return all(any(x in u for x in path) for path in all_maximal_paths(graph, v))


# ---------------------------------------------------------------------------
# contract checks

def _reachable_in(g: TruncatedGraph, starts: Iterable[VertexId]) -> set[VertexId]:
    out: dict[VertexId, list[VertexId]] = {v: [] for v in g.vertices}
    for a, b in g.edges:
        out[a].append(b)
    seen: set[VertexId] = set()
    stack = list(starts)
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(out.get(x, ()))
    return seen


def _is_acyclic(g: TruncatedGraph) -> bool:
    indeg = {v: 0 for v in g.vertices}
    out: dict[VertexId, list[VertexId]] = {v: [] for v in g.vertices}
    for a, b in g.edges:
        out[a].append(b)
        indeg[b] += 1
    queue = [v for v in g.vertices if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == len(g.vertices)


def check_tpag_contract(scheme: SchemeGraph, n_max: int, pair_cap: int | None = None) -> OracleReport:
    """Check the graph-shape half of the contract for every n <= n_max:
    acyclicity, sinks, tight commitment, dock determination, gcertify path
    validity and dock coverage, identifier-path coverage, and that every
    edge descends in canonical order (which verify relies on)."""
    if n_max > 512:
        raise ValueError("contract checks are desk-scale only (n_max <= 512)")
    report = OracleReport(scheme.name, (1, n_max))
    g = truncate(scheme, n_max)
    if not _is_acyclic(g):
        report.flag("acyclicity", f"topological sort failed on truncation at {n_max}")
        return report
    for a, b in g.edges:
        if not b < a:
            report.flag("descending-edges", f"edge {a} -> {b} does not descend in canonical order")
    sinks_seen = {v.a for v in g.vertices if v.kind == VertexKind.SINK}
    if sinks_seen != set(range(1, n_max + 1)):
        report.flag("sinks", f"sinks of truncation != 1..{n_max}: {sorted(sinks_seen)[:8]}...")
    for i in range(1, n_max + 1):
        if scheme.out_neighbors(sink(i)) != ():
            report.flag("sinks", f"Sink({i}) has out-neighbors")

    for n in range(1, n_max + 1):
        commit = scheme.gcommit(n)
        first_n = {sink(i) for i in range(1, n + 1)}
        reach = mdag.reachable(scheme, [commit])
        reached_sinks = {v for v in reach if v.kind == VertexKind.SINK}
        if reached_sinks != first_n:
            report.flag("tight-commitment", f"n={n}: reachable sinks are not exactly 1..{n}")
        elif not mdag.determines(scheme, first_n, commit):
            report.flag("tight-commitment", f"n={n}: sinks 1..{n} do not determine {commit}")
        if not mdag.determines(scheme, scheme.dock(n), commit):
            report.flag("dock", f"n={n}: dock does not determine {commit}")
        fam = scheme.identifier_paths(n)
        if not _family_valid(scheme, fam, commit):
            report.flag("identifier-paths", f"n={n}: family is not edge-valid from {commit}")
        elif sink(n) not in mdag.closed_out_neighborhood(scheme, mdag.family_vertices(fam)):
            report.flag("identifier-paths", f"n={n}: Sink({n}) not in the closed out-neighborhood")

        pool_prev = set(scheme.digest_pool(n - 1)) if n >= 2 else set()
        u = pool_prev | {sink(n)}
        memo: dict[VertexId, bool] = {}
        for v in [commit] + list(scheme.digest_pool(n)):
            if not mdag.determines(scheme, u, v, memo):
                report.flag("digest-pool", f"n={n}: pool(n-1)+Sink(n) does not determine {v}")
                break

    pair_cap = pair_cap if pair_cap is not None else n_max
    for lt in range(2, pair_cap + 1):
        dock_cache: dict[int, frozenset[VertexId]] = {}
        for ls in range(1, lt):
            fam = scheme.gcertify(ls, lt)
            if not _family_valid(scheme, fam, scheme.gcommit(lt)):
                report.flag("gcertify", f"({ls},{lt}): family is not edge-valid from gcommit({lt})")
                continue
            if ls not in dock_cache:
                dock_cache[ls] = scheme.dock(ls)
            cover = mdag.closed_out_neighborhood(scheme, mdag.family_vertices(fam))
            if not dock_cache[ls] <= cover:
                report.flag("gcertify", f"({ls},{lt}): dock({ls}) not inside the closed out-neighborhood")
    return report


def _family_valid(scheme: SchemeGraph, family, start: VertexId) -> bool:
    if not family:
        return False
    for path in family:
        if not path or path[0] != start:
            return False
        for a, b in zip(path, path[1:]):
            if b not in scheme.out_neighbors(a):
                return False
    return True


def check_pools(scheme: SchemeGraph, n_max: int) -> OracleReport:
    """Digest-pool recurrence plus certificate-pool sufficiency for all
    pairs ls < lt <= n_max."""
    if n_max > 512:
        raise ValueError("pool checks are desk-scale only (n_max <= 512)")
    report = OracleReport(scheme.name, (1, n_max))
    for n in range(1, n_max + 1):
        prev = set(scheme.digest_pool(n - 1)) if n >= 2 else set()
        u = prev | {sink(n)}
        memo: dict[VertexId, bool] = {}
        for v in [scheme.gcommit(n)] + list(scheme.digest_pool(n)):
            if not mdag.determines(scheme, u, v, memo):
                report.flag("digest-pool-recurrence", f"n={n}: cannot derive {v}")
                break
    closed: dict[int, set[VertexId]] = {}
    for lt in range(2, n_max + 1):
        for ls in range(1, lt):
            for m in (ls, lt):
                if m not in closed:
                    closed[m] = mdag.closed_out_neighborhood(scheme, scheme.certificate_pool(m))
            u = closed[ls] | closed[lt]
            cover = mdag.closed_out_neighborhood(scheme, mdag.family_vertices(scheme.gcertify(ls, lt)))
            memo = {}
            missing = [v for v in cover if not mdag.determines(scheme, u, v, memo)]
            if missing:
                report.flag(
                    "certificate-pool",
                    f"({ls},{lt}): pools cannot derive {canonical_sequence(missing)[0]}",
                )
    return report


def cross_check_labels(scheme: SchemeGraph, items: list[bytes], hasher_factory: Callable[[], Hasher] | None = None) -> OracleReport:
    """Oracle relabeling vs the production memoized path, every vertex."""
    factory = hasher_factory if hasher_factory is not None else default_hasher
    report = OracleReport(scheme.name, (1, len(items)))
    expected = full_relabel(scheme, items, factory())
    labeler_hasher = factory()

    def sink_label(v: VertexId) -> bytes:
        payload = items[v.a - 1] if v.a <= len(items) else b""
        return labeler_hasher.sink_label(payload)

    cache: Labeling = {}
    for v in canonical_sequence(expected):
        got = mdag.label_of(scheme, v, sink_label, labeler_hasher, cache)
        if got != expected[v]:
            report.flag("label-equality", f"{v}: oracle and engine disagree")
    return report


# ---------------------------------------------------------------------------
# transparency-log contraction

def ct_contraction_check(n_max: int) -> OracleReport:
    """Contract the synthetic parents of the transparency log per length and
    compare with the hypercore graph under the natural correspondence."""
    from .schemes import ct_graph, hypercore_graph
    from .vertices import hyper_digest

    if n_max > 512:
        raise ValueError("contraction checks are desk-scale only (n_max <= 512)")
    report = OracleReport("ct", (1, n_max))
    ct = truncate(ct_graph(), n_max)
    hyper = truncate(hypercore_graph(), n_max)

    def contract(v: VertexId) -> VertexId:
        if v.kind == VertexKind.CT_INTERNAL:
            return hyper_digest(v.a)
        return v

    vertices = {contract(v) for v in ct.vertices}
    edges = set()
    for a, b in ct.edges:
        ca, cb = contract(a), contract(b)
        if ca != cb:
            edges.add((ca, cb))
    if vertices != hyper.vertices:
        extra = canonical_sequence(vertices - hyper.vertices)[:4]
        missing = canonical_sequence(hyper.vertices - vertices)[:4]
        report.flag("contraction-vertices", f"extra={extra} missing={missing}")
    if edges != hyper.edges:
        extra_e = sorted(edges - hyper.edges)[:4]
        missing_e = sorted(hyper.edges - edges)[:4]
        report.flag("contraction-edges", f"extra={extra_e} missing={missing_e}")
    return report
