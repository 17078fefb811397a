import itertools
import random

import pytest

from conftest import make_items
from prefixauth import mdag, oracle, pas
from prefixauth import schemes as S
from prefixauth.vertices import chain, sink, tree

ALL = S.all_schemes()


# ---------------------------------------------------------------------------
# full_relabel

def test_full_relabel_linear_n1():
    labels = oracle.full_relabel(S.linear_graph(), [b"only"])
    assert set(labels) == {sink(1), chain(1)}


def test_full_relabel_agrees_with_engine():
    items = make_items(48, seed=30)
    for scheme in ALL:
        rep = oracle.cross_check_labels(scheme, items)
        assert rep.ok, rep.to_text()


def test_changing_an_item_changes_every_later_commit():
    items = make_items(12, seed=31)
    for scheme in (S.linear_graph(), S.ct_graph()):
        base = oracle.full_relabel(scheme, items)
        mutated_items = list(items)
        mutated_items[4] = items[4] + b"!"
        mutated = oracle.full_relabel(scheme, mutated_items)
        for n in range(1, 13):
            commit = scheme.gcommit(n)
            if n >= 5:
                assert base[commit] != mutated[commit]
            else:
                assert base[commit] == mutated[commit]


def test_full_relabel_bounds():
    with pytest.raises(ValueError):
        oracle.full_relabel(S.linear_graph(), [])


# ---------------------------------------------------------------------------
# determination: recursion vs exhaustive path enumeration

def test_determination_recursion_certified_by_enumeration(fig_graph):
    verts = sorted(fig_graph.vertices)
    for r in range(len(verts) + 1):
        for u in itertools.combinations(verts, r):
            for v in verts:
                assert mdag.determines(fig_graph, set(u), v) == oracle.determines_by_enumeration(
                    fig_graph, set(u), v
                )


def test_maximal_path_enumeration(fig_graph):
    from conftest import FIG_G

    paths = sorted(oracle.all_maximal_paths(fig_graph, FIG_G))
    assert all(fig_graph.is_sink(p[-1]) for p in paths)
    assert all(p[0] == FIG_G for p in paths)
    assert len(paths) == 4  # g->f->e->b, g->f->e->c, g->d->a, g->h


# ---------------------------------------------------------------------------
# contract checks pass on the real schemes

@pytest.mark.parametrize("scheme", ALL, ids=[s.name for s in ALL])
def test_contract_green(scheme):
    rep = oracle.check_tpag_contract(scheme, 48)
    assert rep.ok, rep.to_text()


@pytest.mark.parametrize("scheme", ALL, ids=[s.name for s in ALL])
def test_pools_green_outside_antimonotone_cert_pools(scheme):
    rep = oracle.check_pools(scheme, 36)
    cert_viols = [v for v in rep.violations if v[0] == "certificate-pool"]
    other = [v for v in rep.violations if v[0] != "certificate-pool"]
    assert not other, other[:3]
    if scheme.name.startswith("antimonotone"):
        assert cert_viols  # covered by the discrepancy report
    else:
        assert not cert_viols, cert_viols[:3]


def test_ct_contraction():
    assert oracle.ct_contraction_check(6).ok
    assert oracle.ct_contraction_check(8).ok   # nothing to contract at powers of two
    assert oracle.ct_contraction_check(96).ok


def test_report_serialization():
    rep = oracle.OracleReport("demo", (1, 8))
    assert rep.ok and "all checks passed" in rep.to_text()
    rep.flag("some-invariant", "witness p3")
    assert not rep.ok
    assert "some-invariant" in rep.to_text()
    assert rep.to_rows() == ["some-invariant\tdemo\t1..8\twitness p3"]


# ---------------------------------------------------------------------------
# mutation coverage: each contract invariant flags a deliberately broken scheme

class _Wrap:
    """Delegating scheme wrapper; subclasses break exactly one rule."""

    def __init__(self, inner):
        self._inner = inner
        self.name = f"broken-{inner.name}"
        self.scheme_id = inner.scheme_id

    def __getattr__(self, attr):
        return getattr(self._inner, attr)


class CyclicTat(_Wrap):
    # threading to the forest at n instead of n-1 creates a cycle through
    # the ancestors of (n, 0)
    def out_neighbors(self, v):
        if v.kind == 2 and v.b == 0 and v.a >= 2:
            return tuple(sorted([sink(v.a)] + S.forest_roots(v.a)))
        return self._inner.out_neighbors(v)


class SinkWithEdges(_Wrap):
    def out_neighbors(self, v):
        if v.kind == 0 and v.a == 3:
            return (sink(2),)
        return self._inner.out_neighbors(v)


class LooseCommit(_Wrap):
    # gcommit(n) misses the latest item
    def gcommit(self, n):
        return self._inner.gcommit(max(1, n - 1))


class EmptyDock(_Wrap):
    def dock(self, n):
        return frozenset()


class LazyCertify(_Wrap):
    # never descends toward the prefix's dock
    def gcertify(self, len_s, len_t):
        return ((self._inner.gcommit(len_t),),)


class ForgetfulDigestPool(_Wrap):
    def digest_pool(self, n):
        return self._inner.digest_pool(n)[:-1] if n >= 2 else self._inner.digest_pool(n)


class TinyCertPool(_Wrap):
    def certificate_pool(self, n):
        return frozenset({self._inner.gcommit(1)})


class BlindIdentifier(_Wrap):
    # a path family that never exposes Sink(n)
    def identifier_paths(self, n):
        if n >= 2:
            return ((self._inner.gcommit(n), next(iter(sorted(self._inner.dock(n - 1))))),)
        return self._inner.identifier_paths(n)


def test_mutation_acyclicity():
    rep = oracle.check_tpag_contract(CyclicTat(S.tat_graph()), 8)
    assert any(inv == "acyclicity" for inv, _ in rep.violations), rep.to_text()


def test_mutation_sink_with_edges():
    rep = oracle.check_tpag_contract(SinkWithEdges(S.linear_graph()), 8)
    assert any(inv == "sinks" for inv, _ in rep.violations)


def test_mutation_loose_commit():
    rep = oracle.check_tpag_contract(LooseCommit(S.linear_graph()), 8)
    assert any(inv == "tight-commitment" for inv, _ in rep.violations)


def test_mutation_empty_dock():
    rep = oracle.check_tpag_contract(EmptyDock(S.hypercore_graph()), 8)
    assert any(inv == "dock" for inv, _ in rep.violations)


def test_mutation_lazy_certify():
    rep = oracle.check_tpag_contract(LazyCertify(S.linear_graph()), 8)
    assert any(inv == "gcertify" for inv, _ in rep.violations)


def test_mutation_forgetful_digest_pool():
    rep = oracle.check_pools(ForgetfulDigestPool(S.hypercore_graph()), 12)
    assert any(inv == "digest-pool-recurrence" for inv, _ in rep.violations)


def test_mutation_tiny_certificate_pool():
    rep = oracle.check_pools(TinyCertPool(S.skiplist_graph()), 12)
    assert any(inv == "certificate-pool" for inv, _ in rep.violations)


def test_mutation_blind_identifier():
    rep = oracle.check_tpag_contract(BlindIdentifier(S.hypercore_graph()), 8)
    assert any(inv == "identifier-paths" for inv, _ in rep.violations)


def test_pool_validity_is_stable_under_growth():
    # determination computed on the analytic (infinite) graph must agree
    # with determination on materialized truncations as the graph grows
    for scheme in ALL:
        for n in (5, 12, 31):
            pool_prev = set(scheme.digest_pool(n - 1)) | {sink(n)}
            analytic = mdag.determines(scheme, pool_prev, scheme.gcommit(n))
            for k in (0, 1, 17):
                table = S.truncate(scheme, n + k).to_table()
                assert mdag.determines(table, pool_prev, scheme.gcommit(n)) == analytic


# ---------------------------------------------------------------------------
# broken schemes also fail end-to-end, not just in the oracle

def test_cycle_guard_in_engine():
    broken = CyclicTat(S.tat_graph())
    with pytest.raises(mdag.CycleError):
        pas.commit(broken, make_items(4, seed=33))
