"""Prefix authentication on top of the scheme graphs.

commit maps a sequence to the label of its commit vertex; certify exposes
the labels of the closed out-neighborhood of gcertify(len_s, len_t);
verify recomputes every path vertex's label from the certificate and
compares the two commit labels against the digests.  The timestamping
extension binds individual items to positions via subgraph proofs.

Wire formats (big endian throughout, leading format-version octet 0x01):

    Digest         01 | scheme | length(8) | label(k)
    PrefixCert     01 | scheme | len_s(8) | len_t(8) | count(4) | labels
    Identifier     01 | scheme | position(8) | item-hash(k) | count(4) | labels
    TimestampCert  len(4) | PrefixCert | len(4) | Identifier | len(4) | Identifier

Certificate labels are always listed in canonical vertex order; vertex
ids are implied by (scheme, lengths) and never serialized.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import mdag
from .hashing import Hasher, PrefixAuthError, default_hasher
from .mdag import Labeling, SubgraphProof, UnderdeterminedError
from .schemes import SchemeGraph, SchemeRangeError, get_scheme
from .vertices import VertexId, canonical_sequence, sink

WIRE_VERSION = 1


class MalformedCertificateError(PrefixAuthError):
    """Cannot even parse/shape-check the artifact (distinct from refuted)."""


class ContextMismatchError(PrefixAuthError):
    """Artifacts disagree about scheme or committed lengths."""


class InsufficientPoolError(PrefixAuthError):
    """A required label is not derivable from the given pools."""


class CorruptStateError(PrefixAuthError):
    """A CommitState does not match its scheme's digest pool."""


# ---------------------------------------------------------------------------
# artifacts

@dataclass(frozen=True)
class Digest:
    scheme_id: int
    length: int
    label: bytes

    def encode(self) -> bytes:
        return bytes([WIRE_VERSION, self.scheme_id]) + self.length.to_bytes(8, "big") + self.label


@dataclass(frozen=True)
class PrefixCertificate:
    scheme_id: int
    len_s: int
    len_t: int
    labels: tuple[bytes, ...]

    def encode(self) -> bytes:
        head = bytes([WIRE_VERSION, self.scheme_id]) + self.len_s.to_bytes(8, "big") + self.len_t.to_bytes(8, "big")
        return head + len(self.labels).to_bytes(4, "big") + b"".join(self.labels)


@dataclass(frozen=True)
class CommitState:
    """Everything needed to keep appending: the digest-pool labels."""

    scheme_id: int
    length: int
    pool: tuple[tuple[VertexId, bytes], ...]


@dataclass(frozen=True)
class PositionalCertificate:
    """Labels over the closed out-neighborhood of certificate_pool(n); any
    prefix certificate touching length n derives from two of these."""

    scheme_id: int
    n: int
    labels: tuple[tuple[VertexId, bytes], ...]


@dataclass(frozen=True)
class Identifier:
    """Binds the item at `position` to the digest of that position."""

    scheme_id: int
    position: int
    item_hash: bytes
    proof: SubgraphProof

    def encode(self) -> bytes:
        head = bytes([WIRE_VERSION, self.scheme_id]) + self.position.to_bytes(8, "big") + self.item_hash
        boundary = self.proof.boundary
        body = b"".join(boundary[v] for v in canonical_sequence(boundary))
        return head + len(boundary).to_bytes(4, "big") + body


@dataclass(frozen=True)
class TimestampCertificate:
    prefix_cert: PrefixCertificate
    id_s: Identifier
    id_t: Identifier

    def encode(self) -> bytes:
        parts = [self.prefix_cert.encode(), self.id_s.encode(), self.id_t.encode()]
        return b"".join(len(p).to_bytes(4, "big") + p for p in parts)


def decode_digest(raw: bytes) -> Digest:
    if len(raw) < 10 + 16:
        raise MalformedCertificateError("digest too short")
    if raw[0] != WIRE_VERSION:
        raise MalformedCertificateError(f"unsupported format version {raw[0]}")
    get_scheme(raw[1])  # raises on unknown id
    length = int.from_bytes(raw[2:10], "big")
    if length < 1:
        raise MalformedCertificateError("length must be >= 1")
    return Digest(raw[1], length, raw[10:])


def decode_prefix_certificate(raw: bytes) -> PrefixCertificate:
    if len(raw) < 22:
        raise MalformedCertificateError("certificate too short")
    if raw[0] != WIRE_VERSION:
        raise MalformedCertificateError(f"unsupported format version {raw[0]}")
    try:
        get_scheme(raw[1])
    except PrefixAuthError as exc:
        raise MalformedCertificateError(str(exc)) from None
    len_s = int.from_bytes(raw[2:10], "big")
    len_t = int.from_bytes(raw[10:18], "big")
    count = int.from_bytes(raw[18:22], "big")
    body = raw[22:]
    if count < 1 or len(body) % count:
        raise MalformedCertificateError("label block does not divide into the label count")
    k = len(body) // count
    labels = tuple(body[i * k : (i + 1) * k] for i in range(count))
    return PrefixCertificate(raw[1], len_s, len_t, labels)


def decode_identifier(raw: bytes, k: int, hasher: Hasher | None = None) -> Identifier:
    if len(raw) < 10 + k + 4:
        raise MalformedCertificateError("identifier too short")
    if raw[0] != WIRE_VERSION:
        raise MalformedCertificateError(f"unsupported format version {raw[0]}")
    try:
        scheme = get_scheme(raw[1])
    except PrefixAuthError as exc:
        raise MalformedCertificateError(str(exc)) from None
    position = int.from_bytes(raw[2:10], "big")
    if position < 1:
        raise MalformedCertificateError("position must be >= 1")
    item_hash = raw[10 : 10 + k]
    count = int.from_bytes(raw[10 + k : 14 + k], "big")
    body = raw[14 + k :]
    if len(body) != count * k:
        raise MalformedCertificateError("identifier length does not match its label count")
    family = scheme.identifier_paths(position)
    domain = canonical_sequence(mdag.open_out_neighborhood(scheme, mdag.family_vertices(family)))
    if len(domain) != count:
        raise MalformedCertificateError(f"expected {len(domain)} boundary labels, got {count}")
    boundary = {v: body[i * k : (i + 1) * k] for i, v in enumerate(domain)}
    root = scheme.gcommit(position)
    if hasher is None:
        hasher = default_hasher_for_width(k)
    claimed = _label_from_boundary(scheme, root, boundary, hasher)
    proof = SubgraphProof(root, claimed, family, boundary)
    return Identifier(raw[1], position, item_hash, proof)


def decode_timestamp_certificate(raw: bytes, k: int, hasher: Hasher | None = None) -> TimestampCertificate:
    parts = []
    off = 0
    for _ in range(3):
        if len(raw) < off + 4:
            raise MalformedCertificateError("timestamp certificate too short")
        n = int.from_bytes(raw[off : off + 4], "big")
        off += 4
        if len(raw) < off + n:
            raise MalformedCertificateError("timestamp certificate truncated")
        parts.append(raw[off : off + n])
        off += n
    if off != len(raw):
        raise MalformedCertificateError("trailing bytes after timestamp certificate")
    return TimestampCertificate(
        decode_prefix_certificate(parts[0]),
        decode_identifier(parts[1], k, hasher),
        decode_identifier(parts[2], k, hasher),
    )


def default_hasher_for_width(k: int) -> Hasher:
    """Counter-free helper used only while decoding (recomputing claims)."""
    from .hashing import HASH_ALGORITHMS, config_for

    for alg_id, (_, width) in HASH_ALGORITHMS.items():
        if width == k:
            return Hasher(config_for(alg_id, k))
    return Hasher(config_for("blake2b", k))


# ---------------------------------------------------------------------------
# sequence labeling

class SequenceLabeler:
    """Merkle labels of a scheme graph for one concrete item sequence.

    Sinks at positions <= len(items) hash the item; later sinks hash the
    empty string.  The cache is shared across all lookups, so labeling a
    whole sweep of certificates over one sequence costs each vertex once.
    """

    def __init__(self, scheme: SchemeGraph, items: list[bytes], hasher: Hasher | None = None):
        self.scheme = scheme
        self.items = items
        self.hasher = hasher if hasher is not None else default_hasher()
        self.cache: Labeling = {}

    def sink_label(self, v: VertexId) -> bytes:
        i = v.a
        payload = self.items[i - 1] if i <= len(self.items) else b""
        return self.hasher.sink_label(payload)

    def label(self, v: VertexId) -> bytes:
        return mdag.label_of(self.scheme, v, self.sink_label, self.hasher, self.cache)

    def labeling(self, vertices) -> Labeling:
        mdag.compute_labels(self.scheme, vertices, self.sink_label, self.hasher, self.cache)
        return {v: self.cache[v] for v in vertices}


# ---------------------------------------------------------------------------
# core operations

def commit(scheme: SchemeGraph, items: list[bytes], hasher: Hasher | None = None) -> Digest:
    """Digest of the sequence: the label of gcommit(len(items))."""
    if not items:
        raise SchemeRangeError("length must be >= 1")
    labeler = SequenceLabeler(scheme, items, hasher)
    n = len(items)
    return Digest(scheme.scheme_id, n, labeler.label(scheme.gcommit(n)))


def initial_state(scheme: SchemeGraph) -> CommitState:
    return CommitState(scheme.scheme_id, 0, ())


def sparse_commit(state: CommitState, item: bytes, hasher: Hasher | None = None) -> tuple[Digest, CommitState]:
    """Append one item using only the digest-pool labels of the old state."""
    scheme = get_scheme(state.scheme_id)
    hasher = hasher if hasher is not None else default_hasher()
    if state.length < 0 or (state.length == 0 and state.pool):
        raise CorruptStateError("empty state must have an empty pool")
    if state.length >= 1 and [v for v, _ in state.pool] != scheme.digest_pool(state.length):
        raise CorruptStateError("corrupt commit state: pool does not match the scheme's digest pool")
    m = state.length + 1
    known: Labeling = {v: lbl for v, lbl in state.pool}
    known[sink(m)] = hasher.sink_label(item)
    cache: Labeling = {}
    targets = [scheme.gcommit(m)] + scheme.digest_pool(m)
    values = {}
    for v in targets:
        values[v] = mdag.label_from(scheme, v, known, hasher, cache)
    digest = Digest(scheme.scheme_id, m, values[scheme.gcommit(m)])
    new_pool = tuple((v, values[v]) for v in scheme.digest_pool(m))
    return digest, CommitState(scheme.scheme_id, m, new_pool)


def _certificate_vertices(scheme: SchemeGraph, len_s: int, len_t: int) -> tuple[list[VertexId], mdag.PathFamily]:
    family = scheme.gcertify(len_s, len_t)
    cover = canonical_sequence(mdag.closed_out_neighborhood(scheme, mdag.family_vertices(family)))
    return cover, family


def certify(scheme: SchemeGraph, t_items: list[bytes], len_s: int, hasher: Hasher | None = None) -> PrefixCertificate:
    """Prefix certificate for (first len_s items) against the full sequence."""
    return certify_at(SequenceLabeler(scheme, t_items, hasher), len_s, len(t_items))


def certify_at(labeler: SequenceLabeler, len_s: int, len_t: int) -> PrefixCertificate:
    """certify() against a shared labeler; amortizes labeling over sweeps."""
    scheme = labeler.scheme
    if len_s < 1:
        raise SchemeRangeError("lengths start at 1")
    if len_s >= len_t or len_t > len(labeler.items):
        raise SchemeRangeError(f"not a proper prefix: len_s={len_s} >= len_t={len_t}")
    cover, _ = _certificate_vertices(scheme, len_s, len_t)
    for v in cover:
        if v.kind == 0 and v.a > len_t:
            raise PrefixAuthError(f"certificate references sink {v} beyond the sequence")
    labeling = labeler.labeling(cover)
    return PrefixCertificate(scheme.scheme_id, len_s, len_t, tuple(labeling[v] for v in cover))


def digest_at(labeler: SequenceLabeler, n: int) -> Digest:
    """Digest of the first n items against a shared labeler."""
    if not 1 <= n <= len(labeler.items):
        raise SchemeRangeError(f"n must be in [1, {len(labeler.items)}]")
    return Digest(labeler.scheme.scheme_id, n, labeler.label(labeler.scheme.gcommit(n)))


def _label_from_boundary(scheme: SchemeGraph, v: VertexId, labeling: Labeling, hasher: Hasher) -> bytes:
    return mdag.label_from(scheme, v, labeling, hasher)


def verify(d_s: Digest, d_t: Digest, cert: PrefixCertificate, hasher: Hasher | None = None) -> bool:
    """Check a prefix certificate against the two digests.

    Errors (malformed artifact, mismatched context) are raised and are
    distinct from a False result, which means "refuted".
    """
    hasher = hasher if hasher is not None else default_hasher()
    k = hasher.k
    if not (d_s.scheme_id == d_t.scheme_id == cert.scheme_id):
        raise ContextMismatchError("scheme ids disagree")
    if d_s.length != cert.len_s or d_t.length != cert.len_t:
        raise ContextMismatchError("digest lengths disagree with the certificate")
    if cert.len_s < 1 or cert.len_s >= cert.len_t:
        raise ContextMismatchError("not a proper prefix")
    if len(d_s.label) != k or len(d_t.label) != k:
        raise MalformedCertificateError(f"digest labels must be {k} octets")
    if any(len(lbl) != k for lbl in cert.labels):
        raise MalformedCertificateError(f"certificate labels must be {k} octets")
    scheme = get_scheme(cert.scheme_id)
    cover, family = _certificate_vertices(scheme, cert.len_s, cert.len_t)
    if len(cert.labels) != len(cover):
        raise MalformedCertificateError(f"expected {len(cover)} labels, got {len(cert.labels)}")
    given: Labeling = dict(zip(cover, cert.labels))

    # recompute every path vertex bottom-up; scheme edges always decrease
    # the canonical order, so ascending order is a topological order
    path_vertices = mdag.family_vertices(family)
    recomputed: Labeling = {}
    for w in canonical_sequence(path_vertices):
        children = []
        for x in scheme.out_neighbors(w):
            children.append(recomputed[x] if x in path_vertices else given[x])
        recomputed[w] = hasher.inner_label(children)
    if any(recomputed[w] != given[w] for w in path_vertices):
        return False
    if given[scheme.gcommit(cert.len_t)] != d_t.label:
        return False
    head = scheme.gcommit(cert.len_s)
    if head in given:
        return given[head] == d_s.label
    return _label_from_boundary(scheme, head, given, hasher) == d_s.label


# ---------------------------------------------------------------------------
# positional certificates

def positional_certificate(
    scheme: SchemeGraph, t_items: list[bytes], n: int, hasher: Hasher | None = None
) -> PositionalCertificate:
    """Labels over the closed out-neighborhood of certificate_pool(n),
    evaluated in the sequence graph of t_items.

    Pool vertices above the current length hash empty-string sinks; those
    entries only stabilize once the sequence grows past them, and never
    feed into certificates for lengths <= len(t_items).
    """
    if not 1 <= n <= len(t_items):
        raise SchemeRangeError(f"n must be in [1, {len(t_items)}]")
    cover = canonical_sequence(mdag.closed_out_neighborhood(scheme, scheme.certificate_pool(n)))
    labeler = SequenceLabeler(scheme, t_items, hasher)
    labeling = labeler.labeling(cover)
    return PositionalCertificate(scheme.scheme_id, n, tuple((v, labeling[v]) for v in cover))


def certify_from_pools(
    pc_s: PositionalCertificate, pc_t: PositionalCertificate, hasher: Hasher | None = None
) -> PrefixCertificate:
    """Rebuild certify(len_s, len_t) from two positional certificates."""
    hasher = hasher if hasher is not None else default_hasher()
    if pc_s.scheme_id != pc_t.scheme_id:
        raise ContextMismatchError("scheme ids disagree")
    if pc_s.n >= pc_t.n:
        raise ContextMismatchError(f"not a proper prefix: {pc_s.n} >= {pc_t.n}")
    combined: Labeling = {}
    for pc in (pc_s, pc_t):
        for v, lbl in pc.labels:
            if combined.setdefault(v, lbl) != lbl:
                raise ContextMismatchError(f"pools disagree on the label of {v}")
    scheme = get_scheme(pc_s.scheme_id)
    cover, _ = _certificate_vertices(scheme, pc_s.n, pc_t.n)
    cache: Labeling = {}
    labels = []
    for v in cover:
        try:
            labels.append(mdag.label_from(scheme, v, combined, hasher, cache))
        except UnderdeterminedError as exc:
            raise InsufficientPoolError(f"insufficient pool: {exc}") from None
    return PrefixCertificate(scheme.scheme_id, pc_s.n, pc_t.n, tuple(labels))


# ---------------------------------------------------------------------------
# secure timestamping

def identify(scheme: SchemeGraph, t_items: list[bytes], i: int, hasher: Hasher | None = None) -> Identifier:
    """Subgraph proof that the i-th item sits at position i under digest i."""
    if not 1 <= i <= len(t_items):
        raise SchemeRangeError(f"position must be in [1, {len(t_items)}]")
    labeler = SequenceLabeler(scheme, t_items, hasher)
    family = scheme.identifier_paths(i)
    boundary_domain = mdag.open_out_neighborhood(scheme, mdag.family_vertices(family))
    labeling = labeler.labeling(boundary_domain)
    proof = SubgraphProof(scheme.gcommit(i), labeler.label(scheme.gcommit(i)), family, labeling)
    return Identifier(scheme.scheme_id, i, labeler.hasher.sink_label(t_items[i - 1]), proof)


def verify_identifier(identifier: Identifier, digest: Digest, hasher: Hasher | None = None) -> bool:
    """Check that the identifier's proof reproduces the digest label and
    binds the item hash at its sink."""
    hasher = hasher if hasher is not None else default_hasher()
    if identifier.scheme_id != digest.scheme_id:
        raise ContextMismatchError("scheme ids disagree")
    scheme = get_scheme(identifier.scheme_id)
    if identifier.position != digest.length:
        return False
    proof = identifier.proof
    if proof.root != scheme.gcommit(identifier.position):
        return False
    if proof.path_family != scheme.identifier_paths(identifier.position):
        return False
    expected_domain = mdag.open_out_neighborhood(scheme, mdag.family_vertices(proof.path_family))
    if set(proof.boundary) != expected_domain:
        raise mdag.MalformedProofError("boundary domain does not match the identifier's path family")
    if any(len(lbl) != hasher.k for lbl in proof.boundary.values()) or len(identifier.item_hash) != hasher.k:
        raise MalformedCertificateError(f"labels must be {hasher.k} octets")
    if proof.boundary.get(sink(identifier.position)) != identifier.item_hash:
        return False
    return _label_from_boundary(scheme, proof.root, proof.boundary, hasher) == digest.label


def timestamp_certify(
    scheme: SchemeGraph, s_items: list[bytes], t_items: list[bytes], hasher: Hasher | None = None
) -> TimestampCertificate:
    """Certificate that item len(s) happened before item len(t)."""
    if not s_items:
        raise SchemeRangeError("length must be >= 1")
    if s_items != t_items[: len(s_items)] or len(s_items) >= len(t_items):
        raise SchemeRangeError("s must be a proper prefix of t")
    cert = certify(scheme, t_items, len(s_items), hasher)
    id_s = identify(scheme, t_items, len(s_items), hasher)
    id_t = identify(scheme, t_items, len(t_items), hasher)
    return TimestampCertificate(cert, id_s, id_t)


def timestamp_verify(d_s: Digest, d_t: Digest, tc: TimestampCertificate, hasher: Hasher | None = None) -> bool:
    return (
        verify(d_s, d_t, tc.prefix_cert, hasher)
        and verify_identifier(tc.id_s, d_s, hasher)
        and verify_identifier(tc.id_t, d_t, hasher)
    )
