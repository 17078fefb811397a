"""Hash-based prefix authentication: a Merkle-DAG engine, eight concrete
log/timestamping schemes, the commit/certify/verify API, and benchmarks."""

from .hashing import HashConfig, Hasher, PrefixAuthError, config_for, default_hasher
from .mdag import (
    SubgraphProof,
    TableGraph,
    UnderdeterminedError,
    UnknownVertexError,
    determines,
    label_from,
    label_of,
    verify_subgraph_proof,
)
from .pas import (
    CommitState,
    Digest,
    Identifier,
    PositionalCertificate,
    PrefixCertificate,
    TimestampCertificate,
    certify,
    certify_at,
    certify_from_pools,
    commit,
    digest_at,
    SequenceLabeler,
    identify,
    initial_state,
    positional_certificate,
    sparse_commit,
    timestamp_certify,
    timestamp_verify,
    verify,
    verify_identifier,
)
from .schemes import (
    SCHEME_NAMES,
    SchemeGraph,
    all_schemes,
    antimonotone_optimal_graph,
    antimonotone_simple_graph,
    bits,
    ct_graph,
    export_dot,
    full_graph,
    get_scheme,
    hypercore_graph,
    linear_graph,
    nextpower,
    nextroot,
    skiplist_graph,
    tat_graph,
    tree_forest,
    truncate,
)
from .vertices import VertexId, VertexKind, canonical_sequence, chain, ct_internal, hyper_digest, sink, tree

__all__ = [name for name in dir() if not name.startswith("_")]
