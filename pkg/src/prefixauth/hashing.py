"""Hash configuration, domain separation, and instrumented hashing.

Labels are fixed-width octet strings of the configured width k.  Sink
labels and inner-vertex labels are domain separated by a one-octet tag so
a sequence item can never impersonate an aggregated node.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field


class PrefixAuthError(Exception):
    """Base class for all errors raised by this package."""


SINK_TAG = b"\x00"
INNER_TAG = b"\x01"

# algorithm id -> (name, default width)
HASH_ALGORITHMS = {
    1: ("sha256", 32),
    2: ("sha512", 64),
    3: ("blake2b", 32),
}
_ALGORITHM_IDS = {name: alg_id for alg_id, (name, _) in HASH_ALGORITHMS.items()}


@dataclass(frozen=True)
class HashConfig:
    """Hash algorithm selection plus the two domain-separation tags."""

    algorithm_id: int = 1
    k: int = 32
    sink_tag: bytes = SINK_TAG
    inner_tag: bytes = INNER_TAG

    def __post_init__(self) -> None:
        if self.algorithm_id not in HASH_ALGORITHMS:
            raise PrefixAuthError(f"unknown hash algorithm id {self.algorithm_id}")
        if self.k < 16:
            raise PrefixAuthError(f"hash width k must be >= 16, got {self.k}")
        if self.sink_tag == self.inner_tag:
            raise PrefixAuthError("sink and inner domain tags must differ")
        name, default_k = HASH_ALGORITHMS[self.algorithm_id]
        if name in ("sha256", "sha512") and self.k != default_k:
            raise PrefixAuthError(f"{name} output width is fixed at {default_k}")
        if name == "blake2b" and not 16 <= self.k <= 64:
            raise PrefixAuthError("blake2b width must be in [16, 64]")

    @property
    def algorithm_name(self) -> str:
        return HASH_ALGORITHMS[self.algorithm_id][0]

    def _digest(self, data: bytes) -> bytes:
        name = self.algorithm_name
        if name == "blake2b":
            return hashlib.blake2b(data, digest_size=self.k).digest()
        return hashlib.new(name, data).digest()


def config_for(algorithm: int | str, k: int | None = None) -> HashConfig:
    """Build a HashConfig from an algorithm id or name."""
    if isinstance(algorithm, str):
        if algorithm not in _ALGORITHM_IDS:
            raise PrefixAuthError(f"unknown hash algorithm {algorithm!r}")
        algorithm = _ALGORITHM_IDS[algorithm]
    default_k = HASH_ALGORITHMS[algorithm][1]
    return HashConfig(algorithm_id=algorithm, k=k if k is not None else default_k)


@dataclass
class Hasher:
    """A HashConfig plus invocation counters.

    `invocations` counts calls to the hash function; `blocks` counts the
    label-sized inputs absorbed (one per child label for inner vertices,
    one per sink payload).  `blocks` is the unit the benchmarks report as
    verification work, since it is proportional to the edges traversed.
    """

    config: HashConfig = field(default_factory=HashConfig)
    invocations: int = 0
    blocks: int = 0

    @property
    def k(self) -> int:
        return self.config.k

    def sink_label(self, payload: bytes) -> bytes:
        self.invocations += 1
        self.blocks += 1
        return self.config._digest(self.config.sink_tag + payload)

    def inner_label(self, child_labels: list[bytes]) -> bytes:
        self.invocations += 1
        self.blocks += len(child_labels)
        return self.config._digest(self.config.inner_tag + b"".join(child_labels))

    def reset_counters(self) -> None:
        self.invocations = 0
        self.blocks = 0


DEFAULT_CONFIG = HashConfig()


def default_hasher() -> Hasher:
    """Fresh hasher with the default 256-bit configuration (k = 32)."""
    return Hasher(DEFAULT_CONFIG)
