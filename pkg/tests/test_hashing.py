import hashlib

import pytest

from prefixauth.hashing import HashConfig, Hasher, PrefixAuthError, config_for, default_hasher


def test_default_is_256_bit():
    h = default_hasher()
    assert h.k == 32
    assert h.sink_label(b"x") == hashlib.sha256(b"\x00x").digest()
    assert h.inner_label([b"a" * 32]) == hashlib.sha256(b"\x01" + b"a" * 32).digest()


def test_domain_separation():
    h = default_hasher()
    payload = b"z" * 32
    assert h.sink_label(payload) != h.inner_label([payload])


def test_config_validation():
    with pytest.raises(PrefixAuthError):
        HashConfig(algorithm_id=99)
    with pytest.raises(PrefixAuthError):
        HashConfig(k=8)
    with pytest.raises(PrefixAuthError):
        HashConfig(sink_tag=b"\x00", inner_tag=b"\x00")
    with pytest.raises(PrefixAuthError):
        config_for("sha256", 16)  # sha256 width is fixed
    with pytest.raises(PrefixAuthError):
        config_for("nope")


def test_engine_is_generic_in_k():
    h16 = Hasher(config_for("blake2b", 16))
    assert len(h16.sink_label(b"x")) == 16
    assert len(h16.inner_label([b"a" * 16, b"b" * 16])) == 16
    h64 = Hasher(config_for("sha512"))
    assert len(h64.sink_label(b"x")) == 64


def test_counters():
    h = default_hasher()
    h.sink_label(b"x")
    h.inner_label([b"a" * 32, b"b" * 32, b"c" * 32])
    assert h.invocations == 2
    assert h.blocks == 4
    h.reset_counters()
    assert h.invocations == 0 and h.blocks == 0
