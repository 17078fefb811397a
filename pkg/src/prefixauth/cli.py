"""Command-line front end: append-only log files, certificates, benchmarks.

Log file:     "PFXD" | format-version | scheme-id | hash-alg-id | k,
              then length-prefixed item records (4-octet big-endian length).
Sidecar:      <log>.state -- "PFXS" | version | scheme | alg | k |
              length(8) | count(4) | (vertex-id(17) | label(k))* | checksum.
              The checksum is the configured hash over everything before it,
              so any tamper is caught before appending continues.
Digest print: hex of version | scheme | alg | length(8) | label(k); the
              algorithm octet travels with the digest because `verify` has
              no log to consult.  Certificate files are the raw wire
              formats with no envelope.

Exit codes: 0 verified/ok, 1 refuted, 2 malformed input or context
mismatch, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import fcntl
import os
import sys

from . import bench, pas, schemes
from .hashing import HASH_ALGORITHMS, Hasher, HashConfig, PrefixAuthError, config_for
from .vertices import ENCODED_VERTEX_LEN, VertexId

LOG_MAGIC = b"PFXD"
STATE_MAGIC = b"PFXS"
FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_MALFORMED = 2
EXIT_IO = 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


# ---------------------------------------------------------------------------
# log + sidecar files

def write_log_header(path: str, scheme_id: int, config: HashConfig) -> None:
    with open(path, "xb") as fh:
        fh.write(LOG_MAGIC + bytes([FORMAT_VERSION, scheme_id, config.algorithm_id, config.k]))


def read_log(path: str) -> tuple[int, HashConfig, list[bytes]]:
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read log: {exc}")
    if len(raw) < 8 or raw[:4] != LOG_MAGIC:
        raise CliError(EXIT_MALFORMED, "not a log file (bad magic)")
    if raw[4] != FORMAT_VERSION:
        raise CliError(EXIT_MALFORMED, f"unsupported log format version {raw[4]}")
    scheme_id, alg_id, k = raw[5], raw[6], raw[7]
    try:
        config = config_for(alg_id, k)
        schemes.get_scheme(scheme_id)
    except PrefixAuthError as exc:
        raise CliError(EXIT_MALFORMED, str(exc))
    items = []
    off = 8
    while off < len(raw):
        if off + 4 > len(raw):
            raise CliError(EXIT_MALFORMED, "truncated item record")
        ln = int.from_bytes(raw[off : off + 4], "big")
        off += 4
        if off + ln > len(raw):
            raise CliError(EXIT_MALFORMED, "truncated item payload")
        items.append(raw[off : off + ln])
        off += ln
    return scheme_id, config, items


def append_log_item(path: str, item: bytes) -> None:
    with open(path, "ab") as fh:
        fh.write(len(item).to_bytes(4, "big") + item)


def state_path(log_path: str) -> str:
    return log_path + ".state"


def write_state(path: str, state: pas.CommitState, config: HashConfig) -> None:
    body = STATE_MAGIC + bytes([FORMAT_VERSION, state.scheme_id, config.algorithm_id, config.k])
    body += state.length.to_bytes(8, "big") + len(state.pool).to_bytes(4, "big")
    for v, lbl in state.pool:
        body += v.encode() + lbl
    checksum = Hasher(config).sink_label(body)
    with open(path, "wb") as fh:
        fh.write(body + checksum)


def read_state(path: str, expected_scheme: int, config: HashConfig) -> pas.CommitState:
    try:
        raw = open(path, "rb").read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read sidecar state: {exc}")
    k = config.k
    if len(raw) < 20 + k or raw[:4] != STATE_MAGIC:
        raise CliError(EXIT_MALFORMED, "corrupt commit state: bad sidecar magic or size")
    body, checksum = raw[:-k], raw[-k:]
    if Hasher(config).sink_label(body) != checksum:
        raise CliError(EXIT_MALFORMED, "corrupt commit state: sidecar checksum mismatch")
    if body[4] != FORMAT_VERSION:
        raise CliError(EXIT_MALFORMED, f"unsupported sidecar version {body[4]}")
    if body[5] != expected_scheme or body[6] != config.algorithm_id or body[7] != k:
        raise CliError(EXIT_MALFORMED, "scheme/hash mismatch between log header and sidecar")
    length = int.from_bytes(body[8:16], "big")
    count = int.from_bytes(body[16:20], "big")
    entries = []
    off = 20
    step = ENCODED_VERTEX_LEN + k
    if len(body) != 20 + count * step:
        raise CliError(EXIT_MALFORMED, "corrupt commit state: wrong entry block size")
    for _ in range(count):
        v = VertexId.decode(body[off : off + ENCODED_VERTEX_LEN])
        entries.append((v, body[off + ENCODED_VERTEX_LEN : off + step]))
        off += step
    return pas.CommitState(expected_scheme, length, tuple(entries))


# ---------------------------------------------------------------------------
# digest envelope (version | scheme | alg | length | label)

def encode_cli_digest(d: pas.Digest, config: HashConfig) -> bytes:
    return bytes([FORMAT_VERSION, d.scheme_id, config.algorithm_id]) + d.length.to_bytes(8, "big") + d.label


def decode_cli_digest(raw: bytes) -> tuple[pas.Digest, HashConfig]:
    if len(raw) < 11 + 16:
        raise CliError(EXIT_MALFORMED, "digest too short")
    if raw[0] != FORMAT_VERSION:
        raise CliError(EXIT_MALFORMED, f"unsupported digest version {raw[0]}")
    try:
        schemes.get_scheme(raw[1])
        config = config_for(raw[2], len(raw) - 11)
    except PrefixAuthError as exc:
        raise CliError(EXIT_MALFORMED, str(exc))
    length = int.from_bytes(raw[3:11], "big")
    if length < 1:
        raise CliError(EXIT_MALFORMED, "digest length must be >= 1")
    return pas.Digest(raw[1], length, raw[11:]), config


def parse_hex_digest(text: str) -> tuple[pas.Digest, HashConfig]:
    try:
        raw = bytes.fromhex(text.strip())
    except ValueError:
        raise CliError(EXIT_MALFORMED, "digest is not valid hex")
    return decode_cli_digest(raw)


# ---------------------------------------------------------------------------
# subcommands

def _default_config() -> HashConfig:
    name = os.environ.get("PFXD_HASH")
    if not name:
        return HashConfig()
    try:
        return config_for(int(name)) if name.isdigit() else config_for(name)
    except PrefixAuthError as exc:
        raise CliError(EXIT_MALFORMED, f"PFXD_HASH: {exc}")


def cmd_append(args: argparse.Namespace) -> int:
    if args.item_file is not None:
        try:
            item = open(args.item_file, "rb").read()
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read item: {exc}")
    else:
        item = sys.stdin.buffer.read()
    if not os.path.exists(args.log):
        if not args.create:
            raise CliError(EXIT_IO, f"log {args.log} does not exist (use --create)")
        config = _default_config()
        scheme = schemes.get_scheme(args.scheme)
        try:
            write_log_header(args.log, scheme.scheme_id, config)
        except OSError as exc:
            raise CliError(EXIT_IO, str(exc))
        write_state(state_path(args.log), pas.initial_state(scheme), config)
    scheme_id, config, _ = read_log(args.log)

    with open(state_path(args.log), "rb+") as lockfh:
        fcntl.flock(lockfh, fcntl.LOCK_EX)
        try:
            state = read_state(state_path(args.log), scheme_id, config)
            digest, new_state = pas.sparse_commit(state, item, Hasher(config))
            append_log_item(args.log, item)
            write_state(state_path(args.log), new_state, config)
        finally:
            fcntl.flock(lockfh, fcntl.LOCK_UN)
    print(encode_cli_digest(digest, config).hex())
    return EXIT_OK


def cmd_digest(args: argparse.Namespace) -> int:
    scheme_id, config, items = read_log(args.log)
    if not items:
        raise CliError(EXIT_MALFORMED, "log is empty; nothing to digest")
    digest = pas.commit(schemes.get_scheme(scheme_id), items, Hasher(config))
    print(encode_cli_digest(digest, config).hex())
    return EXIT_OK


def cmd_prove(args: argparse.Namespace) -> int:
    scheme_id, config, items = read_log(args.log)
    scheme = schemes.get_scheme(scheme_id)
    n = len(items)
    hasher = Hasher(config)
    if args.stamp is not None:
        i, j = args.stamp
        if not 1 <= i < j <= n:
            raise CliError(EXIT_MALFORMED, f"--stamp positions must satisfy 1 <= I < J <= {n}")
        artifact = pas.timestamp_certify(scheme, items[:i], items[:j], hasher).encode()
    else:
        ls = args.prefix
        lt = args.at if args.at is not None else n
        if not 1 <= ls < lt <= n:
            raise CliError(EXIT_MALFORMED, f"--prefix/--at must satisfy 1 <= LS < LT <= {n}")
        artifact = pas.certify(scheme, items[:lt], ls, hasher).encode()
    try:
        with open(args.out, "wb") as fh:
            fh.write(artifact)
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc))
    print(f"wrote {len(artifact)} octets to {args.out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    d_s, config_s = parse_hex_digest(args.digest_s)
    d_t, config_t = parse_hex_digest(args.digest_t)
    if config_s != config_t:
        raise CliError(EXIT_MALFORMED, "digests use different hash configurations")
    try:
        raw = open(args.cert, "rb").read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read certificate: {exc}")
    hasher = Hasher(config_s)
    try:
        if args.stamp:
            tc = pas.decode_timestamp_certificate(raw, config_s.k)
            ok = pas.timestamp_verify(d_s, d_t, tc, hasher)
        else:
            cert = pas.decode_prefix_certificate(raw)
            ok = pas.verify(d_s, d_t, cert, hasher)
    except (pas.MalformedCertificateError, pas.ContextMismatchError, PrefixAuthError) as exc:
        raise CliError(EXIT_MALFORMED, str(exc))
    if ok:
        print("verified")
        return EXIT_OK
    print("refuted: certificate does not connect the two digests")
    return EXIT_REFUTED


def cmd_bench(args: argparse.Namespace) -> int:
    names = list(schemes.SCHEME_NAMES) if args.schemes == "all" else args.schemes.split(",")
    grid = [n for n in (2**j for j in range(1, args.n_max.bit_length())) if n <= args.n_max]
    if args.n_max not in grid:
        grid.append(args.n_max)
    rows = []
    for name in names:
        try:
            scheme = schemes.get_scheme(name.strip())
        except PrefixAuthError as exc:
            raise CliError(EXIT_MALFORMED, str(exc))
        rows.extend(bench.measure(scheme, grid, measure_verify=not args.no_verify))
    text, csv_text = bench.table_report(rows)
    try:
        with open(args.csv, "w") as fh:
            fh.write(csv_text)
        if args.gnuplot:
            with open(args.gnuplot, "w") as fh:
                fh.write(bench.gnuplot_data(rows))
    except OSError as exc:
        raise CliError(EXIT_IO, str(exc))
    print(text)
    print(f"wrote {args.csv}")
    return EXIT_OK


def cmd_export_dot(args: argparse.Namespace) -> int:
    if args.n > 4096:
        raise CliError(EXIT_MALFORMED, "dot export is desk-scale only (N <= 4096)")
    try:
        scheme = schemes.get_scheme(args.scheme)
    except PrefixAuthError as exc:
        raise CliError(EXIT_MALFORMED, str(exc))
    dot = schemes.export_dot(scheme, args.n)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(dot)
        except OSError as exc:
            raise CliError(EXIT_IO, str(exc))
        print(f"wrote {args.out}")
    else:
        print(dot, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prefixauth", description="prefix authentication over append-only logs")
    sub = p.add_subparsers(dest="command", required=True)

    ap = sub.add_parser("append", help="append one item and print the new digest")
    ap.add_argument("log")
    ap.add_argument("--create", action="store_true", help="create the log if missing")
    ap.add_argument("--scheme", default="ct", choices=schemes.SCHEME_NAMES, help="scheme for new logs")
    ap.add_argument("--item-file", help="read the item from this file instead of stdin")
    ap.set_defaults(fn=cmd_append)

    dp = sub.add_parser("digest", help="print the digest of the whole log (batch recompute)")
    dp.add_argument("log")
    dp.set_defaults(fn=cmd_digest)

    pp = sub.add_parser("prove", help="write a prefix or timestamp certificate")
    pp.add_argument("log")
    group = pp.add_mutually_exclusive_group(required=True)
    group.add_argument("--prefix", type=int, metavar="LS", help="certify the first LS items")
    group.add_argument("--stamp", type=int, nargs=2, metavar=("I", "J"), help="timestamp item I before item J")
    pp.add_argument("--at", type=int, metavar="LT", help="extension length (default: item count)")
    pp.add_argument("--out", default="certificate.bin")
    pp.set_defaults(fn=cmd_prove)

    vp = sub.add_parser("verify", help="verify a certificate against two digests")
    vp.add_argument("--digest-s", required=True, help="hex digest of the prefix")
    vp.add_argument("--digest-t", required=True, help="hex digest of the extension")
    vp.add_argument("--cert", required=True)
    vp.add_argument("--stamp", action="store_true", help="the file is a timestamp certificate")
    vp.set_defaults(fn=cmd_verify)

    bp = sub.add_parser("bench", help="measure complexity metrics and write a CSV")
    bp.add_argument("--schemes", default="all")
    bp.add_argument("--n-max", type=int, default=1024)
    bp.add_argument("--csv", default="bench.csv")
    bp.add_argument("--gnuplot", help="also write gnuplot-compatible data here")
    bp.add_argument("--no-verify", action="store_true", help="skip verify-work instrumentation")
    bp.set_defaults(fn=cmd_bench)

    ep = sub.add_parser("export-dot", help="write the truncated graph as graphviz dot")
    ep.add_argument("--scheme", required=True)
    ep.add_argument("--n", type=int, required=True)
    ep.add_argument("--out")
    ep.set_defaults(fn=cmd_export_dot)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "n_max", 1) > 2**14 or getattr(args, "n", 1) > 2**14:
        print("error: bounds exceeded (max 2^14)", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except PrefixAuthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
