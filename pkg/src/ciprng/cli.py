"""Command-line front end.

Exit status: 0 on success, 1 when an operation rejects its input, 2 on a
usage error (argparse prints the help text).  Every command that draws
random numbers takes an explicit ``--seed``; nothing reads system entropy.
"""

import argparse
import json
import os
import sys

from . import bg
from .bbs import BbsGridConfig, bbs_grid_run, seed_bbs_grid
from .chaotic import load_boolean_function
from .errors import CiprngError, DomainError
from .kernels import GridConfig, improved_kernel_run, naive_kernel_run, seed_grid
from .seeding import SeedExpander
from .stats import BitStream, run_battery
from .stream import FORMATS, GENERATORS, benchmark, emit, encode_words, make_generator
from .verifier import chaos_report

THREADS_ENV = "CIPRNG_THREADS"


def seed_value(text):
    """A seed in 0..2**64-1, decimal or 0x-prefixed hex."""
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def non_negative(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid count {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("count must be non-negative")
    return v


def positive(text):
    v = non_negative(text)
    if v == 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return v


def worker_count(requested):
    """Pool size, capped by the environment variable if set."""
    workers = requested or os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, workers)


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout.buffer, False
    return open(path, "wb"), True


def _write_text(text, path):
    sink, close = _open_out(path)
    try:
        sink.write(text.encode())
        sink.flush()
    finally:
        if close:
            sink.close()


def _read_text(path):
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _stream_options(p, seed_required=True):
    p.add_argument("--generator", choices=GENERATORS, default="ci-seq",
                   help="generator to draw from (default: ci-seq)")
    p.add_argument("--seed", type=seed_value, required=seed_required,
                   help="64-bit master seed, decimal or 0x-hex")
    p.add_argument("--threads", type=positive, default=64,
                   help="logical GPU threads for kernel generators (default: 64)")
    p.add_argument("--comb-size", type=positive, default=8,
                   help="combination array size for kernel generators (default: 8)")
    p.add_argument("--workers", type=positive, default=None,
                   help=f"OS worker threads (default: CPU count, capped by {THREADS_ENV})")


def _generator(args):
    return make_generator(args.generator, args.seed, threads=args.threads,
                          comb_size=args.comb_size, workers=worker_count(args.workers))


def cmd_gen(args):
    sink, close = _open_out(args.out)
    try:
        emit(_generator(args), args.count, args.format, sink)
    finally:
        if close:
            sink.close()
    return 0


def cmd_analyze(args):
    f = load_boolean_function(args.function)
    _write_text(json.dumps(chaos_report(f, args.cesaro_k), indent=2) + "\n", args.out)
    return 0


def _load_comb(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from None


def cmd_kernel(args):
    workers = worker_count(args.workers)
    comb = _load_comb(args.comb_file) if args.comb_file else None
    T = args.threads
    if args.kind == "naive":
        grid = seed_grid(args.seed, T, "naive")
        run = lambda: naive_kernel_run(grid, args.count, workers)  # noqa: E731
    elif args.kind == "improved":
        grid = seed_grid(args.seed, T, "improved")
        if comb is not None:
            config = GridConfig(T, comb["comb1"], comb["comb2"], comb.get("block_size"))
        else:
            config = GridConfig.random(T, args.comb_size, args.seed)
        run = lambda: improved_kernel_run(grid, config, args.count, workers)  # noqa: E731
    else:
        grid = seed_bbs_grid(args.seed, T)
        if comb is not None:
            config = BbsGridConfig(T, comb["array_comb"], comb.get("block_size"))
        else:
            config = BbsGridConfig.random(T, args.comb_size, args.seed)
        run = lambda: bbs_grid_run(grid, config, args.count, workers)  # noqa: E731
    sink, close = _open_out(args.out)
    try:
        for _ in range(args.calls):
            sink.write(encode_words(run(), args.format))
        sink.flush()
    finally:
        if close:
            sink.close()
    return 0


def cmd_battery(args):
    reports = run_battery(BitStream(_generator(args), args.count), args.alpha)
    doc = {"generator": args.generator, "seed": args.seed, "bits": args.count,
           "alpha": args.alpha, "tests": [r.as_dict() for r in reports]}
    _write_text(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_bench(args):
    result = benchmark(_generator(args), args.duration)
    result["generator"] = args.generator
    _write_text(json.dumps(result, indent=2) + "\n", args.out)
    return 0


def _message_bits(text):
    text = text.strip()
    if not text or any(ch not in "01" for ch in text):
        raise DomainError("message must be a non-empty string of 0 and 1")
    return [int(ch) for ch in text]


def cmd_bg_keygen(args):
    key = bg.bg_keygen(SeedExpander(args.seed), args.bits, chaotic=args.chaotic)
    _write_text(bg.format_secret_key(key), args.out)
    if args.public_out:
        _write_text(bg.format_public_key(key), args.public_out)
    return 0


def _modulus(fields):
    if "N" in fields:
        return fields["N"]
    if "p" in fields and "q" in fields:
        return fields["p"] * fields["q"]
    raise DomainError("key file must give N or both p and q")


def cmd_bg_encrypt(args):
    fields = bg.parse_key(_read_text(args.key), args.key)
    N = _modulus(fields)
    bits = _message_bits(args.message)
    if args.chaotic:
        h = bg.block_bits(N)
        ct = bg.encrypt_with_seed((fields.get("S0", 0), N), bg.bits_to_blocks(bits, h),
                                  args.seed, chaotic=True)
    else:
        ct = bg.encrypt_with_seed(N, bits, args.seed)
    _write_text(bg.format_ciphertext(ct), args.out)
    return 0


def cmd_bg_decrypt(args):
    fields = bg.parse_key(_read_text(args.key), args.key)
    if "p" not in fields or "q" not in fields:
        raise DomainError("decryption needs a secret key with p and q")
    ct = bg.parse_ciphertext(_read_text(args.input), args.input or "stdin")
    key = (fields["p"], fields["q"])
    if args.chaotic:
        blocks = bg.cbg_decrypt(key, fields.get("S0", 0), ct)
        bits = bg.blocks_to_bits(blocks, ct.unit_bits)
    else:
        if ct.unit_bits != 1:
            raise DomainError("ciphertext was produced by the chaotic variant; pass --chaotic")
        bits = bg.bg_decrypt(key, ct)
    _write_text("".join(map(str, bits)) + "\n", args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ciprng",
        description="Chaotic-iteration pseudorandom generators and companion tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write generator output")
    _stream_options(p)
    p.add_argument("--count", type=non_negative, default=1024,
                   help="number of 32-bit words (default: 1024)")
    p.add_argument("--format", choices=FORMATS, default="raw-le32",
                   help="raw-le32 (binary), hex (one word per line) or bits (ASCII 0/1)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="chaos report for a Boolean function file")
    p.add_argument("function", help="file with n on the first line, then 2**n hex values")
    p.add_argument("--cesaro-k", type=positive, default=64,
                   help="number of matrix powers averaged (default: 64)")
    p.add_argument("--out", help="output file for the JSON report (default: stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("kernel", help="run a simulated GPU kernel grid")
    p.add_argument("kind", choices=("naive", "improved", "bbs"))
    p.add_argument("--seed", type=seed_value, required=True, help="64-bit master seed")
    p.add_argument("--threads", type=positive, default=1024,
                   help="logical GPU threads (default: 1024)")
    p.add_argument("--count", type=positive, default=64,
                   help="words per thread and call (default: 64)")
    p.add_argument("--calls", type=positive, default=1, help="kernel calls (default: 1)")
    p.add_argument("--comb-size", type=positive, default=8,
                   help="size of random combination arrays (default: 8)")
    p.add_argument("--comb-file",
                   help='JSON combination arrays: {"comb1": [...], "comb2": [...]} for '
                        'improved, {"array_comb": [16 lists]} for bbs; optional "block_size"')
    p.add_argument("--workers", type=positive, default=None,
                   help=f"OS worker threads (default: CPU count, capped by {THREADS_ENV})")
    p.add_argument("--format", choices=FORMATS, default="raw-le32", help="output format")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("battery", help="run the internal statistical battery")
    _stream_options(p)
    p.add_argument("--count", type=non_negative, default=1_000_000,
                   help="number of bits, at least 10**6 (default: 10**6)")
    p.add_argument("--alpha", type=float, default=0.01,
                   help="significance level (default: 0.01)")
    p.add_argument("--out", help="output file for the JSON report (default: stdout)")
    p.set_defaults(func=cmd_battery)

    p = sub.add_parser("bench", help="measure generator throughput")
    _stream_options(p)
    p.add_argument("--duration", type=float, default=1.0,
                   help="seconds to run, at least 1 (default: 1)")
    p.add_argument("--out", help="output file for the JSON result (default: stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("bg", help="toy Blum-Goldwasser encryption")
    bsub = p.add_subparsers(dest="bg_command", required=True)

    q = bsub.add_parser("keygen", help="generate a secret key")
    q.add_argument("--seed", type=seed_value, required=True, help="64-bit master seed")
    q.add_argument("--bits", type=int, choices=range(3, 33), default=16, metavar="3..32",
                   help="bit length of each prime (default: 16)")
    q.add_argument("--chaotic", action="store_true", help="also draw the public word S0")
    q.add_argument("--out", help="secret key file (default: stdout)")
    q.add_argument("--public-out", help="also write the public key to this file")
    q.set_defaults(func=cmd_bg_keygen)

    q = bsub.add_parser("encrypt", help="encrypt a bit string")
    q.add_argument("--key", required=True, help="public (N, S0) or secret key file")
    q.add_argument("--message", required=True, help="message as a string of 0 and 1")
    q.add_argument("--seed", type=seed_value, required=True,
                   help="64-bit seed for the encryption randomness r")
    q.add_argument("--chaotic", action="store_true",
                   help="cumulative-XOR variant; message length must be a multiple of h")
    q.add_argument("--out", help="ciphertext file (default: stdout)")
    q.set_defaults(func=cmd_bg_encrypt)

    q = bsub.add_parser("decrypt", help="decrypt a ciphertext file")
    q.add_argument("--key", required=True, help="secret key file with p and q")
    q.add_argument("--input", help="ciphertext file (default: stdin)")
    q.add_argument("--chaotic", action="store_true", help="cumulative-XOR variant")
    q.add_argument("--out", help="plaintext output (default: stdout)")
    q.set_defaults(func=cmd_bg_decrypt)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CiprngError, ValueError, KeyError, OSError) as exc:
        msg = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"ciprng: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
