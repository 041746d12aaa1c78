"""Command-line surface: decode, oracle, verify, gen, bench.

Exit codes: 0 success, 2 usage error (argparse), 3 parse/format error,
4 solve error (infeasible syndrome or enumeration overflow), 5 verification
failure.  Machine-readable failures carry a tag on stderr, e.g.
``error[infeasible]: ...``.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .codes import GENERATORS, generate_code
from .decoder import DecoderConfig, decode, verify_certificate
from .formats import (
    FormatError,
    format_rational,
    parse_certificate,
    parse_problem,
    parse_rational,
    serialize_certificate,
    serialize_problem,
)
from .hypergraph import HypergraphError, edge_weight_from_probability
from .oracle import EnumerationOverflow, InfeasibleSyndrome, brute_force_mwpf
from .sampling import sample_syndromes

EXIT_OK = 0
EXIT_PARSE = 3
EXIT_SOLVE = 4
EXIT_VERIFY = 5

THREADS_ENV = "PARITYFACTOR_THREADS"


class _CliError(Exception):
    def __init__(self, code: int, tag: str, message: str):
        super().__init__(message)
        self.code = code
        self.tag = tag


def _fail(code: int, tag: str, message: str) -> "_CliError":
    return _CliError(code, tag, message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _fail(EXIT_PARSE, "io", f"cannot read {path}: {exc}") from exc


def _load_problem(path: str):
    try:
        return parse_problem(_read_text(path))
    except FormatError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc


def _parse_syndrome_tokens(text: str) -> list[int]:
    tokens = text.replace(",", " ").split()
    out = []
    for token in tokens:
        token = token.lower().lstrip("v")
        try:
            out.append(int(token))
        except ValueError:
            raise _fail(EXIT_PARSE, "parse", f"bad syndrome token {token!r}") from None
    return out


def _resolve_syndrome(args, embedded) -> list[int]:
    if getattr(args, "syndrome", None) is not None:
        return _parse_syndrome_tokens(args.syndrome)
    if getattr(args, "syndrome_file", None) is not None:
        return _parse_syndrome_tokens(_read_text(args.syndrome_file))
    if embedded is not None:
        return sorted(embedded)
    raise _fail(EXIT_PARSE, "parse",
                "no syndrome: pass --syndrome, --syndrome-file, or embed one")


def _parse_limit(text: str) -> int | None:
    if text.lower() in ("inf", "none", "unbounded"):
        return None
    try:
        value = int(text)
    except ValueError:
        raise _fail(EXIT_PARSE, "parse", f"bad cluster limit {text!r}") from None
    if value < 0:
        raise _fail(EXIT_PARSE, "parse", "cluster limit must be >= 0 or inf")
    return value


def _config_from_args(args) -> DecoderConfig:
    try:
        return DecoderConfig(
            cluster_limit=_parse_limit(args.c),
            finders=tuple(t.strip() for t in args.finders.split(",") if t.strip())
            if args.finders else ("single-hair",),
            free_var_cap=args.free_var_cap,
            stage=args.stage,
        )
    except ValueError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_decode(args) -> int:
    graph, embedded, _meta = _load_problem(args.problem)
    syndrome = _resolve_syndrome(args, embedded)
    config = _config_from_args(args)
    try:
        certificate = decode(graph, syndrome, config)
    except InfeasibleSyndrome as exc:
        raise _fail(EXIT_SOLVE, "infeasible", str(exc)) from exc
    except HypergraphError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc
    _write_out(serialize_certificate(certificate), args.out)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    graph, embedded, _meta = _load_problem(args.problem)
    syndrome = _resolve_syndrome(args, embedded)
    try:
        pattern, weight = brute_force_mwpf(graph, syndrome, free_var_cap=args.cap)
    except InfeasibleSyndrome as exc:
        raise _fail(EXIT_SOLVE, "infeasible", str(exc)) from exc
    except EnumerationOverflow as exc:
        raise _fail(EXIT_SOLVE, "overflow", str(exc)) from exc
    except HypergraphError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc
    import json
    _write_out(json.dumps({
        "pattern": sorted(pattern),
        "weight": format_rational(weight),
    }, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    graph, embedded, _meta = _load_problem(args.problem)
    try:
        certificate = parse_certificate(_read_text(args.certificate))
    except FormatError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc
    syndrome = _resolve_syndrome(args, embedded)
    try:
        ok, failures = verify_certificate(graph, syndrome, certificate)
    except HypergraphError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc
    if ok:
        print("PASS")
        return EXIT_OK
    for failure in failures:
        print(f"FAIL: {failure}")
    raise _fail(EXIT_VERIFY, "verify", "certificate verification failed")


def _cmd_gen(args) -> int:
    p = parse_rational(args.p) if args.p else None
    try:
        if args.weight_from_p:
            if p is None:
                raise _fail(EXIT_PARSE, "parse", "--weight-from-p requires --p")
            weight = edge_weight_from_probability(p)
        else:
            weight = Fraction(1)
        graph = generate_code(args.kind, args.d, weight)
    except HypergraphError as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc
    metadata = {"code": args.kind, "distance": args.d}
    if p is not None:
        metadata["noise"] = format_rational(p)
    _write_out(serialize_problem(graph, metadata=metadata), args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    graph, _embedded, _meta = _load_problem(args.problem)
    try:
        p = parse_rational(args.p)
        shots = sample_syndromes(graph, p, args.shots, args.seed)
    except (FormatError, HypergraphError) as exc:
        raise _fail(EXIT_PARSE, "parse", str(exc)) from exc
    limits = [(_parse_limit(token), token) for token in args.c.split(",")]
    threads = args.threads or int(os.environ.get(THREADS_ENV, "1"))

    oracle_weights: list = []
    for _pattern, syndrome in shots:
        try:
            oracle_weights.append(brute_force_mwpf(graph, syndrome, args.cap)[1])
        except EnumerationOverflow:
            oracle_weights.append(None)

    def run_shot(pair, config):
        _pattern, syndrome = pair
        t0 = time.perf_counter()
        certificate = decode(graph, syndrome, config)
        return time.perf_counter() - t0, certificate

    rows = []
    for limit, token in limits:
        config = DecoderConfig(
            cluster_limit=limit,
            finders=tuple(t.strip() for t in args.finders.split(",") if t.strip())
            if args.finders else ("single-hair",),
            free_var_cap=args.free_var_cap,
        )
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda pair: run_shot(pair, config), shots))
        else:
            results = [run_shot(pair, config) for pair in shots]
        total_time = sum(t for t, _ in results)
        certified = sum(1 for _, c in results if c.certified)
        gaps = sum((c.gap for _, c in results), Fraction(0))
        optimal = 0
        comparable = 0
        for (_, certificate), oracle_weight in zip(results, oracle_weights):
            if oracle_weight is None:
                continue
            comparable += 1
            if certificate.primal_weight == oracle_weight:
                optimal += 1
        rows.append({
            "c": token,
            "avg_ms": 1000 * total_time / len(shots) if shots else 0.0,
            "optimal": f"{optimal}/{comparable}" if comparable else "n/a",
            "certified": f"{certified}/{len(shots)}",
            "avg_gap": format_rational(gaps / len(shots)) if shots else "0",
        })

    header = f"{'c':>8} {'avg_ms':>10} {'optimal':>12} {'certified':>12} {'avg_gap':>12}"
    print(header)
    for row in rows:
        print(f"{row['c']:>8} {row['avg_ms']:>10.3f} {row['optimal']:>12} "
              f"{row['certified']:>12} {row['avg_gap']:>12}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parityfactor",
        description="Certifying minimum-weight parity factor decoder.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_syndrome_opts(p):
        p.add_argument("--syndrome", help="comma-separated defect vertex ids (v3,7,...)")
        p.add_argument("--syndrome-file", help="file with whitespace/comma-separated ids")

    def add_config_opts(p):
        p.add_argument("--c", default="inf",
                       help="per-cluster hyperblossom limit (integer or 'inf')")
        p.add_argument("--finders", default="single-hair",
                       help="comma-separated relaxer finders, tried in order")
        p.add_argument("--free-var-cap", type=int, default=16)
        p.add_argument("--stage", default="search-refine",
                       choices=["search-refine", "search-only"])

    p = sub.add_parser("decode", help="decode a syndrome into a certificate")
    p.add_argument("problem")
    add_syndrome_opts(p)
    add_config_opts(p)
    p.add_argument("--out", help="certificate output path (default stdout)")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("oracle", help="brute-force minimum-weight parity factor")
    p.add_argument("problem")
    add_syndrome_opts(p)
    p.add_argument("--cap", type=int, default=16, help="free-variable cap")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("verify", help="re-check a certificate")
    p.add_argument("problem")
    p.add_argument("certificate")
    add_syndrome_opts(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("gen", help="generate a benchmark code instance")
    p.add_argument("kind", choices=sorted(GENERATORS))
    p.add_argument("--d", type=int, required=True, help="odd code distance >= 3")
    p.add_argument("--p", help="noise level to record in metadata (rational)")
    p.add_argument("--weight-from-p", action="store_true",
                   help="derive edge weights as log((1-p)/p) instead of 1")
    p.add_argument("--out", help="problem output path (default stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="sample syndromes and decode them per c")
    p.add_argument("problem")
    p.add_argument("--p", required=True, help="per-edge error rate (rational)")
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--c", default="inf", help="comma-separated cluster limits")
    p.add_argument("--finders", default="single-hair")
    p.add_argument("--free-var-cap", type=int, default=16)
    p.add_argument("--cap", type=int, default=16, help="oracle free-variable cap")
    p.add_argument("--threads", type=int, default=0,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error[{exc.tag}]: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
