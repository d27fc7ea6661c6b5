"""Command-line interface: ``hybhuff <subcommand> ...``.

Exit status is 0 on success and a distinct non-zero code per error class
(see :data:`hybhuff.exceptions.EXIT_CODES`); 15 for I/O errors and 20 when a
``verify`` check fails.
"""

import argparse
import csv
import sys
import time

import numpy as np

from . import archive as arc
from .bitio import bitwidth_for
from .exceptions import HybHuffError, exit_code_for
from .frequency import build_frequency_profile, default_alpha, estimate_cost, huffman_domain_size
from .huffman import build_huffman
from .hypergraph import (
    generate_zipfian_hypergraph,
    load_hypergraph,
    save_hypergraph,
    serialize_adjacency_hypergraph,
)
from .optimizer import optimize
from .validation import check_alpha, check_ratio
from .workloads import UNREACHED, ArchiveSource, RawSource, bfs, kcore_label_propagation, pagerank

EXIT_IO = 15
EXIT_VERIFY_FAILED = 20
VERIFY_RATIOS = (0.0, 0.05, 0.25, 0.5, 1.0)


def _ms(seconds):
    return f"{seconds * 1000.0:.3f}"


def _alpha(args):
    return default_alpha() if args.alpha is None else check_alpha(args.alpha)


def _read_bytes(path):
    with open(path, "rb") as fh:
        return fh.read()


def _load_graph(path, strict=False):
    try:
        return load_hypergraph(path, strict=strict)
    except HybHuffError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def _report(pairs, stream=None):
    stream = stream or sys.stdout
    for key, value in pairs:
        print(f"{key}: {value}", file=stream)


def _compress(h, rho, alpha, auto, exhaustive, canonical):
    t0 = time.perf_counter()
    side, offsets, adjacency = arc.select_side(h)
    if canonical:
        adjacency = arc._sort_segments(offsets, adjacency)
    profile = build_frequency_profile(adjacency)
    t1 = time.perf_counter()
    report = None
    if auto:
        report = optimize(profile, alpha, exhaustive=exhaustive)
        m = report.best_m
    else:
        m = huffman_domain_size(rho, profile.num_symbols)
    book = build_huffman(profile, domain_size=m)
    t2 = time.perf_counter()
    archive = arc.encode_with_profile(h, side, offsets, adjacency, profile, m, canonical, book=book)
    t3 = time.perf_counter()
    timings = {"profile_ms": t1 - t0, "tree_ms": t2 - t1, "encode_ms": t3 - t2}
    return archive, profile, report, timings


def cmd_compress(args):
    alpha = _alpha(args)
    if not args.auto:
        check_ratio(args.rho, allow_auto=False)
    h = _load_graph(args.input, strict=args.strict)
    original = len(serialize_adjacency_hypergraph(h))
    archive, profile, report, timings = _compress(
        h, args.rho, alpha, args.auto, args.exhaustive, args.canonical
    )
    data = archive.to_bytes()
    with open(args.output, "wb") as fh:
        fh.write(data)
    pairs = [
        ("side", archive.side.name.lower()),
        ("incidences", archive.num_incidences),
        ("distinct_symbols", archive.num_symbols),
        ("huffman_domain_size", archive.domain_size),
        ("rho", f"{archive.rho:.6f}"),
        ("bitwise_width", archive.bitwise_width),
        ("payload_bits", archive.payload_bits),
        ("tree_bits", archive.tree.bit_length),
        ("metadata_bits", archive.metadata_bits),
        ("estimated_bits", f"{estimate_cost(profile, archive.domain_size, alpha):.1f}"),
        ("original_bytes", original),
        ("compressed_bytes", len(data)),
    ]
    if original:
        pairs.append(("compression_rate_pct", f"{arc.compression_rate(original, len(data)):.3f}"))
    if report is not None:
        pairs.append(("search_mode", report.mode))
        pairs.append(("search_evaluations", report.num_evaluations))
    pairs.extend((key, _ms(val)) for key, val in timings.items())
    _report(pairs)
    return 0


def cmd_decompress(args):
    archive = arc.HybridArchive.from_bytes(_read_bytes(args.input))
    t0 = time.perf_counter()
    h = arc.decode(archive)
    elapsed = time.perf_counter() - t0
    written = save_hypergraph(h, args.output, binary=args.binary)
    _report(
        [
            ("vertices", h.num_vertices),
            ("hyperedges", h.num_hyperedges),
            ("incidences", h.num_incidences),
            ("output_bytes", written),
            ("decode_ms", _ms(elapsed)),
        ]
    )
    return 0


def _same_lists(offsets, expected, actual):
    rows = np.repeat(np.arange(len(offsets) - 1), np.diff(offsets))
    a = expected[np.lexsort((expected, rows))]
    b = actual[np.lexsort((actual, rows))]
    return np.array_equal(a, b)


def _verify_graph(h, alpha, checks):
    try:
        h.check_duality()
        checks.append(("input duality", True, ""))
    except HybHuffError as exc:
        checks.append(("input duality", False, str(exc)))
        return
    side, offsets, adjacency = arc.select_side(h)
    profile = build_frequency_profile(adjacency)
    auto_m = optimize(profile, alpha).best_m
    cases = [(f"rho={rho:g}", {"rho": rho}) for rho in VERIFY_RATIOS]
    cases.append((f"auto m={auto_m}", {"domain_size": auto_m}))
    for label, kwargs in cases:
        try:
            archive = arc.encode(h, **kwargs)
            reread = arc.HybridArchive.from_bytes(archive.to_bytes())
            got_offsets, got = arc.decode_side(reread)
            ok = np.array_equal(got_offsets, offsets) and _same_lists(offsets, adjacency, got)
            rebuilt = arc.decode(reread)
            rebuilt.check_duality()
            lazy = [x for lst in arc.adjacency_iterator(reread) for x in lst]
            ok = ok and np.array_equal(np.asarray(lazy, dtype=np.int64), got)
            detail = f"{len(archive.to_bytes())} bytes"
            if kwargs.get("rho") == 0.0 and profile.num_symbols:
                expected = profile.total * bitwidth_for(int(profile.ranked_symbols.max()))
                ok = ok and archive.payload_bits == expected
                detail += f", payload {archive.payload_bits} bits"
            checks.append((f"roundtrip {label}", bool(ok), detail))
        except HybHuffError as exc:
            checks.append((f"roundtrip {label}", False, str(exc)))


def _verify_archive(data, checks):
    try:
        archive = arc.HybridArchive.from_bytes(data)
        checks.append(("archive header and checksums", True, ""))
        h = arc.decode(archive)
        checks.append(("decode with exhausted cursors", True, f"{h.num_incidences} incidences"))
        h.check_duality()
        lazy = sum(len(x) for x in arc.adjacency_iterator(archive))
        checks.append(("iterator degree sum", lazy == archive.num_incidences, f"{lazy}"))
    except HybHuffError as exc:
        segment = getattr(exc, "segment", None)
        name = f"archive segment {segment}" if segment else "archive"
        checks.append((name, False, str(exc)))


def cmd_verify(args):
    data = _read_bytes(args.input)
    checks = []
    if data[:4] == arc.MAGIC:
        _verify_archive(data, checks)
    else:
        _verify_graph(_load_graph(args.input), _alpha(args), checks)
    failed = 0
    for name, ok, detail in checks:
        failed += not ok
        suffix = f" ({detail})" if detail else ""
        print(f"{'PASS' if ok else 'FAIL'} {name}{suffix}")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_VERIFY_FAILED if failed else 0


def _ratio_grid(step):
    if not 0.0 < step <= 1.0:
        raise ValueError(f"--step must lie in (0, 1], got {step}")
    count = int(round(1.0 / step))
    if abs(count * step - 1.0) > 1e-9:
        count = int(1.0 / step + 1e-9)
    grid = [min(1.0, i * step) for i in range(count + 1)]
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_sweep(args):
    alpha = _alpha(args)
    h = _load_graph(args.input)
    side, offsets, adjacency = arc.select_side(h)
    profile = build_frequency_profile(adjacency)
    out = _open_out(args.output)
    try:
        writer = csv.writer(out, lineterminator="\n")
        if args.every_m:
            payload, tree = arc.coded_bits_curve(profile)
            writer.writerow(["m", "rho", "estimated_bits", "actual_bits"])
            k = profile.num_symbols
            for m in range(k + 1):
                writer.writerow(
                    [m, f"{m / k if k else 0.0:.6f}", f"{estimate_cost(profile, m, alpha):.3f}",
                     int(payload[m] + tree[m])]
                )
            return 0
        writer.writerow(
            ["rho", "m", "actual_bytes", "estimated_bytes", "payload_bits", "encode_ms", "decode_ms"]
        )
        for rho in _ratio_grid(args.step):
            m = huffman_domain_size(rho, profile.num_symbols)
            t0 = time.perf_counter()
            archive = arc.encode_with_profile(h, side, offsets, adjacency, profile, m)
            t1 = time.perf_counter()
            arc.decode(archive)
            t2 = time.perf_counter()
            estimated = estimate_cost(profile, m, alpha) / 8.0
            writer.writerow(
                [f"{rho:.6f}", m, arc.compressed_size(archive), f"{estimated:.3f}",
                 archive.payload_bits, _ms(t1 - t0), _ms(t2 - t1)]
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_optimize(args):
    alpha = _alpha(args)
    h = _load_graph(args.input)
    side, offsets, adjacency = arc.select_side(h)
    profile = build_frequency_profile(adjacency)
    t0 = time.perf_counter()
    report = optimize(profile, alpha, exhaustive=args.exhaustive)
    elapsed = time.perf_counter() - t0
    pairs = [
        ("mode", report.mode),
        ("distinct_symbols", profile.num_symbols),
        ("best_m", report.best_m),
        ("best_rho", f"{report.best_rho:.6f}"),
        ("estimated_bits", f"{report.best_bits:.1f}"),
        ("evaluations", report.num_evaluations),
        ("search_ms", _ms(elapsed)),
    ]
    if report.refinement_interval is not None:
        pairs.append(("refinement_interval", "%d..%d" % report.refinement_interval))
    if args.measure:
        archive = arc.encode_with_profile(h, side, offsets, adjacency, profile, report.best_m)
        pairs.append(("actual_coded_bits", archive.coded_bits))
        pairs.append(("actual_bytes", arc.compressed_size(archive)))
    _report(pairs)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["m", "rho", "estimated_bits"])
            for m, rho, bits in report.to_csv_rows():
                writer.writerow([m, f"{rho:.6f}", f"{bits:.3f}"])
    return 0


def cmd_run(args):
    data = _read_bytes(args.input)
    t0 = time.perf_counter()
    if data[:4] == arc.MAGIC:
        source = ArchiveSource(arc.HybridArchive.from_bytes(data))
    else:
        source = RawSource(_load_graph(args.input))
    t1 = time.perf_counter()
    if args.app == "bfs":
        values = bfs(source, args.root)
        lines = ["inf" if x == UNREACHED else str(x) for x in values.tolist()]
    elif args.app == "pagerank":
        values = pagerank(source, damping=args.damping, iterations=args.iters)
        lines = [repr(float(x)) for x in values]
    else:
        values = kcore_label_propagation(source, args.k)
        lines = [str(x) for x in values.tolist()]
    t2 = time.perf_counter()
    out = _open_out(args.out)
    try:
        if lines:
            out.write("\n".join(lines) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    _report(
        [("load_decode_ms", _ms(t1 - t0)), ("compute_ms", _ms(t2 - t1)), ("total_ms", _ms(t2 - t0))],
        stream=sys.stderr,
    )
    return 0


def cmd_generate(args):
    h = generate_zipfian_hypergraph(
        args.vertices, args.hyperedges, args.incidences, args.skew, seed=args.seed
    )
    written = save_hypergraph(h, args.output, binary=args.binary)
    _report([("incidences", h.num_incidences), ("output_bytes", written)])
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hybhuff", description="Hybrid Huffman/bit-packing hypergraph compressor"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_alpha(p):
        p.add_argument("--alpha", type=float, default=None,
                       help="tree cost per Huffman symbol in bits (default: $HYBHUFF_ALPHA or 32)")

    p = sub.add_parser("compress", help="encode a hypergraph into a HYBH archive")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--rho", type=float)
    mode.add_argument("--auto", action="store_true", help="choose rho with the optimizer")
    p.add_argument("--exhaustive", action="store_true", help="with --auto: scan every domain size")
    p.add_argument("--strict", action="store_true", help="check incidence duality of the input")
    p.add_argument("--canonical", action="store_true", help="sort adjacency lists before encoding")
    with_alpha(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a HYBH archive")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--binary", action="store_true", help="write the HGB1 binary format")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("verify", help="roundtrip checks on a hypergraph or an archive")
    p.add_argument("--input", required=True)
    with_alpha(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="CSV of sizes and timings over a rho grid")
    p.add_argument("--input", required=True)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--every-m", action="store_true",
                   help="one row per domain size: m,rho,estimated_bits,actual_bits")
    with_alpha(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="locate the cost-minimising Huffman domain size")
    p.add_argument("--input", required=True)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--measure", action="store_true", help="also encode at the optimum")
    p.add_argument("--csv", help="write evaluated points to this CSV")
    with_alpha(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("run", help="run a workload on a hypergraph or archive")
    p.add_argument("--app", required=True, choices=("bfs", "pagerank", "kcore"))
    p.add_argument("--input", required=True)
    p.add_argument("--root", type=int, default=0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("generate", help="write a Zipfian synthetic hypergraph")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--hyperedges", type=int, required=True)
    p.add_argument("--incidences", type=int, required=True)
    p.add_argument("--skew", type=float, default=1.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--binary", action="store_true")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HybHuffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
