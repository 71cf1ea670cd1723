"""Command-line interface.

Subcommands: generate, scan, histogram, weyl, decay, roots, report.
Exit codes: 0 success, 1 usage error, 2 hypothesis/certification failure.
The sequence cache directory defaults to ./.modsig-cache and can be moved
with the MODSIG_CACHE_DIR environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import algebra, hofstadter, limits, numeration, precision, seqcore, svgplot, weyl
from .precision import IndeterminateError

__all__ = ["main", "build_parser", "parse_beta", "parse_sequence"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def cache_dir() -> Path:
    d = Path(os.environ.get("MODSIG_CACHE_DIR", ".modsig-cache"))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _parse_count(s: str) -> int:
    return int(float(s))


def parse_beta(spec: str) -> precision.RealValue:
    """alg:NAME[/k] | const:e|inv_e | rat:p/q | dec:DIGITS:PRECISION."""
    kind, _, rest = spec.partition(":")
    if kind == "alg" or kind == "const":
        name, _, div = rest.partition("/")
        base = precision.named_constant(name)
        if div:
            return precision.scaled(base, Fraction(1, int(div)), name=f"{name}/{div}")
        return base
    if kind == "rat":
        p, _, q = rest.partition("/")
        return precision.ExactReal(Fraction(int(p), int(q or "1")))
    if kind == "dec":
        lit, _, digits = rest.rpartition(":")
        if not lit or not digits:
            raise ValueError("decimal spec is dec:LITERAL:DIGITS")
        sig = len(re.sub(r"[^0-9]", "", lit).lstrip("0"))
        if int(digits) < sig:
            raise ValueError(
                f"declared precision {digits} below the {sig} significant digits given")
        return precision.ExactReal(Fraction(lit), name=f"dec:{lit}:{digits}")
    raise ValueError(f"unknown beta spec {spec!r}")


def parse_sequence(name: str, d: int, count: int):
    """Returns (values_array_or_table, label).  `count` is term count."""
    if name == "hofstadter":
        table = hofstadter.eval_direct(d, count)
        return table[:count], f"hofstadter{d}"
    if name == "narayana":
        return seqcore.generate_recurrent(seqcore.narayana_spec(), count, increasing=True), "narayana"
    if name == "fibonacci":
        return seqcore.generate_recurrent(seqcore.fibonacci_spec(), count, increasing=True), "fibonacci"
    if name == "gen-narayana":
        return seqcore.generate_recurrent(seqcore.generalized_narayana_spec(d), count,
                                          increasing=True), f"gen_narayana_{d}"
    if name == "ulam":
        return seqcore.generate_ulam(count), "ulam"
    if name == "factorial-sums":
        return seqcore.generate_factorial_sums(count), "factorial_sums"
    if name == "identity":
        return np.arange(count, dtype=np.int64), "identity"
    if name.startswith("powers"):
        b = int(name.split(":")[1]) if ":" in name else 2
        return seqcore.generate_power_base(b, count), f"powers_{b}"
    raise ValueError(f"unknown sequence {name!r}")


def _values_of(obj) -> np.ndarray:
    if isinstance(obj, seqcore.SequenceTable):
        return obj.values_array()
    return np.asarray(obj)


def _seq_cache_key(name: str, d: int, count: int) -> str:
    return f"{name.replace(':', '_')}-d{d}-n{count}"


def _load_or_generate(args):
    key = _seq_cache_key(args.seq, args.d, args.count)
    cpath = cache_dir() / f"{key}.msq"
    if getattr(args, "cache", False) and cpath.exists():
        table = seqcore.read_cache(cpath, name=key)
        return table, key
    obj, label = parse_sequence(args.seq, args.d, args.count)
    if getattr(args, "cache", False):
        table = obj if isinstance(obj, seqcore.SequenceTable) else \
            seqcore.SequenceTable(label, [int(v) for v in obj])
        seqcore.write_cache(table, cpath)
        return table, label
    return obj, label


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    obj, label = _load_or_generate(args)
    out = args.out or f"{label}.csv"
    if isinstance(obj, seqcore.SequenceTable):
        seqcore.write_csv(obj, out)
    else:
        seqcore.write_csv(list(enumerate((int(v) for v in obj), start=1)), out)
    print(f"wrote {args.count} terms of {label} to {out}")
    return EXIT_OK


def cmd_scan(args) -> int:
    obj, label = _load_or_generate(args)
    vals = _values_of(obj)
    spec = weyl.fft_scan(vals, T=args.count, M=args.grid, name=label)
    peaks = spec.top_peaks(args.top)
    out = args.out or f"{label}_spectrum.csv"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("grid_index,frequency,magnitude\n")
        for j, m in enumerate(spec.magnitudes):
            fh.write(f"{j},{j / spec.grid_size:.10f},{m:.10f}\n")
    print(f"grid {spec.grid_size}, {spec.term_count} terms -> {out}")
    for x, m in peaks:
        print(f"peak x={x:.6f} (mirror {1 - x:.6f}) |f|/T={m:.4f}")
    if args.svg:
        svgplot.bar_chart(spec.magnitudes[1:].tolist(), args.svg,
                          title=f"spectrum of {label}", width=args.width, height=args.height)
    return EXIT_OK


def cmd_histogram(args) -> int:
    obj, label = _load_or_generate(args)
    vals = _values_of(obj)
    beta = parse_beta(args.beta)
    hist = weyl.histogram(vals, beta, args.bins, N=args.count, source=label)
    out = args.out or f"{label}_hist.csv"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("bin,count\n")
        for b, c in hist.to_csv_rows():
            fh.write(f"{b},{c}\n")
    print(f"histogram of {{{beta.name} * {label}}} at {hist.total} terms -> {out}")
    print(f"density range [{hist.densities().min():.4f}, {hist.densities().max():.4f}]")
    if args.svg:
        svgplot.bar_chart(hist.densities().tolist(), args.svg,
                          title=f"{beta.name} * {label} mod 1",
                          width=args.width, height=args.height)
    return EXIT_OK


def cmd_weyl(args) -> int:
    beta = parse_beta(args.beta)
    if args.map:
        rmap = numeration.registry_map(args.map, 96)
        rows = weyl.weyl_recurrence(rmap, beta, args.upto_index)
        payload = {
            "engine": "recurrence",
            "map": args.map,
            "frequency": beta.name,
            "checkpoints": [
                {"k": k, "n": ak, "re": z.real, "im": z.imag, "abs": abs(z)}
                for k, ak, z in rows
            ],
        }
        text = json.dumps(payload, sort_keys=True, indent=2)
    else:
        obj, label = _load_or_generate(args)
        vals = _values_of(obj)
        series = weyl.weyl_direct(vals, beta, name=beta.name)
        text = series.to_json()
    out = args.out or "weyl.json"
    Path(out).write_text(text + "\n", encoding="utf-8")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_decay(args) -> int:
    obj, label = _load_or_generate(args)
    if not isinstance(obj, seqcore.SequenceTable):
        obj = seqcore.SequenceTable(label, [int(v) for v in obj])
    beta = parse_beta(args.beta)
    rep = precision.classify_decay(beta, obj, (args.k_lo, args.k_hi) if args.k_hi else None)
    out = args.out or f"{label}_decay.json"
    Path(out).write_text(rep.to_json() + "\n", encoding="utf-8")
    print(f"{beta.name} on {label}: {rep.classification} "
          f"(slope {rep.fitted_rate:.4f}, tail max {rep.tail_max:.3g}) -> {out}")
    return EXIT_OK


def _parse_poly(spec: str) -> algebra.PolynomialSpec:
    if spec.startswith("trinomial:"):
        return algebra.trinomial(int(spec.split(":")[1]))
    coeffs = [int(c) for c in spec.split(",")]
    return algebra.PolynomialSpec(tuple(coeffs), name="cli_poly")


def cmd_roots(args) -> int:
    p = _parse_poly(args.poly)
    rs = algebra.isolate_roots(p, bits=args.bits)
    outside = algebra.count_outside_unit(p)
    on_unit = algebra.count_unit_circle(p)
    payload = {
        "polynomial": list(p.coefficients),
        "degree": p.degree,
        "count_outside_unit": outside,
        "count_on_unit": on_unit,
        "is_pisot": algebra.is_pisot(p),
        "roots": rs.to_json_obj(),
    }
    out = args.out or "roots.json"
    Path(out).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    print(f"degree {p.degree}: {outside} outside |z|=1, {on_unit} on it -> {out}")
    return EXIT_OK


def _run_figure(cfg: dict, outdir: Path, n_override: int | None) -> dict:
    """Execute one checked-in figure config and emit CSV + SVG."""
    fig = cfg["figure"]
    command = cfg["command"]
    args = dict(cfg["args"])
    if n_override is not None and "count" in args:
        args["count"] = min(int(float(args["count"])), n_override)
    label = f"fig{fig}"
    meta = {"figure": fig, "command": command, "args": args}
    if command == "scan":
        obj, src = parse_sequence(args["seq"], int(args.get("d", 3)), int(float(args["count"])))
        spec = weyl.fft_scan(_values_of(obj), name=src)
        peaks = spec.top_peaks(3)
        svgplot.bar_chart(spec.magnitudes[1:].tolist(), outdir / f"{label}.svg",
                          title=f"spectrum of {src}")
        meta["peaks"] = [{"x": x, "magnitude": m} for x, m in peaks]
    elif command == "histogram":
        obj, src = parse_sequence(args["seq"], int(args.get("d", 3)), int(float(args["count"])))
        beta = parse_beta(args["beta"])
        hist = weyl.histogram(_values_of(obj), beta, int(args.get("bins", 512)), source=src)
        svgplot.bar_chart(hist.densities().tolist(), outdir / f"{label}.svg",
                          title=f"{beta.name} * {src} mod 1")
        meta["density_min"] = float(hist.densities().min())
        meta["density_max"] = float(hist.densities().max())
        if args.get("analysis") == "valley":
            rep = limits.valley_hill_analysis(hist)
            meta["valley_hill"] = rep.to_json_obj()
            dens = hist.densities()
            B = hist.bin_count
            shift = int(round(rep.offset_bins))
            h_start, h_len = rep.hill_interval
            window = int(h_len * 1.6) or 1
            hill_region = [float(dens[(h_start - window // 4 + i) % B]) for i in range(window)]
            reflected = [3 * rep.valley_height - v for v in hill_region]
            valley_region = [float(dens[(h_start - window // 4 + i + shift) % B])
                             for i in range(window)]
            svgplot.overlay_chart(
                [("valley", valley_region, "#cc3311"),
                 ("reflected hill", reflected, "#0077bb")],
                outdir / f"{label}_overlay.svg",
                title="valley vs vertically reflected hill (shifted)")
    else:
        raise ValueError(f"figure {fig}: unknown command {command}")
    return meta


def cmd_report(args) -> int:
    from . import report as report_mod

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    n_large = 10 ** 6 if args.quick else int(float(args.n))
    n_med = min(10 ** 6, n_large)

    figures = []
    cfg_dir = Path(args.configs)
    if cfg_dir.is_dir():
        for cfg_path in sorted(cfg_dir.glob("fig*.json")):
            cfg = json.loads(cfg_path.read_text())
            figures.append(_run_figure(cfg, outdir, 10 ** 6 if args.quick else None))
            print(f"figure {cfg['figure']} done ({cfg['command']})")
    else:
        print(f"note: no figure configs at {cfg_dir}", file=sys.stderr)

    results = report_mod.run_all(n_large=n_large, n_med=n_med, echo=True)
    payload = {
        "n_large": n_large,
        "figures": figures,
        "checks": [r.to_json_obj() for r in results],
    }
    (outdir / "report.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n",
                                        encoding="utf-8")
    hard_fail = [r for r in results if not r.passed and not r.expected_fail]
    print(f"report written to {outdir / 'report.json'}; "
          f"{sum(r.passed for r in results)}/{len(results)} passed, "
          f"{len(hard_fail)} hard failures")
    return EXIT_HYPOTHESIS if hard_fail else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    p = _Parser(prog="modsig", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def add_seq_args(sp, with_beta=False):
        sp.add_argument("--seq", required=True)
        sp.add_argument("--d", type=int, default=3, help="iteration depth / parameter")
        sp.add_argument("--count", "--n", dest="count", type=_parse_count, required=True)
        sp.add_argument("--cache", action="store_true")
        sp.add_argument("--out")
        if with_beta:
            sp.add_argument("--beta", required=True)

    sp = sub.add_parser("generate", help="materialize a sequence prefix")
    add_seq_args(sp)
    sp.set_defaults(fn=cmd_generate)

    sp = sub.add_parser("scan", help="FFT spectral scan for hidden frequencies")
    add_seq_args(sp)
    sp.add_argument("--grid", type=int)
    sp.add_argument("--top", type=int, default=5)
    sp.add_argument("--svg")
    sp.add_argument("--width", type=int, default=800)
    sp.add_argument("--height", type=int, default=400)
    sp.set_defaults(fn=cmd_scan)

    sp = sub.add_parser("histogram", help="circle histogram of {beta * a_n}")
    add_seq_args(sp, with_beta=True)
    sp.add_argument("--bins", type=int, default=512)
    sp.add_argument("--svg")
    sp.add_argument("--width", type=int, default=800)
    sp.add_argument("--height", type=int, default=400)
    sp.set_defaults(fn=cmd_histogram)

    sp = sub.add_parser("weyl", help="normalized exponential sums")
    add_seq_args(sp, with_beta=True)
    sp.add_argument("--map", help="registry map name: use the recurrence engine")
    sp.add_argument("--upto-index", type=int, default=24)
    sp.set_defaults(fn=cmd_weyl)

    sp = sub.add_parser("decay", help="classify ||beta * a_k|| over a window")
    add_seq_args(sp, with_beta=True)
    sp.add_argument("--k-lo", type=int, default=10)
    sp.add_argument("--k-hi", type=int, default=0, help="0 = auto window")
    sp.set_defaults(fn=cmd_decay)

    sp = sub.add_parser("roots", help="certified complex roots of a polynomial")
    sp.add_argument("--poly", required=True,
                    help="'trinomial:D' or comma-separated coefficients low->high")
    sp.add_argument("--bits", type=int, default=64)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_roots)

    sp = sub.add_parser("report", help="reproduce all figures and run every check")
    sp.add_argument("--outdir", default="report")
    sp.add_argument("--n", default="1e7")
    sp.add_argument("--quick", action="store_true", help="cap sample sizes at 1e6")
    sp.add_argument("--configs", default="configs")
    sp.add_argument("--workers", type=int, default=1,
                    help="accepted for symmetry; figure jobs are numpy-bound")
    sp.set_defaults(fn=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (limits.HypothesisError, algebra.CertificationError,
            numeration.SignatureViolation, IndeterminateError) as exc:
        print(f"hypothesis/certification failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ValueError, KeyError, IndexError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
