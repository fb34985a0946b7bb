"""Command-line interface: build, verify, mul, bounds, bench.

Exit codes: 0 success, 1 verification mismatch, 2 usage or file error,
3 internal error (including a freshly built decomposition failing its check).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import random
import re
import sys
import time
from fractions import Fraction

from . import bounds, builder, fileformat, tensor
from .errors import CapacityError, KMulError
from .field import field, prime_power

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_q(text: str) -> int:
    """'4', '2^2' or '2**2'."""
    m = re.fullmatch(r"\s*(\d+)\s*(?:(?:\^|\*\*)\s*(\d+))?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad field size {text!r}")
    q = int(m.group(1)) ** int(m.group(2) or 1)
    try:
        prime_power(q)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return q


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _k_arg(text: str) -> int:
    v = _positive(text)
    if v < 2:
        raise argparse.ArgumentTypeError("k must be >= 2")
    return v


def _fmt(x: Fraction) -> str:
    return str(x) if x.denominator == 1 else f"{x} (~{float(x):.2f})"


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------


def provenance(alg: builder.KMulAlgorithm) -> dict:
    rep = alg.cost_report()
    return {
        "mode": alg.plan.mode,
        "use_infinity": alg.plan.use_infinity,
        "places": [P.label() for P in alg.places],
        "breakdown": [
            {"degree": d, "count": N, "rank": s, "bilinear_rank": b} for d, N, s, b in rep.breakdown
        ],
        "nu_count": rep.nu_count,
    }


def build_artifact(q, n, k, mode="recursive", use_infinity=True, budget=tensor.DEFAULT_BUDGET):
    """(algorithm, flattened decomposition, verified flag)."""
    F = field(q)
    alg = builder.build(F, n, k, mode, use_infinity)
    dec = builder.flatten(alg, check=False)
    return alg, dec, tensor.verify(dec, budget)


def cmd_build(args, out) -> int:
    try:
        alg, dec, ok = build_artifact(args.q, args.n, args.k, args.mode, not args.no_infinity, args.budget)
    except CapacityError as e:
        print(f"error: {e}; raise --budget to verify this size", file=sys.stderr)
        return EXIT_USAGE
    rep = alg.cost_report()
    bound = bounds.genus0_bound(alg)
    print(f"field      F_{args.q}, n={args.n}, k={args.k}, mode={args.mode}", file=out)
    print(f"modulus    {list(dec.modulus)}", file=out)
    print(f"rank       {dec.rank}", file=out)
    print(f"nu count   {rep.nu_count}", file=out)
    print("degree  places  rank/place  bilinear", file=out)
    for d, N, s, b in rep.breakdown:
        print(f"{d:>6}  {N:>6}  {s:>10}  {b:>8}", file=out)
    print(f"genus-0 bound  {_fmt(bound)}  (rank <= bound: {dec.rank <= bound})", file=out)
    print(f"verified   {ok}", file=out)
    if not ok:
        print("error: built decomposition failed verification", file=sys.stderr)
        return EXIT_INTERNAL
    if args.out:
        fileformat.save(args.out, dec, provenance(alg))
        print(f"wrote      {args.out}", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify / mul
# ---------------------------------------------------------------------------


def _load(path):
    try:
        return fileformat.load(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except fileformat.FileFormatError as e:
        raise UsageError(f"malformed file {path}: {e}") from None


def cmd_verify(args, out) -> int:
    dec, _ = _load(args.file)
    try:
        bad = tensor.find_mismatch(dec, args.budget)
    except CapacityError as e:
        raise UsageError(str(e)) from None
    if bad is None:
        print(f"ok: rank {dec.rank}, all {dec.n}^{dec.k} basis tuples match", file=out)
        return EXIT_OK
    print(f"FAIL: first mismatch at basis tuple {list(bad)}", file=out)
    return EXIT_MISMATCH


def parse_element(text: str, n: int, q: int) -> tuple[int, ...]:
    parts = [s for s in re.split(r"[,\s]+", text.strip()) if s]
    try:
        coords = [int(s) for s in parts]
    except ValueError:
        raise UsageError(f"bad element {text!r}: expected comma-separated labels") from None
    if len(coords) > n:
        raise UsageError(f"element {text!r} has more than {n} coordinates")
    if any(c < 0 or c >= q for c in coords):
        raise UsageError(f"element {text!r} has labels outside 0..{q - 1}")
    return tuple(coords) + (0,) * (n - len(coords))


def cmd_mul(args, out) -> int:
    dec, prov = _load(args.file)
    if len(args.inputs) != dec.k:
        raise UsageError(f"expected {dec.k} inputs, got {len(args.inputs)}")
    xs = [parse_element(s, dec.n, dec.q) for s in args.inputs]
    if args.costing == "mu":
        result = tensor.apply(dec, xs)
        cost = dec.rank
    else:
        if "mode" not in prov:
            raise UsageError("nu costing needs the build provenance stored in the file")
        alg = builder.build(dec.F, dec.n, dec.k, prov["mode"], prov.get("use_infinity", True), Q=dec.modulus)
        stats = {}
        result = builder.run(alg, xs, "nu", stats)
        cost = stats["nu"]
    expected = tensor.direct_product(dec.ext, xs)
    print(f"product    {','.join(map(str, result))}", file=out)
    print(f"{args.costing}-cost    {cost}", file=out)
    if result != expected:
        print(f"MISMATCH: direct product is {','.join(map(str, expected))}", file=out)
        return EXIT_MISMATCH
    print("check      matches direct product", file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def load_table(path, r: int) -> bounds.MuTable:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
        s, b = tuple(int(x) for x in d["s"]), tuple(int(x) for x in d["b"])
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"bad table file {path}: {e}") from None
    if len(s) < r or len(b) < r:
        raise UsageError(f"table must cover degrees 1..{r}")
    return bounds.MuTable(s, b, ("user-supplied",) * max(len(s), len(b)))


def render_report(rep: bounds.BoundReport) -> str:
    w = io.StringIO()
    p = lambda *a: print(*a, file=w)  # noqa: E731
    p(f"q={rep.q} k={rep.k} n={rep.n}")
    p(f"r={rep.params.r} l=q^(r/2)={rep.params.l}")
    tag = "verified" if rep.table.verified else "UNVERIFIED (user-supplied)"
    p(f"table s={list(rep.table.s)} b={list(rep.table.b)} [{tag}]")
    p(f"r0={rep.tower.r0} r0'={rep.tower.r0_prime}")
    p(f"step i={rep.step} (estimate (2/r)log_q(kn) = {rep.step_estimate:.3f}), genus g_i={rep.genus}")
    p(f"degree-n place guaranteed by the existence condition: {rep.existence}")
    if rep.search is None:
        p(f"coverage: n < 2r+3 = {2 * rep.params.r + 3}, analytic bounds only")
    else:
        p(
            f"coverage: guaranteed interval step {rep.search.guaranteed_step}, "
            f"exact action-domain step {rep.search.exact_step}"
        )
    p("")
    p(f"genus g_i     mu <= {_fmt(rep.genus_bound.mu)}   nu <= {_fmt(rep.genus_bound.nu)}")
    p(f"tower         mu <= {_fmt(rep.tower.mu)}   nu <= {_fmt(rep.tower.nu)}")
    p(f"  linear coefficient k(k q^(r/2) + 1) = {rep.coefficient}")
    c = rep.linear
    p(f"linear form   mu <= {_fmt(c.mu)}   nu <= {_fmt(c.nu)}")
    p(f"  simplified  mu <= {_fmt(c.mu_simplified)}   nu <= {_fmt(c.nu_simplified)}")
    p("")
    p("   i        genus            M          delta  gamma  claimed            R    (k+1)^i")
    for s in rep.step_rows:
        flag = "" if s.gamma_claim_holds else "  *"
        p(
            f"{s.i:>4} {s.genus:>12} {s.M:>12} {s.delta:>14} {s.gamma:>6} {s.gamma_claimed:>8}"
            f" {s.R:>12} {s.R_claimed:>10}{flag}"
        )
    if any(not s.gamma_claim_holds for s in rep.step_rows):
        p("  * exact gamma exceeds the claimed r(i+1)+3")
    if rep.relations:
        p("")
        p(f"witness relations for the split n={rep.split[0]}, m={rep.split[1]}:")
        for x in rep.relations:
            verdict = {True: "holds", False: "FAILS", None: "not checkable"}[x.holds]
            note = f"  ({x.note})" if x.note else ""
            p(f"  {x.name}: {x.lhs} vs {x.rhs}  {verdict}{note}")
    return w.getvalue()


def cmd_bounds(args, out) -> int:
    tp = bounds.smallest_even_r(args.q, args.k)
    table = load_table(args.table_file, tp.r) if args.table_file else None
    rep = bounds.bound_report(
        args.q,
        args.k,
        args.n,
        table,
        steps=args.steps,
        split=tuple(args.split) if args.split else None,
        mode=args.mode,
        use_infinity=not args.no_infinity,
    )
    if args.json:
        out.write(json.dumps(rep.to_dict(), indent=1) + "\n")
    else:
        out.write(render_report(rep))
    return EXIT_OK


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

DEFAULT_GRID = "q=2,3,5;n=1-8;k=2,3"
BENCH_COLUMNS = ["q", "n", "k", "rank", "nu", "tower_mu_bound", "rank_le_bound", "verified", "status"]


def _parse_values(text: str, what: str) -> list[int]:
    vals = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-", 1)
            vals.extend(range(int(a), int(b) + 1))
        elif part:
            vals.append(int(part))
    if not vals:
        raise ValueError(f"empty value list for {what}")
    return vals


def parse_grid(text: str) -> list[tuple[int, int, int]]:
    """'q=2,3;n=1-8;k=2' -> grid cells in (q, n, k) order."""
    keys = {}
    try:
        for chunk in text.split(";"):
            if not chunk.strip():
                continue
            name, _, vals = chunk.partition("=")
            name = name.strip()
            if name not in ("q", "n", "k"):
                raise ValueError(f"unknown grid key {name!r}")
            keys[name] = _parse_values(vals, name)
        missing = {"q", "n", "k"} - set(keys)
        if missing:
            raise ValueError(f"grid needs {sorted(missing)}")
        for q in keys["q"]:
            prime_power(q)
        if min(keys["n"]) < 1 or min(keys["k"]) < 2:
            raise ValueError("need n >= 1 and k >= 2")
    except ValueError as e:
        raise UsageError(f"bad grid {text!r}: {e}") from None
    return [(q, n, k) for q in keys["q"] for n in keys["n"] for k in keys["k"]]


def bench_cell(q, n, k, seed, mode="recursive", use_infinity=True, budget=tensor.DEFAULT_BUDGET):
    """One CSV row (as a dict) plus the elapsed seconds."""
    t0 = time.perf_counter()
    row = dict.fromkeys(BENCH_COLUMNS, "")
    row.update(q=q, n=n, k=k)
    try:
        F = field(q)
        alg = builder.build(F, n, k, mode, use_infinity)
        dec = builder.flatten(alg, check=False)
        try:
            ok = tensor.verify(dec, budget)
        except CapacityError:
            ok = None
        # random spot checks of the algorithm itself, seeded per cell
        rng = random.Random(f"{seed}:{q}:{n}:{k}")
        K = dec.ext
        for _ in range(4):
            xs = [K.random(rng) for _ in range(k)]
            if builder.run(alg, xs) != tensor.direct_product(K, xs):
                ok = False
        tp = bounds.smallest_even_r(q, k)
        table = bounds.builder_mu_table(F, k, tp.r, mode, use_infinity)
        bound = bounds.thm4_bounds(q, k, n, table).mu
        rep = alg.cost_report()
        row.update(
            rank=dec.rank,
            nu=rep.nu_count,
            tower_mu_bound=str(bound),
            rank_le_bound=str(dec.rank <= bound).lower(),
            verified={True: "true", False: "false", None: "sampled"}[ok],
            status="ok" if ok is not False else "mismatch",
        )
    except Exception as e:  # per-cell failure, the run continues
        row["status"] = f"error: {type(e).__name__}: {e}"
    return row, time.perf_counter() - t0


def _bench_job(cell_args):
    return bench_cell(*cell_args)


def run_bench(cells, seed, jobs=1, mode="recursive", use_infinity=True, timings=None):
    args = [(q, n, k, seed, mode, use_infinity) for q, n, k in cells]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_bench_job, args))
    else:
        results = [_bench_job(a) for a in args]
    rows = []
    for (q, n, k), (row, dt) in zip(cells, results):
        rows.append(row)
        if timings is not None:
            print(f"q={q} n={n} k={k}: {dt:.3f}s", file=timings)
    return rows


def rows_to_csv(rows) -> str:
    w = io.StringIO()
    writer = csv.DictWriter(w, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return w.getvalue()


def cmd_bench(args, out) -> int:
    cells = parse_grid(args.grid)
    rows = run_bench(cells, args.seed, args.jobs, args.mode, not args.no_infinity, timings=sys.stderr)
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    bad = sum(1 for r in rows if r["status"] != "ok")
    if bad:
        print(f"{bad} of {len(rows)} cells did not pass", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_build_flags(sp):
    sp.add_argument("--mode", choices=builder.MODES, default="recursive")
    sp.add_argument(
        "--no-infinity",
        action="store_true",
        help="do not use the infinite place as an evaluation place",
    )


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kmul", description="k-fold multiplication in finite field extensions")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("build", help="build and verify a decomposition")
    sp.add_argument("--q", type=parse_q, required=True)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_k_arg, required=True)
    sp.add_argument("--out")
    sp.add_argument("--budget", type=_positive, default=tensor.DEFAULT_BUDGET)
    _add_build_flags(sp)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("verify", help="check a decomposition file on all basis tuples")
    sp.add_argument("file")
    sp.add_argument("--budget", type=_positive, default=tensor.DEFAULT_BUDGET)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("mul", help="multiply elements with a decomposition file")
    sp.add_argument("file")
    sp.add_argument("--inputs", nargs="+", required=True, help="one comma-separated label list per factor")
    sp.add_argument("--costing", choices=("mu", "nu"), default="mu")
    sp.set_defaults(func=cmd_mul)

    sp = sub.add_parser("bounds", help="closed-form complexity bounds")
    sp.add_argument("--q", type=parse_q, required=True)
    sp.add_argument("--k", type=_k_arg, required=True)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--table-file")
    sp.add_argument("--steps", type=_positive, default=4)
    sp.add_argument("--split", type=_positive, nargs=2, metavar=("N", "M"), default=[2, 2])
    sp.add_argument("--json", action="store_true")
    _add_build_flags(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("bench", help="rank witnesses over a grid, as CSV")
    sp.add_argument("--grid", default=DEFAULT_GRID)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.add_argument("--out")
    _add_build_flags(sp)
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KMulError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE if isinstance(e, ValueError) else EXIT_INTERNAL
    except Exception as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
