"""Command-line harness: ``compute``, ``verify`` and ``bench``.

Instance files hold one complex entry per line as ``re im`` (``im`` may be
omitted), preceded by ``#key value`` header lines. Entries are written as
hexadecimal floating point (``-0x1a3p-12``) so files round-trip exactly;
decimal input is accepted when it is a dyadic rational.

Exit codes: 0 success, 1 I/O or domain error, 2 precision-plan failure,
3 parse failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import re
import sys
import time
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from . import debug, harness, oracle
from .arith import exact_mpfr, working
from .errors import InsufficientInputAccuracy, StructMatError
from .multipoint import NodeSet, multipoint_eval
from .poly import ApproxPoly

EXIT_OK, EXIT_ERROR, EXIT_PLAN, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3, 4

KINDS = ("poly", "nodeset", "vector", "cauchy", "toeplitz", "hankel")


class ParseError(ValueError):
    pass


# -- number formats --------------------------------------------------------------

_HEX = re.compile(r"^([+-]?)0x([0-9a-f]*)(?:\.([0-9a-f]*))?(?:p([+-]?\d+))?$", re.I)


def parse_real(tok: str) -> mpfr:
    """Exact value of a hex float or a dyadic decimal."""
    t = tok.strip()
    m = _HEX.match(t)
    if m:
        sign, whole, frac, exp = m.groups()
        frac = frac or ""
        if not whole and not frac:
            raise ParseError(f"malformed hex float {tok!r}")
        mant = int((whole or "0") + frac, 16)
        e = int(exp or 0) - 4 * len(frac)
        q = Fraction(mant) * (Fraction(2) ** e)
        return exact_mpfr(-q if sign == "-" else q)
    try:
        q = Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse number {tok!r}") from None
    if q.denominator & (q.denominator - 1):
        raise ParseError(f"{tok!r} is not a dyadic rational; write it in hex or as k/2^e")
    return exact_mpfr(q)


def format_real(x: mpfr) -> str:
    if x == 0:
        return "0x0p+0"
    man, exp = x.as_mantissa_exp()
    man, exp = int(man), int(exp)
    while man % 2 == 0:
        man //= 2
        exp += 1
    return f"{'-' if man < 0 else ''}0x{abs(man):x}p{exp:+d}"


def format_complex(z) -> str:
    z = mpc(z) if not isinstance(z, mpc) else z
    return f"{format_real(z.real)} {format_real(z.imag)}"


# -- instance files ----------------------------------------------------------------


def entry_count(kind: str, n: int) -> int:
    return {"cauchy": 2 * n, "toeplitz": 2 * n - 1, "hankel": 2 * n - 1}.get(kind, n)


def read_instance(path: str) -> tuple[dict, list]:
    """Headers and entries of an instance file; ``path == '-'`` reads stdin."""
    text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    headers, entries = {}, []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition(" ")
            headers[key.strip()] = val.strip()
            continue
        parts = line.split()
        if len(parts) not in (1, 2):
            raise ParseError(f"{path}:{lineno}: expected 're [im]'")
        try:
            re_ = parse_real(parts[0])
            im_ = parse_real(parts[1]) if len(parts) == 2 else mpfr(0, 2)
        except ParseError as e:
            raise ParseError(f"{path}:{lineno}: {e}") from None
        entries.append(mpc(re_, im_, precision=(max(re_.precision, 2), max(im_.precision, 2))))
    kind = headers.get("kind")
    if kind is not None and kind not in KINDS:
        raise ParseError(f"{path}: unknown kind {kind!r}")
    if "n" in headers:
        try:
            n = int(headers["n"])
        except ValueError:
            raise ParseError(f"{path}: bad n header {headers['n']!r}") from None
        want = entry_count(kind or "vector", n)
        if want != len(entries):
            raise ParseError(f"{path}: n={n} needs {want} entries, found {len(entries)}")
    return headers, entries


def lam_of(headers: dict) -> float:
    v = headers.get("lambda", "inf")
    try:
        return math.inf if v in ("inf", "exact") else float(v)
    except ValueError:
        raise ParseError(f"bad lambda header {v!r}") from None


def write_instance(out, kind: str, entries, headers: dict) -> None:
    out.write(f"#kind {kind}\n")
    n = len(entries) if kind in ("poly", "nodeset", "vector") else headers.pop("n", len(entries))
    out.write(f"#n {n}\n")
    for k, v in headers.items():
        out.write(f"#{k} {v}\n")
    for z in entries:
        out.write(format_complex(z) + "\n")


# -- compute -----------------------------------------------------------------------

# task -> ordered (field, expected kind) pairs read from the input files
INPUTS = {
    "mul": (("A", "poly"), ("B", "poly")),
    "div": (("s", "poly"), ("t", "poly")),
    "fft": (("A", "poly"),),
    "tinv": (("c", "poly"),),
    "toeplitz": (("u", "toeplitz"), ("v", "vector")),
    "hankel": (("u", "hankel"), ("v", "vector")),
    "multipoint": (("p", "poly"), ("x", "nodeset")),
    "vandermonde": (("p", "poly"), ("x", "nodeset")),
    "interp": (("x", "nodeset"), ("y", "vector")),
    "cauchy": (("st", "cauchy"), ("v", "vector")),
    "trummer": (("s", "nodeset"), ("v", "vector")),
    "cauchy-solve": (("st", "cauchy"), ("r", "vector")),
}

OUTPUT_KIND = {"mul": "poly", "div": "poly", "tinv": "poly", "interp": "poly"}


def build_instance(task: str, paths: list[str]) -> tuple[harness.Instance, dict]:
    spec = INPUTS[task]
    if len(paths) != len(spec):
        raise ParseError(f"{task} takes {len(spec)} input file(s), got {len(paths)}")
    fields, lams = {}, {}
    for (name, kind), path in zip(spec, paths):
        headers, entries = read_instance(path)
        got = headers.get("kind", kind)
        if got != kind and not (kind == "vector" and got in ("poly", "nodeset")):
            raise ParseError(f"{path}: expected kind {kind}, found {got}")
        if not entries:
            raise ParseError(f"{path}: no entries")
        lam = lam_of(headers)
        if name == "st":
            if len(entries) % 2:
                raise ParseError(f"{path}: a cauchy file lists s then t, 2n entries")
            n = len(entries) // 2
            fields["s"], fields["t"] = entries[:n], entries[n:]
            lams["s"] = lams["t"] = lam
        elif name == "c":
            if entries[0] != 1:
                raise ParseError(f"{path}: triangular Toeplitz column must start with 1")
            fields["c"], lams["c"] = entries[1:], lam
        else:
            fields[name], lams[name] = entries, lam
    meta = {}
    if task == "fft":
        meta["k"] = max(1, (len(fields["A"]) - 1).bit_length())
    return harness.Instance(fields, meta), lams


def cmd_compute(args) -> int:
    task = harness.TASKS[args.task]
    inst, lams = build_instance(args.task, args.inputs)
    if args.task == "fft" and args.k is not None:
        inst.meta["k"] = args.k
    plan = task.plan(inst, args.ell, args.strict)
    t0 = time.perf_counter()
    out = task.run(inst, args.ell, lams, args.strict)
    dt = time.perf_counter() - t0
    headers = {"task": args.task, "ell": args.ell, "lambda": args.ell, "formula": plan.formula,
               "plan_lambda": plan.lam, "working_p": plan.working_p}
    if args.task == "div":
        nq = len(inst.fields["s"]) - len(inst.fields["t"]) + 1
        headers["parts"] = f"q={nq} r={len(out) - nq}"
    fh = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        write_instance(fh, OUTPUT_KIND.get(args.task, "vector"), out, headers)
    finally:
        if args.out:
            fh.close()
    print(f"{args.task}: formula={plan.formula} lambda={plan.lam} working_p={plan.working_p} "
          f"time={dt:.3f}s", file=sys.stderr)
    return EXIT_OK


# -- verify -------------------------------------------------------------------------


def cauchy_residual(inst: harness.Instance, v, ell: int) -> tuple[float, float]:
    """``lg ||C(s,t) v - r||`` against the target ``ell - lg n + lg Delta(s, t)``."""
    s, t, r = inst.fields["s"], inst.fields["t"], inst.fields["r"]
    n = len(s)
    got = oracle.naive_structured_mul("cauchy", (s, t), v)
    dst = min((oracle.exact(a) - oracle.exact(b)).abs2() for a in s for b in t)
    lg_dst = float(gmpy2.log2(mpfr(dst, 128))) / 2
    return oracle.lg_error(got, r), -(ell - math.log2(n) + lg_dst) if n > 1 else -(ell + lg_dst)


def cmd_verify(args) -> int:
    task = harness.TASKS[args.task]
    if args.trials == 0:
        print(f"verify {args.task}: 0 trials, vacuous pass")
        return EXIT_OK
    debug.set_debug(True)
    debug.reset()
    rng = random.Random(args.seed)
    worst, bad, res_bad = -math.inf, 0, 0
    print(f"# rng random.Random seed={args.seed}")
    for i in range(args.trials):
        inst = task.gen(rng, args.n, args.tau)
        if args.perturb:
            err, ok, _ = harness.perturbed_trial(task, inst, args.ell, rng, args.strict)
        else:
            out = task.run(inst, args.ell, None, args.strict)
            truth = task.truth(inst)
            err, ok = oracle.lg_error(out, truth), oracle.within(out, truth, args.ell)
            if args.task == "cauchy-solve":
                lg_res, target = cauchy_residual(inst, out, args.ell)
                if lg_res > target:
                    res_bad += 1
        worst = max(worst, err)
        bad += not ok
    violations = sum(v for _, v in debug.stats().values())
    print(f"verify {args.task}: trials={args.trials} n={args.n} tau<={args.tau} ell={args.ell}")
    print(f"  max error 2^{worst:.1f} vs target 2^{-args.ell}")
    print(f"  accuracy failures: {bad}")
    if args.task == "cauchy-solve":
        print(f"  residual failures: {res_bad}")
    print(f"  bound violations: {violations}")
    ok = bad == 0 and violations == 0 and res_bad == 0
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


# -- bench --------------------------------------------------------------------------


def bench_nodes(n: int, rng: random.Random, bits: int = 30) -> list:
    """Roots of unity in bit-reversed order, each moved by a dyadic jitter below 2^-12."""
    k = max(0, (n - 1).bit_length())
    order = [int(format(i, f"0{k}b")[::-1], 2) if k else 0 for i in range(n)]
    out = []
    with working(bits + 2):
        tau2 = 2 * gmpy2.const_pi()
        for j in order:
            a = tau2 * j / (1 << k)
            re_ = mpfr(gmpy2.cos(a)) + mpfr(rng.randrange(-64, 64)) / (1 << 18)
            im_ = mpfr(gmpy2.sin(a)) + mpfr(rng.randrange(-64, 64)) / (1 << 18)
            out.append(mpc(re_, im_))
    return out


def naive_eval(p, xs, prec: int) -> list:
    """Horner's rule vectorised over all points: ``n * deg p`` multiply-adds."""
    with working(prec):
        x = np.array(xs, dtype=object)
        acc = np.array([mpc(0)] * len(xs), dtype=object)
        for c in reversed(list(p)):
            acc = acc * x + c
    return list(acc)


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return time.perf_counter() - t0, out


def bench_multipoint(n_list, ell: int, tau: int, seed: int, naive: bool = True,
                     repeat: int = 3, naive_budget: float = 4.0) -> list[dict]:
    """Best-of-``repeat`` wall times. Rounds sweep all sizes in turn so that
    a slow spell on the host does not land on a single size; a naive run is
    not repeated once its accumulated time exceeds ``naive_budget`` seconds."""
    prec = 2 * ell + 64
    cases = []
    for n in n_list:
        rng = random.Random(f"{seed}:{n}")
        p = harness.rand_vec(rng, n, tau)
        xs = bench_nodes(n, rng)
        cases.append({"n": n, "p": p, "xs": xs, "fast": [], "naive": [], "digest": harness.digest({"p": p, "x": xs})})
    for _ in range(max(1, repeat)):
        for c in cases:
            dt, c["out"] = _timed(lambda: multipoint_eval(ApproxPoly(tuple(c["p"])), NodeSet(tuple(c["xs"])),
                                                          ell, working_p=prec))
            c["fast"].append(dt)
            if naive and (not c["naive"] or sum(c["naive"]) < naive_budget):
                dt, c["ref"] = _timed(lambda: naive_eval(c["p"], c["xs"], prec))
                c["naive"].append(dt)
    rows = []
    for c in cases:
        err = None
        if naive:
            with working(prec):
                err = max((float(gmpy2.log2(abs(a - b))) if a != b else -math.inf
                           for a, b in zip(c["out"], c["ref"])), default=-math.inf)
        rows.append({"n": c["n"], "working_p": prec, "fast_s": min(c["fast"]),
                     "naive_s": min(c["naive"]) if naive else None, "lg_max_diff": err,
                     "digest": c["digest"], "runs": [len(c["fast"]), len(c["naive"])]})
    return rows


def scaling_ratios(rows: list[dict], key: str) -> list[float]:
    return [b[key] / a[key] for a, b in zip(rows, rows[1:]) if a[key] and b[key]]


def cmd_bench(args) -> int:
    if args.task != "multipoint":
        print(f"bench supports multipoint only, not {args.task}", file=sys.stderr)
        return EXIT_ERROR
    n_list = [int(x) for x in args.n_list.split(",") if x.strip()] if args.n_list else []
    print(f"# bench multipoint ell={args.ell} tau={args.tau} seed={args.seed} repeat={args.repeat} "
          "rng=random.Random timing=best-of-repeat")
    print(f"{'n':>6} {'working_p':>9} {'fast_s':>10} {'naive_s':>10} {'lg_diff':>9}  digest")
    rows = bench_multipoint(n_list, args.ell, args.tau, args.seed, naive=not args.no_naive,
                            repeat=args.repeat)
    for r in rows:
        naive = f"{r['naive_s']:10.3f}" if r["naive_s"] is not None else f"{'-':>10}"
        diff = f"{r['lg_max_diff']:9.1f}" if r["lg_max_diff"] is not None else f"{'-':>9}"
        print(f"{r['n']:>6} {r['working_p']:>9} {r['fast_s']:10.3f} {naive} {diff}  {r['digest']}")
    block = {"task": "multipoint", "ell": args.ell, "tau": args.tau, "seed": args.seed,
             "repeat": args.repeat, "rows": rows,
             "fast_ratios": scaling_ratios(rows, "fast_s"),
             "naive_ratios": scaling_ratios(rows, "naive_s")}
    print("# json")
    print(json.dumps(block, default=str))
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="structmat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("compute", help="run one operation on instance files")
    c.add_argument("task", choices=sorted(INPUTS))
    c.add_argument("inputs", nargs="+")
    c.add_argument("--ell", type=int, default=32)
    c.add_argument("--k", type=int, default=None, help="log2 of the FFT length")
    c.add_argument("--strict", action="store_true", help="use the tighter precision formulas")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_compute)

    v = sub.add_parser("verify", help="compare random instances against exact oracles")
    v.add_argument("task", choices=sorted(harness.TASKS))
    v.add_argument("--n", type=int, default=8)
    v.add_argument("--tau", type=int, default=4)
    v.add_argument("--ell", type=int, default=32)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--strict", action="store_true")
    v.add_argument("--perturb", action="store_true",
                   help="shift inputs by exactly the planned 2^-lambda")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="time fast and naive multipoint evaluation")
    b.add_argument("task", choices=["multipoint"])
    b.add_argument("--n-list", default="256,1024,4096")
    b.add_argument("--ell", type=int, default=32)
    b.add_argument("--tau", type=int, default=4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeat", type=int, default=3, help="rounds; each size reports its fastest run")
    b.add_argument("--no-naive", action="store_true")
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InsufficientInputAccuracy as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PLAN
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, StructMatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
