"""Command-line interface: ``defexp <command> ...``.

Exit status: 0 when every check passes, 2 when a mathematical check fails
(a negative value, a structural mismatch, an identity residual above its
tolerance), 1 for usage or I/O errors.

The default directory for tables and outputs can be set with the
environment variable DEFEXP_OUT; explicit flags always win.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence

from .errors import IntegralityViolation, NoConvergence, StabilizationFailure

ENV_OUT = "DEFEXP_OUT"
EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    nmax: int = 10
    outDir: Path = Path(".")
    precisionDigits: int = 50
    rGrid: List[Fraction] = field(default_factory=lambda: [Fraction(r) for r in (10, 20, 50, 100)])
    threads: int = 1
    oracleCheckDepth: int = 0

    def validate(self) -> "RunConfig":
        if self.nmax < 1:
            raise UsageError("nmax must be at least 1")
        if self.precisionDigits < 30:
            raise UsageError("precision must be at least 30 digits")
        if self.oracleCheckDepth > self.nmax:
            raise UsageError("oracle depth cannot exceed nmax")
        if self.threads < 1:
            raise UsageError("threads must be at least 1")
        if any(r <= 0 for r in self.rGrid):
            raise UsageError("r values must be positive")
        return self


def _emit(line: str = "") -> None:
    print(line, flush=True)


def _parallel_map(fn: Callable, items: Sequence, threads: int) -> list:
    """Order-preserving map; output does not depend on the worker count."""
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=1))


def _default_dir(value: Optional[str]) -> Path:
    if value:
        return Path(value)
    env = os.environ.get(ENV_OUT)
    if env:
        return Path(env)
    raise UsageError(f"no directory given (use the flag or set {ENV_OUT})")


def _parse_rgrid(text: str) -> List[Fraction]:
    try:
        grid = [Fraction(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --rgrid {text!r}") from exc
    if not grid:
        raise UsageError("empty --rgrid")
    return grid


# -- compute -----------------------------------------------------------------

def cmd_compute(cfg: RunConfig, full: bool = False) -> int:
    from .expansion import compute_P_multinomial, compute_tables
    from .tableio import write_tables

    try:
        pt = compute_tables(cfg.nmax, full=full)
    except (IntegralityViolation, StabilizationFailure) as exc:
        _emit(f"status=fail error={type(exc).__name__} detail={exc}")
        return EXIT_CHECK
    status = EXIT_OK
    if cfg.oracleCheckDepth:
        oracle = compute_P_multinomial(cfg.oracleCheckDepth)
        d = cfg.oracleCheckDepth
        bad = [n for n in range(1, d + 1) if oracle.P[n] != pt.P[n] or oracle.Phat[n] != pt.Phat[n]]
        _emit(f"oracle_depth={d} oracle_match={'yes' if not bad else 'no'}" + (f" first_mismatch={bad[0]}" if bad else ""))
        if bad:
            status = EXIT_CHECK
    for path in write_tables(pt, cfg.outDir):
        _emit(f"wrote={path}")
    _emit(f"nmax={cfg.nmax} status={'ok' if status == EXIT_OK else 'fail'}")
    return status


# -- verify ------------------------------------------------------------------

def _verify_one(args):
    from .verify import nonneg_check

    p, grid, n, kind = args
    return nonneg_check(p, grid, n, kind)


def cmd_verify(cfg: RunConfig, tables: Path) -> int:
    from .expansion import structure_mismatches
    from .tableio import load_tables

    pt = load_tables(tables)
    jobs = [(pt.kind(kind)[n], tuple(cfg.rGrid), n, kind) for kind in ("P", "PHAT") for n in range(1, pt.nmax + 1)]
    reports = _parallel_map(_verify_one, jobs, cfg.threads)
    negatives = []
    for rep in reports:
        _emit(rep.line())
        if not rep.allNonnegative:
            negatives.append(rep)
    mismatches = structure_mismatches(pt)
    for m in mismatches:
        _emit(f"structure_mismatch n={m.n} kind={m.kind} what={m.what} expected={m.expected} found={m.found}")
    for rep in negatives:
        _emit(f"COUNTEREXAMPLE n={rep.n} kind={rep.kind} k={rep.firstNegativeK} value={rep.witness_value}")
    ok = not negatives and not mismatches
    _emit(f"nmax={pt.nmax} checked={len(reports)} negatives={len(negatives)} structure_mismatches={len(mismatches)} status={'ok' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_CHECK


# -- roots -------------------------------------------------------------------

def _roots_one(args):
    from .roots import negative_sample, root_certificate

    p, n, kind, digits = args
    cert = root_certificate(p, digits, n, kind)
    return cert, negative_sample(p, cert)


def _fmt_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cmd_roots(cfg: RunConfig, tables: Path, ns: Optional[Iterable[int]], kinds: Sequence[str], digits: int) -> int:
    from .tableio import load_tables

    pt = load_tables(tables)
    chosen = list(ns) if ns is not None else list(range(1, pt.nmax + 1))
    for n in chosen:
        if not 1 <= n <= pt.nmax:
            raise UsageError(f"n={n} is outside the table (nmax={pt.nmax})")
    jobs = [(pt.kind(kind)[n], n, kind, digits) for kind in kinds for n in chosen]
    results = _parallel_map(_roots_one, jobs, cfg.threads)
    for cert, neg in results:
        parts = [f"n={cert.n}", f"kind={cert.kind}", f"count={cert.count}"]
        parts.append(f"sturm_variations={cert.chain_variations[0]},{cert.chain_variations[1]}")
        for i, (iv, dec) in enumerate(zip(cert.intervals, cert.decimals), 1):
            parts.append(f"root{i}={dec}")
            parts.append(f"interval{i}={_fmt_q(iv[0])},{_fmt_q(iv[1])}")
        parts.append(f"largest={cert.largest() or 'none'}")
        if neg is not None:
            parts.append(f"negative_at={_fmt_q(neg)}")
        _emit(" ".join(parts))
    return EXIT_OK


# -- signs -------------------------------------------------------------------

def sign_matrix_pgm(rows: Sequence[str]) -> bytes:
    """Binary PGM: one row per n, one column per coefficient index.

    '+' is 255, '-' is 0, '0' is 128; rows shorter than the widest are
    padded with 128.
    """
    width = max(len(r) for r in rows)
    lut = {"+": 255, "-": 0, "0": 128}
    body = bytearray()
    for r in rows:
        body.extend(lut[c] for c in r)
        body.extend([128] * (width - len(r)))
    return f"P5\n{width} {len(rows)}\n255\n".encode("ascii") + bytes(body)


def digits_csv(matrix) -> str:
    lines = ["n," + ",".join(f"c{i}" for i in range(max(len(r) for r in matrix)))]
    for n, row in enumerate(matrix, 1):
        lines.append(f"{n}," + ",".join("" if v is None else str(v) for v in row))
    return "\n".join(lines) + "\n"


def cmd_signs(tables: Path, kind: str, shift: int, fmt: str, out: Optional[Path]) -> int:
    from .tableio import load_tables
    from .verify import digits_matrix, sign_matrix

    pt = load_tables(tables)
    if fmt == "csv":
        data = digits_csv(digits_matrix(pt, kind, bool(shift))).encode("ascii")
    else:
        sm = sign_matrix(pt, kind, bool(shift))
        data = sm.to_text().encode("ascii") if fmt == "txt" else sign_matrix_pgm(sm.entries)
    if out is None:
        if fmt == "pgm":
            raise UsageError("pgm output needs --out FILE")
        sys.stdout.write(data.decode("ascii"))
        sys.stdout.flush()
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(data)
        _emit(f"wrote={out} rows={pt.nmax}")
    return EXIT_OK


# -- numeric -----------------------------------------------------------------

def identity_tolerances(D: int):
    """(sum/product tolerance, derivative tolerance): 10^(-2D/5) and 10^(-D/5)."""
    return Fraction(1, 10 ** (2 * D // 5)), Fraction(1, 10 ** (D // 5))


def cmd_zeros(q: str, k: int, D: int, check: bool, J: int, unproven: bool) -> int:
    import mpmath

    from .zeros_numeric import check_thm2, f_eval, solve_xk, zero_set

    try:
        if check:
            zs = zero_set(q, J, D, unproven)
            for j in range(1, k + 1):
                _emit(f"q={q} k={j} x={mpmath.nstr(zs[j], D)} residual={mpmath.nstr(abs(f_eval(zs[j], q, D)), 5)}")
            rep = check_thm2(q, J, D, ks=tuple(range(1, min(k, 3) + 1)), zeros=zs)
            tol, dtol = identity_tolerances(D)
            for line in rep.lines():
                _emit(line)
            w = rep.worst()
            ok = w["sum"] < mpmath.mpf(tol.numerator) / tol.denominator and w["product"] < mpmath.mpf(tol.numerator) / tol.denominator
            ok = ok and w["derivative"] < mpmath.mpf(dtol.numerator) / dtol.denominator
            _emit(f"J={J} D={D} status={'ok' if ok else 'fail'}")
            return EXIT_OK if ok else EXIT_CHECK
        x = solve_xk(q, k, D, unproven)
        _emit(f"q={q} k={k} x={mpmath.nstr(x, D)} residual={mpmath.nstr(abs(f_eval(x, q, D)), 5)}")
        return EXIT_OK
    except NoConvergence as exc:
        _emit(f"status=fail error=NoConvergence detail={exc}")
        return EXIT_CHECK


def cmd_cbar(q: str, nmax: int, J: int, D: int, jacobi: int) -> int:
    import mpmath

    from .numtheory import cbar_polys, cbar_vanishes_at_one, jacobi_identity_check
    from .zeros_numeric import check_cbar_sums

    cb = cbar_polys(nmax)
    res = check_cbar_sums(q, nmax, J, D)
    tol, _ = identity_tolerances(D)
    tolv = mpmath.mpf(tol.numerator) / tol.denominator
    ok = True
    for n in range(1, nmax + 1):
        r = res[n]
        good = r["residual"] < tolv
        ok &= good
        _emit(
            f"n={n} poly={cb[n].coeffs} value={mpmath.nstr(r['poly'], 20)} zeros_sum={mpmath.nstr(r['zeros'], 20)} "
            f"residual={mpmath.nstr(r['residual'], 5)} {'ok' if good else 'fail'}"
        )
    bad_one = cbar_vanishes_at_one(nmax)
    _emit(f"vanish_at_one={'yes' if not bad_one else 'no'}" + (f" exceptions={bad_one}" if bad_one else ""))
    if jacobi:
        jok = jacobi_identity_check(jacobi)
        ok &= jok
        _emit(f"jacobi_through={jacobi} {'ok' if jok else 'fail'}")
    _emit(f"status={'ok' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_CHECK


ZERO_COUNT_CONSTANTS = (
    ("G_0(1.25;0.44175)", "g", 0, "1.25", "0.44175", "1.99164"),
    ("G_1(1.26;0.44175)", "g", 1, "1.26", "0.44175", "1.99999424"),
    ("G_2(2.38;0.31499)", "g", 2, "2.38", "0.31499", None),
    ("G_3(3.414;0.27814)", "g", 3, "3.414", "0.27814", None),
    ("theta(0.207875)", "theta", None, None, "0.207875", "1.9999999368"),
)


def cmd_constants_check(D: int) -> int:
    import mpmath

    from .zeros_numeric import g_func, theta_sum

    ok = True
    for name, what, k, u, t, printed in ZERO_COUNT_CONSTANTS:
        v = g_func(k, u, t, D) if what == "g" else theta_sum(t, D)
        text = mpmath.nstr(v, 15, strip_zeros=False)
        below = v < 2
        prefix = printed is None or text.startswith(printed)
        ok &= below and prefix
        parts = [f"name={name}", f"value={text}", f"below_two={'yes' if below else 'no'}"]
        if printed is not None:
            parts.append(f"printed={printed} prefix_match={'yes' if prefix else 'no'}")
        _emit(" ".join(parts))
    _emit(f"status={'ok' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_CHECK


# -- argument parsing ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="defexp", description="Exact expansions of the zeros of the deformed exponential function.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="compute P, P-hat and Q tables")
    c.add_argument("--nmax", type=int, required=True)
    c.add_argument("--out", help=f"output directory (default ${ENV_OUT})")
    c.add_argument("--full", action="store_true", help="carry every iterate to full order (slower, same result)")
    c.add_argument("--oracle-depth", type=int, default=0, help="cross-check n <= DEPTH with the multinomial recursion")

    v = sub.add_parser("verify", help="non-negativity at integers and closed-form structure checks")
    v.add_argument("--tables", help=f"table directory (default ${ENV_OUT})")
    v.add_argument("--rgrid", default="10,20,50,100")
    v.add_argument("--threads", type=int, default=1)

    r = sub.add_parser("roots", help="count, isolate and refine roots in (1, inf)")
    r.add_argument("--tables")
    r.add_argument("--n", type=int, action="append", help="restrict to this n (repeatable)")
    r.add_argument("--kind", choices=["P", "PHAT", "both"], default="both")
    r.add_argument("--digits", type=int, default=18)
    r.add_argument("--threads", type=int, default=1)

    s = sub.add_parser("signs", help="coefficient sign matrices (txt, pgm) or digit counts (csv)")
    s.add_argument("--tables")
    s.add_argument("--kind", choices=["P", "PHAT"], default="P")
    s.add_argument("--shift", type=int, choices=[0, 1], default=0)
    s.add_argument("--format", choices=["txt", "pgm", "csv"], default="txt")
    s.add_argument("--out", help="output file (stdout for txt/csv when omitted)")

    z = sub.add_parser("zeros", help="numeric zeros x_k(q) and the identities between them")
    z.add_argument("--q", required=True)
    z.add_argument("--k", type=int, default=1)
    z.add_argument("--prec", type=int, default=50)
    z.add_argument("--check-identities", action="store_true")
    z.add_argument("--J", type=int, default=40)
    z.add_argument("--allow-unproven", action="store_true", help="permit q above 0.2")

    b = sub.add_parser("cbar", help="C-bar polynomials against power sums of the zeros")
    b.add_argument("--q", required=True)
    b.add_argument("--nmax", type=int, default=5)
    b.add_argument("--J", type=int, default=40)
    b.add_argument("--prec", type=int, default=50)
    b.add_argument("--jacobi", type=int, default=50, help="also check the Jacobi identity through q^N (0 to skip)")

    k = sub.add_parser("sokal-check", help="constants of the zero-counting argument")
    k.add_argument("--prec", type=int, default=50)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compute":
            cfg = RunConfig(nmax=args.nmax, outDir=_default_dir(args.out), oracleCheckDepth=args.oracle_depth).validate()
            return cmd_compute(cfg, full=args.full)
        if args.command == "verify":
            cfg = RunConfig(rGrid=_parse_rgrid(args.rgrid), threads=args.threads).validate()
            return cmd_verify(cfg, _default_dir(args.tables))
        if args.command == "roots":
            if args.digits < 1:
                raise UsageError("digits must be positive")
            cfg = RunConfig(threads=args.threads).validate()
            kinds = ["P", "PHAT"] if args.kind == "both" else [args.kind]
            return cmd_roots(cfg, _default_dir(args.tables), args.n, kinds, args.digits)
        if args.command == "signs":
            return cmd_signs(_default_dir(args.tables), args.kind, args.shift, args.format,
                             Path(args.out) if args.out else None)
        if args.command == "zeros":
            RunConfig(precisionDigits=args.prec).validate()
            if args.k < 1 or args.J < 20:
                raise UsageError("need k >= 1 and J >= 20")
            return cmd_zeros(args.q, args.k, args.prec, args.check_identities, args.J, args.allow_unproven)
        if args.command == "cbar":
            RunConfig(precisionDigits=args.prec).validate()
            if args.nmax < 1 or args.J < 20:
                raise UsageError("need nmax >= 1 and J >= 20")
            return cmd_cbar(args.q, args.nmax, args.J, args.prec, args.jacobi)
        if args.command == "sokal-check":
            RunConfig(precisionDigits=args.prec).validate()
            return cmd_constants_check(args.prec)
    except UsageError as exc:
        print(f"defexp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"defexp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
