"""Plain-text persistence for polynomial tables.

Format::

    defexp-table v1 kind=P nmax=3
    n=1 deg=0 Mn=2
    1
    n=2 deg=2 Mn=4
    -1 0 3
    ...

Coefficients are ascending powers of k, space separated.  The files are
meant to be diffed, so writing is fully deterministic.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Dict, List, Tuple

from .exactnum import ONE, IntPoly
from .expansion import PolyTable
from .numtheory import build_qtable

KINDS = ("P", "PHAT", "Q")
FILENAMES = {"P": "P.txt", "PHAT": "PHAT.txt", "Q": "Q.txt"}
HEADER = "defexp-table v1"


class TableFormatError(ValueError):
    pass


def format_table(kind: str, polys: List[IntPoly], nmax: int) -> str:
    """Serialise polys[1..nmax] of the given kind."""
    kind = kind.upper()
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    M = build_qtable(nmax).M
    lines = [f"{HEADER} kind={kind} nmax={nmax}"]
    for n in range(1, nmax + 1):
        p = polys[n]
        lines.append(f"n={n} deg={p.degree} Mn={M[n]}")
        lines.append(" ".join(str(c) for c in p.coeffs) if p.coeffs else "0")
    return "\n".join(lines) + "\n"


def _fields(line: str, where: str) -> Dict[str, str]:
    out = {}
    for tok in line.split():
        if "=" not in tok:
            raise TableFormatError(f"{where}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def parse_table(text: str, source: str = "<table>") -> Tuple[str, int, List[IntPoly]]:
    """Inverse of :func:`format_table`; returns (kind, nmax, polys) with polys[0] = 1."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith(HEADER + " "):
        raise TableFormatError(f"{source}: missing '{HEADER}' header")
    head = _fields(lines[0][len(HEADER):], f"{source}:1")
    try:
        kind, nmax = head["kind"], int(head["nmax"])
    except (KeyError, ValueError) as exc:
        raise TableFormatError(f"{source}: bad header {lines[0]!r}") from exc
    if kind not in KINDS:
        raise TableFormatError(f"{source}: unknown kind {kind!r}")
    body = lines[1:]
    if len(body) != 2 * nmax:
        raise TableFormatError(f"{source}: expected {2 * nmax} lines after the header, found {len(body)}")
    M = build_qtable(max(nmax, 1)).M
    polys: List[IntPoly] = [ONE]
    for n in range(1, nmax + 1):
        rec_line = 2 * n - 1
        rec = _fields(body[2 * n - 2], f"{source}:{rec_line + 1}")
        try:
            rn, deg, mn = int(rec["n"]), int(rec["deg"]), int(rec["Mn"])
        except (KeyError, ValueError) as exc:
            raise TableFormatError(f"{source}:{rec_line + 1}: bad record line") from exc
        if rn != n:
            raise TableFormatError(f"{source}:{rec_line + 1}: expected n={n}, found n={rn}")
        if mn != M[n]:
            raise TableFormatError(f"{source}:{rec_line + 1}: Mn={mn} but M_{n}={M[n]}")
        try:
            coeffs = [int(t) for t in body[2 * n - 1].split()]
        except ValueError as exc:
            raise TableFormatError(f"{source}:{rec_line + 2}: non-integer coefficient") from exc
        p = IntPoly(coeffs)
        if p.degree != deg or len(coeffs) != max(deg, 0) + 1:
            raise TableFormatError(f"{source}:{rec_line + 2}: degree {deg} does not match {len(coeffs)} coefficients")
        polys.append(p)
    return kind, nmax, polys


def write_tables(pt: PolyTable, out_dir) -> List[Path]:
    """Write P.txt, PHAT.txt and Q.txt; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    q = build_qtable(pt.nmax).Q
    written = []
    for kind, polys in (("P", pt.P), ("PHAT", pt.Phat), ("Q", q)):
        path = out / FILENAMES[kind]
        text = format_table(kind, polys, pt.nmax)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(text, encoding="ascii")
        os.replace(tmp, path)
        written.append(path)
    return written


def read_table_file(path) -> Tuple[str, int, List[IntPoly]]:
    p = Path(path)
    return parse_table(p.read_text(encoding="ascii"), str(p))


def load_tables(tables_dir) -> PolyTable:
    """Read P.txt and PHAT.txt (and check Q.txt if present) into a PolyTable."""
    d = Path(tables_dir)
    missing = [FILENAMES[k] for k in ("P", "PHAT") if not (d / FILENAMES[k]).is_file()]
    if missing:
        raise FileNotFoundError(
            f"{d}: missing {', '.join(missing)}; run 'defexp compute --nmax N --out {d}' first"
        )
    kp, np_, P = read_table_file(d / FILENAMES["P"])
    kh, nh, H = read_table_file(d / FILENAMES["PHAT"])
    if kp != "P" or kh != "PHAT":
        raise TableFormatError(f"{d}: table kinds are {kp}/{kh}, expected P/PHAT")
    if np_ != nh:
        raise TableFormatError(f"{d}: P has nmax={np_} but PHAT has nmax={nh}")
    qpath = d / FILENAMES["Q"]
    if qpath.is_file():
        kq, nq, Q = read_table_file(qpath)
        ref = build_qtable(nq).Q
        if kq != "Q" or Q[1:] != ref[1:nq + 1]:
            raise TableFormatError(f"{qpath}: Q table does not match the denominators")
    return PolyTable(np_, P, H, provenance=f"file:{d}")


__all__ = [
    "FILENAMES",
    "TableFormatError",
    "format_table",
    "load_tables",
    "parse_table",
    "read_table_file",
    "write_tables",
]
