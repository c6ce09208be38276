"""Disk cache of expanded basis monomials, one text file per (index, order).

Format: a magic header line ``WJF1 m=<m> order=<order>``, then for each
monomial a line ``alpha beta gamma nterms`` followed by ``nterms`` lines
``n l coeff``.  The term count makes the two three-integer line kinds
unambiguous to parse; the magic string guards format drift.
"""

from __future__ import annotations

import os

from wjforms.forms import JacobiForm
from wjforms.qseries import BiSeries

MAGIC = "WJF1"


def cache_path(cache_dir: str, m: int, order: int) -> str:
    return os.path.join(cache_dir, f"basis_m{m}_o{order}.txt")


def save_basis(cache_dir: str, m: int, order: int, basis) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, m, order)
    lines = [f"{MAGIC} m={m} order={order}"]
    for (a, b, c), form in basis:
        terms = sorted(form.series.terms.items())
        lines.append(f"{a} {b} {c} {len(terms)}")
        for (n, l), coeff in terms:
            lines.append(f"{n} {l} {coeff}")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    return path


def load_basis(cache_dir: str, m: int, order: int):
    """Parsed basis list, or None when absent.  Malformed files raise."""
    path = cache_path(cache_dir, m, order)
    if not os.path.exists(path):
        return None
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if header != [MAGIC, f"m={m}", f"order={order}"]:
            raise ValueError(f"{path}: bad header {header!r}")
        out = []
        while True:
            line = fh.readline()
            if not line.strip():
                break
            a, b, c, nterms = map(int, line.split())
            terms = {}
            for _ in range(nterms):
                n, l, coeff = map(int, fh.readline().split())
                terms[(n, l)] = coeff
            series = BiSeries(terms, order, q_den=1, y_den=1)
            out.append(((a, b, c), JacobiForm(0, m, series, order)))
    return out
