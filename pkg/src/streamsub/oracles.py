"""Concrete submodular functions, their file formats and seeded generators.

File formats (all whitespace separated, 0-based ids):

graph      ``n m directed|undirected`` then ``m`` lines ``u v w``
family     ``n_universe n_sets``, a line of universe weights, then one line
           of covered item ids per ground element (blank line = empty set)
table      ``n`` then ``2**n`` lines ``bitmask value`` (bit i = element i)
costs      ``d n`` then ``d`` lines of ``n`` entries (integers or ``p/q``)
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .core import SubmodularOracle
from .errors import InputError, ParseError, SizeError, ValidationError

TABLE_MAX_N = 20


class CutOracle(SubmodularOracle):
    """Weighted cut function: total weight of edges leaving ``S``."""

    def __init__(self, n: int, edges=(), directed: bool = False):
        super().__init__()
        if n < 0:
            raise InputError("vertex count must be non-negative")
        clean = []
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if not w >= 0 or math.isinf(w):
                raise ValidationError(f"edge ({u}, {v}) has invalid weight {w}")
            clean.append((u, v, w))
        self.n = n
        self.edges = tuple(clean)
        self.directed = directed

    def _value(self, S):
        total = 0.0
        if self.directed:
            for u, v, w in self.edges:
                if u in S and v not in S:
                    total += w
        else:
            for u, v, w in self.edges:
                if (u in S) != (v in S):
                    total += w
        return total


def cut_value(oracle: CutOracle, S) -> float:
    return oracle.evaluate(S)


class CoverageOracle(SubmodularOracle):
    """Weighted coverage: weight of universe items hit by the chosen sets."""

    def __init__(self, weights, sets):
        super().__init__()
        self.weights = tuple(float(w) for w in weights)
        for w in self.weights:
            if not w >= 0 or math.isinf(w):
                raise ValidationError(f"invalid universe weight {w}")
        m = len(self.weights)
        family = []
        for j, items in enumerate(sets):
            items = frozenset(int(x) for x in items)
            bad = [x for x in items if not 0 <= x < m]
            if bad:
                raise InputError(f"set {j} covers unknown item(s) {sorted(bad)}")
            family.append(items)
        self.sets = tuple(family)
        self.n = len(self.sets)

    def _value(self, S):
        covered = set()
        for j in S:
            covered |= self.sets[j]
        return float(sum(self.weights[x] for x in covered))


def coverage_value(oracle: CoverageOracle, S) -> float:
    return oracle.evaluate(S)


class TableOracle(SubmodularOracle):
    """Explicit value table indexed by subset bitmask."""

    def __init__(self, n: int, values):
        super().__init__()
        if not 0 <= n <= TABLE_MAX_N:
            raise SizeError(f"table oracles support n <= {TABLE_MAX_N}, got {n}")
        vals = np.asarray(values, dtype=np.float64)
        if vals.shape != (1 << n,):
            raise InputError(f"table for n={n} needs {1 << n} values, got {vals.size}")
        self.n = n
        self.values = vals
        self.values.setflags(write=False)

    @classmethod
    def tabulate(cls, oracle: SubmodularOracle) -> "TableOracle":
        probe = oracle.metered()
        n = oracle.n
        vals = [probe.evaluate(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]
        return cls(n, vals)

    def _value(self, S):
        mask = 0
        for i in S:
            mask |= 1 << i
        return float(self.values[mask])


@dataclass(frozen=True)
class SubmodularityCheck:
    ok: bool
    # (S, u, v) with f(u|S) < f(u|S+v); (S, None, None) for a negative value
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def validate_submodular(oracle: TableOracle, tol: float | None = None) -> SubmodularityCheck:
    """Exhaustive diminishing-returns and non-negativity check.

    Float tables are compared with a slack of ``1e-9 * max(1, max|f|)``
    unless ``tol`` is given.  The reported witness is the violation with the
    smallest ``(S bitmask, u, v)``.
    """
    vals = oracle.values
    n = oracle.n
    if tol is None:
        tol = 1e-9 * max(1.0, float(np.max(np.abs(vals)))) if vals.size else 0.0
    negative = np.flatnonzero(vals < 0)
    if negative.size:
        mask = int(negative[0])
        return SubmodularityCheck(False, (_ids(mask), None, None))
    masks = np.arange(1 << n)
    best = None
    for u in range(n):
        bu = 1 << u
        for v in range(n):
            if v == u:
                continue
            bv = 1 << v
            S = masks[(masks & (bu | bv)) == 0]
            gain_small = vals[S | bu] - vals[S]
            gain_big = vals[S | bu | bv] - vals[S | bv]
            bad = np.flatnonzero(gain_small < gain_big - tol)
            if bad.size:
                cand = (int(S[bad[0]]), u, v)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return SubmodularityCheck(True)
    return SubmodularityCheck(False, (_ids(best[0]), best[1], best[2]))


def _ids(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


# -- file I/O ----------------------------------------------------------------


def _content_lines(path):
    """(line number, tokens) for every non-blank line."""
    text = Path(path).read_text()
    for no, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if toks:
            yield no, toks


def _int(tok, path, no, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", path, no) from None


def _float(tok, path, no, what):
    try:
        x = float(tok)
    except ValueError:
        raise ParseError(f"expected number {what}, got {tok!r}", path, no) from None
    if not math.isfinite(x):
        raise ParseError(f"{what} must be finite, got {tok!r}", path, no)
    return x


def load_graph(path) -> CutOracle:
    lines = list(_content_lines(path))
    if not lines:
        raise ParseError("empty graph file", path, 1)
    no, head = lines[0]
    if len(head) != 3 or head[2] not in ("directed", "undirected"):
        raise ParseError("header must be 'n m directed|undirected'", path, no)
    n = _int(head[0], path, no, "n")
    m = _int(head[1], path, no, "m")
    if n < 0 or m < 0:
        raise ParseError("n and m must be non-negative", path, no)
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header promises {m} edges, found {len(body)}", path, no)
    edges = []
    for no, toks in body:
        if len(toks) != 3:
            raise ParseError("edge line must be 'u v w'", path, no)
        u = _int(toks[0], path, no, "u")
        v = _int(toks[1], path, no, "v")
        w = _float(toks[2], path, no, "w")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex id out of range 0..{n - 1}", path, no)
        if w < 0:
            raise ParseError(f"negative edge weight {w}", path, no)
        edges.append((u, v, w))
    return CutOracle(n, edges, directed=head[2] == "directed")


def load_family(path) -> CoverageOracle:
    raw = Path(path).read_text().split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    if len(raw) < 2:
        raise ParseError("family file needs a header and a weight line", path, len(raw) + 1)
    head = raw[0].split()
    if len(head) != 2:
        raise ParseError("header must be 'n_universe n_sets'", path, 1)
    n_items = _int(head[0], path, 1, "n_universe")
    n_sets = _int(head[1], path, 1, "n_sets")
    weights = [_float(t, path, 2, "weight") for t in raw[1].split()]
    if len(weights) != n_items:
        raise ParseError(f"expected {n_items} universe weights, got {len(weights)}", path, 2)
    if any(w < 0 for w in weights):
        raise ParseError("negative universe weight", path, 2)
    rows = raw[2:]
    if len(rows) < n_sets:
        raise ParseError(f"expected {n_sets} set lines, found {len(rows)}", path, len(raw) + 1)
    for extra, line in enumerate(rows[n_sets:], start=3 + n_sets):
        if line.strip():
            raise ParseError("unexpected content after the last set line", path, extra)
    sets = []
    for no, line in enumerate(rows[:n_sets], start=3):
        items = [_int(t, path, no, "item id") for t in line.split()]
        bad = [x for x in items if not 0 <= x < n_items]
        if bad:
            raise ParseError(f"item id {bad[0]} out of range 0..{n_items - 1}", path, no)
        sets.append(items)
    return CoverageOracle(weights, sets)


def load_table(path) -> TableOracle:
    lines = list(_content_lines(path))
    if not lines:
        raise ParseError("empty table file", path, 1)
    no, head = lines[0]
    if len(head) != 1:
        raise ParseError("header must be the single integer n", path, no)
    n = _int(head[0], path, no, "n")
    if not 0 <= n <= TABLE_MAX_N:
        raise ParseError(f"n must be in 0..{TABLE_MAX_N}", path, no)
    size = 1 << n
    if len(lines) - 1 != size:
        raise ParseError(f"expected {size} table rows, found {len(lines) - 1}", path, no)
    values = [None] * size
    for no, toks in lines[1:]:
        if len(toks) != 2:
            raise ParseError("table row must be 'bitmask value'", path, no)
        mask = _int(toks[0], path, no, "bitmask")
        if not 0 <= mask < size:
            raise ParseError(f"bitmask {mask} out of range", path, no)
        if values[mask] is not None:
            raise ParseError(f"bitmask {mask} listed twice", path, no)
        values[mask] = _float(toks[1], path, no, "value")
    table = TableOracle(n, values)
    check = validate_submodular(table)
    if not check:
        S, u, v = check.witness
        if u is None:
            raise ValidationError(f"{path}: negative value f({set(S)})")
        raise ValidationError(
            f"{path}: not submodular, witness S={set(S)}, u={u}, v={v}: f(u|S) < f(u|S+v)"
        )
    return table


def load_costs(path) -> list[list[Fraction]]:
    lines = list(_content_lines(path))
    if not lines:
        raise ParseError("empty cost file", path, 1)
    no, head = lines[0]
    if len(head) != 2:
        raise ParseError("header must be 'd n'", path, no)
    d = _int(head[0], path, no, "d")
    n = _int(head[1], path, no, "n")
    if d < 1 or n < 0:
        raise ParseError("need d >= 1 and n >= 0", path, no)
    rows = lines[1:]
    if n == 0:
        return [[] for _ in range(d)]
    if len(rows) != d:
        raise ParseError(f"expected {d} cost rows, found {len(rows)}", path, no)
    out = []
    for no, toks in rows:
        if len(toks) != n:
            raise ParseError(f"expected {n} entries, found {len(toks)}", path, no)
        out.append([parse_rational(t, path, no) for t in toks])
    return out


def parse_rational(tok: str, path=None, no=None) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected rational (integer or p/q), got {tok!r}", path, no) from None


def write_graph(oracle: CutOracle, path) -> None:
    kind = "directed" if oracle.directed else "undirected"
    rows = [f"{oracle.n} {len(oracle.edges)} {kind}"]
    rows += [f"{u} {v} {w!r}" for u, v, w in oracle.edges]
    Path(path).write_text("\n".join(rows) + "\n")


def write_family(oracle: CoverageOracle, path) -> None:
    rows = [f"{len(oracle.weights)} {oracle.n}", " ".join(repr(w) for w in oracle.weights)]
    rows += [" ".join(str(x) for x in sorted(s)) for s in oracle.sets]
    Path(path).write_text("\n".join(rows) + "\n")


def write_table(oracle: TableOracle, path) -> None:
    rows = [str(oracle.n)] + [f"{mask} {float(v)!r}" for mask, v in enumerate(oracle.values)]
    Path(path).write_text("\n".join(rows) + "\n")


def write_costs(costs, path) -> None:
    d = len(costs)
    n = len(costs[0]) if d else 0
    rows = [f"{d} {n}"] + [" ".join(str(Fraction(c)) for c in row) for row in costs]
    Path(path).write_text("\n".join(rows) + "\n")


# -- seeded generators -------------------------------------------------------


def random_cut_graph(n, seed, p=0.5, wmin=0.0, wmax=1.0, directed=False) -> CutOracle:
    """Erdos-Renyi graph with uniform edge weights in ``[wmin, wmax]``."""
    if not 0 <= p <= 1 or wmin < 0 or wmax < wmin:
        raise InputError("need 0 <= p <= 1 and 0 <= wmin <= wmax")
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            if u == v or (not directed and v < u):
                continue
            if rng.random() < p:
                edges.append((u, v, round(rng.uniform(wmin, wmax), 6)))
    return CutOracle(n, edges, directed=directed)


def random_family(n, seed, universe=None, p=0.3) -> CoverageOracle:
    """Each ground element covers each universe item independently w.p. ``p``."""
    rng = random.Random(seed)
    if universe is None:
        universe = max(1, 2 * n)
    weights = [round(rng.uniform(0.1, 1.0), 6) for _ in range(universe)]
    sets = [[x for x in range(universe) if rng.random() < p] for _ in range(n)]
    return CoverageOracle(weights, sets)


def random_costs(d, n, b, seed, denominators=(1, 2, 3, 4)) -> list[list[Fraction]]:
    """``d x n`` rationals drawn from ``{p/q : 1 <= p/q <= b}``."""
    b = Fraction(b)
    if b < 1:
        raise InputError("cost upper bound b must be >= 1")
    rng = random.Random(seed)
    rows = []
    for _ in range(d):
        row = []
        for _ in range(n):
            q = rng.choice(denominators)
            hi = math.floor(b * q)
            row.append(Fraction(rng.randint(q, hi), q))
        rows.append(row)
    return rows


def random_table(n, seed, offset=True) -> TableOracle:
    """Random non-negative submodular table: a non-negative mixture of a cut,
    a coverage function, a concave-of-modular term and (optionally) a constant.
    """
    rng = random.Random(seed)
    parts = []
    cut = random_cut_graph(
        n, rng.randrange(1 << 30), p=rng.uniform(0.2, 0.9), directed=rng.random() < 0.5
    )
    parts.append((rng.uniform(0.5, 2.0), cut))
    if rng.random() < 0.6:
        parts.append((rng.uniform(0.0, 1.0), random_family(n, rng.randrange(1 << 30))))
    concave = [rng.uniform(0.0, 1.0) for _ in range(n)] if rng.random() < 0.6 else None
    scale = rng.uniform(0.0, 1.5)
    const = rng.uniform(0.0, 0.5) if offset and rng.random() < 0.5 else 0.0
    vals = np.zeros(1 << n)
    for mask in range(1 << n):
        S = frozenset(i for i in range(n) if mask >> i & 1)
        total = const
        for weight, fn in parts:
            total += weight * fn._value(S)
        if concave is not None:
            total += scale * math.sqrt(sum(concave[i] for i in S))
        vals[mask] = total
    table = TableOracle(n, vals)
    if not validate_submodular(table):
        raise ValidationError("mixture generator produced a non-submodular table")
    return table
