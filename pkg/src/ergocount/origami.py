"""Square-tiled translation surfaces and their saddle connections.

An origami on N unit squares is given by two permutations: h(s) is the
square to the right of s and v(s) the square above it. Squares are
1-indexed in the public interface and 0-indexed internally.

Vertices are tracked through their bottom-left sectors. Going once
counterclockwise around the vertex at the bottom-left corner of s visits
BL(s), BR(h^-1 s), TR(v^-1 h^-1 s), TL(h v^-1 h^-1 s) and then the
bottom-left sector of v h v^-1 h^-1 s, so vertices are the cycles of that
commutator and a cycle of length c has cone angle 2 pi c.

Tracing is exact. A straight line in a coprime integer direction (p, q)
from a corner crosses |p| - 1 vertical and |q| - 1 horizontal edges before
it lands on a corner again at parameter t = 1, so only integer
bookkeeping is ever needed.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import ValidationError
from .geometry import UnimodularBasis
from .lattice import DEFAULT_BUDGET, enumerate_coefficients
from .regions import ThinningRegion
from .stats import MCEstimate, Welford

CORNERS = ("BL", "BR", "TL", "TR")


class OrigamiFormatError(ValidationError):
    def __init__(self, message: str, line: int | None = None, source: str = "<string>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _check_perm(images, N: int, name: str):
    if len(images) != N:
        raise ValidationError(f"{name} has {len(images)} entries, expected {N}")
    if sorted(images) != list(range(1, N + 1)):
        raise ValidationError(f"{name} is not a permutation of 1..{N}")


@dataclass(frozen=True)
class Origami:
    N: int
    h: tuple
    v: tuple

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError(f"N must be a positive integer, got {self.N!r}")
        h = tuple(int(x) for x in self.h)
        v = tuple(int(x) for x in self.v)
        _check_perm(h, self.N, "h")
        _check_perm(v, self.N, "v")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)
        if not self._connected():
            raise ValidationError("the squares do not form a connected surface")

    @classmethod
    def from_cycles(cls, N: int, h_cycles=(), v_cycles=()) -> "Origami":
        """Build from cycle notation, e.g. ``Origami.from_cycles(3, [(1, 2)], [(1, 3)])``."""
        def perm(cycles):
            img = list(range(1, N + 1))
            for cyc in cycles:
                for i, a in enumerate(cyc):
                    img[a - 1] = cyc[(i + 1) % len(cyc)]
            return img
        return cls(N, perm(h_cycles), perm(v_cycles))

    @classmethod
    def parse(cls, text: str, source: str = "<string>") -> "Origami":
        rows = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            rows.append((lineno, line))
        if len(rows) < 3:
            raise OrigamiFormatError(f"expected 3 data lines (N, h, v), found {len(rows)}",
                                     rows[-1][0] if rows else None, source)
        if len(rows) > 3:
            raise OrigamiFormatError("unexpected extra data", rows[3][0], source)
        (ln, first), (lh, hline), (lv, vline) = rows
        try:
            N = int(first)
        except ValueError:
            raise OrigamiFormatError(f"N must be an integer, got {first!r}", ln, source) from None
        if N < 1:
            raise OrigamiFormatError(f"N must be positive, got {N}", ln, source)
        perms = []
        for lineno, line, name in ((lh, hline, "h"), (lv, vline, "v")):
            try:
                images = [int(tok) for tok in line.split()]
            except ValueError:
                raise OrigamiFormatError(f"{name} must be space-separated integers", lineno, source) from None
            try:
                _check_perm(images, N, name)
            except ValidationError as exc:
                raise OrigamiFormatError(str(exc), lineno, source) from None
            perms.append(images)
        try:
            return cls(N, perms[0], perms[1])
        except ValidationError as exc:
            raise OrigamiFormatError(str(exc), lv, source) from None

    @classmethod
    def load(cls, path) -> "Origami":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), source=os.fspath(path))

    def to_text(self) -> str:
        return f"{self.N}\n{' '.join(map(str, self.h))}\n{' '.join(map(str, self.v))}\n"

    def relabel(self, sigma) -> "Origami":
        """Conjugate by sigma (1-indexed images): square s becomes sigma(s)."""
        sigma = [int(x) for x in sigma]
        _check_perm(sigma, self.N, "relabeling")
        h = [0] * self.N
        v = [0] * self.N
        for s in range(self.N):
            h[sigma[s] - 1] = sigma[self.h[s] - 1]
            v[sigma[s] - 1] = sigma[self.v[s] - 1]
        return Origami(self.N, h, v)

    def _connected(self) -> bool:
        seen = {0}
        todo = deque([0])
        while todo:
            s = todo.popleft()
            for t in (self.h[s] - 1, self.v[s] - 1):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return len(seen) == self.N

    # 0-indexed permutation arrays and their inverses
    @cached_property
    def _maps(self):
        h = [x - 1 for x in self.h]
        v = [x - 1 for x in self.v]
        hi = [0] * self.N
        vi = [0] * self.N
        for s in range(self.N):
            hi[h[s]] = s
            vi[v[s]] = s
        return h, v, hi, vi

    @cached_property
    def _vertex_of_bl(self) -> list[int]:
        """Vertex index of the bottom-left corner of each square."""
        out = [-1] * self.N
        for i, cyc in enumerate(self._cycles):
            for s in cyc:
                out[s] = i
        return out

    @cached_property
    def _cycles(self) -> list[tuple]:
        h, v, hi, vi = self._maps
        kappa = [v[h[vi[hi[s]]]] for s in range(self.N)]
        seen = [False] * self.N
        cycles = []
        for s in range(self.N):
            if seen[s]:
                continue
            cyc = []
            t = s
            while not seen[t]:
                seen[t] = True
                cyc.append(t)
                t = kappa[t]
            cycles.append(tuple(cyc))
        return cycles

    @cached_property
    def _marked(self) -> list[bool]:
        """Per vertex: is it a saddle-connection endpoint. On a torus every vertex is marked."""
        if all(len(c) == 1 for c in self._cycles):
            return [True] * len(self._cycles)
        return [len(c) > 1 for c in self._cycles]


def cone_points(origami: Origami) -> list[tuple[tuple, int]]:
    """Vertices as (BL-corner cycle of 1-indexed squares, c); cone angle is 2 pi c.

    Every vertex is listed. A vertex is a zero of the 1-form when c > 1; on a
    genus-one surface all vertices are marked and act as zeros.
    """
    return [(tuple(s + 1 for s in cyc), len(cyc)) for cyc in origami._cycles]


def marked_vertices(origami: Origami) -> list[tuple[tuple, int]]:
    return [cp for cp, mk in zip(cone_points(origami), origami._marked) if mk]


def euler_vertex_count(origami: Origami) -> int:
    """Number of vertices of the square complex, by gluing corners along edges."""
    N = origami.N
    parent = list(range(4 * N))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    bl, br, tl, tr = 0, 1, 2, 3
    for s in range(N):
        r = origami.h[s] - 1
        u = origami.v[s] - 1
        union(4 * s + br, 4 * r + bl)
        union(4 * s + tr, 4 * r + tl)
        union(4 * s + tl, 4 * u + bl)
        union(4 * s + tr, 4 * u + br)
    return len({find(a) for a in range(4 * N)})


def genus(origami: Origami) -> int:
    """Genus from the Euler characteristic V - E + F with E = 2N, F = N."""
    chi = euler_vertex_count(origami) - origami.N
    return (2 - chi) // 2


def germ_corner(direction) -> str:
    """Corner from which a separatrix in this direction leaves its square.

    Diagonal directions leave through the sector of the matching quadrant.
    Horizontal and vertical rays run along an edge; right and up are
    attributed to the BL sector, left and down to the TR sector.
    """
    p, q = direction
    if p > 0 and q >= 0 or p == 0 and q > 0:
        return "BL"
    if p < 0 and q > 0:
        return "BR"
    if p > 0 and q < 0:
        return "TL"
    return "TR"


def separatrix_germs(origami: Origami, direction) -> list[tuple[int, str]]:
    """Outgoing germs (1-indexed square, corner) at marked vertices in a direction."""
    _check_direction(direction)
    h, v, hi, vi = origami._maps
    corner = germ_corner(direction)
    out = []
    for cyc, mk in zip(origami._cycles, origami._marked):
        if not mk:
            continue
        for s in cyc:
            if corner == "BL":
                t = s
            elif corner == "BR":
                t = hi[s]
            elif corner == "TL":
                t = vi[s]
            else:
                t = hi[vi[s]]
            out.append((t + 1, corner))
    return out


def _check_direction(direction):
    p, q = (int(direction[0]), int(direction[1]))
    if (p, q) != tuple(direction) or (p, q) == (0, 0) or math.gcd(p, q) != 1:
        raise ValidationError(f"direction must be a coprime integer pair, got {tuple(direction)!r}")
    return p, q


def _end_bl(origami: Origami, s: int, corner: str) -> int:
    """Square whose BL sector is at the given corner's vertex (same vertex, maybe another sector)."""
    h, v, _, _ = origami._maps
    if corner == "BL":
        return s
    if corner == "BR":
        return h[s]
    if corner == "TL":
        return v[s]
    return v[h[s]]


def trace_separatrix(origami: Origami, start, direction, max_periods: int | None = None):
    """Follow a separatrix until it reaches a marked vertex.

    ``start`` is (1-indexed square, corner) and must be one of the germs in
    this direction. Returns the holonomy (k p, k q) for the first k <= max_periods
    at which a marked vertex is reached, or None.
    """
    p, q = _check_direction(direction)
    square, corner = int(start[0]), str(start[1])
    if (square, corner) not in separatrix_germs(origami, (p, q)):
        raise ValidationError(f"{start!r} is not an outgoing germ in direction {(p, q)} at a marked vertex")
    max_periods = origami.N if max_periods is None else int(max_periods)
    k = _trace(origami, square - 1, p, q, max_periods)
    return None if k is None else (k * p, k * q)


def _trace(origami: Origami, s: int, p: int, q: int, max_periods: int):
    h, v, hi, vi = origami._maps
    hs = h if p > 0 else hi
    vs = v if q > 0 else vi
    ap, aq = abs(p), abs(q)
    corner = germ_corner((p, q))
    # corner of the current square where the unit step ends
    if p == 0 or q == 0:
        end = {(1, 0): "BR", (0, 1): "TL", (-1, 0): "TL", (0, -1): "BR"}[(p, q)]
    else:
        end = {"BL": "TR", "BR": "TL", "TL": "BR", "TR": "BL"}[corner]
    vert = origami._vertex_of_bl
    marked = origami._marked
    for k in range(1, max_periods + 1):
        i = j = 1
        # interior crossings, merged in order of t = i/ap versus j/aq
        while i < ap or j < aq:
            if j >= aq or (i < ap and i * aq < j * ap):
                s = hs[s]
                i += 1
            else:
                s = vs[s]
                j += 1
        if marked[vert[_end_bl(origami, s, end)]]:
            return k
        # regular vertex: continue straight into the opposite sector
        if p == 0:
            s = vs[s]
        elif q == 0:
            s = hs[s]
        else:
            s = vs[hs[s]]
    return None


@dataclass(frozen=True)
class SaddleConnectionSet:
    """Holonomies with multiplicities, sorted by holonomy."""

    entries: tuple

    @property
    def total(self) -> int:
        return sum(mult for _, mult in self.entries)

    @property
    def distinct(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def count_saddle_connections(origami: Origami, b: float, T: float, theta: float = 0.0, *,
                             distinct: bool = False, y_lo: float = 1.0,
                             budget: int = DEFAULT_BUDGET) -> tuple[int, SaddleConnectionSet]:
    """Saddle connections with holonomy w such that r_{-theta} w = (x', y') has
    |x' y'| <= b and y_lo <= y' < T.

    With ``distinct`` the count is over distinct holonomy vectors instead of
    saddle connections.
    """
    if not (b > 0 and math.isfinite(b)):
        raise ValidationError(f"b must be positive, got {b!r}")
    if not T >= y_lo:
        raise ValidationError(f"T must be >= {y_lo}, got {T!r}")
    if not math.isfinite(theta):
        raise ValidationError(f"theta must be finite, got {theta!r}")
    region = ThinningRegion(b, 1, 1, y_lo, T, theta)
    if region.empty:
        return 0, SaddleConnectionSet(())
    K = enumerate_coefficients(UnimodularBasis.identity(1, 1), region, budget=budget)
    frame = region.frame()
    entries = []
    memo: dict[tuple[int, int], list] = {}
    for a, c in K.tolist():
        if frame[1, 0] * a + frame[1, 1] * c <= 0:
            continue
        g = math.gcd(a, c)
        d = (a // g, c // g)
        ks = memo.get(d)
        if ks is None:
            ks = []
            for sq, _ in separatrix_germs(origami, d):
                kk = _trace(origami, sq - 1, d[0], d[1], origami.N)
                if kk is None:
                    raise RuntimeError(f"separatrix in direction {d} did not close within N periods")
                ks.append(kk)
            memo[d] = ks
        mult = ks.count(g)
        if mult:
            entries.append(((a, c), mult))
    entries.sort()
    spectrum = SaddleConnectionSet(tuple(entries))
    return (spectrum.distinct if distinct else spectrum.total), spectrum


def estimate_sv_constant(origami: Origami, b: float, log2T: int, theta_samples: int, stream, *,
                         distinct: bool = False, budget: int = DEFAULT_BUDGET) -> MCEstimate:
    """Mean over uniform rotations of R_{b,T}(r_theta surface) / (2 b log T)."""
    if int(log2T) != log2T or log2T < 6:
        raise ValidationError(f"log2T must be an integer >= 6, got {log2T!r}")
    if theta_samples < 10:
        raise ValidationError(f"need at least 10 rotations, got {theta_samples}")
    T = math.ldexp(1.0, int(log2T))
    norm = 2.0 * b * math.log(T)
    acc = Welford()
    for theta in random_thetas(theta_samples, stream):
        count, _ = count_saddle_connections(origami, b, T, theta, distinct=distinct, budget=budget)
        acc.add(count / norm)
    return acc.estimate()


def random_thetas(count: int, stream) -> list[float]:
    """Rotation angle i is drawn from child stream i, uniform on [0, 2 pi)."""
    return [float(stream.child(i).rng().random()) * 2.0 * math.pi for i in range(count)]


CORPUS = {
    "torus": Origami(1, [1], [1]),
    "torus-2": Origami.from_cycles(2, [(1, 2)]),
    "torus-2x2": Origami.from_cycles(4, [(1, 2), (3, 4)], [(1, 3), (2, 4)]),
    "torus-3-sheared": Origami.from_cycles(3, [(1, 2, 3)], [(1, 2, 3)]),
    "L3": Origami.from_cycles(3, [(1, 2)], [(1, 3)]),
    "L4-wide": Origami.from_cycles(4, [(1, 2, 3)], [(1, 4)]),
    "L5": Origami.from_cycles(5, [(1, 2, 3)], [(1, 4, 5)]),
    "stair-4": Origami.from_cycles(4, [(1, 2), (3, 4)], [(2, 3)]),
    "two-cyl-4": Origami.from_cycles(4, [(1, 2, 3, 4)], [(1, 2)]),
    "H2-4-offset": Origami.from_cycles(4, [(1, 2, 3)], [(2, 4)]),
    "stair-6": Origami.from_cycles(6, [(1, 2), (3, 4), (5, 6)], [(2, 3), (4, 5), (6, 1)]),
    "eierlegende-wollmilchsau": Origami.from_cycles(
        8, [(1, 2, 3, 4), (5, 6, 7, 8)], [(1, 5, 3, 7), (2, 8, 4, 6)]),
}
