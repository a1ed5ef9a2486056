"""Semisimple root data on a chosen lattice, and their Weyl groups.

Conventions:

* ``cartan[i][j] = alpha_i^vee(alpha_j)``; simple root ``j`` has weight
  coordinates equal to column ``j``.
* A lattice is given by a basis (rows) in weight coordinates.  Lattice
  vectors are integer coordinate tuples with respect to that basis.
* Weyl elements are integer matrices acting on lattice coordinate columns.
* Reflection labels in words are 1-based; roots are indexed 0-based with
  the positive roots first (by height, simple roots first) and root
  ``N + k`` equal to ``-(root k)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import GroupTooLarge, InvalidLattice, NoSolution, NotARoot, UnknownType
from .intlinalg import determinant, mat_mul, solve_linear, transpose

DEFAULT_GROUP_CAP = 1200

CARTAN_DETERMINANT = {"A": lambda n: n + 1, "B": lambda n: 2, "C": lambda n: 2, "D": lambda n: 4,
                      "E": lambda n: {6: 3, 7: 2, 8: 1}[n], "F": lambda n: 1, "G": lambda n: 1}

# primes dividing the torsion index of the simply connected group
TORSION_PRIMES = {"A": lambda n: (), "B": lambda n: (2,) if n >= 3 else (), "C": lambda n: (),
                  "D": lambda n: (2,) if n >= 4 else (), "E": lambda n: {6: (2, 3), 7: (2, 3), 8: (2, 3, 5)}[n],
                  "F": lambda n: (2, 3), "G": lambda n: (2,)}


def weyl_order(kind: str, n: int) -> int:
    if kind == "A":
        return math.factorial(n + 1)
    if kind in "BC":
        return 2 ** n * math.factorial(n)
    if kind == "D":
        return 2 ** (n - 1) * math.factorial(n)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600, ("F", 4): 1152, ("G", 2): 12}[(kind, n)]


def cartan_matrix(kind: str, n: int) -> list[list[int]]:
    valid = {"A": n >= 1, "B": n >= 1, "C": n >= 1, "D": n >= 4, "E": n in (6, 7, 8), "F": n == 4, "G": n == 2}
    if kind not in valid or not valid[kind]:
        raise UnknownType(f"unknown Dynkin type {kind}{n}")
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, a_ij=-1, a_ji=-1):
        C[i][j], C[j][i] = a_ij, a_ji

    if kind == "E":
        # Bourbaki labels: chain 1-3-4-5-6-(7-8), with 2 attached to 4
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
        return C
    for i in range(n - 1):
        link(i, i + 1)
    if n == 1:
        return C
    if kind == "B":
        C[n - 1][n - 2] = -2
    elif kind == "C":
        C[n - 2][n - 1] = -2
    elif kind == "D":
        C[n - 2][n - 1] = C[n - 1][n - 2] = 0
        link(n - 3, n - 1)
    elif kind == "F":
        C[2][1] = -2
    elif kind == "G":
        C[0][1] = -3
    return C


_TYPE_RE = re.compile(r"^([A-Ga-g])(\d+)$")


def parse_type(text: str) -> list[tuple[str, int]]:
    """``"G2"`` or products like ``"A1xA2"``."""
    comps = []
    for part in re.split(r"\s*[x×*]\s*", text.strip()):
        mt = _TYPE_RE.match(part)
        if not mt:
            raise UnknownType(f"cannot parse Dynkin type {text!r}")
        kind, n = mt.group(1).upper(), int(mt.group(2))
        cartan_matrix(kind, n)
        comps.append((kind, n))
    return comps


@dataclass(frozen=True)
class Root:
    index: int
    lattice: tuple[int, ...]
    weight: tuple[int, ...]
    simple_coords: tuple[int, ...]
    coroot: tuple[int, ...]  # functional on lattice coordinates
    positive: bool

    @property
    def height(self) -> int:
        return sum(self.simple_coords)

    def pair(self, lam: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.coroot, lam))


@dataclass
class RootDatum:
    components: list[tuple[str, int]]
    lattice_kind: str
    basis: list[list[int]]
    cartan: list[list[int]] = field(init=False)
    roots: list[Root] = field(init=False)

    def __post_init__(self):
        n = sum(r for _, r in self.components)
        C = [[0] * n for _ in range(n)]
        off = 0
        for kind, r in self.components:
            block = cartan_matrix(kind, r)
            for i in range(r):
                for j in range(r):
                    C[off + i][off + j] = block[i][j]
            off += r
        self.cartan = C
        self.rank = n
        B = [[int(x) for x in row] for row in self.basis]
        if len(B) != n or any(len(row) != n for row in B):
            raise InvalidLattice(f"lattice basis must be {n}x{n}", failed="shape")
        if determinant(B) == 0:
            raise InvalidLattice("lattice basis is singular", failed="rank")
        self.basis = B
        self._Bt = transpose(B)
        # root lattice inside the chosen lattice
        self.simple_roots = []
        for j in range(n):
            col = [C[i][j] for i in range(n)]
            try:
                self.simple_roots.append(tuple(solve_linear(self._Bt, col)))
            except NoSolution:
                raise InvalidLattice(f"simple root {j + 1} is not in the lattice", failed="root_lattice",
                                     root=j + 1) from None
        # fundamental weights in lattice coordinates (rational unless simply connected)
        Binv = _rational_inverse(B)
        self.fundamental_weights = [tuple(Binv[i][k] for k in range(n)) for i in range(n)]
        self._build_roots()

    # -- construction of the root system ---------------------------------------------
    def lattice_coords(self, weight: Sequence[int]) -> tuple[int, ...]:
        return tuple(solve_linear(self._Bt, list(weight)))

    def _build_roots(self) -> None:
        n, C = self.rank, self.cartan
        start = []
        for j in range(n):
            phi = tuple(C[i][j] for i in range(n))
            start.append((phi, tuple(int(i == j) for i in range(n)), tuple(int(i == j) for i in range(n))))
        seen = {s[0]: s for s in start}
        frontier = list(start)
        while frontier:
            nxt = []
            for phi, r, kap in frontier:
                for i in range(n):
                    p = phi[i]
                    nphi = tuple(phi[k] - p * C[k][i] for k in range(n))
                    if nphi in seen:
                        continue
                    nr = tuple(r[k] - (p if k == i else 0) for k in range(n))
                    coef = sum(kap[j] * C[j][i] for j in range(n))
                    nk = tuple(kap[k] - (coef if k == i else 0) for k in range(n))
                    seen[nphi] = (nphi, nr, nk)
                    nxt.append(seen[nphi])
            frontier = nxt
        pos = [s for s in seen.values() if sum(s[1]) > 0]
        pos.sort(key=lambda s: (sum(s[1]), tuple(-x for x in s[1])))
        B = self.basis
        roots = []
        for sign in (1, -1):
            for phi, r, kap in pos:
                phi = tuple(sign * x for x in phi)
                lat = self.lattice_coords(phi)
                functional = tuple(sign * sum(B[k][i] * kap[i] for i in range(n)) for k in range(n))
                roots.append(Root(len(roots), lat, phi, tuple(sign * x for x in r), functional, sign > 0))
        self.roots = roots
        self.npos = len(pos)
        self._by_lattice = {rt.lattice: rt.index for rt in roots}
        for rt in roots:
            lam = rt.lattice
            if rt.pair(lam) != 2:
                raise InvalidLattice(f"coroot pairing of root {rt.index} is {rt.pair(lam)}")

    # -- queries -------------------------------------------------------------------------
    @property
    def positive_roots(self) -> list[Root]:
        return self.roots[: self.npos]

    def simple_root(self, i: int) -> Root:
        """Simple root with 1-based label ``i``."""
        return self.roots[self.simple_index(i)]

    def simple_index(self, i: int) -> int:
        if not 1 <= i <= self.rank:
            raise NotARoot(f"no simple root labelled {i}")
        for rt in self.roots[: self.npos]:
            if rt.simple_coords == tuple(int(k == i - 1) for k in range(self.rank)):
                return rt.index
        raise AssertionError("simple roots missing")

    def negate(self, k: int) -> int:
        return k + self.npos if k < self.npos else k - self.npos

    def root_index(self, lam: Sequence[int]) -> int:
        try:
            return self._by_lattice[tuple(lam)]
        except KeyError:
            raise NotARoot(f"{list(lam)} is not a root") from None

    def is_root(self, lam: Sequence[int]) -> bool:
        return tuple(lam) in self._by_lattice

    def reflection_matrix(self, k: int) -> tuple[tuple[int, ...], ...]:
        """Matrix of s_alpha on lattice coordinate columns: I - a f^T."""
        if not 0 <= k < len(self.roots):
            raise NotARoot(f"no root with index {k}")
        rt = self.roots[k]
        n = self.rank
        return tuple(tuple(int(i == j) - rt.lattice[i] * rt.coroot[j] for j in range(n)) for i in range(n))

    def cartan_determinant(self) -> int:
        return determinant(self.cartan)

    def expected_determinant(self) -> int:
        out = 1
        for kind, n in self.components:
            out *= CARTAN_DETERMINANT[kind](n)
        return out

    def torsion_primes(self) -> tuple[int, ...]:
        ps = set()
        for kind, n in self.components:
            ps.update(TORSION_PRIMES[kind](n))
        return tuple(sorted(ps))

    def type_name(self) -> str:
        return "x".join(f"{k}{n}" for k, n in self.components)

    def describe(self) -> dict:
        return {"type": self.type_name(), "lattice": self.lattice_kind, "basis": self.basis,
                "cartan": self.cartan,
                "roots": [{"index": r.index, "lattice": list(r.lattice), "simple_coords": list(r.simple_coords),
                           "coroot": list(r.coroot), "positive": r.positive} for r in self.roots]}


def _rational_inverse(B: list[list[int]]) -> list[list[Fraction]]:
    n = len(B)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(B)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [x / piv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def build(type_spec: str | Sequence[tuple[str, int]], lattice="adj") -> RootDatum:
    comps = parse_type(type_spec) if isinstance(type_spec, str) else [(k.upper(), int(n)) for k, n in type_spec]
    n = sum(r for _, r in comps)
    C = [[0] * n for _ in range(n)]
    off = 0
    for kind, r in comps:
        block = cartan_matrix(kind, r)
        for i in range(r):
            for j in range(r):
                C[off + i][off + j] = block[i][j]
        off += r
    if isinstance(lattice, dict):
        lattice = lattice.get("basis", lattice)
    if isinstance(lattice, str):
        key = lattice.lower()
        if key in ("adj", "adjoint"):
            return RootDatum(comps, "adj", transpose(C))
        if key in ("sc", "simply_connected", "simply-connected"):
            return RootDatum(comps, "sc", [[int(i == j) for j in range(n)] for i in range(n)])
        raise InvalidLattice(f"unknown lattice {lattice!r}")
    return RootDatum(comps, "intermediate", [list(r) for r in lattice])


Matrix = tuple[tuple[int, ...], ...]


def _mm(A: Matrix, B: Matrix) -> Matrix:
    Bt = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def _mv(A: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in A)


class WeylGroup:
    """Elements are indexed by (length, canonical word); index 0 is the identity."""

    def __init__(self, datum: RootDatum, cap: int = DEFAULT_GROUP_CAP):
        self.datum = datum
        expected = 1
        for kind, n in datum.components:
            expected *= weyl_order(kind, n)
        if expected > cap:
            raise GroupTooLarge(f"|W| = {expected} exceeds the cap {cap}", order=expected, cap=cap)
        n = datum.rank
        self.rank = n
        gens = [datum.reflection_matrix(datum.simple_index(i + 1)) for i in range(n)]
        ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        length = {ident: 0}
        layer = [ident]
        while layer:
            nxt = []
            for w in layer:
                for g in gens:
                    v = _mm(g, w)
                    if v not in length:
                        length[v] = length[w] + 1
                        nxt.append(v)
            layer = nxt
        if len(length) != expected:
            raise AssertionError(f"enumerated {len(length)} elements, expected {expected}")

        # canonical words: smallest left descent first
        words: dict[Matrix, tuple[int, ...]] = {ident: ()}
        for w in sorted(length, key=length.get):
            if w == ident:
                continue
            for i, g in enumerate(gens):
                v = _mm(g, w)
                if length[v] < length[w]:
                    words[w] = (i + 1,) + words[v]
                    break
        order = sorted(length, key=lambda w: (length[w], words[w]))
        self.matrices: list[Matrix] = order
        self.index = {w: k for k, w in enumerate(order)}
        self.lengths = [length[w] for w in order]
        self.words = [words[w] for w in order]
        self.size = len(order)
        self.lmul = [[self.index[_mm(g, w)] for w in order] for g in gens]
        self.rmul = [[self.index[_mm(w, g)] for w in order] for g in gens]
        self.inv = [0] * self.size
        for k in range(self.size):
            v = 0
            for i in reversed(self.words[k]):
                v = self.rmul[i - 1][v]
            self.inv[k] = v
        self.longest = max(range(self.size), key=lambda k: self.lengths[k])
        self._products: dict[tuple[int, int], int] = {}
        self._below: list[int] | None = None
        self._inversions: dict[int, frozenset[int]] = {}
        self._root_action: list[list[int]] | None = None

    # -- basic queries -------------------------------------------------------------------
    @property
    def identity(self) -> int:
        return 0

    def __len__(self) -> int:
        return self.size

    def length(self, w: int) -> int:
        return self.lengths[w]

    def word(self, w: int) -> tuple[int, ...]:
        return self.words[w]

    def matrix(self, w: int) -> Matrix:
        return self.matrices[w]

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        hit = self._products.get(key)
        if hit is None:
            hit = a
            for i in self.words[b]:
                hit = self.rmul[i - 1][hit]
            self._products[key] = hit
        return hit

    def inverse(self, w: int) -> int:
        return self.inv[w]

    def simple(self, i: int) -> int:
        return self.lmul[i - 1][0]

    def word_to_element(self, word: Iterable[int]) -> int:
        w = 0
        for i in word:
            if not 1 <= i <= self.rank:
                raise NotARoot(f"no simple reflection labelled {i}")
            w = self.rmul[i - 1][w]
        return w

    def is_reduced(self, word: Sequence[int]) -> bool:
        return self.lengths[self.word_to_element(word)] == len(word)

    def element_of_matrix(self, M: Matrix) -> int:
        return self.index[tuple(tuple(r) for r in M)]

    def act(self, w: int, lam: Sequence[int]) -> tuple[int, ...]:
        return _mv(self.matrices[w], lam)

    def root_action(self, w: int, k: int) -> int:
        """Index of w(root k)."""
        if self._root_action is None:
            d = self.datum
            self._root_action = [[d.root_index(_mv(M, rt.lattice)) for rt in d.roots] for M in self.matrices]
        return self._root_action[w][k]

    def reflection_element(self, k: int) -> int:
        return self.element_of_matrix(self.datum.reflection_matrix(k))

    def inversion_set(self, w: int) -> frozenset[int]:
        """Indices of the positive roots in w(Sigma_-)."""
        hit = self._inversions.get(w)
        if hit is None:
            d = self.datum
            hit = frozenset(self.root_action(w, k) for k in range(d.npos, 2 * d.npos)
                            if self.root_action(w, k) < d.npos)
            self._inversions[w] = hit
        return hit

    def left_descents(self, w: int) -> list[int]:
        return [i + 1 for i in range(self.rank) if self.lengths[self.lmul[i][w]] < self.lengths[w]]

    # -- Bruhat order ----------------------------------------------------------------------
    def _bruhat_tables(self) -> list[int]:
        if self._below is None:
            below = [0] * self.size
            for w in sorted(range(self.size), key=lambda k: self.lengths[k]):
                if w == 0:
                    below[w] = 1
                    continue
                s = self.words[w][0] - 1
                sw = self.lmul[s][w]
                mask = below[sw]
                ext = mask
                m = mask
                while m:
                    low = m & -m
                    u = low.bit_length() - 1
                    ext |= 1 << self.lmul[s][u]
                    m ^= low
                below[w] = ext
            self._below = below
        return self._below

    def bruhat_leq(self, u: int, w: int) -> bool:
        return bool((self._bruhat_tables()[w] >> u) & 1)

    def bruhat_below(self, w: int) -> list[int]:
        mask = self._bruhat_tables()[w]
        return [u for u in range(self.size) if (mask >> u) & 1]

    def reduced_words(self, w: int) -> list[tuple[int, ...]]:
        """All reduced words of ``w`` (lex order)."""
        out: list[tuple[int, ...]] = []

        def rec(v: int, suffix: tuple[int, ...]):
            if v == 0:
                out.append(suffix)
                return
            for i in range(self.rank):
                u = self.rmul[i][v]
                if self.lengths[u] < self.lengths[v]:
                    rec(u, (i + 1,) + suffix)

        rec(w, ())
        return sorted(out)

    def element_label(self, w: int) -> str:
        word = self.words[w]
        return "e" if not word else "s" + "s".join(str(i) for i in word)

    def describe(self) -> dict:
        return {"order": self.size, "longest_length": self.lengths[self.longest],
                "elements": [{"index": k, "word": list(self.words[k]), "length": self.lengths[k]}
                             for k in range(self.size)]}


def enumerate_weyl(datum: RootDatum, cap: int = DEFAULT_GROUP_CAP) -> WeylGroup:
    return WeylGroup(datum, cap)


def subword_bruhat_leq(W: WeylGroup, u: int, w: int) -> bool:
    """Bruhat order via subwords of the canonical word of ``w`` (brute force)."""
    word = W.word(w)
    target = W.length(u)
    from itertools import combinations

    for sub in combinations(range(len(word)), target):
        if W.word_to_element(word[k] for k in sub) == u:
            return True
    return False
