"""Finite-group arithmetic, extensions, cohomological data, and automorphisms.

Elements are integer indices into a multiplication table.  Phases are exact
rationals (Fraction f means exp(2*pi*i*f)); numerics only enter through
irreducible representation matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    CocycleViolation,
    DegenerateBicharacter,
    NoIdentity,
    NoInverse,
    NotAbelian,
    NotAssociative,
    NotAutomorphism,
    NotNormal,
    NumericalFailure,
    UnsupportedPhaseGroup,
)
from .exact import phase_to_complex


class FiniteGroup:
    """A finite group given by its multiplication table, validated on build."""

    def __init__(self, mul: np.ndarray, names: list[str] | None = None, name: str = ""):
        self.mul_table = np.asarray(mul, dtype=np.int64)
        self.order = self.mul_table.shape[0]
        self.name = name
        self.identity = self._find_identity()
        self.inv_table = self._find_inverses()
        self._check_associative()
        if names is not None:
            if len(names) != self.order or len(set(names)) != self.order:
                raise ValueError("names must be distinct and cover all elements")
        self.names = names

    # -- construction checks -------------------------------------------------

    def _find_identity(self) -> int:
        n = self.order
        if self.mul_table.shape != (n, n) or self.mul_table.min() < 0 or self.mul_table.max() >= n:
            raise ValueError("multiplication table must be square with entries in range")
        for e in range(n):
            if all(self.mul_table[e, g] == g and self.mul_table[g, e] == g for g in range(n)):
                return e
        raise NoIdentity("no two-sided identity element")

    def _find_inverses(self) -> np.ndarray:
        inv = np.full(self.order, -1, dtype=np.int64)
        for g in range(self.order):
            hits = np.nonzero(self.mul_table[g] == self.identity)[0]
            if len(hits) != 1 or self.mul_table[hits[0], g] != self.identity:
                raise NoInverse(f"element {g} has no two-sided inverse")
            inv[g] = hits[0]
        return inv

    def _check_associative(self):
        m = self.mul_table
        # (ab)c == a(bc) for all triples, vectorized
        left = m[m, :]            # left[a,b,c] = (ab)c
        right = m[:, m]           # right[a,b,c] = a(bc)
        if not np.array_equal(left, right):
            bad = np.argwhere(left != right)[0]
            raise NotAssociative(f"associativity fails at triple {tuple(int(x) for x in bad)}")

    # -- basic operations ----------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inv_table[a])

    def conj(self, g: int, h: int) -> int:
        """g h g^-1."""
        return self.mul(self.mul(g, h), self.inv(g))

    def power(self, g: int, k: int) -> int:
        out = self.identity
        if k < 0:
            g, k = self.inv(g), -k
        for _ in range(k):
            out = self.mul(out, g)
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def elements(self) -> range:
        return range(self.order)

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul_table, self.mul_table.T))

    def word(self, *gs: int) -> int:
        out = self.identity
        for g in gs:
            out = self.mul(out, g)
        return out

    def generated(self, gens) -> frozenset[int]:
        seen = {self.identity}
        frontier = list(gens)
        while frontier:
            g = frontier.pop()
            if g in seen:
                continue
            seen.add(g)
            for h in list(seen):
                for x in (self.mul(g, h), self.mul(h, g)):
                    if x not in seen:
                        frontier.append(x)
        return frozenset(seen)

    def element_name(self, g: int) -> str:
        return self.names[g] if self.names else str(g)

    def index_of(self, name: str) -> int:
        if self.names is None:
            return int(name)
        return self.names.index(name)

    def __repr__(self):
        return f"FiniteGroup({self.name or 'order %d' % self.order})"


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        g = self.parent
        s = set(self.members)
        if g.identity not in s:
            raise ValueError("subgroup must contain the identity")
        for a in s:
            if g.inv(a) not in s:
                raise ValueError("subgroup not closed under inverse")
            for b in s:
                if g.mul(a, b) not in s:
                    raise ValueError("subgroup not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.members)

    def is_normal(self) -> bool:
        g = self.parent
        s = set(self.members)
        return all(g.conj(x, n) in s for x in g.elements() for n in s)

    def is_abelian(self) -> bool:
        g = self.parent
        return all(g.mul(a, b) == g.mul(b, a) for a in self.members for b in self.members)


def build_group(mul_table, names=None, name="") -> FiniteGroup:
    """Validate a multiplication table and return the group."""
    return FiniteGroup(np.asarray(mul_table), names=names, name=name)


# -- built-in groups ----------------------------------------------------------

def cyclic_product(dims: tuple[int, ...], name: str) -> FiniteGroup:
    """Direct product of cyclic groups Z_d1 x ... x Z_dk, elements in mixed radix."""
    order = int(np.prod(dims))
    def enc(t):
        x = 0
        for d, v in zip(dims, t):
            x = x * d + v
        return x
    tuples = list(itertools.product(*[range(d) for d in dims]))
    mul = np.zeros((order, order), dtype=np.int64)
    for a in tuples:
        for b in tuples:
            mul[enc(a), enc(b)] = enc(tuple((x + y) % d for x, y, d in zip(a, b, dims)))
    names = ["".join(str(v) for v in t) for t in tuples]
    return FiniteGroup(mul, names=names, name=name)


def dihedral(n: int) -> FiniteGroup:
    """D_n of order 2n: r^n = s^2 = (rs)^2 = e.  Element (i, j) = r^i s^j."""
    order = 2 * n
    def enc(i, j):
        return i + n * j
    mul = np.zeros((order, order), dtype=np.int64)
    for i1 in range(n):
        for j1 in range(2):
            for i2 in range(n):
                for j2 in range(2):
                    # (r^i1 s^j1)(r^i2 s^j2) = r^(i1 + (-1)^j1 i2) s^(j1+j2)
                    i = (i1 + (i2 if j1 == 0 else -i2)) % n
                    mul[enc(i1, j1), enc(i2, j2)] = enc(i, (j1 + j2) % 2)
    names = []
    for j in range(2):
        for i in range(n):
            base = "e" if (i == 0 and j == 0) else ("r" if i == 1 else f"r{i}" if i else "")
            names.append((base + ("s" if j else "")) or "e")
    names = [nm if nm else "e" for nm in names]
    return FiniteGroup(mul, names=names, name=f"D{n}")


_BUILTIN_CACHE: dict[str, FiniteGroup] = {}


def builtin_group(spec: str) -> FiniteGroup:
    """Look up a named built-in group: Z2, Z2xZ2, Z4xZ4, D4, Dn, ZnxZm."""
    if spec in _BUILTIN_CACHE:
        return _BUILTIN_CACHE[spec]
    g = None
    if spec.startswith("D") and spec[1:].isdigit():
        g = dihedral(int(spec[1:]))
    elif spec.startswith("Z"):
        dims = tuple(int(p[1:]) for p in spec.split("x"))
        if any(p[0] != "Z" for p in spec.split("x")):
            raise ValueError(f"unknown group spec {spec!r}")
        g = cyclic_product(dims, spec)
    if g is None:
        raise ValueError(f"unknown group spec {spec!r}")
    _BUILTIN_CACHE[spec] = g
    return g


def group_from_file(path) -> FiniteGroup:
    """Read the plain-text table format: `order N`, N rows of N indices, optional `names` block."""
    with open(path) as fh:
        tokens = fh.read().split()
    if tokens[0] != "order":
        raise ValueError("group file must start with 'order N'")
    n = int(tokens[1])
    vals = tokens[2:2 + n * n]
    mul = np.array([int(v) for v in vals], dtype=np.int64).reshape(n, n)
    rest = tokens[2 + n * n:]
    names = None
    if rest and rest[0] == "names":
        names = rest[1:1 + n]
    return build_group(mul, names=names)


# -- classes, centralizers, subgroups -----------------------------------------

def conjugacy_classes(g: FiniteGroup) -> list[tuple[int, ...]]:
    """Partition of G into conjugacy classes, sorted by minimal element."""
    seen = set()
    classes = []
    for u in g.elements():
        if u in seen:
            continue
        cls = {g.conj(x, u) for x in g.elements()}
        seen |= cls
        classes.append(tuple(sorted(cls)))
    classes.sort(key=lambda c: c[0])
    return classes


def centralizer(g: FiniteGroup, u: int) -> Subgroup:
    members = tuple(x for x in g.elements() if g.mul(x, u) == g.mul(u, x))
    return Subgroup(g, members)


def center(g: FiniteGroup) -> Subgroup:
    members = tuple(x for x in g.elements()
                    if all(g.mul(x, y) == g.mul(y, x) for y in g.elements()))
    return Subgroup(g, members)


def all_subgroups(g: FiniteGroup) -> list[Subgroup]:
    """Exhaustive subgroup enumeration by closing generator sets (|G| <= 64)."""
    found = {frozenset([g.identity])}
    frontier = [frozenset([g.identity])]
    while frontier:
        h = frontier.pop()
        for x in g.elements():
            if x in h:
                continue
            h2 = g.generated(h | {x})
            if h2 not in found:
                found.add(h2)
                frontier.append(h2)
    return [Subgroup(g, tuple(sorted(h))) for h in sorted(found, key=lambda s: (len(s), sorted(s)))]


def normal_abelian_subgroups(g: FiniteGroup) -> list[Subgroup]:
    return [h for h in all_subgroups(g) if h.is_abelian() and h.is_normal()]


# -- group extensions ----------------------------------------------------------

@dataclass
class ExtensionData:
    """G as an extension of Q = G/N by an abelian normal subgroup N.

    Elements of N and Q are indexed locally (0..|N|-1, 0..|Q|-1); the identity
    coset has index 0 and the section picks the smallest element of each coset.
    """

    group: FiniteGroup
    subgroup: Subgroup
    n_elems: tuple[int, ...]          # local index -> G element
    q_mul: np.ndarray                 # |Q| x |Q| quotient multiplication
    section: tuple[int, ...]          # local Q index -> G element
    sigma: np.ndarray                 # sigma[q, n] -> n'  (local indices)
    omega: np.ndarray                 # omega[q1, q2] -> n (local index)
    coset_of: dict = field(repr=False, default_factory=dict)   # G element -> q index

    @property
    def nq(self) -> int:
        return len(self.q_elems)

    @property
    def q_elems(self):
        return self.section

    @property
    def n_order(self) -> int:
        return len(self.n_elems)

    @property
    def q_order(self) -> int:
        return self.q_mul.shape[0]

    def n_index(self, g_elem: int) -> int:
        return self.n_elems.index(g_elem)

    def n_mul(self, a: int, b: int) -> int:
        g = self.group
        return self.n_index(g.mul(self.n_elems[a], self.n_elems[b]))

    def n_inv(self, a: int) -> int:
        return self.n_index(self.group.inv(self.n_elems[a]))

    def q_inv(self, q: int) -> int:
        hits = np.nonzero(self.q_mul[q] == 0)[0]
        return int(hits[0])

    def encode(self, n: int, q: int) -> int:
        """Pair (n, q) -> group element n * section(q)."""
        return self.group.mul(self.n_elems[n], self.section[q])

    def decode(self, g_elem: int) -> tuple[int, int]:
        q = self.coset_of[g_elem]
        n = self.group.mul(g_elem, self.group.inv(self.section[q]))
        return self.n_index(n), q

    def pair_mul(self, n1: int, q1: int, n2: int, q2: int) -> tuple[int, int]:
        n = self.n_mul(self.n_mul(n1, int(self.sigma[q1, n2])), int(self.omega[q1, q2]))
        return n, int(self.q_mul[q1, q2])


def extension_data(g: FiniteGroup, n_sub: Subgroup) -> ExtensionData:
    """Compute section, conjugation action, and 2-cocycle for G over abelian normal N."""
    if not n_sub.is_abelian():
        raise NotAbelian("subgroup is not abelian")
    if not n_sub.is_normal():
        raise NotNormal("subgroup is not normal")
    n_elems = tuple(sorted(n_sub.members))
    n_set = set(n_elems)
    # cosets N*g, represented by their sorted member tuple
    cosets = {}
    for x in g.elements():
        cs = tuple(sorted(g.mul(n, x) for n in n_elems))
        cosets.setdefault(cs, []).append(x)
    # identity coset first, the rest sorted by minimal element
    reps = sorted(cosets.keys(), key=lambda cs: (g.identity not in cs, cs[0]))
    section = _choose_section(g, reps)
    coset_of = {}
    for qi, cs in enumerate(reps):
        for x in cs:
            coset_of[x] = qi
    nq = len(reps)
    q_mul = np.zeros((nq, nq), dtype=np.int64)
    for q1 in range(nq):
        for q2 in range(nq):
            q_mul[q1, q2] = coset_of[g.mul(section[q1], section[q2])]
    n_index = {x: i for i, x in enumerate(n_elems)}
    sigma = np.zeros((nq, len(n_elems)), dtype=np.int64)
    for q in range(nq):
        for ni, n in enumerate(n_elems):
            c = g.conj(section[q], n)
            if c not in n_set:
                raise NotNormal("conjugation leaves the subgroup")
            sigma[q, ni] = n_index[c]
    omega = np.zeros((nq, nq), dtype=np.int64)
    for q1 in range(nq):
        for q2 in range(nq):
            w = g.mul(g.mul(section[q1], section[q2]), g.inv(section[int(q_mul[q1, q2])]))
            omega[q1, q2] = n_index[w]
    ext = ExtensionData(g, n_sub, n_elems, q_mul, section, sigma, omega, coset_of)
    _verify_pair_rule(ext)
    return ext


def _choose_section(g: FiniteGroup, reps) -> tuple[int, ...]:
    """Pick coset representatives, preferring a homomorphic (split) section.

    Searches representative choices in lexicographic order so the result is
    deterministic; falls back to the smallest element of each coset when the
    extension does not split (or the search space is too large).
    """
    coset_index = {}
    for qi, cs in enumerate(reps):
        for x in cs:
            coset_index[x] = qi
    nq = len(reps)
    default = tuple(min(cs) for cs in reps)
    space = 1
    for cs in reps[1:]:
        space *= len(cs)
        if space > 1 << 20:
            return default
    choices = [sorted(cs) for cs in reps[1:]]

    def splits(sec):
        for q1 in range(nq):
            for q2 in range(nq):
                prod = g.mul(sec[q1], sec[q2])
                if sec[coset_index[prod]] != prod:
                    return False
        return True

    for combo in itertools.product(*choices):
        sec = (g.identity,) + combo
        if splits(sec):
            return sec
    return default


def _verify_pair_rule(ext: ExtensionData):
    g = ext.group
    for a in g.elements():
        for b in g.elements():
            n1, q1 = ext.decode(a)
            n2, q2 = ext.decode(b)
            n, q = ext.pair_mul(n1, q1, n2, q2)
            if ext.encode(n, q) != g.mul(a, b):
                raise AssertionError(f"pair rule fails at ({a},{b})")


# -- bicharacters ---------------------------------------------------------------

@dataclass
class Bicharacter:
    """chi: N x N -> U(1) stored as a table of exact rational phases."""

    ext: ExtensionData
    table: np.ndarray  # object array of Fractions, indexed by local N indices

    def __call__(self, m: int, n: int) -> Fraction:
        return self.table[m, n]

    def validate(self, require_nondegenerate: bool = True):
        ext = self.ext
        no = ext.n_order
        t = self.table
        for m in range(no):
            for mp in range(no):
                for n in range(no):
                    if (t[m, n] + t[mp, n]) % 1 != t[ext.n_mul(m, mp), n]:
                        raise ValueError("not multiplicative in the first slot")
                    if (t[n, m] + t[n, mp]) % 1 != t[n, ext.n_mul(m, mp)]:
                        raise ValueError("not multiplicative in the second slot")
        for q in range(ext.q_order):
            for m in range(no):
                for n in range(no):
                    if t[ext.sigma[q, m], ext.sigma[q, n]] != t[m, n]:
                        raise ValueError("not invariant under the quotient action")
        if require_nondegenerate:
            cols = {tuple(t[:, n]) for n in range(no)}
            if len(cols) != no:
                raise DegenerateBicharacter("the pairing n -> chi(., n) is not injective")

    def is_nondegenerate(self) -> bool:
        no = self.ext.n_order
        return len({tuple(self.table[:, n]) for n in range(no)}) == no


def abelian_cyclic_decomposition(ext: ExtensionData) -> tuple[list[int], list[int]]:
    """Generators and orders (d1, d2, ...) with N isomorphic to prod Z_di.

    Returns (gens, dims) with every n in N uniquely sum_k a_k * gens_k,
    0 <= a_k < dims_k.  Greedy maximal-order peeling; valid for small N.
    """
    g = ext.group
    no = ext.n_order
    remaining_quota = no
    gens: list[int] = []
    dims: list[int] = []
    spanned = {0}
    order_of = [g.element_order(ext.n_elems[i]) for i in range(no)]
    while len(spanned) < no:
        # pick element of maximal order not in the current span
        cand = max((i for i in range(no) if i not in spanned), key=lambda i: order_of[i])
        d = order_of[cand]
        gens.append(cand)
        dims.append(d)
        new = set()
        for base in spanned:
            x = base
            for _ in range(d):
                new.add(x)
                x = ext.n_mul(x, cand)
        spanned = new
        remaining_quota //= d
    assert int(np.prod(dims)) == no, "cyclic decomposition failed"
    return gens, dims


def n_coordinates(ext: ExtensionData, gens: list[int], dims: list[int]) -> dict[int, tuple[int, ...]]:
    """Map each local N index to its coordinate tuple over the cyclic generators."""
    coords = {}
    for t in itertools.product(*[range(d) for d in dims]):
        x = 0
        for gi, a in zip(gens, t):
            for _ in range(a):
                x = ext.n_mul(x, gi)
        coords.setdefault(x, t)
    assert len(coords) == ext.n_order
    return coords


def find_invariant_bicharacters(ext: ExtensionData, require_nondegenerate: bool = True) -> list[Bicharacter]:
    """All Q-invariant bicharacters of N (non-degenerate by default)."""
    gens, dims = abelian_cyclic_decomposition(ext)
    coords = n_coordinates(ext, gens, dims)
    k = len(dims)
    no = ext.n_order
    out = []
    # bicharacter <-> matrix B with chi(x, y) = prod exp(2 pi i B_ab x_a y_b / d_ab)
    ranges = []
    pairs = [(a, b) for a in range(k) for b in range(k)]
    for a, b in pairs:
        ranges.append(range(int(np.gcd(dims[a], dims[b]))))
    for combo in itertools.product(*ranges):
        table = np.empty((no, no), dtype=object)
        for x in range(no):
            for y in range(no):
                f = Fraction(0)
                cx, cy = coords[x], coords[y]
                for (a, b), v in zip(pairs, combo):
                    dab = int(np.gcd(dims[a], dims[b]))
                    f += Fraction(v * cx[a] * cy[b], dab)
                table[x, y] = f % 1
        chi = Bicharacter(ext, table)
        try:
            chi.validate(require_nondegenerate=require_nondegenerate)
        except (ValueError, DegenerateBicharacter):
            continue
        out.append(chi)
    return out


# -- U(1) 2-cocycles -------------------------------------------------------------

@dataclass
class CocycleU1:
    """alpha: G x G -> U(1), table of exact rational phases."""

    group: FiniteGroup
    table: np.ndarray  # object array of Fractions

    def __call__(self, a: int, b: int) -> Fraction:
        return self.table[a, b]


def validate_cocycle_u1(g: FiniteGroup, table) -> CocycleU1:
    t = np.asarray(table, dtype=object)
    for a in g.elements():
        for b in g.elements():
            for c in g.elements():
                lhs = (t[a, b] + t[g.mul(a, b), c]) % 1
                rhs = (t[a, g.mul(b, c)] + t[b, c]) % 1
                if lhs != rhs:
                    raise CocycleViolation(f"2-cocycle identity fails at triple ({a},{b},{c})")
    return CocycleU1(g, t)


def _solve_mod(a: np.ndarray, b: np.ndarray, d: int):
    """Solve a x = b (mod d) for one solution, or None.  Small dense systems."""
    a = a.astype(object) % d
    b = b.astype(object) % d
    rows, cols = a.shape
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        # find pivot with unit gcd if possible, else best effort
        best, bestg = None, d
        for rr in range(r, rows):
            v = int(aug[rr, c]) % d
            if v == 0:
                continue
            gg = np.gcd(v, d)
            if gg < bestg:
                best, bestg = rr, gg
                if gg == 1:
                    break
        if best is None:
            continue
        aug[[r, best]] = aug[[best, r]]
        piv = int(aug[r, c])
        g_ = int(np.gcd(piv, d))
        if g_ == 1:
            inv = pow(piv, -1, d)
            aug[r] = (aug[r] * inv) % d
        for rr in range(rows):
            if rr != r and aug[rr, c] % np.gcd(int(aug[r, c]), d) == 0:
                # eliminate as far as divisibility allows
                pr = int(aug[r, c])
                if pr and int(aug[rr, c]) % pr == 0:
                    f = int(aug[rr, c]) // pr
                    aug[rr] = (aug[rr] - f * aug[r]) % d
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    # back-substitute by brute completion: try candidate x via free vars? Use
    # direct check: attempt x from pivot rows with zeros elsewhere.
    x = np.zeros(cols, dtype=object)
    for r_, c_ in pivots:
        piv = int(aug[r_, c_])
        rhs = int(aug[r_, -1])
        for xc in range(d):
            if (piv * xc) % d == rhs % d:
                x[c_] = xc
                break
        else:
            return None
    if np.all((a @ x - b) % d == 0):
        return x
    return None


def is_coboundary(alpha: CocycleU1) -> tuple[bool, np.ndarray | None]:
    """Decide triviality of a finite-phase 2-cocycle; witness 1-cochain when trivial.

    Searches 1-cochains valued in the cyclic phase group generated by the
    cocycle values.  Linear solve modulo the phase order.
    """
    g = alpha.group
    dens = {f.denominator for f in alpha.table.flat}
    d = int(np.lcm.reduce(list(dens))) if dens else 1
    if d == 1:
        return True, np.zeros(g.order, dtype=object)
    # unknowns beta: G -> Z_d; equation beta(a) + beta(b) - beta(ab) = k(a,b)
    n = g.order
    rows = []
    rhs = []
    for a in g.elements():
        for b in g.elements():
            row = np.zeros(n, dtype=np.int64)
            row[a] += 1
            row[b] += 1
            row[g.mul(a, b)] -= 1
            rows.append(row)
            val = alpha.table[a, b] * d
            if val.denominator != 1:
                raise UnsupportedPhaseGroup("phases do not close under a cyclic lattice")
            rhs.append(int(val) % d)
    x = _solve_mod(np.array(rows), np.array(rhs), d)
    if x is None:
        # exhaustive fallback for small search spaces
        if d ** n <= 1 << 22:
            for combo in itertools.product(range(d), repeat=n):
                ok = True
                for a in g.elements():
                    for b in g.elements():
                        if (combo[a] + combo[b] - combo[g.mul(a, b)]) % d != int(alpha.table[a, b] * d) % d:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    return True, np.array([Fraction(c, d) for c in combo], dtype=object)
        return False, None
    return True, np.array([Fraction(int(v), d) for v in x], dtype=object)


# -- characters and irreps --------------------------------------------------------

def character_table(g: FiniteGroup) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """(classes, table) with table[i, j] = chi_i on class j; rows sorted by dimension."""
    classes = conjugacy_classes(g)
    k = len(classes)
    class_of = {}
    for ci, cls in enumerate(classes):
        for x in cls:
            class_of[x] = ci
    if g.is_abelian:
        table = _abelian_characters(g, classes)
    else:
        table = _dixon_characters(g, classes, class_of)
    # sort rows: trivial first, then by dimension and lexicographic value
    order = sorted(range(k), key=lambda i: (abs(table[i, 0]), [(-round(table[i, j].real, 6), -round(table[i, j].imag, 6)) for j in range(k)]))
    table = table[order]
    return classes, table


def _abelian_characters(g: FiniteGroup, classes) -> np.ndarray:
    ext = extension_data(g, Subgroup(g, tuple(sorted(g.elements()))))
    gens, dims = abelian_cyclic_decomposition(ext)
    coords = n_coordinates(ext, gens, dims)
    k = g.order
    table = np.zeros((k, k), dtype=complex)
    for idx, t in enumerate(itertools.product(*[range(d) for d in dims])):
        for x in range(k):
            f = sum(Fraction(a * b, d) for a, b, d in zip(t, coords[x], dims)) % 1
            table[idx, x] = phase_to_complex(f)
    # columns are singleton classes sorted by element
    cols = [cls[0] for cls in classes]
    return table[:, cols]


def _dixon_characters(g: FiniteGroup, classes, class_of) -> np.ndarray:
    k = len(classes)
    sizes = np.array([len(c) for c in classes])
    inv_class = np.array([class_of[g.inv(classes[i][0])] for i in range(k)])
    # class algebra structure constants: K_i K_j = sum_k n_ijk K_k
    n_ijk = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            counts = np.zeros(k, dtype=np.int64)
            target = classes[0]
            for a in classes[i]:
                for b in classes[j]:
                    counts[class_of[g.mul(a, b)]] += 1
            assert counts.sum() == sizes[i] * sizes[j]
            for kk in range(k):
                assert counts[kk] % len(classes[kk]) == 0
                n_ijk[i, j, kk] = counts[kk] // len(classes[kk])
    rng = np.random.default_rng(7)
    m = sum(rng.normal() * n_ijk[i] for i in range(k))
    evals, evecs = np.linalg.eig(m.astype(float))
    if np.min(np.abs(evals[:, None] - evals[None, :]) + np.eye(k)) < 1e-8:
        raise NumericalFailure("degenerate class-function spectrum; retry with new seed")
    table = np.zeros((k, k), dtype=complex)
    for col in range(k):
        v = evecs[:, col]
        # class-sum eigenvalues w_i = |C_i| chi(c_i) / d
        w = np.array([np.vdot(v, n_ijk[i] @ v) / np.vdot(v, v) for i in range(k)])
        s = np.sum(np.abs(w) ** 2 / sizes)
        d = np.sqrt(g.order / s)
        chi = d * w / sizes
        # fix overall conjugation/normalization: chi(identity class) = d > 0
        table[col] = chi
    # chi(c^-1) = conj(chi(c)); enforce exact-ish by averaging
    for row in range(k):
        for i in range(k):
            table[row, i] = (table[row, i] + np.conj(table[row, inv_class[i]])) / 2
    table = np.round(table.real, 10) + 1j * np.round(table.imag, 10)
    return table


def irreps(g: FiniteGroup, tol: float = 1e-10) -> list[np.ndarray]:
    """Explicit unitary irrep matrices rho[g] as arrays of shape (|G|, d, d).

    Numeric: isotypic splitting of the regular representation, then restriction
    to a minimal invariant subspace.  Homomorphism residual checked against tol.
    """
    classes, table = character_table(g)
    class_of = {}
    for ci, cls in enumerate(classes):
        for x in cls:
            class_of[x] = ci
    n = g.order
    reg = np.zeros((n, n, n))
    for a in g.elements():
        for b in g.elements():
            reg[a, g.mul(a, b), b] = 1.0
    rng = np.random.default_rng(11)
    out = []
    for row in range(table.shape[0]):
        chi = table[row]
        d = int(round(chi[class_of[g.identity]].real))
        proj = sum(np.conj(chi[class_of[a]]) * reg[a] for a in g.elements()) * (d / n)
        # split the isotypic block with a symmetrized random operator
        x = rng.normal(size=(n, n))
        sym = sum(reg[a] @ x @ reg[g.inv(a)] for a in g.elements()) / n
        # invariant subspaces = eigenspaces of proj @ hermitian-part restricted
        h = proj @ (sym + sym.T) @ proj
        evals, evecs = np.linalg.eigh((h + h.T) / 2)
        # group eigenvalues; pick a cluster of size exactly d inside the image of proj
        mats = None
        idx = np.argsort(-np.abs(evals))
        used = []
        for start in range(n):
            lam = evals[start]
            cluster = [i for i in range(n) if abs(evals[i] - lam) < 1e-8]
            basis = evecs[:, cluster]
            if abs(np.linalg.norm(proj @ basis) - np.linalg.norm(basis)) > 1e-8:
                continue
            if len(cluster) != d:
                continue
            q, _ = np.linalg.qr(basis)
            mats = np.stack([q.T @ reg[a] @ q for a in g.elements()])
            break
        if mats is None:
            raise NumericalFailure(f"could not isolate irrep block of dimension {d}")
        # verify homomorphism and unitarity
        for a in g.elements():
            if np.linalg.norm(mats[a] @ mats[a].conj().T - np.eye(d)) > tol * 10:
                raise NumericalFailure("irrep block not unitary")
            for b in g.elements():
                if np.linalg.norm(mats[g.mul(a, b)] - mats[a] @ mats[b]) > tol * 10:
                    raise NumericalFailure("homomorphism property violated")
        out.append(mats)
    return out


# -- automorphisms ------------------------------------------------------------------

@dataclass(frozen=True)
class GroupMap:
    source: FiniteGroup
    target: FiniteGroup
    table: tuple[int, ...]
    kind: str = "homomorphism"

    def __call__(self, x: int) -> int:
        return self.table[x]

    def compose(self, other: "GroupMap") -> "GroupMap":
        return GroupMap(other.source, self.target,
                        tuple(self.table[other.table[x]] for x in range(other.source.order)),
                        self.kind)

    def is_automorphism(self) -> bool:
        return len(set(self.table)) == len(self.table) and self.source is self.target


def _minimal_generators(g: FiniteGroup) -> list[int]:
    elems = sorted(g.elements(), key=lambda x: -g.element_order(x))
    gens: list[int] = []
    span = frozenset([g.identity])
    for x in elems:
        if x not in span:
            gens.append(x)
            span = g.generated(gens)
            if len(span) == g.order:
                break
    return gens


def automorphisms(g: FiniteGroup) -> list[GroupMap]:
    """Full automorphism group by generator-image backtracking."""
    gens = _minimal_generators(g)
    orders = [g.element_order(x) for x in gens]
    by_order: dict[int, list[int]] = {}
    for x in g.elements():
        by_order.setdefault(g.element_order(x), []).append(x)

    # express every group element as a word in the generators (indices into gens)
    words = {g.identity: ()}
    frontier = [g.identity]
    while frontier:
        x = frontier.pop(0)
        for gi, gen in enumerate(gens):
            y = g.mul(x, gen)
            if y not in words:
                words[y] = words[x] + (gi,)
                frontier.append(y)

    results = []

    def image_of(x, images):
        out = g.identity
        for gi in words[x]:
            out = g.mul(out, images[gi])
        return out

    def extend(images):
        k = len(images)
        if k == len(gens):
            table = tuple(image_of(x, images) for x in g.elements())
            if len(set(table)) == g.order:
                # verify homomorphism
                ok = all(table[g.mul(a, b)] == g.mul(table[a], table[b])
                         for a in g.elements() for b in g.elements())
                if ok:
                    results.append(GroupMap(g, g, table, "automorphism"))
            return
        for cand in by_order[orders[k]]:
            # partial consistency: the map on the span so far must stay injective
            extend(images + [cand])

    extend([])
    # dedupe
    seen = set()
    out = []
    for a in results:
        if a.table not in seen:
            seen.add(a.table)
            out.append(a)
    return out


def inner_automorphisms(g: FiniteGroup) -> list[GroupMap]:
    seen = set()
    out = []
    for x in g.elements():
        table = tuple(g.conj(x, y) for y in g.elements())
        if table not in seen:
            seen.add(table)
            out.append(GroupMap(g, g, table, "automorphism"))
    return out


def outer_classes(g: FiniteGroup) -> list[list[GroupMap]]:
    """Cosets of Inn(G) in Aut(G); the first coset contains the identity."""
    auts = automorphisms(g)
    inner = {a.table for a in inner_automorphisms(g)}
    classes: list[list[GroupMap]] = []
    claimed = set()
    for a in auts:
        if a.table in claimed:
            continue
        coset = []
        for b in auts:
            # b in a*Inn iff a^-1 b inner
            ainv = tuple(a.table.index(x) for x in range(g.order))
            comp = tuple(ainv[b.table[x]] for x in range(g.order))
            if comp in inner:
                coset.append(b)
                claimed.add(b.table)
        classes.append(coset)
    classes.sort(key=lambda c: min(m.table for m in c) != tuple(g.elements()))
    return classes


def automorphism_from_spec(g: FiniteGroup, spec: str) -> GroupMap:
    """Build an automorphism from generator images like "s:rs,r:r" (named elements)."""
    images = {}
    for part in spec.split(","):
        src, dst = part.split(":")
        images[g.index_of(src.strip())] = g.index_of(dst.strip())
    gens = list(images.keys())
    if len(g.generated(gens)) != g.order:
        raise NotAutomorphism(f"elements {gens} do not generate the group")
    words = {g.identity: ()}
    frontier = [g.identity]
    while frontier:
        x = frontier.pop(0)
        for gi, gen in enumerate(gens):
            y = g.mul(x, gen)
            if y not in words:
                words[y] = words[x] + (gi,)
                frontier.append(y)
    table = []
    for x in g.elements():
        out = g.identity
        for gi in words[x]:
            out = g.mul(out, images[gens[gi]])
        table.append(out)
    table = tuple(table)
    if len(set(table)) != g.order or any(
            table[g.mul(a, b)] != g.mul(table[a], table[b]) for a in g.elements() for b in g.elements()):
        raise NotAutomorphism("generator images do not define an automorphism")
    return GroupMap(g, g, table, "automorphism")
