"""Exact symbolic and dense computational backends.

The symbolic side represents unitaries of the monomial form

    O |x> = exp(2 pi i phi(x)) |A(x)>

on a register of bits, where A is a bijective map with multilinear boolean
polynomial coordinates and phi is a multilinear polynomial with exact rational
coefficients (the constant term carries the global phase).  This class is
closed under products and under conjugation by its own members; conjugation by
small dense unitaries (the gauging triangles, which contain Fourier gates) is
performed block-wise over the control bits and the result is re-fitted to
polynomial form, failing loudly if the image leaves the monomial class.

The dense side is a plain numpy state-vector/matrix backend for small patches.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ClosureViolation, NonCommutingTerms, PatchTooLarge
from .exact import phase_from_complex, phase_to_complex

Mono = frozenset  # monomial: frozenset of bit ids; frozenset() is the constant
BoolPoly = frozenset  # frozenset of monomials, xor-combined

BP_ZERO: BoolPoly = frozenset()
BP_ONE: BoolPoly = frozenset({frozenset()})


def bp_var(b: int) -> BoolPoly:
    return frozenset({frozenset({b})})


def bp_xor(*ps: BoolPoly) -> BoolPoly:
    out: frozenset = frozenset()
    for p in ps:
        out = out.symmetric_difference(p)
    return out


def bp_mul(p: BoolPoly, q: BoolPoly) -> BoolPoly:
    acc: set = set()
    for m1 in p:
        for m2 in q:
            m = m1 | m2
            if m in acc:
                acc.remove(m)
            else:
                acc.add(m)
    return frozenset(acc)


def bp_vars(p: BoolPoly) -> frozenset[int]:
    out: set[int] = set()
    for m in p:
        out |= m
    return frozenset(out)


def bp_eval(p: BoolPoly, assign: dict[int, int]) -> int:
    v = 0
    for m in p:
        t = 1
        for b in m:
            t &= assign[b]
        v ^= t
    return v


def bp_subst(p: BoolPoly, table: dict[int, BoolPoly]) -> BoolPoly:
    out: frozenset = frozenset()
    for m in p:
        term = BP_ONE
        for b in m:
            term = bp_mul(term, table.get(b, bp_var(b)))
            if not term:
                break
        out = out.symmetric_difference(term)
    return out


def bp_fit(values, bits: list[int]) -> BoolPoly:
    """Moebius fit: values[i] over the cube of `bits` (big-endian) -> multilinear poly."""
    k = len(bits)
    c = list(values)
    for pos in range(k):
        step = 1 << (k - 1 - pos)
        for i in range(1 << k):
            if i & step:
                c[i] ^= c[i ^ step]
    monos = set()
    for i in range(1 << k):
        if c[i]:
            monos.add(frozenset(bits[pos] for pos in range(k) if i & (1 << (k - 1 - pos))))
    return frozenset(monos)


class PhasePoly:
    """Multilinear polynomial with Fraction coefficients mod 1 (phase in turns)."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                c = c % 1
                if c:
                    t[m] = c
        self.terms = t

    @staticmethod
    def constant(c: Fraction) -> "PhasePoly":
        return PhasePoly({frozenset(): Fraction(c)})

    def __add__(self, other: "PhasePoly") -> "PhasePoly":
        t = dict(self.terms)
        for m, c in other.terms.items():
            c2 = (t.get(m, 0) + c) % 1
            if c2:
                t[m] = c2
            else:
                t.pop(m, None)
        out = PhasePoly.__new__(PhasePoly)
        out.terms = t
        return out

    def __neg__(self) -> "PhasePoly":
        out = PhasePoly.__new__(PhasePoly)
        out.terms = {m: (-c) % 1 for m, c in self.terms.items()}
        return out

    def __eq__(self, other) -> bool:
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def vars(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self.terms:
            out |= m
        return frozenset(out)

    def evaluate(self, assign: dict[int, int]) -> Fraction:
        v = Fraction(0)
        for m, c in self.terms.items():
            t = 1
            for b in m:
                t &= assign[b]
            if t:
                v += c
        return v % 1

    def constant_term(self) -> Fraction:
        return self.terms.get(frozenset(), Fraction(0))

    def drop_constant(self) -> "PhasePoly":
        t = dict(self.terms)
        t.pop(frozenset(), None)
        out = PhasePoly.__new__(PhasePoly)
        out.terms = t
        return out

    def subst(self, table: dict[int, BoolPoly], max_terms: int = 1 << 16) -> "PhasePoly":
        """Substitute boolean polynomials for variables, with exact integer lift."""
        out = PhasePoly()
        for m, c in self.terms.items():
            if not any(b in table for b in m):
                out = out + PhasePoly({m: c})
                continue
            prod = BP_ONE
            for b in m:
                prod = bp_mul(prod, table.get(b, bp_var(b)))
                if not prod:
                    break
            if not prod:
                continue
            d = c.denominator
            lift = _bp_lift(prod, d, max_terms)
            out = out + PhasePoly({mono: (c * k) % 1 for mono, k in lift.items()})
        return out

    def __repr__(self):
        return "PhasePoly(%s)" % {tuple(sorted(m)): str(c) for m, c in self.terms.items()}


def _bp_lift(p: BoolPoly, mod: int, max_terms: int) -> dict[Mono, int]:
    """0/1 integer lift of an xor of monomials, coefficients mod `mod`."""
    acc: dict[Mono, int] = {}
    for m in sorted(p, key=lambda m: (len(m), sorted(m))):
        # acc <- acc + m - 2*acc*m
        new = dict(acc)
        new[m] = (new.get(m, 0) + 1) % mod
        for mono, k in acc.items():
            u = mono | m
            new[u] = (new.get(u, 0) - 2 * k) % mod
        acc = {mm: kk for mm, kk in new.items() if kk}
        if len(acc) > max_terms:
            raise ClosureViolation("phase lift exceeded term budget")
    return acc


def phase_fit(values, bits: list[int]) -> PhasePoly:
    """Moebius fit of Fraction phase values over the cube of `bits` (big-endian)."""
    k = len(bits)
    c = [Fraction(v) for v in values]
    for pos in range(k):
        step = 1 << (k - 1 - pos)
        for i in range(1 << k):
            if i & step:
                c[i] = c[i] - c[i ^ step]
    terms = {}
    for i in range(1 << k):
        v = c[i] % 1
        if v:
            terms[frozenset(bits[pos] for pos in range(k) if i & (1 << (k - 1 - pos)))] = v
    return PhasePoly(terms)


# -- register layout -----------------------------------------------------------


@dataclass(frozen=True)
class RegisterLayout:
    """Sites with per-site bit registers; global bit ids are consecutive."""

    site_bits: tuple[int, ...]  # number of bits per site

    def nsites(self) -> int:
        return len(self.site_bits)

    def bits_of(self, site: int) -> list[int]:
        start = sum(self.site_bits[:site])
        return list(range(start, start + self.site_bits[site]))

    def site_of_bit(self, b: int) -> int:
        acc = 0
        for s, k in enumerate(self.site_bits):
            acc += k
            if b < acc:
                return s
        raise IndexError(b)

    @property
    def total_bits(self) -> int:
        return sum(self.site_bits)

    @staticmethod
    def uniform(nsites: int, bits_per_site: int) -> "RegisterLayout":
        return RegisterLayout((bits_per_site,) * nsites)


# -- symbolic operators ----------------------------------------------------------


class SymOp:
    """Monomial unitary |x> -> exp(2 pi i phi(x)) |A(x)> in polynomial form.

    `perm` maps output-bit -> boolean polynomial of input bits; identity bits
    are omitted.  `phi` is evaluated on the input configuration, its constant
    term being the global phase.
    """

    __slots__ = ("perm", "phi")

    def __init__(self, perm: dict[int, BoolPoly] | None = None, phi: PhasePoly | None = None):
        p = {}
        if perm:
            for b, poly in perm.items():
                if poly != bp_var(b):
                    p[b] = poly
        self.perm = p
        self.phi = phi if phi is not None else PhasePoly()

    @staticmethod
    def identity() -> "SymOp":
        return SymOp()

    @staticmethod
    def global_phase(c: Fraction) -> "SymOp":
        return SymOp(phi=PhasePoly.constant(c))

    def support_bits(self) -> frozenset[int]:
        out: set[int] = set(self.perm.keys())
        for p in self.perm.values():
            out |= bp_vars(p)
        out |= self.phi.vars()
        return frozenset(out)

    def moved_bits(self) -> frozenset[int]:
        return frozenset(self.perm.keys())

    def is_diagonal(self) -> bool:
        return not self.perm

    def __matmul__(self, other: "SymOp") -> "SymOp":
        """self applied after other."""
        table = other.perm
        perm = {}
        for b in set(self.perm) | set(table):
            if b in self.perm:
                perm[b] = bp_subst(self.perm[b], table)
            else:
                perm[b] = table[b]
        phi = other.phi + self.phi.subst(table)
        return SymOp(perm, phi)

    def __eq__(self, other) -> bool:
        return self.perm == other.perm and self.phi == other.phi

    def __hash__(self):
        return hash((frozenset(self.perm.items()), self.phi))

    def equal_up_to_phase(self, other: "SymOp") -> Fraction | None:
        """Return f with self == exp(2 pi i f) * other, else None."""
        if self.perm != other.perm:
            return None
        if self.phi.drop_constant() != other.phi.drop_constant():
            return None
        return (self.phi.constant_term() - other.phi.constant_term()) % 1

    def inverse(self, max_bits: int = 22) -> "SymOp":
        bits = set(self.perm.keys())
        for p in self.perm.values():
            bits |= bp_vars(p)
        closure = sorted(bits)
        if len(closure) > max_bits:
            raise PatchTooLarge(f"inverse over {len(closure)} bits exceeds cap")
        k = len(closure)
        pos = {b: k - 1 - i for i, b in enumerate(closure)}  # big-endian
        fwd = {}
        for x in range(1 << k):
            assign = {b: (x >> pos[b]) & 1 for b in closure}
            y = 0
            for b in closure:
                v = bp_eval(self.perm[b], assign) if b in self.perm else assign[b]
                y |= v << pos[b]
            fwd[x] = y
        if len(set(fwd.values())) != len(fwd):
            raise ClosureViolation("permutation part is not bijective")
        inv = {y: x for x, y in fwd.items()}
        perm = {}
        for b in closure:
            vals = [(inv[y] >> pos[b]) & 1 for y in range(1 << k)]
            perm[b] = bp_fit(vals, closure)
        inv_table = dict(perm)
        phi = -(self.phi.subst(inv_table))
        return SymOp(perm, phi)

    def conjugate_by(self, gate: "SymOp", gate_inv: "SymOp" | None = None) -> "SymOp":
        if gate_inv is None:
            gate_inv = gate.inverse()
        return gate @ self @ gate_inv

    def dagger(self) -> "SymOp":
        return self.inverse()

    def to_dense(self, bits: list[int]) -> np.ndarray:
        """Dense matrix over the cube of `bits` (big-endian), identity elsewhere implied."""
        if not self.support_bits() <= set(bits):
            raise ValueError("operator touches bits outside the requested list")
        k = len(bits)
        if k > 14:
            raise PatchTooLarge(f"dense matrix over {k} bits")
        pos = {b: k - 1 - i for i, b in enumerate(bits)}
        dim = 1 << k
        out = np.zeros((dim, dim), dtype=complex)
        for x in range(dim):
            assign = {b: (x >> pos[b]) & 1 for b in bits}
            y = 0
            for b in bits:
                v = bp_eval(self.perm[b], assign) if b in self.perm else assign[b]
                y |= v << pos[b]
            out[y, x] = phase_to_complex(self.phi.evaluate(assign))
        return out

    def __repr__(self):
        return f"SymOp(perm={{{', '.join('%d<-%s' % (b, sorted(tuple(sorted(m)) for m in p)) for b, p in sorted(self.perm.items()))}}}, phi={self.phi})"


def sym_from_table(bits: list[int], perm_table: list[int], phases: list[Fraction]) -> SymOp:
    """Build a SymOp over `bits` from explicit permutation/phase tables (big-endian index)."""
    k = len(bits)
    dim = 1 << k
    assert len(perm_table) == dim
    if len(set(perm_table)) != dim:
        raise ClosureViolation("table is not a permutation")
    perm = {}
    for i, b in enumerate(bits):
        vals = [(perm_table[x] >> (k - 1 - i)) & 1 for x in range(dim)]
        perm[b] = bp_fit(vals, bits)
    phi = phase_fit(phases, bits)
    return SymOp(perm, phi)


def sym_from_dense(bits: list[int], mat: np.ndarray, max_den: int = 64, tol: float = 1e-9) -> SymOp:
    """Recognize a dense monomial matrix as a SymOp; raises ClosureViolation otherwise."""
    dim = mat.shape[0]
    k = len(bits)
    assert dim == 1 << k
    perm_table = [0] * dim
    phases = [Fraction(0)] * dim
    for x in range(dim):
        col = mat[:, x]
        nz = np.nonzero(np.abs(col) > tol)[0]
        if len(nz) != 1 or abs(abs(col[nz[0]]) - 1.0) > tol:
            raise ClosureViolation("matrix is not monomial-unitary")
        perm_table[x] = int(nz[0])
        phases[x] = phase_from_complex(complex(col[nz[0]]), max_den=max_den, tol=tol)
    return sym_from_table(bits, perm_table, phases)


def conjugate_by_dense(op: SymOp, w: np.ndarray, sbits: list[int],
                       max_den: int = 64, tol: float = 1e-9,
                       max_control_bits: int = 16) -> SymOp:
    """Exact conjugation w . op . w^dagger for a dense unitary w on bits `sbits`.

    Requires that no bit outside sbits acquires dependence on sbits inputs
    (checked); controls are enumerated block-wise, each block conjugated
    densely and the result re-fitted to polynomial form.
    """
    sset = set(sbits)
    for b, p in op.perm.items():
        if b not in sset and bp_vars(p) & sset:
            raise ClosureViolation(f"bit {b} outside the patch depends on patch inputs")
    controls: set[int] = set()
    for b in sbits:
        if b in op.perm:
            controls |= bp_vars(op.perm[b]) - sset
    phi_in, phi_out = {}, {}
    for m, c in op.phi.terms.items():
        if m & sset:
            controls |= set(m) - sset
            phi_in[m] = c
        else:
            phi_out[m] = c
    cbits = sorted(controls)
    if len(cbits) > max_control_bits:
        raise PatchTooLarge(f"{len(cbits)} control bits exceeds cap")
    ks, kc = len(sbits), len(cbits)
    dim = 1 << ks
    wdag = w.conj().T
    fit_bits = sbits + cbits
    new_perm_vals = {b: [] for b in sbits}
    new_phase_vals = []
    spos = {b: ks - 1 - i for i, b in enumerate(sbits)}
    for c_idx in range(1 << kc):
        assign_c = {b: (c_idx >> (kc - 1 - i)) & 1 for i, b in enumerate(cbits)}
        # build the monomial block on sbits for this control setting
        block = np.zeros((dim, dim), dtype=complex)
        for x in range(dim):
            assign = dict(assign_c)
            for b in sbits:
                assign[b] = (x >> spos[b]) & 1
            y = 0
            for b in sbits:
                v = bp_eval(op.perm[b], assign) if b in op.perm else assign[b]
                y |= v << spos[b]
            block[y, x] = phase_to_complex(PhasePoly(phi_in).evaluate(assign))
        conj = w @ block @ wdag
        # recognize
        for x in range(dim):
            col = conj[:, x]
            nz = np.nonzero(np.abs(col) > tol)[0]
            if len(nz) != 1 or abs(abs(col[nz[0]]) - 1.0) > tol:
                raise ClosureViolation("conjugated block left the monomial class")
            y = int(nz[0])
            for b in sbits:
                new_perm_vals[b].append((y >> spos[b]) & 1)
            new_phase_vals.append(phase_from_complex(complex(col[nz[0]]), max_den=max_den, tol=tol))
    # note: value ordering is c-major then x, but fits expect fit_bits = sbits + cbits
    # big-endian: reorder so sbits vary fastest -> index = x * 2^kc + c? Rebuild properly:
    def reorder(vals):
        out = [None] * (1 << (ks + kc))
        i = 0
        for c_idx in range(1 << kc):
            for x in range(dim):
                out[(x << kc) | c_idx] = vals[i]
                i += 1
        return out
    perm = {b: p for b, p in op.perm.items() if b not in sset}
    for b in sbits:
        poly = bp_fit(reorder(new_perm_vals[b]), fit_bits)
        perm[b] = poly
    phi = PhasePoly(phi_out) + phase_fit(reorder(new_phase_vals), fit_bits)
    return SymOp(perm, phi)


# -- sums of monomial operators ---------------------------------------------------


class SumOp:
    """Finite sum of SymOps with exact cyclotomic coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        from .exact import Cyc8
        acc: dict = {}
        for coeff, op in terms:
            if not isinstance(coeff, Cyc8):
                coeff = Cyc8(coeff)
            key = (frozenset(op.perm.items()), op.phi)
            if key in acc:
                c0, _ = acc[key]
                acc[key] = (c0 + coeff, op)
            else:
                acc[key] = (coeff, op)
        self.terms = tuple((c, o) for c, o in acc.values() if c)

    def map_ops(self, fn) -> "SumOp":
        return SumOp([(c, fn(o)) for c, o in self.terms])

    def __mul__(self, other: "SumOp") -> "SumOp":
        out = []
        for c1, o1 in self.terms:
            for c2, o2 in other.terms:
                out.append((c1 * c2, o1 @ o2))
        return SumOp(out)

    def scaled(self, coeff) -> "SumOp":
        return SumOp([(c * coeff, o) for c, o in self.terms])

    def support_bits(self) -> frozenset[int]:
        out: set[int] = frozenset()
        for _, o in self.terms:
            out = out | o.support_bits()
        return frozenset(out)

    def canonical_key(self):
        return frozenset(((frozenset(o.perm.items()), o.phi), c) for c, o in self.terms)

    def proportional_to(self, other: "SumOp"):
        """Return a Cyc8 ratio with self == ratio * other (phases only), else None."""
        if len(self.terms) != len(other.terms):
            return None
        if not self.terms:
            return Fraction(0)
        index = {(frozenset(o.perm.items()), o.phi.drop_constant()): (c, o.phi.constant_term())
                 for c, o in other.terms}
        ratio = None
        from .exact import Cyc8
        for c, o in self.terms:
            key = (frozenset(o.perm.items()), o.phi.drop_constant())
            if key not in index:
                return None
            c2, const2 = index[key]
            # self term = c * e^{2pi i const}, other = c2 * e^{2pi i const2}
            const = o.phi.constant_term()
            delta = (const - const2) % 1
            if (delta * 8).denominator != 1:
                return None
            num = c * Cyc8.from_phase(delta)
            # ratio = num / c2 must be consistent; avoid division: check num == ratio*c2
            if ratio is None:
                cand = _cyc8_div(num, c2)
                if cand is None:
                    return None
                ratio = cand
            else:
                if num != ratio * c2:
                    return None
        return ratio

    def __repr__(self):
        return f"SumOp({len(self.terms)} terms)"


def _cyc8_div(a, b):
    """a / b in Q(zeta_8) when b != 0, via multiplication by conjugates."""
    from .exact import Cyc8
    if not b:
        return None
    # norm trick: b * conj(b) has only real part? not generally; brute force over grid scalars
    # first try grid phases and small rational magnitudes
    for k in range(8):
        z = Cyc8.from_phase(Fraction(k, 8))
        for num in (1, -1, 2, -2, 1, 3, -3, 4, -4):
            for den in (1, 2, 3, 4, 8):
                cand = z * Fraction(num, den)
                if cand * b == a:
                    return cand
    # general division via rational linear solve
    import numpy as _np
    m = _np.zeros((8, 4))
    basis = [Cyc8(1, 0, 0, 0), Cyc8(0, 1, 0, 0), Cyc8(0, 0, 1, 0), Cyc8(0, 0, 0, 1)]
    cols = [e * b for e in basis]
    mat = _np.array([[float(x) for x in col.c] for col in cols]).T
    rhs = _np.array([float(x) for x in a.c])
    try:
        sol, res, rank, _ = _np.linalg.lstsq(mat, rhs, rcond=None)
    except Exception:
        return None
    fr = [Fraction(round(s * 840), 840) for s in sol]
    cand = Cyc8(*fr)
    return cand if cand * b == a else None


# -- dense backend ------------------------------------------------------------------

DENSE_STATE_CAP = int(os.environ.get("QDLAB_DENSE_CAP", 140_000_000))
DENSE_MATRIX_SIDE_CAP = 16384


def dense_kron(ops: list[np.ndarray]) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, o)
        if out.shape[0] > DENSE_MATRIX_SIDE_CAP:
            raise PatchTooLarge(f"kron side {out.shape[0]} exceeds cap")
    return out


def embed_dense(mat: np.ndarray, op_sites: list[int], all_sites: list[int], dims: dict[int, int]) -> np.ndarray:
    """Embed a dense operator on op_sites (kron order as listed) into all_sites."""
    assert set(op_sites) <= set(all_sites)
    side = 1
    for s in all_sites:
        side *= dims[s]
    if side > DENSE_MATRIX_SIDE_CAP:
        raise PatchTooLarge(f"dense side {side} exceeds cap")
    # reorder via einsum-style index mapping
    n = len(all_sites)
    dim_list = [dims[s] for s in all_sites]
    full = np.eye(side, dtype=complex).reshape(dim_list + dim_list)
    # apply mat on the axes of op_sites
    op_dims = [dims[s] for s in op_sites]
    mat_t = mat.reshape(op_dims + op_dims)
    in_axes = [n + all_sites.index(s) for s in op_sites]
    out_axes = [all_sites.index(s) for s in op_sites]
    # full_out = sum over contracted: use tensordot then moveaxis
    cur = full
    # contract mat_t's input axes with identity's output axes
    cur = np.tensordot(mat_t, cur, axes=(list(range(len(op_sites), 2 * len(op_sites))), out_axes))
    # tensordot puts mat axes first; move them back
    cur = np.moveaxis(cur, list(range(len(op_sites))), out_axes)
    return cur.reshape(side, side)


def ground_space(projectors: list[np.ndarray], dim: int, seed: int = 5, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the common +1 eigenspace of commuting projectors."""
    for i, p in enumerate(projectors):
        if np.linalg.norm(p @ p - p) > 1e-8:
            raise ValueError(f"input {i} is not a projector")
    for i in range(len(projectors)):
        for j in range(i):
            if np.linalg.norm(projectors[i] @ projectors[j] - projectors[j] @ projectors[i]) > tol:
                raise NonCommutingTerms(f"projectors {i} and {j} do not commute")
    total = np.eye(dim, dtype=complex)
    for p in projectors:
        total = total @ p
    # projector product of commuting projectors is the intersection projector
    rank = int(round(np.trace(total).real))
    rng = np.random.default_rng(seed)
    vecs = total @ (rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank)))
    q, r = np.linalg.qr(vecs)
    keep = [i for i in range(q.shape[1]) if abs(r[i, i]) > 1e-8]
    basis = q[:, keep]
    assert basis.shape[1] == rank, f"ground space extraction rank mismatch {basis.shape[1]} vs {rank}"
    return basis


def preserves_subspace(u: np.ndarray, basis: np.ndarray, tol: float = 1e-9):
    """Return ('yes', block) when u maps span(basis) to itself, else ('no', leakage)."""
    mapped = u @ basis
    block = basis.conj().T @ mapped
    residual = mapped - basis @ block
    leak = float(np.linalg.norm(residual))
    if leak > tol:
        return "no", leak
    return "yes", block
