"""Finite chain rings O_R = O / pi^R O with exact arithmetic.

Four presentations, one per descriptor shape:

  EQUAL_CHAR   delta=1, e=inf   F_q[t]/(t^R)
  UNRAMIFIED   delta=1, e=1     Galois ring GR(p^R, f) = (Z/p^R)[y]/(h)
  EISENSTEIN   delta=1, e>1     sum c_i X^i, c_i in GR(p^{M_i}, f),
                                M_i = ceil((R-i)/e), X^e = -(a_0 + ... )
  SKEW         delta>1          sum x^i a_i, a_i in the unramified-over-center
                                ring C at precision M_i = ceil((R-i)/delta),
                                x^delta = pi_L,  a x = x sigma(a) where sigma
                                lifts the (p^f)-power Frobenius to the r-th power

Elements are immutable nested tuples of ints; equality of elements is
structural equality, and every element has a canonical digit vector of
length R over the residue field (digit k is the coefficient of the unique
valuation-k monomial).  Valuation is the index of the first nonzero digit,
with v(0) = R by convention (kept total on a finite ring).

Residue fields use the polynomial-basis transversal: a digit d in [0, q)
encodes sum c_i y^i with c_i the base-p digits of d.  Moduli come from a
fixed table of Conway-style irreducible polynomials, with a deterministic
least-lexicographic fallback, so rings are reproducible across runs.

Truncation convention for precisions that are not multiples of delta (or e):
per-coefficient moduli M_i as above.  All operations normalize through the
same truncation, so representations stay canonical.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from btlab.errors import BudgetExceeded, InternalCheckFailed, InvalidDescriptor
from btlab.fields import INFINITY, FieldDescriptor, _coefficient_valuation, validate_descriptor

DIGIT_SEP = "."
DEFAULT_ENUM_BUDGET = 1 << 16

# Conway polynomials for small (p, f), ascending coefficients, monic.
_IRREDUCIBLE = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (7, 2): (3, 6, 1),
}


def _poly_mul_mod_p(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _poly_rem_mod_p(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        a.pop()
    return a


def _is_irreducible(poly, p):
    # trial division by every lower-degree monic polynomial
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if not any(_poly_rem_mod_p(poly, divisor, p)):
                return False
    return True


def _least_irreducible(p, f):
    for tail in itertools.product(range(p), repeat=f):
        poly = list(tail) + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise InternalCheckFailed(f"no irreducible polynomial of degree {f} over F_{p}")


_FIELD_CACHE = {}


class ResidueField:
    """F_{p^f} with elements encoded as ints in [0, p^f) via base-p coefficients."""

    def __init__(self, p, f):
        self.p = p
        self.f = f
        self.q = p**f
        self.modulus = _IRREDUCIBLE.get((p, f)) if f > 1 else (0, 1)
        if self.modulus is None:
            self.modulus = _least_irreducible(p, f)
        q = self.q
        enc = self._encode
        dec = self._decode
        if f == 1:
            self.add_t = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul_t = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            self.add_t = [
                [enc([(x + y) % p for x, y in zip(dec(a), dec(b))]) for b in range(q)]
                for a in range(q)
            ]
            self.mul_t = [
                [
                    enc(_poly_rem_mod_p(_poly_mul_mod_p(dec(a), dec(b), p), self.modulus, p))
                    for b in range(q)
                ]
                for a in range(q)
            ]
        self.neg_t = [self.add_t[a].index(0) for a in range(q)]
        self.inv_t = [0] + [self.mul_t[a].index(1) for a in range(1, q)]
        self.frob_t = [self._pow(a, p) for a in range(q)]

    def _decode(self, a):
        return [(a // self.p**i) % self.p for i in range(self.f)]

    def _encode(self, coeffs):
        return sum((c % self.p) * self.p**i for i, c in enumerate(coeffs))

    def _pow(self, a, k):
        out = 1
        while k:
            if k & 1:
                out = self.mul_t[out][a]
            a = self.mul_t[a][a]
            k >>= 1
        return out

    def add(self, a, b):
        return self.add_t[a][b]

    def mul(self, a, b):
        return self.mul_t[a][b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("residue field inverse of 0")
        return self.inv_t[a]

    def frob_pow(self, a, m):
        for _ in range(m % self.f):
            a = self.frob_t[a]
        return a

    def mult_order(self, a):
        if a == 0:
            return 0
        x, n = a, 1
        while x != 1:
            x = self.mul_t[x][a]
            n += 1
        return n


def residue_field(p, f):
    key = (p, f)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = ResidueField(p, f)
    return _FIELD_CACHE[key]


# ---------------------------------------------------------------------------
# ring base
# ---------------------------------------------------------------------------


class ResidueRing:
    """Common machinery; subclasses provide add/neg/mul/digits/from_digits
    and exact division by the uniformizer."""

    kind = "?"

    def __init__(self, R, p, field, descriptor=None):
        self.R = R
        self.p = p
        self.field = field
        self.q_residue = field.q
        self.descriptor = descriptor
        self.size = self.q_residue**R
        self._elements = None

    # -- generic ops ---------------------------------------------------

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def uniformizer(self):
        if self.R < 2:
            return self.zero
        return self.from_digits((0, 1) + (0,) * (self.R - 2))

    def valuation(self, a):
        for k, d in enumerate(self.digits(a)):
            if d != 0:
                return k
        return self.R

    def is_unit(self, a):
        return self.digits(a)[0] != 0

    def truncate(self, a, m):
        """Canonical representative of a modulo pi^m (zero the digits >= m)."""
        if m >= self.R:
            return a
        ds = self.digits(a)
        return self.from_digits(ds[:m] + (0,) * (self.R - m))

    def divide_by_uniformizer(self, a):
        raise NotImplementedError

    def shift_down(self, a, k):
        """Some b with pi^k b = a; requires v(a) >= k."""
        for _ in range(k):
            a = self.divide_by_uniformizer(a)
        return a

    def unit_part(self, a):
        """Canonical unit u with a = pi^v(a) * u (u fixed modulo pi^(R-v))."""
        v = self.valuation(a)
        if v >= self.R:
            raise ZeroDivisionError("unit_part of 0")
        u = self.shift_down(a, v)
        return self.truncate(u, self.R - v)

    def inverse(self, a):
        """Two-sided inverse of a unit, by lifting the residue-field inverse."""
        d0 = self.digits(a)[0]
        if d0 == 0:
            raise ZeroDivisionError("inverse of a non-unit")
        x = self.from_digits((self.field.inv(d0),) + (0,) * (self.R - 1))
        two = self.add(self.one, self.one)
        for _ in range(self.R.bit_length() + 2):
            if self.mul(a, x) == self.one:
                break
            x = self.mul(x, self.sub(two, self.mul(a, x)))
        if self.mul(a, x) != self.one or self.mul(x, a) != self.one:
            raise InternalCheckFailed("Newton inversion failed")
        return x

    def additive_order(self, a):
        n, x = 1, a
        while x != self.zero:
            x = self.add(x, a)
            n += 1
        return n

    def mult_order(self, a):
        if not self.is_unit(a):
            return 0
        n, x = 1, a
        while x != self.one:
            x = self.mul(x, a)
            n += 1
        return n

    # -- enumeration, deterministic order = base-q little-endian count --

    def element_at(self, idx):
        q = self.q_residue
        ds = []
        for _ in range(self.R):
            ds.append(idx % q)
            idx //= q
        return self.from_digits(tuple(ds))

    def index_of(self, a):
        q = self.q_residue
        return sum(d * q**k for k, d in enumerate(self.digits(a)))

    def enumerate_elements(self, budget=DEFAULT_ENUM_BUDGET):
        if self.size > budget:
            raise BudgetExceeded(
                f"ring of size {self.size} exceeds enumeration budget {budget}"
            )
        if self._elements is None:
            self._elements = [self.element_at(i) for i in range(self.size)]
        return list(self._elements)

    # -- serialization ---------------------------------------------------

    def element_string(self, a):
        return DIGIT_SEP.join(str(d) for d in self.digits(a))

    def parse_element(self, s):
        parts = s.split(DIGIT_SEP) if s else []
        ds = tuple(int(x) for x in parts)
        if len(ds) != self.R or any(not (0 <= d < self.q_residue) for d in ds):
            raise InvalidDescriptor([f"bad element string {s!r} for {self}"])
        return self.from_digits(ds)

    def __repr__(self):
        return f"{self.__class__.__name__}(q={self.q_residue}, R={self.R})"


class EqualCharRing(ResidueRing):
    """F_q[t]/(t^R); elements are coefficient tuples, digit vector = itself."""

    kind = "EQUAL_CHAR"

    def __init__(self, p, fdeg, R, descriptor=None):
        super().__init__(R, p, residue_field(p, fdeg), descriptor)
        self.fdeg = fdeg
        self.zero = (0,) * R
        self.one = (1,) + (0,) * (R - 1)
        self.key = ("EQUAL_CHAR", p, fdeg, R)

    def add(self, a, b):
        t = self.field.add_t
        return tuple(t[x][y] for x, y in zip(a, b))

    def neg(self, a):
        t = self.field.neg_t
        return tuple(t[x] for x in a)

    def mul(self, a, b):
        addt, mult = self.field.add_t, self.field.mul_t
        out = [0] * self.R
        for i, x in enumerate(a):
            if x:
                for j in range(self.R - i):
                    y = b[j]
                    if y:
                        out[i + j] = addt[out[i + j]][mult[x][y]]
        return tuple(out)

    def digits(self, a):
        return a

    def from_digits(self, ds):
        return tuple(ds)

    def divide_by_uniformizer(self, a):
        if a[0] != 0:
            raise ZeroDivisionError("element has valuation 0")
        return a[1:] + (0,)

    def frobenius_pow(self, a, m):
        fld = self.field
        return tuple(fld.frob_pow(x, m) for x in a)


class UnramifiedRing(ResidueRing):
    """Galois ring GR(p^R, f) = (Z/p^R)[y]/(h); elements are coefficient tuples."""

    kind = "UNRAMIFIED"

    def __init__(self, p, f, R, descriptor=None):
        super().__init__(R, p, residue_field(p, f), descriptor)
        self.f = f
        self.pR = p**R
        self.zero = (0,) * f
        self.one = (1,) + (0,) * (f - 1)
        self.key = ("UNRAMIFIED", p, f, R, self.field.modulus)
        # reduction vectors: y^(f+k) as a coefficient tuple, k = 0..f-2
        if f > 1:
            h = self.field.modulus  # monic, coefficients in {0..p-1}
            base = tuple((-h[i]) % self.pR for i in range(f))
            red = [base]
            for _ in range(f - 2):
                prev = red[-1]
                top = prev[-1]
                nxt = [(top * base[0]) % self.pR]
                for i in range(1, f):
                    nxt.append((prev[i - 1] + top * base[i]) % self.pR)
                red.append(tuple(nxt))
            self._red = red
        else:
            self._red = []
        self._frob_powers = None  # images of y under sigma^m, m = 0..f-1

    def add(self, a, b):
        m = self.pR
        return tuple((x + y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.pR
        return tuple((-x) % m for x in a)

    def mul(self, a, b):
        f, m = self.f, self.pR
        if f == 1:
            return ((a[0] * b[0]) % m,)
        conv = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    conv[i + j] += x * y
        out = [c % m for c in conv[:f]]
        for k in range(f - 1):
            c = conv[f + k] % m
            if c:
                red = self._red[k]
                for i in range(f):
                    out[i] = (out[i] + c * red[i]) % m
        return tuple(out)

    def from_int(self, n):
        return (n % self.pR,) + (0,) * (self.f - 1)

    def digits(self, a):
        p = self.p
        c = list(a)
        out = []
        for _ in range(self.R):
            low = [x % p for x in c]
            out.append(self.field._encode(low))
            c = [(x - l) // p for x, l in zip(c, low)]
        return tuple(out)

    def from_digits(self, ds):
        p = self.p
        c = [0] * self.f
        for d in reversed(ds[: self.R]):
            dec = self.field._decode(d)
            c = [x * p + y for x, y in zip(c, dec)]
        m = self.pR
        return tuple(x % m for x in c)

    def divide_by_uniformizer(self, a):
        if any(x % self.p for x in a):
            raise ZeroDivisionError("element has valuation 0")
        return tuple(x // self.p for x in a)

    # -- Frobenius lift (Hensel) ---------------------------------------

    def _poly_eval(self, coeffs, z):
        """Evaluate an integer-coefficient polynomial at ring element z."""
        out = self.zero
        for c in reversed(coeffs):
            out = self.add(self.mul(out, z), self.from_int(c))
        return out

    def _frobenius_generator_image(self):
        """The root of h congruent to y^p mod p (unique by Hensel)."""
        y = (0, 1) + (0,) * (self.f - 2)
        z = self.mul_pow(y, self.p)
        h = list(self.field.modulus)
        hprime = [(i * h[i]) for i in range(1, len(h))]
        for _ in range(self.R.bit_length() + 2):
            val = self._poly_eval(h, z)
            if val == self.zero:
                return z
            corr = self.mul(val, self.inverse(self._poly_eval(hprime, z)))
            z = self.sub(z, corr)
        if self._poly_eval(h, z) != self.zero:
            raise InternalCheckFailed("Hensel lift of Frobenius did not converge")
        return z

    def mul_pow(self, a, k):
        out = self.one
        while k:
            if k & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            k >>= 1
        return out

    def _frob_images(self):
        if self._frob_powers is None:
            if self.f == 1:
                self._frob_powers = [self.one]
            else:
                y = (0, 1) + (0,) * (self.f - 2)
                z1 = self._frobenius_generator_image()
                imgs = [y]
                cur = y
                for _ in range(self.f - 1):
                    # apply sigma once: evaluate the coefficient polynomial at z1
                    cur = self._apply_at(cur, z1)
                    imgs.append(cur)
                self._frob_powers = imgs
        return self._frob_powers

    def _apply_at(self, a, z):
        """sigma-style substitution: a = sum c_i y^i maps to sum c_i z^i."""
        out = self.zero
        zp = self.one
        for c in a:
            if c:
                out = self.add(out, tuple((c * x) % self.pR for x in zp))
            zp = self.mul(zp, z)
        return out

    def frobenius_pow(self, a, m):
        m %= self.f
        if m == 0:
            return a
        z = self._frob_images()[m]
        return self._apply_at(a, z)


class EisensteinRing(ResidueRing):
    """Totally ramified presentation: sum_{i<e} c_i X^i over a Galois ring.

    Coefficient i is canonical modulo p^{M_i}; products are computed at the
    top precision M_0 and re-truncated, which is exact because the error
    terms all have valuation >= R.
    """

    kind = "EISENSTEIN"

    def __init__(self, p, f, e, R, coeff_specs, descriptor=None):
        super().__init__(R, p, residue_field(p, f), descriptor)
        self.f = f
        self.e = e
        self.M = tuple(max(0, -(-(R - i) // e)) for i in range(e))
        self.gr = UnramifiedRing(p, f, self.M[0])
        self._mods = tuple(p**m for m in self.M)
        self.coeffs = tuple(self._materialize(c) for c in coeff_specs)
        v0 = _coefficient_valuation(coeff_specs[0], p)
        if v0 != 1:
            raise InvalidDescriptor(["a_0 must have valuation exactly 1"])
        for i in range(1, e):
            vi = _coefficient_valuation(coeff_specs[i], p)
            if vi is not None and vi < 1:
                raise InvalidDescriptor([f"a_{i} must have valuation >= 1"])
        self._frob_safe = all(isinstance(c, int) for c in coeff_specs)
        self.zero = ((0,) * f,) * e
        self.one = self._reduce((self.gr.one,) + (self.gr.zero,) * (e - 1))
        # unit part of a_0 from the exact data: truncation can lose it
        # (at depth R = e the coefficient a_0 itself reduces to 0)
        a0 = coeff_specs[0]
        if isinstance(a0, int):
            u0 = self.gr.from_int(a0 // p)
        else:
            ds = tuple(a0[1 : 1 + self.gr.R])
            u0 = self.gr.from_digits(ds + (0,) * (self.gr.R - len(ds)))
        self._u0inv = self.gr.inverse(u0)
        # X^(e+k) in the power basis, k = 0..e-2
        base = tuple(self.gr.neg(c) for c in self.coeffs)
        red = [base]
        for _ in range(e - 2):
            prev = red[-1]
            top = prev[-1]
            nxt = [self.gr.mul(top, base[0])]
            for i in range(1, e):
                nxt.append(self.gr.add(prev[i - 1], self.gr.mul(top, base[i])))
            red.append(tuple(nxt))
        self._red = red
        self.key = ("EISENSTEIN", p, f, e, R, self.coeffs)

    def _materialize(self, spec):
        if isinstance(spec, int):
            return self.gr.from_int(spec)
        ds = tuple(spec[: self.gr.R]) + (0,) * max(0, self.gr.R - len(spec))
        return self.gr.from_digits(ds)

    def _reduce(self, vec):
        return tuple(
            tuple(c % m for c in coeff) for coeff, m in zip(vec, self._mods)
        )

    def add(self, a, b):
        gr = self.gr
        return self._reduce(tuple(gr.add(x, y) for x, y in zip(a, b)))

    def neg(self, a):
        gr = self.gr
        return self._reduce(tuple(gr.neg(x) for x in a))

    def mul(self, a, b):
        gr, e = self.gr, self.e
        conv = [gr.zero] * (2 * e - 1)
        for i, x in enumerate(a):
            if x != gr.zero:
                for j, y in enumerate(b):
                    if y != gr.zero:
                        conv[i + j] = gr.add(conv[i + j], gr.mul(x, y))
        out = list(conv[:e])
        for k in range(e - 1):
            c = conv[e + k]
            if c != gr.zero:
                red = self._red[k]
                for i in range(e):
                    out[i] = gr.add(out[i], gr.mul(c, red[i]))
        return self._reduce(tuple(out))

    def digits(self, a):
        out = [0] * self.R
        for i, coeff in enumerate(a):
            ds = self.gr.digits(coeff)
            for j in range(self.M[i]):
                out[i + self.e * j] = ds[j]
        return tuple(out)

    def from_digits(self, ds):
        coeffs = []
        for i in range(self.e):
            cd = tuple(ds[i + self.e * j] for j in range(self.M[i]))
            cd += (0,) * (self.gr.R - len(cd))
            coeffs.append(self.gr.from_digits(cd))
        return self._reduce(tuple(coeffs))

    def divide_by_uniformizer(self, a):
        gr = self.gr
        if gr.digits(a[0])[0] != 0:
            raise ZeroDivisionError("element has valuation 0")
        b_top = gr.neg(gr.mul(self._u0inv, gr.divide_by_uniformizer(a[0])))
        out = [gr.add(a[i], gr.mul(self.coeffs[i], b_top)) for i in range(1, self.e)]
        out.append(b_top)
        return self._reduce(tuple(out))

    def frobenius_pow(self, a, m):
        if not (self._frob_safe or self.f == 1):
            raise InvalidDescriptor(
                ["Frobenius on an Eisenstein ring needs integer coefficient data"]
            )
        gr = self.gr
        return self._reduce(tuple(gr.frobenius_pow(c, m) for c in a))


class SkewRing(ResidueRing):
    """Non-commutative chain ring: sum_{i<delta} x^i a_i over C with the
    Frobenius twist a x = x sigma(a), sigma = (absolute Frobenius)^(f*r),
    and x^delta = uniformizer of the center."""

    kind = "SKEW"

    def __init__(self, p, f, e, delta, r, R, inner, descriptor=None):
        super().__init__(R, p, residue_field(p, f * delta), descriptor)
        self.f_center = f
        self.e = e
        self.delta = delta
        self.r = r
        self.inner = inner  # commutative ring at precision ceil(R/delta)
        self.M = tuple(max(0, -(-(R - i) // delta)) for i in range(delta))
        self.zero = (inner.zero,) * delta
        self.one = self._trunc((inner.one,) + (inner.zero,) * (delta - 1))
        self._pi_inner = inner.uniformizer()
        self._twist_cache = [dict() for _ in range(delta)]
        self.key = ("SKEW", p, f, e if e != INFINITY else "inf", delta, r, R, inner.key)

    def _trunc(self, vec):
        inner, M = self.inner, self.M
        return tuple(inner.truncate(a, m) for a, m in zip(vec, M))

    def _twist(self, a, j):
        j %= self.delta
        if j == 0:
            return a
        cache = self._twist_cache[j]
        if a not in cache:
            m = (self.f_center * self.r * j) % (self.f_center * self.delta)
            cache[a] = self.inner.frobenius_pow(a, m)
        return cache[a]

    def add(self, a, b):
        inner = self.inner
        return self._trunc(tuple(inner.add(x, y) for x, y in zip(a, b)))

    def neg(self, a):
        inner = self.inner
        return self._trunc(tuple(inner.neg(x) for x in a))

    def mul(self, a, b):
        inner, d = self.inner, self.delta
        acc = [inner.zero] * d
        for i, ai in enumerate(a):
            if ai == inner.zero:
                continue
            for j, bj in enumerate(b):
                if bj == inner.zero:
                    continue
                term = inner.mul(self._twist(ai, j), bj)
                t = i + j
                if t >= d:
                    t -= d
                    term = inner.mul(term, self._pi_inner)
                acc[t] = inner.add(acc[t], term)
        return self._trunc(tuple(acc))

    def digits(self, a):
        out = [0] * self.R
        for i, coeff in enumerate(a):
            ds = self.inner.digits(coeff)
            for j in range(self.M[i]):
                out[i + self.delta * j] = ds[j]
        return tuple(out)

    def from_digits(self, ds):
        coeffs = []
        for i in range(self.delta):
            cd = tuple(ds[i + self.delta * j] for j in range(self.M[i]))
            cd += (0,) * (self.inner.R - len(cd))
            coeffs.append(self.inner.from_digits(cd))
        return self._trunc(tuple(coeffs))

    def divide_by_uniformizer(self, a):
        inner = self.inner
        if inner.digits(a[0])[0] != 0:
            raise ZeroDivisionError("element has valuation 0")
        out = list(a[1:]) + [inner.divide_by_uniformizer(a[0])]
        return self._trunc(tuple(out))


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _default_eisenstein(p, e):
    return (-p,) + (0,) * (e - 1)  # X^e - p


def _digits_to_int(spec, p):
    if isinstance(spec, int):
        return spec
    return sum(d * p**j for j, d in enumerate(spec))


def build_residue_ring(desc, R, descriptor_check=True):
    """Construct O_R for a validated descriptor.  R >= 1."""
    if descriptor_check:
        problems = validate_descriptor(desc)
        if problems:
            raise InvalidDescriptor(problems)
    if not (isinstance(R, int) and R >= 1):
        raise InvalidDescriptor([f"R must be a positive integer: {R}"])
    p, f, e, delta, r = desc.p, desc.f, desc.e, desc.delta, desc.r

    def commutative(fdeg, depth):
        if e == INFINITY:
            return EqualCharRing(p, fdeg, depth, descriptor=desc)
        if e == 1:
            return UnramifiedRing(p, fdeg, depth, descriptor=desc)
        coeffs = desc.eisenstein or _default_eisenstein(p, e)
        if fdeg != f:
            # coefficients live in the degree-f subring; only exact integers
            # (or base-p digit data, convertible) embed into degree fdeg
            coeffs = tuple(
                c if isinstance(c, int) else _digits_to_int(c, p) for c in coeffs
            )
        return EisensteinRing(p, fdeg, e, depth, coeffs, descriptor=desc)

    if delta == 1:
        return commutative(f, R)
    if f > 1 and desc.eisenstein and any(isinstance(c, tuple) for c in desc.eisenstein):
        raise InvalidDescriptor(
            ["unsupported: digit-vector eisenstein data with delta>1 and f>1"]
        )
    inner = commutative(f * delta, -(-R // delta))
    return SkewRing(p, f, e, delta, r, R, inner, descriptor=desc)


# ---------------------------------------------------------------------------
# Frobenius lift as a public operation (unramified rings)
# ---------------------------------------------------------------------------


@dataclass
class RingAutomorphism:
    ring: ResidueRing
    generator_image: tuple
    order: int

    def __call__(self, a):
        return self.ring.frobenius_pow(a, 1)

    def power(self, m):
        return lambda a: self.ring.frobenius_pow(a, m)


def frobenius_lift(ring):
    """The Hensel-lifted automorphism inducing x -> x^p on the residue field.

    Only meaningful for the Galois-ring case; its order is f.
    """
    if ring.kind != "UNRAMIFIED":
        raise InvalidDescriptor([f"frobenius_lift needs an UNRAMIFIED ring, got {ring.kind}"])
    if ring.f == 1:
        return RingAutomorphism(ring, ring.one, 1)
    y = (0, 1) + (0,) * (ring.f - 2)
    img = ring._frob_images()[1]
    cur, order = img, 1
    while cur != y:
        cur = ring.frobenius_pow(cur, 1)
        order += 1
        if order > ring.f:
            raise InternalCheckFailed("Frobenius order exceeded f")
    return RingAutomorphism(ring, img, order)


# ---------------------------------------------------------------------------
# isomorphism testing
# ---------------------------------------------------------------------------


@dataclass
class IsoResult:
    isomorphic: bool
    mapping: dict | None = None
    reason: str | None = None
    invariant: tuple | None = None  # (name, value_a, value_b) on mismatch

    def __bool__(self):
        return self.isomorphic


def _mismatch(name, va, vb):
    return IsoResult(False, None, f"{name}: {va} vs {vb}", (name, va, vb))


def _profile(ring, a):
    return (ring.valuation(a), ring.additive_order(a) if a != ring.zero else 1, ring.mult_order(a))


def _generator_sequence(ring):
    """Deterministic generating set: for q > 2 a Teichmueller-style unit of
    multiplicative order q-1 with primitive residue, plus the uniformizer.
    Induction on valuation shows these generate the whole chain ring."""
    gens = []
    q = ring.q_residue
    if q > 2:
        for i in range(ring.size):
            a = ring.element_at(i)
            d0 = ring.digits(a)[0]
            if d0 and ring.field.mult_order(d0) == q - 1 and ring.mult_order(a) == q - 1:
                gens.append(a)
                break
        else:
            raise InternalCheckFailed("no Teichmueller-style generator found")
    gens.append(ring.uniformizer())
    return gens


def _generation_recipes(ring, gens):
    """Express every ring element from {0, 1, gens} by recorded add/mul steps."""
    known = {ring.zero: ("zero",), ring.one: ("one",)}
    order = [ring.zero, ring.one]
    for k, g in enumerate(gens):
        if g not in known:
            known[g] = ("gen", k)
            order.append(g)
    frontier = list(order)
    while frontier and len(known) < ring.size:
        fresh = []
        for a in frontier:
            for b in order:
                for res, recipe in (
                    (ring.add(a, b), ("add", a, b)),
                    (ring.mul(a, b), ("mul", a, b)),
                    (ring.mul(b, a), ("mul", b, a)),
                ):
                    if res not in known:
                        known[res] = recipe
                        fresh.append(res)
        order.extend(fresh)
        frontier = fresh
    if len(known) != ring.size:
        raise InternalCheckFailed("generators failed to generate the ring")
    return [(el, known[el]) for el in order]


def _evaluate_recipes(recipes, B, gen_images):
    m = {}
    for el, recipe in recipes:
        op = recipe[0]
        if op == "zero":
            m[el] = B.zero
        elif op == "one":
            m[el] = B.one
        elif op == "gen":
            m[el] = gen_images[recipe[1]]
        elif op == "add":
            m[el] = B.add(m[recipe[1]], m[recipe[2]])
        else:
            m[el] = B.mul(m[recipe[1]], m[recipe[2]])
    return m


def _verify_hom(A, B, m, elements):
    for a in elements:
        for b in elements:
            if m[A.add(a, b)] != B.add(m[a], m[b]):
                return False
            if m[A.mul(a, b)] != B.mul(m[a], m[b]):
                return False
    return True


def rings_isomorphic(A, B, max_size=4096):
    """Explicit isomorphism or a certified distinguishing invariant.

    The search is complete: any isomorphism must send the chosen generators
    to elements with identical (valuation, additive order, multiplicative
    order) profiles, and all such images are tried.  An exhausted search is
    therefore a proof of non-isomorphism.
    """
    if A.size > max_size or B.size > max_size:
        raise BudgetExceeded(
            f"isomorphism search budget {max_size} exceeded ({A.size}, {B.size})"
        )
    if A.size != B.size:
        return _mismatch("size", A.size, B.size)
    if A.q_residue != B.q_residue:
        return _mismatch("residue field size", A.q_residue, B.q_residue)
    if A.R != B.R:
        return _mismatch("nilpotency index", A.R, B.R)
    ord_a = A.additive_order(A.one)
    ord_b = B.additive_order(B.one)
    if ord_a != ord_b:
        return _mismatch("additive order of 1", ord_a, ord_b)
    va = A.valuation(_int_times_one(A, A.p))
    vb = B.valuation(_int_times_one(B, B.p))
    if va != vb:
        return _mismatch("valuation of p", va, vb)

    elems_a = A.enumerate_elements(budget=max_size)
    elems_b = B.enumerate_elements(budget=max_size)

    if A is B or A.key == B.key:
        return IsoResult(True, {a: a for a in elems_a}, "structural identity")

    hist_a = sorted(_profile(A, a) for a in elems_a)
    hist_b = sorted(_profile(B, b) for b in elems_b)
    if hist_a != hist_b:
        return _mismatch("element profile histogram", "A-histogram", "B-histogram")

    gens = _generator_sequence(A)
    recipes = _generation_recipes(A, gens)
    cand_lists = []
    for g in gens:
        prof = _profile(A, g)
        cands = [b for b in elems_b if _profile(B, b) == prof]
        if g == gens[0] and A.q_residue > 2:
            q = A.q_residue
            cands = [
                b for b in cands if B.field.mult_order(B.digits(b)[0]) == q - 1
            ]
        cand_lists.append(cands)

    for images in itertools.product(*cand_lists):
        m = _evaluate_recipes(recipes, B, images)
        if len(set(m.values())) != A.size:
            continue
        if _verify_hom(A, B, m, elems_a):
            return IsoResult(True, m, "generator-image search")
    return IsoResult(
        False,
        None,
        "no generator assignment extends to an isomorphism (exhaustive search)",
        ("generator search", "exhausted", "exhausted"),
    )


def _int_times_one(ring, n):
    out = ring.zero
    for _ in range(n):
        out = ring.add(out, ring.one)
    return out


# ---------------------------------------------------------------------------
# the structural collapse O_e = F_q[t]/(t^e) for totally ramified data
# ---------------------------------------------------------------------------


@dataclass
class CollapseWitness:
    source: ResidueRing  # O_e of the descriptor
    target: ResidueRing  # F_q[t]/(t^e)
    mapping: dict


def equal_char_collapse_witness(desc):
    """Explicit isomorphism O_e -> F_q[t]/(t^e), verified elementwise.

    At depth e every Eisenstein coefficient is truncated to the residue
    field and both p and X^e vanish, so the digit-preserving map (X -> t,
    coefficients through the residue field) is a ring isomorphism.  The map
    is checked on all pairs before being returned; failure raises instead of
    returning silently wrong data.
    """
    problems = validate_descriptor(desc)
    if problems:
        raise InvalidDescriptor(problems)
    if desc.delta != 1 or desc.e == INFINITY:
        raise InvalidDescriptor(["collapse witness needs a commutative finite-e descriptor"])
    A = build_residue_ring(desc, desc.e)
    B = EqualCharRing(desc.p, desc.f, desc.e)
    mapping = {}
    for i in range(A.size):
        a = A.element_at(i)
        mapping[a] = B.from_digits(A.digits(a))
    elems = list(mapping)
    if len(set(mapping.values())) != A.size or not _verify_hom(A, B, mapping, elems):
        raise InternalCheckFailed("collapse witness failed elementwise verification")
    return CollapseWitness(A, B, mapping)


# ---------------------------------------------------------------------------
# table export
# ---------------------------------------------------------------------------


def table_csv(ring, which="mul", max_elements=64):
    """Addition/multiplication table as CSV; rows/columns in enumeration order."""
    if ring.size > max_elements:
        raise BudgetExceeded(f"table export limited to {max_elements} elements")
    op = ring.mul if which == "mul" else ring.add
    elems = ring.enumerate_elements()
    labels = [ring.element_string(a) for a in elems]
    lines = ["," + ",".join(labels)]
    for a, la in zip(elems, labels):
        row = [ring.element_string(op(a, b)) for b in elems]
        lines.append(la + "," + ",".join(row))
    return "\n".join(lines) + "\n"
