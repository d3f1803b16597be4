"""Classification data for non-archimedean local fields and the closeness radius.

A field is recorded by its type ``(p, f, e, delta, r)``:

  p      residual characteristic (prime),
  f      absolute residual degree of the center,
  e      absolute ramification index of the center (positive int, or INFINITY
         for positive characteristic),
  delta  residual degree of the field over its center (1 = commutative),
  r      Hasse invariant, a generator of Z/delta stored reduced mod delta.

A finite-e descriptor may carry Eisenstein data: the e coefficients
``a_0 .. a_{e-1}`` of the monic polynomial ``X^e + a_{e-1} X^{e-1} + ... + a_0``
presenting the totally ramified part.  Coefficients are exact values in the
unramified coefficient ring: either plain integers, or little-endian digit
vectors (strings like ``"0.1"``) whose entries are residue-field digits in
``[0, p^f)``.  When the data is omitted ``X^e - p`` is used.

Two fields are R-close when their depth-R residue rings are isomorphic;
``closeness`` computes the largest such R up to a cap.  The metric e^{-R}
of the underlying topology is realized only through this semi-decidable
radius; the cap keeps every call inside an explicit brute-force budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from btlab.errors import BudgetExceeded, InvalidDescriptor

INFINITY = math.inf

DEFAULT_ISO_BUDGET = 4096  # max ring size handed to the isomorphism search


def is_prime(n):
    if not isinstance(n, int) or n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldDescriptor:
    p: int
    f: int
    e: int | float
    delta: int = 1
    r: int = 0
    eisenstein: tuple | None = None  # entries: int, or tuple[int, ...] of digits

    @property
    def residue_size(self):
        """Size p^(f*delta) of the residue field of the whole field."""
        return self.p ** (self.f * self.delta)

    @property
    def is_commutative(self):
        return self.delta == 1

    @property
    def has_positive_char(self):
        return self.e == INFINITY

    def to_dict(self):
        d = {
            "p": self.p,
            "f": self.f,
            "e": "inf" if self.e == INFINITY else self.e,
            "delta": self.delta,
            "r": self.r,
        }
        if self.eisenstein is not None:
            d["eisenstein"] = [
                c if isinstance(c, int) else ".".join(str(x) for x in c)
                for c in self.eisenstein
            ]
        return d

    def normal_form_key(self):
        """Canonical JSON string; used for caching and structural equality."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def __str__(self):
        e = "inf" if self.e == INFINITY else self.e
        return f"({self.p},{self.f},{e},{self.delta},{self.r})"


def _parse_coefficient(entry, where):
    """Accept an int, or a dotted little-endian digit string like '0.1'."""
    if isinstance(entry, bool):
        raise InvalidDescriptor([f"{where}: boolean is not a coefficient"])
    if isinstance(entry, int):
        return entry
    if isinstance(entry, str):
        parts = entry.split(".") if entry else []
        try:
            digits = tuple(int(x) for x in parts)
        except ValueError:
            raise InvalidDescriptor([f"{where}: bad digit string {entry!r}"]) from None
        if any(d < 0 for d in digits):
            raise InvalidDescriptor([f"{where}: negative digit in {entry!r}"])
        return digits
    raise InvalidDescriptor([f"{where}: coefficient must be int or digit string"])


def _coefficient_valuation(c, p):
    """p-adic valuation of an exact coefficient; None means +infinity (c = 0)."""
    if isinstance(c, int):
        if c == 0:
            return None
        n, v = abs(c), 0
        while n % p == 0:
            n //= p
            v += 1
        return v
    for j, d in enumerate(c):
        if d != 0:
            return j
    return None


def validate_descriptor(desc):
    """Return the list of invariant violations (empty iff valid).

    Accepts exactly the descriptors build_residue_ring accepts.
    """
    problems = []
    p, f, e, delta, r = desc.p, desc.f, desc.e, desc.delta, desc.r
    if not is_prime(p):
        problems.append(f"p not prime: {p}")
    if not (isinstance(f, int) and f >= 1):
        problems.append(f"f must be a positive integer: {f}")
    if not (isinstance(delta, int) and delta >= 1):
        problems.append(f"delta must be a positive integer: {delta}")
    if e != INFINITY and not (isinstance(e, int) and e >= 1):
        problems.append(f"e must be a positive integer or inf: {e}")
    if isinstance(delta, int) and delta >= 1:
        if not isinstance(r, int) or not (0 <= r < delta):
            problems.append(f"r must be reduced mod delta (0 <= r < {delta}): r={r}")
        elif math.gcd(r, delta) != 1:
            problems.append(f"r must generate Z/{delta}Z: r={r}")

    eis = desc.eisenstein
    if eis is not None:
        if e == INFINITY:
            problems.append("eisenstein data requires finite e")
            return problems
        if not is_prime(p) or not isinstance(f, int) or f < 1 or not isinstance(e, int):
            return problems  # cannot check coefficients against broken base data
        if len(eis) != e:
            problems.append(f"eisenstein must list e={e} coefficients, got {len(eis)}")
            return problems
        q = p**f
        for i, c in enumerate(eis):
            if isinstance(c, tuple) and any(not (0 <= d < q) for d in c):
                problems.append(f"a_{i}: digit out of range [0,{q})")
                return problems
        v0 = _coefficient_valuation(eis[0], p)
        if v0 != 1:
            problems.append("a_0 must have valuation exactly 1")
        for i in range(1, e):
            vi = _coefficient_valuation(eis[i], p)
            if vi is not None and vi < 1:
                problems.append(f"a_{i} must have valuation >= 1")
        if delta > 1 and e > 1 and f > 1 and any(isinstance(c, tuple) for c in eis):
            # would need an embedding of the degree-f coefficient ring into the
            # degree-(f*delta) one; only exact-integer data is supported there
            problems.append(
                "unsupported: digit-vector eisenstein data with delta>1 and f>1 "
                "(supply integer coefficients)"
            )
    return problems


def _require_valid(desc):
    problems = validate_descriptor(desc)
    if problems:
        raise InvalidDescriptor(problems)
    return desc


def parse_descriptor(source):
    """Parse a descriptor document (JSON text, dict, or file-like content).

    Defaulting rule: finite e without eisenstein data means ``X^e - p``.
    (The default is applied at ring-build time, not stored.)
    """
    if isinstance(source, str):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as exc:
            raise InvalidDescriptor([f"malformed document: {exc}"]) from None
    elif isinstance(source, dict):
        data = source
    else:
        raise InvalidDescriptor(["descriptor must be a JSON object"])
    if not isinstance(data, dict):
        raise InvalidDescriptor(["descriptor must be a JSON object"])

    unknown = set(data) - {"p", "f", "e", "delta", "r", "eisenstein"}
    if unknown:
        raise InvalidDescriptor([f"unknown keys: {sorted(unknown)}"])
    missing = {"p", "f", "e"} - set(data)
    if missing:
        raise InvalidDescriptor([f"missing keys: {sorted(missing)}"])

    e = data["e"]
    if isinstance(e, str):
        if e.lower() in ("inf", "infinity"):
            e = INFINITY
        else:
            raise InvalidDescriptor([f"e must be an integer or 'inf': {e!r}"])
    eis = None
    if data.get("eisenstein") is not None:
        raw = data["eisenstein"]
        if not isinstance(raw, list):
            raise InvalidDescriptor(["eisenstein must be an array"])
        eis = tuple(_parse_coefficient(c, f"a_{i}") for i, c in enumerate(raw))

    desc = FieldDescriptor(
        p=data["p"],
        f=data["f"],
        e=e,
        delta=data.get("delta", 1),
        r=data.get("r", 0),
        eisenstein=eis,
    )
    return _require_valid(desc)


def positive_char_limit(desc):
    """The unique positive-characteristic field the finite-e family converges to.

    (p, f, e, delta, r) with finite e maps to (p, f, INFINITY, delta, r).
    """
    _require_valid(desc)
    if desc.e == INFINITY:
        raise InvalidDescriptor(["positive_char_limit requires finite e"])
    return FieldDescriptor(desc.p, desc.f, INFINITY, desc.delta, desc.r)


def closeness(a, b, r_max, max_ring_size=DEFAULT_ISO_BUDGET):
    """Largest R <= r_max such that the depth-R residue rings are isomorphic.

    Returns 0 when already the residue fields differ.  Monotone by
    construction: an isomorphism at depth R restricts to every depth below,
    so the scan stops at the first failure.  Raises BudgetExceeded when the
    rings at some requested depth outgrow max_ring_size; lower r_max then.
    """
    from btlab.rings import build_residue_ring, rings_isomorphic

    _require_valid(a)
    _require_valid(b)
    if not (isinstance(r_max, int) and r_max >= 1):
        raise InvalidDescriptor([f"r_max must be a positive integer: {r_max}"])
    if a.residue_size != b.residue_size:
        return 0
    best = 0
    for depth in range(1, r_max + 1):
        size = a.residue_size**depth
        if size > max_ring_size:
            raise BudgetExceeded(
                f"rings of size {size} exceed the isomorphism budget "
                f"{max_ring_size}; lower r_max (reached R={best})"
            )
        ra = build_residue_ring(a, depth)
        rb = build_residue_ring(b, depth)
        if not rings_isomorphic(ra, rb, max_size=max_ring_size).isomorphic:
            break
        best = depth
    return best
