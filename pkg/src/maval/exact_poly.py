"""Sparse multivariate polynomials with exact Gaussian-rational coefficients.

Monomials are dense exponent tuples over a :class:`VariableRegistry`.  The
registry order *is* the variable order: the first name is the largest
variable, and monomials compare lexicographically as plain tuples.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product as _cartesian
from numbers import Rational

__all__ = [
    "Gaussian",
    "PolynomialError",
    "RegistryMismatchError",
    "UnknownVariableError",
    "VariableRegistry",
    "Polynomial",
    "as_coeff",
    "coeff_str",
    "parse_coeff",
    "parse_polynomial",
    "to_complex",
]


class PolynomialError(ValueError):
    """Base class for structured polynomial errors."""


class RegistryMismatchError(PolynomialError):
    def __init__(self, left, right, operation="operation"):
        self.left = left
        self.right = right
        self.operation = operation
        super().__init__(
            f"{operation}: registry mismatch {list(left.names)} vs {list(right.names)}"
        )


class UnknownVariableError(PolynomialError):
    def __init__(self, name, registry):
        self.name = name
        self.registry = registry
        super().__init__(f"unknown variable {name!r} (registry {list(registry.names)})")


# ---------------------------------------------------------------------------
# coefficients


class Gaussian:
    """Gaussian rational ``re + im*i`` with a nonzero imaginary part.

    Arithmetic collapses back to :class:`~fractions.Fraction` whenever the
    imaginary part cancels, so real data never pays for the complex path.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def make(re, im):
        if im == 0:
            return Fraction(re)
        return Gaussian(re, im)

    @staticmethod
    def _split(x):
        if isinstance(x, Gaussian):
            return x.re, x.im
        if isinstance(x, (int, Fraction)):
            return x, 0
        if isinstance(x, Rational):
            return Fraction(x), 0
        return None

    def __add__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        return Gaussian.make(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        return Gaussian.make(self.re - o[0], self.im - o[1])

    def __rsub__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        return Gaussian.make(o[0] - self.re, o[1] - self.im)

    def __mul__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        a, b = o
        return Gaussian.make(self.re * a - self.im * b, self.re * b + self.im * a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        a, b = o
        den = Fraction(a * a + b * b)
        if den == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        return Gaussian.make((self.re * a + self.im * b) / den, (self.im * a - self.re * b) / den)

    def __rtruediv__(self, other):
        o = self._split(other)
        if o is None:
            return NotImplemented
        return Gaussian.make(*o) / self if o[1] else Gaussian(o[0], 0) / self

    def __neg__(self):
        return Gaussian(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        out = Fraction(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        o = self._split(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o[0] and self.im == o[1]

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def conjugate(self):
        return Gaussian(self.re, -self.im)

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        return coeff_str(self)


_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_coeff(text: str):
    """Parse ``"p"``, ``"p/q"`` or ``"(a,b)"`` into an exact coefficient."""
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        parts = text[1:-1].split(",")
        if len(parts) != 2:
            raise PolynomialError(f"bad Gaussian literal {text!r}")
        return Gaussian.make(parse_coeff(parts[0]), parse_coeff(parts[1]))
    m = _RAT_RE.match(text)
    if not m:
        raise PolynomialError(f"bad rational literal {text!r}")
    return Fraction(int(m.group(1)), int(m.group(2) or 1))


def as_coeff(x):
    """Coerce ints, fractions, strings, exact Gaussians (or floats, exactly) to a coefficient."""
    if isinstance(x, Gaussian):
        return x if x.im != 0 else x.re
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_coeff(x)
    if isinstance(x, complex):
        return Gaussian.make(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, (float, Rational)):
        return Fraction(x)
    try:  # numpy scalars
        return Fraction(x.item()) if hasattr(x, "item") else Fraction(x)
    except Exception as exc:  # pragma: no cover - defensive
        raise PolynomialError(f"cannot use {x!r} as an exact coefficient") from exc


def _rat_str(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coeff_str(c) -> str:
    if isinstance(c, Gaussian):
        return f"({_rat_str(c.re)},{_rat_str(c.im)})"
    return _rat_str(c)


def to_complex(c) -> complex:
    return complex(c) if isinstance(c, Gaussian) else complex(float(c), 0.0)


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, Gaussian)) and not isinstance(x, bool)


# ---------------------------------------------------------------------------
# registry


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class VariableRegistry:
    """Ordered, immutable list of variable names (first name = largest)."""

    __slots__ = ("names", "tags", "_index", "_hash")

    def __init__(self, names, tags=None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise PolynomialError(f"duplicate variable names in {names}")
        for nm in names:
            if not _NAME_RE.match(nm):
                raise PolynomialError(f"illegal variable name {nm!r}")
        if tags is None:
            tags = tuple(_default_tag(nm) for nm in names)
        tags = tuple(tags)
        if len(tags) != len(names):
            raise PolynomialError("tags and names differ in length")
        self.names = names
        self.tags = tags
        self._index = {nm: i for i, nm in enumerate(names)}
        self._hash = hash(names)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(name, self) from None

    def __eq__(self, other):
        return isinstance(other, VariableRegistry) and self.names == other.names

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VariableRegistry({list(self.names)})"

    def extend(self, more):
        return VariableRegistry(self.names + tuple(more), self.tags + tuple(_default_tag(m) for m in more))


def _default_tag(name):
    parts = name.split("_")
    if len(parts) == 3 and parts[1].isdigit() and parts[2].isdigit():
        return (int(parts[1]), int(parts[2]))
    if len(parts) == 2 and parts[1].isdigit():
        return int(parts[1])
    return None


def _canonical_key(name):
    parts = name.split("_")
    nums = tuple(int(p) for p in parts[1:] if p.isdigit())
    head = parts[0]
    if head == "w" and len(nums) == 2:
        return (0, nums[1], nums[0])
    if head == "z":
        return (1,) + nums
    return (2, head) + nums


# ---------------------------------------------------------------------------
# polynomials


def _add_into(acc: dict, mono, c):
    v = acc.get(mono)
    if v is None:
        acc[mono] = c
    else:
        v = v + c
        if v == 0:
            del acc[mono]
        else:
            acc[mono] = v


class Polynomial:
    """Immutable sparse polynomial ``{exponent tuple: coefficient}``."""

    __slots__ = ("registry", "terms", "_hash")

    def __init__(self, registry: VariableRegistry, terms=None):
        self.registry = registry
        clean = {}
        if terms:
            n = len(registry)
            for mono, c in terms.items():
                mono = tuple(int(e) for e in mono)
                if len(mono) != n or any(e < 0 for e in mono):
                    raise PolynomialError(f"bad exponent vector {mono} for {n} variables")
                c = as_coeff(c)
                if c != 0:
                    _add_into(clean, mono, c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, registry, terms):
        obj = cls.__new__(cls)
        obj.registry = registry
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, registry):
        return cls._raw(registry, {})

    @classmethod
    def constant(cls, registry, c):
        c = as_coeff(c)
        return cls._raw(registry, {(0,) * len(registry): c} if c != 0 else {})

    @classmethod
    def one(cls, registry):
        return cls.constant(registry, 1)

    @classmethod
    def var(cls, registry, name, power=1):
        mono = [0] * len(registry)
        mono[registry.index(name)] = power
        return cls._raw(registry, {tuple(mono): Fraction(1)})

    @classmethod
    def monomial(cls, registry, mono, c=1):
        return cls(registry, {tuple(mono): c})

    # basic protocol -------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.registry == other.registry and self.terms == other.terms
        if _is_exact(other) or isinstance(other, Rational):
            return self.terms == Polynomial.constant(self.registry, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.registry, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other, op):
        if isinstance(other, Polynomial):
            if other.registry != self.registry:
                raise RegistryMismatchError(self.registry, other.registry, op)
            return other
        return Polynomial.constant(self.registry, other)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._check(other, "add")
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _add_into(acc, m, c)
        return Polynomial._raw(self.registry, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.registry, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other, "sub"))

    def __rsub__(self, other):
        return self._check(other, "sub") - self

    def scale(self, c):
        c = as_coeff(c)
        if c == 0:
            return Polynomial.zero(self.registry)
        return Polynomial._raw(self.registry, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except PolynomialError:
                return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        c = as_coeff(c)
        return Polynomial._raw(self.registry, {m: v / c for m, v in self.terms.items()})

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise PolynomialError("only nonnegative integer powers")
        out = Polynomial.one(self.registry)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def mul_monomial(self, mono, c=1):
        """Multiply by ``c * x^mono`` (fast path for division loops)."""
        c = as_coeff(c)
        if c == 0:
            return Polynomial.zero(self.registry)
        return Polynomial._raw(
            self.registry,
            {tuple(a + b for a, b in zip(m, mono)): v * c for m, v in self.terms.items()},
        )

    # inspection -----------------------------------------------------------
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def degree_in(self, indices) -> int:
        return max((sum(m[i] for i in indices) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def monomials(self):
        """Monomials in decreasing lex order."""
        return sorted(self.terms, reverse=True)

    def coefficient(self, mono):
        return self.terms.get(tuple(mono), Fraction(0))

    def constant_term(self):
        return self.terms.get((0,) * len(self.registry), Fraction(0))

    def variables_used(self):
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return sorted(used)

    def leading_term(self):
        return leading_term(self)

    def homogeneous_parts(self):
        parts = {}
        for m, c in self.terms.items():
            parts.setdefault(sum(m), {})[m] = c
        return {d: Polynomial._raw(self.registry, t) for d, t in sorted(parts.items())}

    def is_real(self):
        return not any(isinstance(c, Gaussian) for c in self.terms.values())

    # calculus / substitution ---------------------------------------------
    def differentiate(self, var):
        return differentiate(self, var)

    def substitute(self, mapping, target=None):
        return substitute(self, mapping, target)

    def substitute_linear(self, mapping, target=None):
        return substitute_linear(self, mapping, target)

    def evaluate(self, point):
        return evaluate(self, point)

    def embed(self, target: VariableRegistry, rename=None):
        """Re-express over ``target`` (variables matched by name, optionally renamed)."""
        rename = rename or {}
        pos = [target.index(rename.get(nm, nm)) for nm in self.registry.names]
        n = len(target)
        out = {}
        for m, c in self.terms.items():
            new = [0] * n
            for i, e in enumerate(m):
                if e:
                    new[pos[i]] += e
            _add_into(out, tuple(new), c)
        return Polynomial._raw(target, out)

    def to_callable(self):
        """Vectorised numeric evaluator ``f(x_1, ..., x_N)`` (floats or complex)."""
        items = []
        for m, c in self.terms.items():
            cc = to_complex(c)
            val = cc.real if cc.imag == 0 else cc
            items.append(([(i, e) for i, e in enumerate(m) if e], val))

        def f(*xs):
            total = 0.0
            for factors, c in items:
                term = c
                for i, e in factors:
                    term = term * (xs[i] if e == 1 else xs[i] ** e)
                total = total + term
            return total

        return f

    # text -----------------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.registry != q.registry:
        raise RegistryMismatchError(p.registry, q.registry, "multiply")
    if len(p.terms) > len(q.terms):
        p, q = q, p
    acc = {}
    qi = list(q.terms.items())
    for m1, c1 in p.terms.items():
        for m2, c2 in qi:
            _add_into(acc, tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
    return Polynomial._raw(p.registry, acc)


def differentiate(p: Polynomial, var) -> Polynomial:
    i = p.registry.index(var) if isinstance(var, str) else var
    out = {}
    for m, c in p.terms.items():
        e = m[i]
        if e:
            mm = list(m)
            mm[i] = e - 1
            out[tuple(mm)] = c * e
    return Polynomial._raw(p.registry, out)


def leading_term(p: Polynomial):
    if not p.terms:
        raise PolynomialError("leading term of the zero polynomial")
    m = max(p.terms)
    return m, p.terms[m]


def substitute(p: Polynomial, mapping, target: VariableRegistry | None = None) -> Polynomial:
    """Compose: replace each variable named in ``mapping`` by a polynomial over ``target``.

    Variables absent from ``mapping`` must exist in ``target`` and are kept.
    """
    if target is None:
        vals = [v for v in mapping.values() if isinstance(v, Polynomial)]
        target = vals[0].registry if vals else p.registry
    images = []
    for nm in p.registry.names:
        if nm in mapping:
            v = mapping[nm]
            if isinstance(v, Polynomial):
                if v.registry != target:
                    raise RegistryMismatchError(v.registry, target, "substitute")
            else:
                v = Polynomial.constant(target, v)
            images.append(v)
        else:
            images.append(Polynomial.var(target, nm))
    for nm in mapping:
        p.registry.index(nm)
    powers = [{0: Polynomial.one(target), 1: img} for img in images]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            cache[e] = power(i, e - 1) * images[i]
        return cache[e]

    acc = {}
    for m, c in p.terms.items():
        term = Polynomial.constant(target, c)
        for i, e in enumerate(m):
            if e:
                term = term * power(i, e)
        for mm, cc in term.terms.items():
            _add_into(acc, mm, cc)
    return Polynomial._raw(target, acc)


def substitute_linear(p: Polynomial, mapping, target: VariableRegistry | None = None) -> Polynomial:
    """Substitute linear forms (homogeneous of degree 1, or zero) for variables."""
    for nm, form in mapping.items():
        if isinstance(form, Polynomial) and form.terms and (form.degree() != 1 or not form.is_homogeneous()):
            raise PolynomialError(f"image of {nm!r} is not a linear form: {form}")
        if not isinstance(form, Polynomial) and as_coeff(form) != 0:
            raise PolynomialError(f"image of {nm!r} is not a linear form")
    if target is not None:
        for nm in p.registry.names:
            if nm not in mapping and nm not in target:
                raise PolynomialError(f"dimension mismatch: {nm!r} has no image in target registry")
    return substitute(p, mapping, target)


def evaluate(p: Polynomial, point):
    """Direct sum of monomial values; exact when every coordinate is exact."""
    point = list(point)
    if len(point) != len(p.registry):
        raise PolynomialError(f"point has length {len(point)}, registry has {len(p.registry)}")
    exact = all(_is_exact(x) for x in point)
    if exact:
        total = Fraction(0)
        for m, c in p.terms.items():
            t = c
            for x, e in zip(point, m):
                if e:
                    t = t * x**e
            total = total + t
        return total
    return p.to_callable()(*point)


# ---------------------------------------------------------------------------
# text format


def _mono_str(reg, mono):
    parts = []
    for nm, e in zip(reg.names, mono):
        if e == 1:
            parts.append(nm)
        elif e > 1:
            parts.append(f"{nm}^{e}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for i, m in enumerate(p.monomials()):
        c = p.terms[m]
        ms = _mono_str(p.registry, m)
        if isinstance(c, Gaussian):
            sign, body = "+", coeff_str(c) + ("*" + ms if ms else "")
        else:
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if ms and a == 1:
                body = ms
            else:
                body = _rat_str(a) + ("*" + ms if ms else "")
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _split_terms(text):
    terms, depth, cur, sign = [], 0, [], 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise PolynomialError("unbalanced parentheses")
        if depth == 0 and ch in "+-":
            body = "".join(cur).strip()
            if body:
                terms.append((sign, body))
                sign = 1
            if ch == "-":
                sign = -sign
            cur = []
            continue
        cur.append(ch)
    if depth != 0:
        raise PolynomialError("unbalanced parentheses")
    body = "".join(cur).strip()
    if not body:
        if terms or text.strip():
            raise PolynomialError("dangling operator")
        raise PolynomialError("empty polynomial text")
    terms.append((sign, body))
    return terms


_FACTOR_VAR = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


def parse_polynomial(text: str, registry: VariableRegistry | None = None) -> Polynomial:
    """Parse the ASCII polynomial format, e.g. ``2*w_1_1^2*z_1 - 3/7*w_2_1 + (0,1)*z_2``."""
    if not isinstance(text, str):
        raise PolynomialError("polynomial text must be a string")
    terms = _split_terms(text)
    parsed = []
    names = []
    for sign, body in terms:
        coeff = Fraction(sign)
        powers = {}
        depth, cur, factors = 0, [], []
        for ch in body:
            depth += ch == "("
            depth -= ch == ")"
            if ch == "*" and depth == 0:
                factors.append("".join(cur).strip())
                cur = []
            else:
                cur.append(ch)
        factors.append("".join(cur).strip())
        for fac in factors:
            if not fac:
                raise PolynomialError(f"empty factor in {body!r}")
            if fac[0] == "(" or fac[0].isdigit():
                coeff = coeff * parse_coeff(fac)
                continue
            m = _FACTOR_VAR.match(fac)
            if not m:
                raise PolynomialError(f"cannot parse factor {fac!r}")
            nm, e = m.group(1), int(m.group(2) or 1)
            powers[nm] = powers.get(nm, 0) + e
            if nm not in names:
                names.append(nm)
        parsed.append((coeff, powers))
    if registry is None:
        registry = VariableRegistry(sorted(names, key=_canonical_key))
    acc = {}
    n = len(registry)
    for coeff, powers in parsed:
        mono = [0] * n
        for nm, e in powers.items():
            mono[registry.index(nm)] += e
        if coeff != 0:
            _add_into(acc, tuple(mono), coeff)
    return Polynomial._raw(registry, acc)


def monomial_space(registry: VariableRegistry, degree: int, indices=None):
    """All exponent tuples of the given total degree in the chosen variables."""
    idx = list(range(len(registry))) if indices is None else list(indices)
    out = []
    for exps in _cartesian(range(degree + 1), repeat=len(idx)):
        if sum(exps) == degree:
            m = [0] * len(registry)
            for i, e in zip(idx, exps):
                m[i] = e
            out.append(tuple(m))
    return sorted(out, reverse=True)
