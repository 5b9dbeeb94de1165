"""Minor-generated polynomial spaces: M_k, M²_k, the Hessian-minor space, Gram determinants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exact_poly import Polynomial, PolynomialError, VariableRegistry
from .linalg import span_coordinates, symbolic_det


@dataclass(frozen=True)
class MatrixVariableLayout:
    """Variables ``w_i_j`` of an n x cols matrix, ordered column by column.

    ``last_name`` renames the final column (``z_i`` for the module layouts).
    """

    n: int
    cols: int
    last_name: str | None = None

    def __post_init__(self):
        if self.n < 0 or self.cols < 0:
            raise PolynomialError("layout dimensions must be nonnegative")

    def name(self, i: int, j: int) -> str:
        if self.last_name and j == self.cols:
            return f"{self.last_name}_{i}"
        return f"w_{i}_{j}"

    @property
    def registry(self) -> VariableRegistry:
        return _layout_registry(self.n, self.cols, self.last_name)

    def entry(self, i: int, j: int) -> Polynomial:
        return Polynomial.var(self.registry, self.name(i, j))

    def column_indices(self, j: int):
        reg = self.registry
        return [reg.index(self.name(i, j)) for i in range(1, self.n + 1)]


_REG_CACHE = {}


def _layout_registry(n, cols, last_name):
    key = (n, cols, last_name)
    if key not in _REG_CACHE:
        names, tags = [], []
        for j in range(1, cols + 1):
            for i in range(1, n + 1):
                names.append(f"{last_name}_{i}" if last_name and j == cols else f"w_{i}_{j}")
                tags.append((i, j))
        _REG_CACHE[key] = VariableRegistry(names, tags)
    return _REG_CACHE[key]


def module_layout(n: int, k: int) -> MatrixVariableLayout:
    """Layout of Mat_{n,k+1} with the last column written ``z_1..z_n``."""
    return MatrixVariableLayout(n, k + 1, "z")


@dataclass(frozen=True)
class MinorBasis:
    n: int
    k: int
    kind: str  # "M_k", "M2_k" or "M_n_hessian"
    generators: tuple
    registry: VariableRegistry

    @property
    def dimension(self) -> int:
        return len(self.generators)

    def coordinates(self, p: Polynomial):
        """Exact coordinates of ``p`` in this basis, or ``None`` outside the span."""
        if p.registry != self.registry:
            p = p.embed(self.registry)
        return span_coordinates(p, list(self.generators))

    def contains(self, p: Polynomial) -> bool:
        return self.coordinates(p) is not None


def _check_range(n, k):
    if not isinstance(n, int) or not isinstance(k, int) or n < 0 or k < 0 or k > n:
        raise PolynomialError(f"need 0 <= k <= n, got n={n}, k={k}")


def extract_basis(polys):
    """Indices of a maximal independent subset, scanning in input order.

    Each candidate is reduced against an echelon form keyed by lex-largest
    monomials; it is kept iff something survives the reduction.
    """
    echelon = {}  # leading monomial -> monic reduced polynomial
    keep = []
    for idx, p in enumerate(polys):
        r = p
        while r.terms:
            lead = max(r.terms)
            piv = echelon.get(lead)
            if piv is None:
                break
            r = r - piv.scale(r.terms[lead])
        if r.terms:
            lead = max(r.terms)
            echelon[lead] = r.scale(Fraction(1) / r.terms[lead]) if not hasattr(r.terms[lead], "im") else r.scale(1 / r.terms[lead])
            keep.append(idx)
    return keep


def k_minors(n: int, k: int, layout: MatrixVariableLayout | None = None):
    """All C(n,k) maximal minors of the first k columns (row subsets in lex order)."""
    _check_range(n, k)
    layout = layout or MatrixVariableLayout(n, k)
    reg = layout.registry
    if k == 0:
        return [Polynomial.one(reg)]
    out = []
    for rows in combinations(range(1, n + 1), k):
        M = [[layout.entry(i, j) for j in range(1, k + 1)] for i in rows]
        out.append(symbolic_det(M))
    return out


def squared_products(n, k, layout=None):
    mins = k_minors(n, k, layout)
    return [mins[a] * mins[b] for a in range(len(mins)) for b in range(a, len(mins))]


def squared_minor_basis(n: int, k: int, layout: MatrixVariableLayout | None = None) -> MinorBasis:
    """Basis of span{Δ_a Δ_b}; its size is N_{n,k}."""
    _check_range(n, k)
    layout = layout or MatrixVariableLayout(n, k)
    prods = squared_products(n, k, layout)
    keep = extract_basis(prods)
    return MinorBasis(n, k, "M2_k", tuple(prods[i] for i in keep), layout.registry)


def minor_basis(n: int, k: int, layout=None) -> MinorBasis:
    layout = layout or MatrixVariableLayout(n, k)
    mins = k_minors(n, k, layout)
    keep = extract_basis(mins)
    return MinorBasis(n, k, "M_k", tuple(mins[i] for i in keep), layout.registry)


def hessian_registry(n: int) -> VariableRegistry:
    names = [f"s_{i}_{j}" for i in range(1, n + 1) for j in range(i, n + 1)]
    return VariableRegistry(names)


def hessian_name(i: int, j: int) -> str:
    a, b = min(i, j), max(i, j)
    return f"s_{a}_{b}"


def symmetric_matrix(registry: VariableRegistry, n: int):
    return [[Polynomial.var(registry, hessian_name(i, j)) for j in range(1, n + 1)] for i in range(1, n + 1)]


def all_symmetric_minors(n: int, registry: VariableRegistry | None = None):
    """Every k-minor (0 <= k <= n) of the symmetric variable matrix, k ascending."""
    registry = registry or hessian_registry(n)
    S = symmetric_matrix(registry, n)
    out = [Polynomial.one(registry)]
    for k in range(1, n + 1):
        for rows in combinations(range(n), k):
            for cols in combinations(range(n), k):
                out.append(symbolic_det([[S[i][j] for j in cols] for i in rows]))
    return out


def hessian_minor_space(n: int, registry: VariableRegistry | None = None) -> MinorBasis:
    if not isinstance(n, int) or n < 1:
        raise PolynomialError("hessian_minor_space needs n >= 1")
    registry = registry or hessian_registry(n)
    mins = all_symmetric_minors(n, registry)
    keep = extract_basis(mins)
    return MinorBasis(n, n, "M_n_hessian", tuple(mins[i] for i in keep), registry)


def gram_determinant(n: int, k: int, layout: MatrixVariableLayout | None = None) -> Polynomial:
    if not (1 <= k <= n):
        raise PolynomialError(f"gram_determinant needs 1 <= k <= n, got n={n}, k={k}")
    layout = layout or MatrixVariableLayout(n, k)
    cols = [[layout.entry(i, j) for i in range(1, n + 1)] for j in range(1, k + 1)]
    reg = layout.registry
    G = []
    for a in range(k):
        row = []
        for b in range(k):
            acc = Polynomial.zero(reg)
            for x, y in zip(cols[a], cols[b]):
                acc = acc + x * y
            row.append(acc)
        G.append(row)
    return symbolic_det(G)


def n_nk(n: int, k: int) -> int:
    """N_{n,k} = dim M²_k, computed from the basis."""
    return squared_minor_basis(n, k).dimension
