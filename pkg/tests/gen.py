"""Random test data shared by the module tests and the acceptance suite."""

from fractions import Fraction

from maval.exact_poly import Polynomial
from maval.minor_spaces import module_layout, squared_minor_basis


def random_z_poly(rng, n, k, max_deg=2):
    reg = module_layout(n, k).registry
    out = Polynomial.zero(reg)
    for _ in range(rng.randint(1, 3)):
        mono = [0] * len(reg)
        for _ in range(rng.randint(0, max_deg)):
            mono[n * k + rng.randrange(n)] += 1
        out = out + Polynomial.monomial(reg, tuple(mono), Fraction(rng.randint(-5, 5), rng.randint(1, 3)))
    return out


def random_member(rng, n, k, max_deg=2):
    B = squared_minor_basis(n, k)
    reg = module_layout(n, k).registry
    gs = [random_z_poly(rng, n, k, max_deg) for _ in B.generators]
    F = Polynomial.zero(reg)
    for g, q in zip(gs, B.generators):
        F = F + g * q.embed(reg)
    return F, gs


def random_nonmember(rng, n, k):
    """A polynomial with 2 w-degrees per column that no combination of squared minors reaches."""
    reg = module_layout(n, k).registry
    B = squared_minor_basis(n, k)
    if k == 1:
        # every quadratic in one column is a member; use column degree 3 instead
        F = Polynomial.zero(reg)
        while F.is_zero():
            for _ in range(rng.randint(1, 3)):
                mono = [0] * len(reg)
                for _ in range(3):
                    mono[rng.randrange(n)] += 1
                mono[n + rng.randrange(n)] += rng.randint(0, 1)
                F = F + Polynomial.monomial(reg, tuple(mono), rng.randint(-4, 4))
        return F
    while True:
        F, _ = random_member(rng, n, k)
        mono = [0] * len(reg)
        for j in range(k):
            for _ in range(2):
                mono[j * n + rng.randrange(n)] += 1
        z = rng.randrange(n)
        mono[n * k + z] += rng.randint(0, 1)
        G = F + Polynomial.monomial(reg, tuple(mono), rng.randint(1, 4))
        w_part = Polynomial.monomial(B.registry, tuple(mono[: n * k]))
        if not B.contains(w_part):
            return G
