"""Finite abelian groups: Z_n and the additive group of GF(p^k)."""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterator, List, Optional, Sequence, Tuple

import galois
import numpy as np

from config import settings
from errors import (
    CapacityError,
    GroupConstructionError,
    InvalidParametersError,
    UnsupportedOperationError,
)
from models import GroupSpec

logger = logging.getLogger(__name__)


class Group:
    """Immutable group handle.

    Elements are the integers 0..order-1. For elementary abelian groups an
    element is the radix-p encoding of its coefficient vector, constant term
    least significant, so encodings coincide with galois' integer representation.
    """

    def __init__(self, spec: GroupSpec):
        self.spec = spec
        self.order = spec.order
        self.zero = 0

        if spec.is_cyclic:
            self.p = spec.n
            self.rank = 1
            self.digits = np.arange(self.order, dtype=np.int64).reshape(-1, 1)
            self.weights = np.ones(1, dtype=np.int64)
        else:
            self.p = spec.p
            self.rank = spec.k
            self.weights = self.p ** np.arange(self.rank, dtype=np.int64)
            self.digits = (np.arange(self.order, dtype=np.int64)[:, None] // self.weights) % self.p

        d = self.digits
        self.add_table = (((d[:, None, :] + d[None, :, :]) % self.p) * self.weights).sum(axis=-1)
        self.neg_table = (((-d) % self.p) * self.weights).sum(axis=-1)
        self.sub_table = self.add_table[:, self.neg_table]
        for table in (self.add_table, self.neg_table, self.sub_table):
            table.setflags(write=False)

        self._field = None if spec.is_cyclic else _field_class(spec)
        self._mul_table: Optional[np.ndarray] = None

    @property
    def is_field(self) -> bool:
        return self._field is not None

    def elements(self) -> range:
        return range(self.order)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def sub(self, a: int, b: int) -> int:
        return int(self.sub_table[a, b])

    def scale(self, a: int, c: int) -> int:
        """c * a for an integer c (repeated addition)."""
        return int(((self.digits[a] * c) % self.p * self.weights).sum())

    def multiples(self, a: int) -> np.ndarray:
        """Array [0*a, 1*a, ..., (p-1)*a]."""
        c = np.arange(self.p, dtype=np.int64)[:, None]
        return ((self.digits[a][None, :] * c) % self.p * self.weights).sum(axis=-1)

    def coefficients(self, a: int) -> Tuple[int, ...]:
        return tuple(int(x) for x in self.digits[a])

    def encode(self, coefficients: Sequence[int]) -> int:
        if len(coefficients) > self.rank:
            raise InvalidParametersError(f"{len(coefficients)} coefficients for a group of rank {self.rank}")
        return int(sum((int(c) % self.p) * int(w) for c, w in zip(coefficients, self.weights)))

    # Field operations (elementary abelian groups only)

    def _require_field(self, operation: str):
        if self._field is None:
            raise UnsupportedOperationError(f"{operation} is not defined on {self.spec}")
        return self._field

    @property
    def mul_table(self) -> np.ndarray:
        field = self._require_field("field_mul")
        if self._mul_table is None:
            elements = field.elements
            table = (elements[:, None] * elements[None, :]).view(np.ndarray).astype(np.int64)
            table.setflags(write=False)
            self._mul_table = table
        return self._mul_table

    def field_mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def field_inv(self, a: int) -> int:
        field = self._require_field("field_inv")
        if a == 0:
            raise InvalidParametersError("0 has no multiplicative inverse")
        return int(field(a) ** -1)

    def field_pow(self, a: int, e: int) -> int:
        field = self._require_field("field_pow")
        if a == 0 and e < 0:
            raise InvalidParametersError("0 has no multiplicative inverse")
        return int(field(a) ** e)

    def multiplicative_order(self, a: int) -> int:
        field = self._require_field("multiplicative_order")
        if a == 0:
            raise InvalidParametersError("0 has no multiplicative order")
        return int(field(a).multiplicative_order())

    def __repr__(self) -> str:
        return f"Group({self.spec})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Group) and other.spec == self.spec

    def __hash__(self) -> int:
        return hash(self.spec)


def _modulus_poly(spec: GroupSpec) -> galois.Poly:
    return galois.Poly([c % spec.p for c in spec.modulus], field=galois.GF(spec.p), order="asc")


def _field_class(spec: GroupSpec):
    if spec.k == 1:
        return galois.GF(spec.p)
    return galois.GF(spec.p ** spec.k, irreducible_poly=_modulus_poly(spec))


def _validate(spec: GroupSpec) -> None:
    if spec.is_cyclic:
        if spec.n is None or spec.n < 1:
            raise GroupConstructionError(f"cyclic group order must be >= 1, got {spec.n}")
        return

    p, k = spec.p, spec.k
    if p is None or k is None or k < 1:
        raise GroupConstructionError(f"elementary abelian group needs a prime p and degree k >= 1, got p={p}, k={k}")
    if not galois.is_prime(p):
        raise GroupConstructionError(f"p={p} is not prime")
    if len(spec.modulus) != k + 1:
        raise GroupConstructionError(f"modulus must have {k + 1} coefficients, got {len(spec.modulus)}")
    if spec.modulus[-1] % p != 1:
        raise GroupConstructionError("modulus must be monic (leading coefficient 1)")

    poly = _modulus_poly(spec)
    if not poly.is_irreducible():
        factors, _ = poly.factors()
        factor = [int(c) for c in factors[0].coeffs[::-1]]
        raise GroupConstructionError(
            f"modulus {poly} is reducible over Z_{p}: divisible by {factors[0]}",
            factor=factor,
        )


@lru_cache(maxsize=None)
def make_group(spec: GroupSpec) -> Group:
    """Build (or fetch) the group handle for a spec."""
    _validate(spec)
    group = Group(spec)
    logger.info(f"Built group {spec} of order {group.order}")
    return group


def group_from_text(text: str) -> Group:
    return make_group(GroupSpec.parse(text))


@dataclass(frozen=True, eq=False)
class Automorphism:
    """Group automorphism given by the images of the standard generators."""
    images: Tuple[int, ...]
    table: np.ndarray

    def __call__(self, a: int) -> int:
        return int(self.table[a])


def automorphism_count(g: Group) -> int:
    if g.spec.is_cyclic:
        return sum(1 for u in range(g.order) if gcd(u, g.order) == 1)
    q = g.order
    count = 1
    for i in range(g.rank):
        count *= q - g.p ** i
    return count


def automorphisms(g: Group, bound: Optional[int] = None) -> Iterator[Automorphism]:
    """Yield every automorphism of g exactly once."""
    bound = settings.automorphism_bound if bound is None else bound
    if g.order > bound:
        raise CapacityError(f"automorphism enumeration of {g.spec} (order {g.order}) exceeds bound {bound}", bound)

    if g.spec.is_cyclic:
        n = g.order
        base = np.arange(n, dtype=np.int64)
        for u in range(n):
            if gcd(u, n) == 1:
                yield Automorphism(images=(u,), table=(u * base) % n)
        return

    yield from _linear_automorphisms(g, [], np.zeros(1, dtype=np.int64))


def _linear_automorphisms(g: Group, chosen: List[int], span: np.ndarray) -> Iterator[Automorphism]:
    # chosen[j] is the image of the basis vector p^j; span is the subspace they generate
    if len(chosen) == g.rank:
        table = np.zeros(g.order, dtype=np.int64)
        for j, v in enumerate(chosen):
            table = g.add_table[table, g.multiples(v)[g.digits[:, j]]]
        yield Automorphism(images=tuple(chosen), table=table)
        return

    in_span = np.zeros(g.order, dtype=bool)
    in_span[span] = True
    for v in range(1, g.order):
        if in_span[v]:
            continue
        extended = g.add_table[span[:, None], g.multiples(v)[None, :]].ravel()
        yield from _linear_automorphisms(g, chosen + [v], extended)
