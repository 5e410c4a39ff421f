"""Blocks, difference counting, SDS verification, symmetry types and equivalence."""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import galois
import numpy as np

from errors import (
    FormatError,
    InvalidParametersError,
    MixedGroupsError,
    VerificationError,
)
from groups import Group, automorphisms, group_from_text
from models import BlockSymmetry, SdsParams, SymmetryType, VerificationResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Block:
    """A subset of group elements."""
    group: Group
    members: FrozenSet[int]

    @classmethod
    def of(cls, group: Group, elements: Iterable[int]) -> "Block":
        members = frozenset(int(e) for e in elements)
        bad = [e for e in members if not 0 <= e < group.order]
        if bad:
            raise InvalidParametersError(f"elements {sorted(bad)} are outside {group.spec} (order {group.order})")
        return cls(group, members)

    @classmethod
    def from_mask(cls, group: Group, mask: np.ndarray) -> "Block":
        return cls(group, frozenset(int(e) for e in np.flatnonzero(mask)))

    @cached_property
    def mask(self) -> np.ndarray:
        mask = np.zeros(self.group.order, dtype=bool)
        mask[list(self.members)] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(sorted(self.members), dtype=np.int64)

    @property
    def size(self) -> int:
        return len(self.members)

    def sorted(self) -> List[int]:
        return sorted(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, element: int) -> bool:
        return element in self.members

    def __repr__(self) -> str:
        return f"Block({self.group.spec}, {self.sorted()})"


@dataclass(frozen=True)
class SdsFamily:
    """An ordered tuple of blocks over one group (4 for an SDS, any number for a difference family)."""
    group: Group
    blocks: Tuple[Block, ...]
    declared_type: Optional[SymmetryType] = field(default=None, compare=False)

    def __post_init__(self):
        for block in self.blocks:
            if block.group != self.group:
                raise MixedGroupsError(f"block over {block.group.spec} in a family over {self.group.spec}")

    @classmethod
    def from_sets(cls, group: Group, sets: Sequence[Iterable[int]], declared_type: Optional[Union[str, SymmetryType]] = None) -> "SdsFamily":
        if isinstance(declared_type, str):
            declared_type = SymmetryType.parse(declared_type)
        return cls(group, tuple(Block.of(group, s) for s in sets), declared_type)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(b.size for b in self.blocks)

    @property
    def params(self) -> SdsParams:
        """Parameters with lambda from condition (1)."""
        return SdsParams.from_sizes(self.group.order, self.sizes)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, index: int) -> Block:
        return self.blocks[index]


def _common_group(blocks: Sequence[Block]) -> Group:
    if not blocks:
        raise InvalidParametersError("at least one block is required")
    group = blocks[0].group
    for block in blocks[1:]:
        if block.group != group:
            raise MixedGroupsError(f"blocks over {group.spec} and {block.group.spec} cannot be combined")
    return group


def difference_counts(blocks: Sequence[Block]) -> np.ndarray:
    """counts[d] = number of ordered pairs (x, y), same block, x - y = d; counts[0] is 0."""
    group = _common_group(blocks)
    counts = np.zeros(group.order, dtype=np.int64)
    for block in blocks:
        if block.size == 0:
            continue
        diffs = group.sub_table[np.ix_(block.array, block.array)].ravel()
        counts += np.bincount(diffs, minlength=group.order)
    counts[0] = 0
    return counts


def difference_spectrum(blocks: Sequence[Block]) -> Dict[int, int]:
    counts = difference_counts(blocks)
    return {d: int(counts[d]) for d in range(1, len(counts))}


def verify_sds(f: SdsFamily, difference_family: Optional[bool] = None) -> VerificationResult:
    """Check the difference condition and, for 4-block SDSs, condition (1) with lambda >= 0.

    difference_family defaults to True for any block count other than 4; in that
    mode condition (1) is reported but not required.
    """
    if difference_family is None:
        difference_family = len(f.blocks) != 4
    n = f.group.order
    k = f.sizes
    eq1_lam = sum(k) - n
    counts = difference_counts(f.blocks) if f.blocks else np.zeros(n, dtype=np.int64)

    lam = int(counts[1]) if n > 1 else eq1_lam
    params = SdsParams(n=n, k=k, lam=lam)
    result = dict(
        params=params,
        difference_family=difference_family,
        eq1_holds=params.eq1_holds,
        eq3_holds=params.eq3_holds,
    )

    offending = np.flatnonzero(counts[1:] != lam)
    if offending.size:
        d = int(offending[0]) + 1
        c = int(counts[d])
        return VerificationResult(
            ok=False, offending_element=d, offending_count=c,
            detail=f"not an SDS at element {d} (count {c} != {lam})", **result,
        )
    if lam < 0:
        return VerificationResult(ok=False, detail=f"lambda = {lam} < 0", **result)
    if not difference_family and not params.eq1_holds:
        return VerificationResult(
            ok=False,
            detail=f"SDS but violates condition (1): lambda = {lam}, sum(k) - n = {eq1_lam}",
            **result,
        )
    return VerificationResult(ok=True, detail=str(params), **result)


def require_sds(f: SdsFamily, difference_family: Optional[bool] = None) -> SdsParams:
    result = verify_sds(f, difference_family)
    if not result.ok:
        raise VerificationError(result.detail, result)
    return result.params


def is_symmetric(b: Block) -> bool:
    return bool(np.array_equal(b.mask, b.mask[b.group.neg_table]))


def is_skew(b: Block) -> bool:
    mask, neg = b.mask, b.mask[b.group.neg_table]
    return bool(not mask[0] and not (mask & neg).any() and (mask | neg)[1:].all())


def symmetry_of(b: Block) -> BlockSymmetry:
    if is_symmetric(b):
        return BlockSymmetry.SYMMETRIC
    if is_skew(b):
        return BlockSymmetry.SKEW
    return BlockSymmetry.NEITHER


def type_of(f: SdsFamily) -> SymmetryType:
    return SymmetryType(letters="".join(symmetry_of(b).letter for b in f.blocks))


def satisfies_type(f: SdsFamily, t: SymmetryType) -> bool:
    """Positional check: s needs a symmetric block, k a skew block, * anything."""
    if len(t.letters) != len(f.blocks):
        return False
    checks = {"s": is_symmetric, "k": is_skew, "*": lambda b: True}
    return all(checks[letter](b) for letter, b in zip(t.letters, f.blocks))


def complement(b: Block) -> Block:
    return Block.from_mask(b.group, ~b.mask)


def negate(b: Block) -> Block:
    return Block(b.group, frozenset(int(e) for e in b.group.neg_table[b.array]))


def translate(b: Block, t: int) -> Block:
    return Block(b.group, frozenset(int(e) for e in b.group.add_table[b.array, t]))


def permute_blocks(f: SdsFamily, order: Sequence[int]) -> SdsFamily:
    if sorted(order) != list(range(len(f.blocks))):
        raise InvalidParametersError(f"{list(order)} is not a permutation of {len(f.blocks)} blocks")
    declared = None
    if f.declared_type is not None:
        declared = SymmetryType(letters="".join(f.declared_type.letters[i] for i in order))
    return SdsFamily(f.group, tuple(f.blocks[i] for i in order), declared)


def feasible_params(n: int) -> List[SdsParams]:
    """All (n; k1 >= k2 >= k3 >= k4; lambda) with sum (n - 2k_i)^2 = 4n, a_i > 0 and lambda >= 0."""
    if n < 3 or n % 2 == 0:
        raise InvalidParametersError(f"n must be odd and >= 3, got {n}")
    target = 4 * n
    odd = [a for a in range(1, int(target ** 0.5) + 1, 2)]
    rows = []
    for a in itertools.combinations_with_replacement(odd, 4):
        if sum(x * x for x in a) != target:
            continue
        k = tuple((n - x) // 2 for x in a)
        params = SdsParams.from_sizes(n, k)
        if params.lam >= 0:
            rows.append(params)
    rows.sort(key=lambda p: p.k, reverse=True)
    return rows


def type_compatible(p: SdsParams, t: SymmetryType) -> bool:
    """Skew positions need blocks of size (n-1)/2, i.e. a_i = 1."""
    if len(t.letters) != len(p.k):
        return False
    return p.a.count(1) >= t.skew_count


def xia_liu_params(q: int) -> SdsParams:
    """Multicirculant series over GF(q)^2, q a prime power = 1 mod 4: (q^2; q(q-1)/2 x4; q(q-2))."""
    if not galois.is_prime_power(q) or q % 4 != 1:
        raise InvalidParametersError(f"q must be a prime power congruent to 1 mod 4, got {q}")
    k = q * (q - 1) // 2
    return SdsParams(n=q * q, k=(k, k, k, k), lam=q * (q - 2))


# Equivalence

def _block_orbit(group: Group, mask: np.ndarray, allow_translation: bool) -> np.ndarray:
    rows = mask[group.sub_table.T] if allow_translation else mask[None, :]
    negated = rows[:, group.neg_table]
    return np.vstack([rows, negated, ~rows, ~negated])


def _block_key(group: Group, mask: np.ndarray, allow_translation: bool) -> bytes:
    """Least packed bitset over the block's negate/complement/translate orbit."""
    packed = np.packbits(_block_orbit(group, mask, allow_translation), axis=1)
    return packed[np.lexsort(packed.T[::-1])[0]].tobytes()


def _family_key(group: Group, masks: Sequence[np.ndarray], allow_translation: bool) -> Tuple[bytes, ...]:
    return tuple(sorted(_block_key(group, m, allow_translation) for m in masks))


def _size_profile(f: SdsFamily) -> List[int]:
    n = f.group.order
    return sorted(min(s, n - s) for s in f.sizes)


def equivalent(f: SdsFamily, g: SdsFamily, allow_translation: bool = True) -> bool:
    """True iff an automorphism, a block permutation and per-block
    negation/complementation (and translation when allowed) carry f onto g."""
    if f.group != g.group:
        raise MixedGroupsError(f"families over {f.group.spec} and {g.group.spec} cannot be compared")
    if len(f.blocks) != len(g.blocks) or _size_profile(f) != _size_profile(g):
        return False

    group = f.group
    target = _family_key(group, [b.mask for b in g.blocks], allow_translation)
    for aut in automorphisms(group):
        if _family_key(group, [b.mask[aut.table] for b in f.blocks], allow_translation) == target:
            return True
    return False


def canonical_form(f: SdsFamily, allow_translation: bool = True) -> bytes:
    """Least orbit encoding; equal for exactly the equivalent families."""
    group = f.group
    best = None
    for aut in automorphisms(group):
        key = _family_key(group, [b.mask[aut.table] for b in f.blocks], allow_translation)
        if best is None or key < best:
            best = key
    header = f"{group.spec.text}|{len(f.blocks)}|".encode()
    return header + b"".join(best)


# SDS text format

def format_sds(f: SdsFamily) -> str:
    symmetry = f.declared_type or type_of(f)
    lines = [f"group {f.group.spec.text}", f"type {symmetry.letters}"]
    for block in f.blocks:
        lines.append(" ".join(["block"] + [str(e) for e in block.sorted()]))
    return "\n".join(lines) + "\n"


def parse_sds(text: str) -> SdsFamily:
    """Parse `group <spec>` / `type <word>` / `block <e1 e2 ...>` lines."""
    group = None
    declared = None
    blocks = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()

        if keyword == "group":
            if group is not None:
                raise FormatError("duplicate group line", line_number)
            try:
                group = group_from_text(rest)
            except (FormatError, ValueError) as e:
                raise FormatError(str(e), line_number) from e
        elif keyword == "type":
            if group is None or declared is not None or blocks:
                raise FormatError("type line must follow the group line", line_number)
            try:
                declared = SymmetryType(letters=rest)
            except ValueError as e:
                raise FormatError(f"invalid symmetry type '{rest}'", line_number) from e
        elif keyword == "block":
            if group is None:
                raise FormatError("block before group line", line_number)
            blocks.append(_parse_block(group, rest, line_number))
        else:
            raise FormatError(f"unknown keyword '{keyword}'", line_number)

    if group is None:
        raise FormatError("missing group line")
    if not blocks:
        raise FormatError("no blocks")
    if declared is not None and len(declared.letters) != len(blocks):
        raise FormatError(f"type '{declared}' has {len(declared.letters)} letters for {len(blocks)} blocks")
    return SdsFamily(group, tuple(blocks), declared)


def _parse_block(group: Group, rest: str, line_number: int) -> Block:
    try:
        elements = [int(tok) for tok in rest.split()]
    except ValueError as e:
        raise FormatError(f"non-integer element in '{rest}'", line_number) from e
    seen = set()
    for e in elements:
        if e in seen:
            raise FormatError(f"duplicate element {e}", line_number)
        if not 0 <= e < group.order:
            raise FormatError(f"element {e} outside [0, {group.order})", line_number)
        seen.add(e)
    return Block(group, frozenset(elements))


def load_sds(path: Union[str, Path]) -> SdsFamily:
    return parse_sds(Path(path).read_text())


def save_sds(f: SdsFamily, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_sds(f))
    logger.info(f"Wrote {f.params} to {path}")
    return path
