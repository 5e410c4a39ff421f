"""Explicit constructions: the SDS catalog, the order-63 recurrence pipeline,
Paley difference sets, the Z_127 coset family and BIBD development."""

import itertools
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import galois
import numpy as np

from config import settings
from errors import (
    BibdError,
    FormatError,
    InvalidParametersError,
    PipelineError,
    RdsError,
)
from groups import Group, group_from_text, make_group
from models import BibdSummary, GroupSpec, RdsParams, SdsParams, SymmetryType, VerificationResult
from sds import (
    Block,
    SdsFamily,
    complement,
    format_sds,
    is_skew,
    is_symmetric,
    type_of,
    verify_sds,
)

logger = logging.getLogger(__name__)

REFERENCE_FILE = Path(__file__).resolve().parent / "data" / "spence63_reference.txt"


@dataclass(frozen=True)
class CatalogEntry:
    """A named SDS with its expected parameters and symmetry type."""
    id: str
    group: Group
    blocks: Tuple[Block, ...]
    expected_params: SdsParams
    expected_type: SymmetryType
    provenance: str
    source: str = ""

    @property
    def family(self) -> SdsFamily:
        return SdsFamily(self.group, self.blocks, self.expected_type)

    def check(self) -> Tuple[bool, VerificationResult, SymmetryType]:
        """Verify the blocks and compare against the expected parameters and type."""
        family = self.family
        result = verify_sds(family)
        found_type = type_of(family)
        ok = result.ok and result.params == self.expected_params and found_type == self.expected_type
        return ok, result, found_type

    def export(self) -> str:
        return format_sds(self.family)


# Polynomial element notation: "2±x", "1-x-x^2", "3x±3"

_TERM_RE = re.compile(r"^([+-]?)(\d*)(x(?:\^(\d+))?)?$")


def expand_plus_minus(expression: str) -> List[str]:
    """Expand every ± into both signs."""
    pieces = expression.split("±")
    if len(pieces) == 1:
        return [expression]
    results = []
    for signs in itertools.product("+-", repeat=len(pieces) - 1):
        text = pieces[0]
        for sign, piece in zip(signs, pieces[1:]):
            text += sign + piece
        results.append(text)
    return results


def parse_element(group: Group, expression: str) -> int:
    """Encode a polynomial in x with integer coefficients (a plain integer for Z_n)."""
    text = expression.replace(" ", "")
    if not text:
        raise FormatError("empty element")
    coefficients = [0] * group.rank
    for term in re.findall(r"[+-]?[^+-]+", text):
        match = _TERM_RE.match(term)
        if not match or not (match.group(2) or match.group(3)):
            raise FormatError(f"cannot parse term '{term}' in '{expression}'")
        sign, digits, variable, power = match.groups()
        value = int(digits) if digits else 1
        degree = (int(power) if power else 1) if variable else 0
        if degree >= group.rank:
            raise FormatError(f"degree {degree} term '{term}' in {group.spec}")
        coefficients[degree] += -value if sign == "-" else value
    if group.spec.is_cyclic:
        return coefficients[0] % group.order
    return group.encode(coefficients)


def parse_element_list(group: Group, text: str) -> List[int]:
    elements = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        for expanded in expand_plus_minus(item):
            elements.append(parse_element(group, expanded))
    return elements


def _closure(group: Group, keyword: str, elements: List[int]) -> Set[int]:
    members = set(elements)
    if keyword in ("half", "halfzero"):
        members |= {group.neg(e) for e in elements}
    if keyword == "halfzero":
        members.add(0)
    return members


def parse_listing(text: str, source: str = "") -> List[CatalogEntry]:
    """Parse catalog listings: `id` opens an entry, followed by `group`,
    `type`, `params`, `provenance` and `block`/`half`/`halfzero` lines."""
    entries = []
    current: Optional[Dict] = None

    def close(line_number: int):
        if current is None:
            return
        missing = [key for key in ("group", "type", "params") if key not in current]
        if missing:
            raise FormatError(f"entry '{current['id']}' is missing {', '.join(missing)}", line_number)
        if not current["blocks"]:
            raise FormatError(f"entry '{current['id']}' has no blocks", line_number)
        group = current["group"]
        entries.append(CatalogEntry(
            id=current["id"],
            group=group,
            blocks=tuple(Block(group, frozenset(b)) for b in current["blocks"]),
            expected_params=current["params"],
            expected_type=current["type"],
            provenance=current.get("provenance", ""),
            source=source,
        ))

    lines = text.splitlines()
    for line_number, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()

        if keyword == "id":
            close(line_number)
            current = {"id": rest, "blocks": []}
            continue
        if current is None:
            raise FormatError(f"'{keyword}' line before any id line", line_number)

        try:
            if keyword == "group":
                current["group"] = group_from_text(rest)
            elif keyword == "type":
                current["type"] = SymmetryType.parse(rest)
            elif keyword == "params":
                current["params"] = SdsParams.parse(rest)
            elif keyword == "provenance":
                current["provenance"] = rest
            elif keyword in ("block", "half", "halfzero"):
                if "group" not in current:
                    raise FormatError("block before group line")
                group = current["group"]
                elements = parse_element_list(group, rest)
                if len(set(elements)) != len(elements):
                    raise FormatError(f"duplicate elements in '{rest}'")
                current["blocks"].append(_closure(group, keyword, elements))
            else:
                raise FormatError(f"unknown keyword '{keyword}'")
        except FormatError as e:
            if e.line_number is not None:
                raise
            raise FormatError(str(e), line_number) from e
        except ValueError as e:
            raise FormatError(str(e), line_number) from e

    close(len(lines))
    return entries


# Catalog sources

class BaseCatalogSource:
    """Base class for catalog sources."""

    def __init__(self, name: str):
        self.name = name

    def load(self) -> List[CatalogEntry]:
        """Load entries. Must be implemented by subclasses."""
        raise NotImplementedError


class ListingFileSource(BaseCatalogSource):
    """Entries transcribed into text listings under the catalog directory."""

    def __init__(self, directory: Optional[Path] = None):
        super().__init__("listings")
        self.directory = Path(directory or settings.catalog_dir)

    def load(self) -> List[CatalogEntry]:
        entries = []
        for path in sorted(self.directory.glob("*.txt")):
            entries.extend(parse_listing(path.read_text(), source=path.name))
        logger.info(f"Loaded {len(entries)} catalog entries from {self.directory}")
        return entries


class ConstructedSource(BaseCatalogSource):
    """Entries produced by running a construction."""

    def __init__(self):
        super().__init__("constructed")

    def load(self) -> List[CatalogEntry]:
        family = z127_family()
        paley = paley_skew_ds(127)
        four_block = SdsFamily(family.group, (paley,) + family.blocks)
        spence = spence63()
        return [
            CatalogEntry(
                id="z127-family",
                group=family.group,
                blocks=family.blocks,
                expected_params=SdsParams(n=127, k=(57, 57, 57), lam=76),
                expected_type=SymmetryType(letters="s**"),
                provenance="Z_127 difference family: 0 plus unions of cosets of the order-7 subgroup {1,2,4,...,64}",
                source=self.name,
            ),
            CatalogEntry(
                id="z127-4block",
                group=four_block.group,
                blocks=four_block.blocks,
                expected_params=SdsParams(n=127, k=(63, 57, 57, 57), lam=107),
                expected_type=SymmetryType(letters="ks**"),
                provenance="Paley skew (127;63;31) difference set followed by the Z_127 coset difference family",
                source=self.name,
            ),
            CatalogEntry(
                id="spence63",
                group=spence.group,
                blocks=spence.blocks,
                expected_params=SdsParams(n=63, k=(31, 31, 27, 25), lam=51),
                expected_type=SymmetryType(letters="kkss"),
                provenance="order-63 SDS from the GF(125) recurrence a*x_{i+1} + x_i + x_{i-1} = 0",
                source=self.name,
            ),
        ]


class CatalogManager:
    """Aggregates catalog sources; a failing source is skipped and recorded."""

    def __init__(self, sources: Optional[List[BaseCatalogSource]] = None):
        self.sources = sources if sources is not None else [ListingFileSource(), ConstructedSource()]
        self.failures: List[Tuple[str, str]] = []

    def load_all(self) -> List[CatalogEntry]:
        entries = []
        self.failures = []
        for source in self.sources:
            try:
                entries.extend(source.load())
            except Exception as e:
                logger.warning(f"Error loading catalog source {source.name}: {e}")
                self.failures.append((source.name, str(e)))
                continue
        entries.sort(key=lambda e: (e.group.order, e.id))
        return entries

    def get(self, entry_id: str) -> CatalogEntry:
        for entry in self.load_all():
            if entry.id == entry_id:
                return entry
        raise KeyError(entry_id)


@lru_cache(maxsize=1)
def catalog() -> Tuple[CatalogEntry, ...]:
    return tuple(CatalogManager().load_all())


def catalog_entry(entry_id: str) -> CatalogEntry:
    for entry in catalog():
        if entry.id == entry_id:
            return entry
    raise KeyError(entry_id)


def multiplicative_subgroup(group: Group, order: int) -> Set[int]:
    """Elements of F* whose order divides `order`."""
    return {a for a in range(1, group.order) if order % group.multiplicative_order(a) == 0}


def common_intersection(blocks: Sequence[Block]) -> Set[int]:
    members = set(blocks[0].members)
    for block in blocks[1:]:
        members &= block.members
    return members


# Paley, Z_127 and BIBD

def paley_skew_ds(p: int) -> Block:
    """Nonzero quadratic residues of Z_p, a skew (p, (p-1)/2, (p-3)/4) difference set."""
    if not galois.is_prime(p) or p % 4 != 3:
        raise InvalidParametersError(f"p must be a prime congruent to 3 mod 4, got {p}")
    group = make_group(GroupSpec.cyclic(p))
    return Block(group, frozenset((x * x) % p for x in range(1, p)))


Z127_COSET_REPRESENTATIVES = (1, 3, 5, 7, 9, 11, 13, 19, 21)
Z127_INDEX_SETS = (
    (0, 1, 2, 3, 6, 7, 16, 17),
    (4, 6, 7, 11, 13, 14, 15, 16),
    (0, 4, 5, 7, 11, 12, 15, 16),
)


def z127_cosets() -> List[Set[int]]:
    """Cosets alpha_0..alpha_17 of H = <2> in Z_127^*, alpha_{2i+1} = -alpha_{2i}."""
    h = {pow(2, i, 127) for i in range(7)}
    cosets = []
    for r in Z127_COSET_REPRESENTATIVES:
        even = {(r * x) % 127 for x in h}
        cosets.append(even)
        cosets.append({(-x) % 127 for x in even})

    covered = set().union(*cosets)
    if len(covered) != 126 or sum(len(c) for c in cosets) != 126:
        raise PipelineError("cosets", "the 18 cosets do not partition Z_127 minus 0")
    return cosets


def z127_family() -> SdsFamily:
    group = make_group(GroupSpec.cyclic(127))
    cosets = z127_cosets()
    blocks = tuple(
        Block(group, frozenset({0}.union(*(cosets[k] for k in index_set))))
        for index_set in Z127_INDEX_SETS
    )
    family = SdsFamily(group, blocks)
    if not is_symmetric(blocks[0]):
        raise PipelineError("symmetry", "first coset block is not negation-closed")
    result = verify_sds(family, difference_family=True)
    if not result.ok or result.params.lam != 76:
        raise PipelineError("verify", f"coset family is not a (127;57,57,57;76) difference family: {result.detail}")
    return family


def develop_bibd(f: SdsFamily) -> BibdSummary:
    """Develop every block by all translates and check uniform pair coverage."""
    group = f.group
    v = group.order
    sizes = set(f.sizes)
    if len(sizes) != 1:
        raise InvalidParametersError(f"all blocks must have the same size, got {sorted(sizes)}")
    if v < 2:
        raise InvalidParametersError("a design needs at least 2 points")
    k = sizes.pop()

    incidence = np.vstack([b.mask[group.sub_table.T] for b in f.blocks]).astype(np.int64)
    gram = incidence.T @ incidence
    lam = int(gram[0, 1])

    off_diagonal = ~np.eye(v, dtype=bool)
    bad = np.argwhere(off_diagonal & (gram != lam))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise BibdError(f"pair ({i}, {j}) covered {int(gram[i, j])} times, expected {lam}", (i, j), int(gram[i, j]))
    if lam < 1:
        raise BibdError("point pairs are never covered together", (0, 1), lam)

    summary = BibdSummary(v=v, b=incidence.shape[0], r=int(gram[0, 0]), k=k, lam=lam)
    logger.info(f"Developed design {summary.v, summary.b, summary.r, summary.k, summary.lam}")
    return summary


# Relative difference sets

def rds_check(x: Sequence[int], m: int, forbidden_order: int) -> RdsParams:
    """Check X in Z_m against the subgroup of order `forbidden_order`.

    Returns (m / forbidden_order, forbidden_order, |X|, lambda): every element
    outside the subgroup is a difference exactly lambda times, nonzero subgroup
    elements never.
    """
    if forbidden_order < 1 or m % forbidden_order:
        raise InvalidParametersError(f"forbidden subgroup order {forbidden_order} does not divide {m}")
    elements = np.unique(np.asarray(list(x), dtype=np.int64) % m)
    step = m // forbidden_order

    diffs = (elements[:, None] - elements[None, :]) % m
    counts = np.bincount(diffs[~np.eye(len(elements), dtype=bool)], minlength=m)

    forbidden = np.zeros(m, dtype=bool)
    forbidden[::step] = True
    inside = np.flatnonzero(forbidden & (counts != 0))
    inside = inside[inside != 0]
    if inside.size:
        r = int(inside[0])
        raise RdsError(f"forbidden residue {r} occurs {int(counts[r])} times as a difference", r, int(counts[r]))

    outside = np.flatnonzero(~forbidden)
    lam = int(counts[outside[0]]) if outside.size else 0
    bad = outside[counts[outside] != lam]
    if bad.size:
        r = int(bad[0])
        raise RdsError(f"residue {r} occurs {int(counts[r])} times, expected {lam}", r, int(counts[r]))
    return RdsParams(m=step, n=forbidden_order, k=len(elements), lam=lam)


# m-sequences and the order-63 pipeline

@dataclass(frozen=True, eq=False)
class MSequence:
    """One period of a second-order linear recurrence over a finite field."""
    field: GroupSpec
    terms: np.ndarray
    period: int

    def prefix(self, count: int) -> List[int]:
        return [int(t) for t in self.terms[:count]]


def linear_recurrence(group: Group, a: int, x0: int = 1, x1: int = 1, max_period: Optional[int] = None) -> MSequence:
    """Iterate a*x_{i+1} + x_i + x_{i-1} = 0 until the state (x0, x1) recurs."""
    max_period = max_period or group.order ** 2 - 1
    c = group.neg(group.field_inv(a))
    scaled = group.mul_table[c]
    terms = [x0, x1]
    while True:
        prev, cur = terms[-2], terms[-1]
        terms.append(int(scaled[group.add_table[cur, prev]]))
        period = len(terms) - 2
        if terms[-2] == x0 and terms[-1] == x1:
            break
        if period > max_period:
            raise PipelineError("period", f"no period within {max_period} terms")
    return MSequence(field=group.spec, terms=np.array(terms[:period], dtype=np.int64), period=period)


SPENCE_FIELD = GroupSpec.elementary_abelian(5, 3, (2, 3, 0, 1))
SPENCE_GENERATOR = 5
SPENCE_MODULUS = 504
SPENCE_BLOCK_ORDER = 63
SPENCE_CLASS_PAIRS = ((0, 2), (1, 3), (4, 2), (5, 3))


def load_reference(path: Path = REFERENCE_FILE) -> Dict[str, List[int]]:
    reference = {}
    for line_number, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *values = line.split()
        try:
            reference[key] = [int(v) for v in values]
        except ValueError as e:
            raise FormatError(f"non-integer value for {key}", line_number) from e
    return reference


@dataclass
class Spence63Result:
    """Artifacts of every stage of the order-63 construction."""
    field: Group
    generator_order: int
    sequence: MSequence
    x: List[int]
    x_params: RdsParams
    y: List[int]
    y_params: RdsParams
    fixed_offsets: List[int]
    offset: int
    y_translated: List[int]
    y_classes: List[List[int]]
    blocks: List[Block]
    halves: List[List[int]]
    family: SdsFamily

    @property
    def params(self) -> SdsParams:
        return self.family.params

    def dump(self, directory: Union[str, Path]) -> List[Path]:
        """Write each stage as a text file for audit."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        files = {
            "01_msequence.txt": (
                f"field {self.field.spec.text}\ngenerator {SPENCE_GENERATOR} order {self.generator_order}\n"
                f"period {self.sequence.period}\nprefix {' '.join(map(str, self.sequence.prefix(64)))}\n"
            ),
            "02_x.txt": f"rds {_rds_text(self.x_params)}\n{_join(self.x)}\n",
            "03_y.txt": (
                f"rds {_rds_text(self.y_params)}\nsplit {SPENCE_MODULUS} = {SPENCE_BLOCK_ORDER}*{SPENCE_MODULUS // SPENCE_BLOCK_ORDER}\n"
                f"{_join(self.y)}\n"
            ),
            "04_y_translated.txt": (
                f"fixed_offsets {_join(self.fixed_offsets)}\noffset {self.offset}\n{_join(self.y_translated)}\n"
            ),
            "05_y_classes.txt": "".join(
                f"Y{i + 1} residues {SPENCE_CLASS_PAIRS[i]} {_join(c)}\n" for i, c in enumerate(self.y_classes)
            ),
            "06_blocks.txt": "".join(
                f"A{i + 1} {_join(b.sorted())}\nA{i + 1}* {_join(h)}\n"
                for i, (b, h) in enumerate(zip(self.blocks, self.halves))
            ),
            "07_family.sds": format_sds(self.family),
        }
        paths = []
        for name, content in files.items():
            path = directory / name
            path.write_text(content)
            paths.append(path)
        logger.info(f"Dumped {len(paths)} pipeline stages to {directory}")
        return paths


def _join(values) -> str:
    return " ".join(str(v) for v in values)


def _rds_text(p: RdsParams) -> str:
    return f"({p.m},{p.n},{p.k},{p.lam})"


class Spence63Pipeline:
    """Builds the (63;31,31,27,25;51) kkss SDS from an m-sequence over GF(125)."""

    def __init__(self, reference: Optional[Dict[str, List[int]]] = None):
        self.reference = reference if reference is not None else load_reference()

    def run(self) -> Spence63Result:
        field = make_group(SPENCE_FIELD)
        q = field.order

        generator_order = field.multiplicative_order(SPENCE_GENERATOR)
        if generator_order != q - 1:
            raise PipelineError("primitive", f"x has order {generator_order}, expected {q - 1}")
        logger.info(f"Stage primitive: x generates GF({q})*")

        sequence = linear_recurrence(field, SPENCE_GENERATOR)
        if sequence.period != q * q - 1:
            raise PipelineError("period", f"minimal period {sequence.period}, expected {q * q - 1}")
        logger.info(f"Stage period: minimal period {sequence.period}")

        x = [int(i) for i in np.flatnonzero(sequence.terms == 1)]
        x_params = self._rds("x-rds", x, sequence.period, q - 1, (q + 1, q - 1, q, 1))

        y = sorted({i % SPENCE_MODULUS for i in x})
        y_params = self._rds("y-rds", y, SPENCE_MODULUS, 4, (SPENCE_MODULUS // 4, 4, q, (q - 1) // 4))

        fixed_offsets = [t for t in range(SPENCE_MODULUS) if self._fixed_under(y, t, q)]
        printed = set(self.reference["Y"])
        matching = [t for t in fixed_offsets if {(j + t) % SPENCE_MODULUS for j in y} == printed]
        if not matching:
            raise PipelineError("translate", f"no translate fixed under x{q} matches the reference set (fixed: {fixed_offsets})")
        offset = matching[0]
        y_translated = sorted((j + offset) % SPENCE_MODULUS for j in y)
        logger.info(f"Stage translate: offsets fixed under x{q} are {fixed_offsets}, reference matches {offset}")

        group = make_group(GroupSpec.cyclic(SPENCE_BLOCK_ORDER))
        y_classes = [[j for j in y_translated if j % 8 in pair] for pair in SPENCE_CLASS_PAIRS]
        blocks = [Block(group, frozenset(j % SPENCE_BLOCK_ORDER for j in c)) for c in y_classes]
        halves = [[e for e in b.sorted() if e < 32] for b in blocks]
        for i, half in enumerate(halves):
            if half != sorted(self.reference[f"A{i + 1}*"]):
                raise PipelineError("split", f"A{i + 1} intersected with 0..31 differs from the reference")

        if not (is_symmetric(blocks[0]) and is_symmetric(blocks[2]) and is_skew(blocks[1]) and is_skew(blocks[3])):
            raise PipelineError("symmetry", "expected A1, A3 symmetric and A2, A4 skew")
        logger.info("Stage symmetry: A1, A3 symmetric; A2, A4 skew")

        final = [complement(blocks[0])] + blocks[1:]
        final.sort(key=lambda b: -b.size)
        family = SdsFamily(group, tuple(final), SymmetryType(letters="kkss"))
        result = verify_sds(family)
        if not result.ok or result.params != SdsParams(n=63, k=(31, 31, 27, 25), lam=51):
            raise PipelineError("verify", f"final family failed: {result.detail}")
        if type_of(family).letters != "kkss":
            raise PipelineError("verify", f"final family has type {type_of(family)}, expected kkss")
        logger.info(f"Stage verify: {result.params} {type_of(family)}")

        return Spence63Result(
            field=field,
            generator_order=generator_order,
            sequence=sequence,
            x=x,
            x_params=x_params,
            y=y,
            y_params=y_params,
            fixed_offsets=fixed_offsets,
            offset=offset,
            y_translated=y_translated,
            y_classes=y_classes,
            blocks=blocks,
            halves=halves,
            family=family,
        )

    @staticmethod
    def _fixed_under(y: List[int], t: int, q: int) -> bool:
        shifted = {(j + t) % SPENCE_MODULUS for j in y}
        return {(q * j) % SPENCE_MODULUS for j in shifted} == shifted

    @staticmethod
    def _rds(stage: str, elements: List[int], m: int, forbidden: int, expected: Tuple[int, int, int, int]) -> RdsParams:
        try:
            params = rds_check(elements, m, forbidden)
        except RdsError as e:
            raise PipelineError(stage, str(e)) from e
        if params.as_tuple() != expected:
            raise PipelineError(stage, f"parameters {params.as_tuple()}, expected {expected}")
        logger.info(f"Stage {stage}: relative difference set {params.as_tuple()}")
        return params


@lru_cache(maxsize=1)
def spence63_result() -> Spence63Result:
    return Spence63Pipeline().run()


def spence63() -> SdsFamily:
    return spence63_result().family
