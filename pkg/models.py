"""Data models for the SDS engine."""

import re
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from errors import FormatError


class GroupKind(str, Enum):
    """Supported ambient groups."""
    CYCLIC = "cyclic"
    ELEMENTARY_ABELIAN = "elementary_abelian"


_CYCLIC_RE = re.compile(r"^cyclic:(\d+)$")
_EA_RE = re.compile(r"^ea:(\d+)\^(\d+):(-?\d+(?:,-?\d+)*)$")


class GroupSpec(BaseModel):
    """Z_n, or (F_q, +) with F_q = Z_p[x]/(modulus), modulus listed constant term first."""
    model_config = ConfigDict(frozen=True)

    kind: GroupKind
    n: Optional[int] = None
    p: Optional[int] = None
    k: Optional[int] = None
    modulus: Tuple[int, ...] = ()

    @classmethod
    def cyclic(cls, n: int) -> "GroupSpec":
        return cls(kind=GroupKind.CYCLIC, n=n)

    @classmethod
    def elementary_abelian(cls, p: int, k: int, modulus: Tuple[int, ...]) -> "GroupSpec":
        return cls(kind=GroupKind.ELEMENTARY_ABELIAN, p=p, k=k, modulus=tuple(modulus))

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse `cyclic:<n>` or `ea:<p>^<k>:<c0,...,ck>`."""
        text = text.strip()
        match = _CYCLIC_RE.match(text)
        if match:
            return cls.cyclic(int(match.group(1)))
        match = _EA_RE.match(text)
        if match:
            coefficients = tuple(int(c) for c in match.group(3).split(","))
            return cls.elementary_abelian(int(match.group(1)), int(match.group(2)), coefficients)
        raise FormatError(f"unrecognized group spec '{text}' (expected cyclic:<n> or ea:<p>^<k>:<c0,...,ck>)")

    @property
    def is_cyclic(self) -> bool:
        return self.kind == GroupKind.CYCLIC

    @property
    def order(self) -> int:
        if self.is_cyclic:
            return self.n
        return self.p ** self.k

    @property
    def text(self) -> str:
        if self.is_cyclic:
            return f"cyclic:{self.n}"
        return f"ea:{self.p}^{self.k}:{','.join(str(c) for c in self.modulus)}"

    def __str__(self) -> str:
        return self.text


class SymmetryType(BaseModel):
    """Per-block symmetry word over {s, k, *}: symmetric, skew or unconstrained."""
    model_config = ConfigDict(frozen=True)

    letters: str

    @field_validator("letters")
    @classmethod
    def _normalize(cls, value: str) -> str:
        value = value.strip().strip("()").replace("∗", "*").lower()
        if not 1 <= len(value) <= 4 or any(c not in "sk*" for c in value):
            raise ValueError(f"symmetry type must be 1-4 letters over s, k, *; got '{value}'")
        return value

    @classmethod
    def parse(cls, text: str) -> "SymmetryType":
        try:
            return cls(letters=text)
        except ValueError as e:
            raise FormatError(f"invalid symmetry type '{text}'") from e

    @property
    def skew_count(self) -> int:
        return self.letters.count("k")

    def __str__(self) -> str:
        return self.letters


class BlockSymmetry(str, Enum):
    """Symmetry of a single block."""
    SYMMETRIC = "symmetric"
    SKEW = "skew"
    NEITHER = "neither"

    @property
    def letter(self) -> str:
        return {"symmetric": "s", "skew": "k", "neither": "*"}[self.value]


_PARAMS_RE = re.compile(r"^\(?\s*(\d+)\s*;\s*(\d+(?:\s*,\s*\d+)*)\s*;\s*(-?\d+)\s*\)?$")


class SdsParams(BaseModel):
    """Parameter set (n; k_1, ..., k_r; lambda)."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    k: Tuple[int, ...]
    lam: int

    @classmethod
    def from_sizes(cls, n: int, k: Tuple[int, ...]) -> "SdsParams":
        """Params with lambda taken from condition (1)."""
        return cls(n=n, k=tuple(k), lam=sum(k) - n)

    @classmethod
    def parse(cls, text: str) -> "SdsParams":
        match = _PARAMS_RE.match(text.strip())
        if not match:
            raise FormatError(f"invalid parameter set '{text}' (expected n;k1,...,kr;lambda)")
        k = tuple(int(x) for x in match.group(2).split(","))
        return cls(n=int(match.group(1)), k=k, lam=int(match.group(3)))

    @property
    def a(self) -> Tuple[int, ...]:
        """Row sums n - 2k_i of the characteristic matrices."""
        return tuple(self.n - 2 * ki for ki in self.k)

    @property
    def eq1_holds(self) -> bool:
        return self.lam == sum(self.k) - self.n

    @property
    def eq3_holds(self) -> bool:
        return sum(ai * ai for ai in self.a) == 4 * self.n

    def __str__(self) -> str:
        return f"({self.n};{','.join(str(ki) for ki in self.k)};{self.lam})"


class VerificationResult(BaseModel):
    """Outcome of checking a block family against the SDS definition."""
    ok: bool
    params: Optional[SdsParams] = None
    difference_family: bool = False
    eq1_holds: bool = False
    eq3_holds: bool = False
    offending_element: Optional[int] = None
    offending_count: Optional[int] = None
    detail: str = ""


class RdsParams(BaseModel):
    """Relative difference set parameters (m, n, k, lambda) in Z_{mn}, forbidden subgroup of order n."""
    model_config = ConfigDict(frozen=True)

    m: int
    n: int
    k: int
    lam: int

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.m, self.n, self.k, self.lam)


class BibdSummary(BaseModel):
    """Parameters (v, b, r, k, lambda) of a developed design."""
    model_config = ConfigDict(frozen=True)

    v: int
    b: int
    r: int
    k: int
    lam: int


class BlockConstraint(str, Enum):
    """Candidate filter for one block position of a search."""
    SYMMETRIC = "symmetric"
    SKEW = "skew"
    FREE = "free"

    @classmethod
    def from_letter(cls, letter: str) -> "BlockConstraint":
        return {"s": cls.SYMMETRIC, "k": cls.SKEW, "*": cls.FREE}[letter]


class DedupMode(str, Enum):
    """Search result deduplication."""
    NONE = "none"
    CANONICAL = "canonical"


class SearchSpec(BaseModel):
    """Exhaustive search request."""
    group: GroupSpec
    params: SdsParams
    symmetry_type: SymmetryType
    dedup: DedupMode = DedupMode.CANONICAL
    allow_translation: bool = True
    limit: Optional[int] = Field(default=None, ge=1)
    budget: Optional[int] = Field(default=None, ge=1)
    workers: int = Field(default=1, ge=1)


class ItemStatus(BaseModel):
    """Pass/fail line of a run report."""
    locator: str
    passed: bool
    detail: str = ""


class RunReport(BaseModel):
    """Result of one CLI command."""
    command: str
    items: List[ItemStatus] = Field(default_factory=list)
    elapsed: Optional[float] = None
    exit_code: int = 0

    def add(self, locator: str, passed: bool, detail: str = "") -> ItemStatus:
        item = ItemStatus(locator=locator, passed=passed, detail=detail)
        self.items.append(item)
        return item

    @property
    def all_passed(self) -> bool:
        return all(item.passed for item in self.items)
