"""Group-indexed matrices, the Goethals-Seidel array and Hadamard certification."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from config import settings
from errors import FormatError, InvalidParametersError
from groups import Group
from sds import Block, SdsFamily

logger = logging.getLogger(__name__)

MATRIX_HEADERS = ("hadamard", "matrix")


@dataclass(frozen=True, eq=False)
class GroupMatrix:
    """Square integer matrix, optionally indexed by the elements of a group."""
    entries: np.ndarray
    group: Optional[Group] = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidParametersError(f"matrix must be square, got shape {entries.shape}")
        if self.group is not None and entries.shape[0] != self.group.order:
            raise InvalidParametersError(f"order {entries.shape[0]} matrix cannot be indexed by {self.group.spec}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    @property
    def T(self) -> np.ndarray:
        return self.entries.T

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupMatrix) and np.array_equal(self.entries, other.entries)

    __hash__ = None


class SignMatrix(GroupMatrix):
    """Matrix with entries +1 / -1."""

    def __post_init__(self):
        super().__post_init__()
        if not np.isin(self.entries, (-1, 1)).all():
            raise InvalidParametersError("sign matrix entries must be +1 or -1")


MatrixLike = Union[GroupMatrix, np.ndarray]


def _entries(m: MatrixLike) -> np.ndarray:
    return m.entries if isinstance(m, GroupMatrix) else np.asarray(m, dtype=np.int64)


def char_matrix(b: Block) -> SignMatrix:
    """X^c with entry (x, y) = 1 - 2*chi(y - x)."""
    g = b.group
    return SignMatrix(1 - 2 * b.mask[g.sub_table.T].astype(np.int64), g)


def r_matrix(g: Group) -> GroupMatrix:
    """Permutation matrix R with R[x, y] = 1 iff x + y = 0."""
    r = np.zeros((g.order, g.order), dtype=np.int64)
    r[np.arange(g.order), g.neg_table] = 1
    return GroupMatrix(r, g)


def _shifts(g: Group, seed: Optional[int]) -> np.ndarray:
    if g.order <= settings.exhaustive_type_check_order:
        return np.arange(g.order)
    rng = np.random.default_rng(settings.sample_seed if seed is None else seed)
    return rng.choice(g.order, size=min(settings.type_check_samples, g.order), replace=False)


def _require_group(m: GroupMatrix) -> Group:
    if m.group is None:
        raise InvalidParametersError("type checks need a group-indexed matrix")
    return m.group


def is_type1(m: GroupMatrix, seed: Optional[int] = None) -> bool:
    """X[x+z, y+z] = X[x, y]; exhaustive in z up to the configured order, sampled above."""
    g = _require_group(m)
    x = m.entries
    for z in _shifts(g, seed):
        shift = g.add_table[:, z]
        if not np.array_equal(x[np.ix_(shift, shift)], x):
            return False
    return True


def is_type2(m: GroupMatrix, seed: Optional[int] = None) -> bool:
    """X[x+z, y-z] = X[x, y]."""
    g = _require_group(m)
    x = m.entries
    for z in _shifts(g, seed):
        if not np.array_equal(x[np.ix_(g.add_table[:, z], g.sub_table[:, z])], x):
            return False
    return True


def goethals_seidel(a1: MatrixLike, a2: MatrixLike, a3: MatrixLike, a4: MatrixLike, r: MatrixLike) -> SignMatrix:
    """Order-4n matrix from the Goethals-Seidel array with U, X, Y, Z = a1..a4."""
    u, x, y, z, r = (_entries(m) for m in (a1, a2, a3, a4, r))
    n = u.shape[0]
    for m in (x, y, z, r):
        if m.shape != (n, n):
            raise InvalidParametersError(f"Goethals-Seidel inputs must all be {n}x{n}, got {m.shape}")

    xr, yr, zr = x @ r, y @ r, z @ r
    xtr, ytr, ztr = x.T @ r, y.T @ r, z.T @ r
    h = np.block([
        [u, xr, yr, zr],
        [-xr, u, -ztr, ytr],
        [-yr, ztr, u, -xtr],
        [-zr, -ytr, xtr, u],
    ])
    return SignMatrix(h)


def hadamard_from_sds(f: SdsFamily) -> SignMatrix:
    if len(f.blocks) != 4:
        raise InvalidParametersError(f"the Goethals-Seidel array needs 4 blocks, got {len(f.blocks)}")
    a1, a2, a3, a4 = (char_matrix(b) for b in f.blocks)
    h = goethals_seidel(a1, a2, a3, a4, r_matrix(f.group))
    logger.info(f"Assembled order {h.order} matrix from {f.params}")
    return h


def is_hadamard(h: MatrixLike) -> bool:
    """H Hᵀ = order * I, exact integer arithmetic."""
    e = _entries(h)
    n = e.shape[0]
    return bool(np.isin(e, (-1, 1)).all() and np.array_equal(e @ e.T, n * np.eye(n, dtype=np.int64)))


def is_skew_type(h: MatrixLike) -> bool:
    """H + Hᵀ = 2I."""
    e = _entries(h)
    return bool(np.array_equal(e + e.T, 2 * np.eye(e.shape[0], dtype=np.int64)))


def amicable(x: MatrixLike, y: MatrixLike) -> bool:
    """X Yᵀ = Y Xᵀ."""
    a, b = _entries(x), _entries(y)
    return bool(np.array_equal(a @ b.T, b @ a.T))


def commute(x: MatrixLike, y: MatrixLike) -> bool:
    a, b = _entries(x), _entries(y)
    return bool(np.array_equal(a @ b, b @ a))


def gram_sum(f: SdsFamily) -> np.ndarray:
    """Sum of (A_i^c)ᵀ A_i^c over the blocks."""
    n = f.group.order
    total = np.zeros((n, n), dtype=np.int64)
    for block in f.blocks:
        c = char_matrix(block).entries
        total += c.T @ c
    return total


def gram_identity_holds(f: SdsFamily) -> bool:
    n = f.group.order
    return bool(np.array_equal(gram_sum(f), 4 * n * np.eye(n, dtype=np.int64)))


# +/- text format

def format_matrix(m: MatrixLike, header: Optional[str] = None) -> str:
    e = _entries(m)
    if header is None:
        header = "hadamard" if is_hadamard(e) else "matrix"
    if header not in MATRIX_HEADERS:
        raise InvalidParametersError(f"unknown matrix header '{header}'")
    symbols = np.where(e > 0, "+", "-")
    rows = ["".join(row) for row in symbols]
    return "\n".join([f"{header} {e.shape[0]}"] + rows) + "\n"


def parse_matrix(text: str) -> Tuple[str, SignMatrix]:
    """Parse a `hadamard N` / `matrix N` header followed by N rows of +/-."""
    lines = text.splitlines()
    if not lines:
        raise FormatError("empty matrix file", 1)
    parts = lines[0].split()
    if len(parts) != 2 or parts[0] not in MATRIX_HEADERS or not parts[1].isdigit():
        raise FormatError(f"bad header '{lines[0]}' (expected 'hadamard N' or 'matrix N')", 1)
    header, n = parts[0], int(parts[1])

    rows = lines[1:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != n:
        raise FormatError(f"expected {n} rows, found {len(rows)}", len(lines))

    entries = np.empty((n, n), dtype=np.int64)
    for i, row in enumerate(rows):
        line_number = i + 2
        row = row.strip()
        if len(row) != n:
            raise FormatError(f"row has {len(row)} entries, expected {n}", line_number)
        bad = set(row) - {"+", "-"}
        if bad:
            raise FormatError(f"unexpected characters {sorted(bad)}", line_number)
        entries[i] = [1 if c == "+" else -1 for c in row]
    return header, SignMatrix(entries)


def write_matrix(m: MatrixLike, path: Union[str, Path], header: Optional[str] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_matrix(m, header))
    logger.info(f"Wrote order {_entries(m).shape[0]} matrix to {path}")
    return path


def read_matrix(path: Union[str, Path]) -> Tuple[str, SignMatrix]:
    return parse_matrix(Path(path).read_text())
