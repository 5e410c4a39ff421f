"""In-memory store for search results."""

import hashlib
import logging
from pathlib import Path
from threading import Lock
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from sds import SdsFamily, canonical_form, save_sds

logger = logging.getLogger(__name__)


def raw_key(f: SdsFamily) -> bytes:
    """Block-by-block packed bitsets, in family order."""
    header = f"{f.group.spec.text}|{len(f.blocks)}|".encode()
    return header + b"".join(np.packbits(b.mask).tobytes() for b in f.blocks)


class FamilyStore:
    """Thread-safe store of families keyed by canonical form (or raw blocks)."""

    def __init__(self, key: Optional[Callable[[SdsFamily], bytes]] = None, max_families: Optional[int] = None):
        self.key = key or canonical_form
        self.max_families = max_families
        self._families: Dict[bytes, SdsFamily] = {}
        self._lock = Lock()

    @classmethod
    def canonical(cls, allow_translation: bool = True, max_families: Optional[int] = None) -> "FamilyStore":
        return cls(lambda f: canonical_form(f, allow_translation), max_families)

    @classmethod
    def raw(cls, max_families: Optional[int] = None) -> "FamilyStore":
        return cls(raw_key, max_families)

    def add(self, family: SdsFamily) -> bool:
        """Store the family unless an equal key is present; True if it was new."""
        key = self.key(family)
        with self._lock:
            if key in self._families:
                return False
            if self.max_families is not None and len(self._families) >= self.max_families:
                return False
            self._families[key] = family
            return True

    def __len__(self) -> int:
        with self._lock:
            return len(self._families)

    @property
    def full(self) -> bool:
        return self.max_families is not None and len(self) >= self.max_families

    def families(self) -> List[SdsFamily]:
        """Stored families ordered by key."""
        with self._lock:
            return [self._families[k] for k in sorted(self._families)]

    def export(self, directory: Union[str, Path], prefix: str = "sds") -> List[Path]:
        """Write each family as an SDS file named by a hash of its key."""
        directory = Path(directory)
        with self._lock:
            items = sorted(self._families.items())
        paths = []
        for key, family in items:
            digest = hashlib.sha1(key).hexdigest()[:12]
            paths.append(save_sds(family, directory / f"{prefix}_{digest}.sds"))
        logger.info(f"Exported {len(paths)} families to {directory}")
        return paths

    def clear(self):
        with self._lock:
            self._families.clear()
