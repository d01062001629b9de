"""Deterministic on-disk cache for eigenbases, 1D spectra, and overlaps.

Entries are keyed by a canonical text rendering of their descriptor (sorted
keys, exact decimal floats via repr), so two runs with bit-identical inputs
share a key while any parameter difference — even 1e-12 — produces a new
one.  Payload arrays are stored as little-endian float64 with a magic
header and a sha256 checksum; writes are atomic (temp file + rename) so
concurrent runs sharing a cache directory never observe partial entries.

Layout: <cache>/<kind>/<key>.bin plus a human-readable <key>.meta.txt
sidecar holding the originating descriptor.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import CacheError, CorruptEntryError, VersionMismatchError

__all__ = ["CacheEntry", "Store", "canonical_text", "descriptor_key"]

_MAGIC = b"QECHOLB1"
_FORMAT_VERSION = 1
_KINDS = ("eigenbasis", "spectrum1d", "overlap")


def canonical_text(descriptor: dict) -> str:
    """Deterministic text rendering: sorted keys, repr floats, one per line."""
    lines = []

    def emit(prefix: str, value) -> None:
        if isinstance(value, dict):
            for k in sorted(value):
                emit(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                emit(f"{prefix}[{i}]", v)
        elif isinstance(value, bool):
            lines.append(f"{prefix}={'true' if value else 'false'}")
        elif isinstance(value, float):
            lines.append(f"{prefix}={value!r}")
        elif value is None:
            lines.append(f"{prefix}=null")
        else:
            lines.append(f"{prefix}={value}")

    emit("", descriptor)
    return "\n".join(lines) + "\n"


def descriptor_key(descriptor: dict) -> str:
    """Canonical cache key: sha256 of the canonical descriptor text."""
    return hashlib.sha256(canonical_text(descriptor).encode()).hexdigest()[:32]


@dataclass
class CacheEntry:
    """One cached artifact: named float64 arrays plus their descriptor."""

    kind: str
    descriptor: dict
    arrays: Dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise CacheError(f"unknown cache kind {self.kind!r}")
        # note: not ascontiguousarray, which would promote 0-d arrays to 1-d;
        # serialization copies through astype().tobytes() so layout is moot
        self.arrays = {
            name: np.asarray(a, dtype=np.float64) for name, a in self.arrays.items()
        }

    @property
    def key(self) -> str:
        return descriptor_key(self.descriptor)


def _serialize(entry: CacheEntry) -> bytes:
    """Binary layout: magic, version, array count, then per array a
    length-prefixed utf-8 name, ndim + shape, and raw little-endian float64
    data; finally the sha256 of everything before it."""
    parts = [_MAGIC, struct.pack("<II", _FORMAT_VERSION, len(entry.arrays))]
    for name in sorted(entry.arrays):
        arr = entry.arrays[name]
        nb = name.encode()
        parts.append(struct.pack("<I", len(nb)))
        parts.append(nb)
        parts.append(struct.pack("<I", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        parts.append(arr.astype("<f8").tobytes())
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


def _deserialize(blob: bytes) -> Dict[str, np.ndarray]:
    if len(blob) < len(_MAGIC) + 8 + 32:
        raise CorruptEntryError("cache entry truncated")
    body, checksum = blob[:-32], blob[-32:]
    if hashlib.sha256(body).digest() != checksum:
        raise CorruptEntryError("cache entry failed its checksum")
    if body[: len(_MAGIC)] != _MAGIC:
        raise CorruptEntryError("bad magic header")
    off = len(_MAGIC)
    version, count = struct.unpack_from("<II", body, off)
    off += 8
    if version != _FORMAT_VERSION:
        raise VersionMismatchError(
            f"cache entry has format version {version}, expected {_FORMAT_VERSION}"
        )
    arrays: Dict[str, np.ndarray] = {}
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<I", body, off)
            off += 4
            name = body[off : off + name_len].decode()
            off += name_len
            (ndim,) = struct.unpack_from("<I", body, off)
            off += 4
            shape = struct.unpack_from(f"<{ndim}Q", body, off)
            off += 8 * ndim
            size = 8 * int(np.prod(shape, dtype=np.int64)) if ndim else 8
            data = np.frombuffer(body[off : off + size], dtype="<f8")
            off += size
            arrays[name] = data.reshape(shape).copy()
    except (struct.error, ValueError) as exc:
        raise CorruptEntryError(f"cache entry is malformed: {exc}") from None
    return arrays


class Store:
    """File-backed cache rooted at ``root`` (created on first write)."""

    def __init__(self, root: str):
        self.root = root

    def _paths(self, kind: str, key: str) -> Tuple[str, str]:
        base = os.path.join(self.root, kind)
        return os.path.join(base, f"{key}.bin"), os.path.join(base, f"{key}.meta.txt")

    def put(self, entry: CacheEntry) -> str:
        """Write the entry atomically and return its key."""
        key = entry.key
        bin_path, meta_path = self._paths(entry.kind, key)
        os.makedirs(os.path.dirname(bin_path), exist_ok=True)
        blob = _serialize(entry)
        meta = canonical_text(entry.descriptor)
        for path, data in ((bin_path, blob), (meta_path, meta.encode())):
            fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, path)
            except OSError:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return key

    def get(self, kind: str, descriptor: dict) -> Optional[CacheEntry]:
        """Look up by descriptor; None on a clean miss."""
        if kind not in _KINDS:
            raise CacheError(f"unknown cache kind {kind!r}")
        key = descriptor_key(descriptor)
        bin_path, _ = self._paths(kind, key)
        if not os.path.exists(bin_path):
            return None
        with open(bin_path, "rb") as fh:
            blob = fh.read()
        return CacheEntry(kind=kind, descriptor=descriptor,
                          arrays=_deserialize(blob))

    def keys(self, kind: str) -> List[str]:
        base = os.path.join(self.root, kind)
        if not os.path.isdir(base):
            return []
        return sorted(f[:-4] for f in os.listdir(base) if f.endswith(".bin"))
