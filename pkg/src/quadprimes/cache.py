"""Binary on-disk cache for SieveWindow segments.

File layout (little-endian):
    magic   4 bytes  b"QPSW"
    version u32      1
    lo      i64
    hi      i64
    flags   ceil((hi-lo)/8) bytes, bit-packed prime flags
    lam     (hi-lo) float64 values

Files are keyed by (lo, hi) through their name and validated against the
header echo on load; anything inconsistent raises CacheError so a corrupt
file is never silently used.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .arith import SieveWindow

MAGIC = b"QPSW"
VERSION = 1
_HEADER = struct.Struct("<4sIqq")


class CacheError(Exception):
    """Raised when a cache file is missing, corrupt, or mismatched."""


def window_path(cache_dir: str | Path, lo: int, hi: int) -> Path:
    return Path(cache_dir) / f"window_{lo}_{hi}.svw"


def save_window(win: SieveWindow, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    packed = np.packbits(win.prime_flags)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, win.lo, win.hi))
        fh.write(packed.tobytes())
        fh.write(win.lam.astype("<f8").tobytes())


def load_window(path: str | Path, expected_lo: int | None = None,
                expected_hi: int | None = None) -> SieveWindow:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CacheError(f"cannot read cache file {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise CacheError(f"cache file {path} truncated header")
    magic, version, lo, hi = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CacheError(f"cache file {path} has bad magic {magic!r}")
    if version != VERSION:
        raise CacheError(f"cache file {path} has unsupported version {version}")
    if hi <= lo:
        raise CacheError(f"cache file {path} has invalid range [{lo}, {hi})")
    if expected_lo is not None and lo != expected_lo:
        raise CacheError(f"cache file {path} lo={lo}, expected {expected_lo}")
    if expected_hi is not None and hi != expected_hi:
        raise CacheError(f"cache file {path} hi={hi}, expected {expected_hi}")
    size = hi - lo
    nflag = (size + 7) // 8
    want = _HEADER.size + nflag + 8 * size
    if len(raw) != want:
        raise CacheError(f"cache file {path} is {len(raw)} bytes, expected {want}")
    flags = np.unpackbits(
        np.frombuffer(raw, dtype=np.uint8, count=nflag, offset=_HEADER.size)
    )[:size].astype(bool)
    lam = np.frombuffer(raw, dtype="<f8", count=size,
                        offset=_HEADER.size + nflag).astype(np.float64)
    return SieveWindow(lo=lo, hi=hi, lam=lam, prime_flags=flags)
