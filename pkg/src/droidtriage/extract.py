"""Directory scanner that turns an unpacked app tree into a feature vector.

The scanner works on plain files: the manifest ``AndroidManifest.xml`` at the
tree root supplies PERMISSION bits, and every other regular file under the
root (recursively) supplies API and COMMAND bits. Matching is raw,
case-sensitive substring search on bytes, so patterns are found inside
binary blobs as well as text. Permission names must additionally stand alone
as tokens: an occurrence flanked by identifier characters does not count, so
SEND_SMS never fires inside SEND_SMS_EXTRA.

Bit contributions from individual files combine with OR, which makes the
result independent of traversal order.
"""

from __future__ import annotations

import os
import warnings
from pathlib import Path

import numpy as np

from .catalog import PERMISSION, FeatureCatalog

MANIFEST_NAME = "AndroidManifest.xml"

_IDENT = frozenset(b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_")


def _contains_token(data: bytes, pattern: bytes) -> bool:
    """True when `pattern` occurs delimited by non-identifier bytes."""
    start = 0
    while True:
        pos = data.find(pattern, start)
        if pos < 0:
            return False
        before_ok = pos == 0 or data[pos - 1] not in _IDENT
        end = pos + len(pattern)
        after_ok = end == len(data) or data[end] not in _IDENT
        if before_ok and after_ok:
            return True
        start = pos + 1


def scan_app(root, catalog: FeatureCatalog) -> np.ndarray:
    """Scan the unpacked app tree at `root` against `catalog`.

    Returns a uint8 bit vector aligned to the catalog. A missing manifest
    leaves every PERMISSION bit at 0 and emits a warning instead of aborting,
    so partial trees still yield the attribute bits.
    """
    root = Path(root)
    if not root.is_dir():
        raise NotADirectoryError(f"{root} is not a readable directory")

    perm_idx = [i for i, f in enumerate(catalog) if f.category == PERMISSION]
    attr_idx = [i for i, f in enumerate(catalog) if f.category != PERMISSION]
    patterns = [f.pattern.encode("utf-8") for f in catalog]
    bits = np.zeros(len(catalog), dtype=np.uint8)

    manifest = root / MANIFEST_NAME
    if manifest.is_file():
        data = manifest.read_bytes()
        for i in perm_idx:
            if _contains_token(data, patterns[i]):
                bits[i] = 1
    else:
        warnings.warn(
            f"{manifest} missing; permission bits left at 0", stacklevel=2
        )

    pending = set(attr_idx)
    for dirpath, _dirnames, filenames in os.walk(root):
        for fname in sorted(filenames):
            path = Path(dirpath) / fname
            if path == manifest or not pending:
                continue
            try:
                data = path.read_bytes()
            except OSError:
                continue
            for i in [i for i in pending if patterns[i] in data]:
                bits[i] = 1
                pending.discard(i)
    return bits
