"""Persistent memo of evaluator replies, keyed per (prompt, sample, model, strategy).

File layout (all integers big-endian)::

    header  : b"MOPCACHE" | u16 version
    record* : key (32 bytes, sha256) | u32 value length | u32 crc32(value) | value (UTF-8)

Later records win. On open the log is read, damaged records are dropped with a
warning and the file is rewritten compacted.
"""
from __future__ import annotations

import hashlib
import logging
import os
import struct
import threading
import zlib
from dataclasses import dataclass
from pathlib import Path

logger = logging.getLogger(__name__)

__all__ = ["CacheKey", "EvalCache", "CacheFormatError"]

MAGIC = b"MOPCACHE"
VERSION = 1
_HEADER = MAGIC + struct.pack(">H", VERSION)
_REC = struct.Struct(">32sII")


class CacheFormatError(ValueError):
    pass


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CacheKey:
    prompt_hash: str
    sample_hash: str
    model_id: str
    strategy_hash: str

    @classmethod
    def build(cls, prompt_text: str, sample_text: str, model_id: str, strategy_descriptor: str):
        return cls(_sha(prompt_text), _sha(sample_text), model_id, _sha(strategy_descriptor))

    def digest(self) -> bytes:
        parts = (self.prompt_hash, self.sample_hash, self.model_id, self.strategy_hash)
        return hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()


class EvalCache:
    """Key-value store of replies. ``path=None`` keeps everything in memory.

    Reads are lock-free dict lookups; writes go through one lock so the log
    stays well formed. Set ``fsync=True`` to force each record to disk.
    """

    def __init__(self, path=None, fsync: bool = False):
        self.path = Path(path) if path is not None else None
        self.fsync = fsync
        self._data: dict[bytes, str] = {}
        self._lock = threading.Lock()
        self._fh = None
        self.hits = 0
        self.misses = 0
        self.dropped = 0
        if self.path is not None:
            self._open()

    def _open(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.path.exists() and self.path.stat().st_size:
            self._load(self.path.read_bytes())
        self._compact()
        self._fh = open(self.path, "ab")

    def _load(self, blob: bytes):
        if not blob.startswith(MAGIC):
            raise CacheFormatError(f"{self.path}: not a cache file")
        (version,) = struct.unpack_from(">H", blob, len(MAGIC))
        if version != VERSION:
            raise CacheFormatError(f"{self.path}: unsupported cache version {version}")
        pos = len(_HEADER)
        while pos < len(blob):
            if pos + _REC.size > len(blob):
                logger.warning("%s: truncated record header at byte %d, ignored", self.path, pos)
                self.dropped += 1
                break
            key, length, crc = _REC.unpack_from(blob, pos)
            pos += _REC.size
            value = blob[pos:pos + length]
            pos += length
            if len(value) < length:
                logger.warning("%s: truncated record at byte %d, ignored", self.path, pos - length)
                self.dropped += 1
                break
            if zlib.crc32(value) != crc:
                logger.warning("%s: corrupted record at byte %d, treated as miss", self.path, pos - length)
                self.dropped += 1
                continue
            try:
                self._data[key] = value.decode("utf-8")
            except UnicodeDecodeError:
                logger.warning("%s: undecodable record at byte %d, treated as miss", self.path, pos - length)
                self.dropped += 1

    @staticmethod
    def _encode(key: bytes, reply: str) -> bytes:
        value = reply.encode("utf-8")
        return _REC.pack(key, len(value), zlib.crc32(value)) + value

    def _compact(self):
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(_HEADER)
            for key, reply in self._data.items():
                fh.write(self._encode(key, reply))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, self.path)

    def get(self, key: CacheKey) -> str | None:
        reply = self._data.get(key.digest())
        if reply is None:
            self.misses += 1
        else:
            self.hits += 1
        return reply

    def put(self, key: CacheKey, reply: str) -> None:
        digest = key.digest()
        with self._lock:
            self._data[digest] = reply
            if self._fh is None:
                return
            try:
                self._fh.write(self._encode(digest, reply))
                self._fh.flush()
                if self.fsync:
                    os.fsync(self._fh.fileno())
            except OSError as exc:
                logger.warning("%s: cache write failed (%s); continuing uncached", self.path, exc)

    def __contains__(self, key: CacheKey) -> bool:
        return key.digest() in self._data

    def __len__(self) -> int:
        return len(self._data)

    def close(self):
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
