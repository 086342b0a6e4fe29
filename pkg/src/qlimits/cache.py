"""Persistent on-disk cache for expensive q-expansions.

One file per form key, human-inspectable: a short header (format version,
key, valuation, precision, payload digest) followed by newline-delimited
``exponent coefficient`` pairs with coefficients as decimal strings.  A hit
whose stored precision is at least the requested one is served truncated;
corrupted entries are detected by the digest, reported, and dropped so the
caller recomputes.  Writes go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import os
import tempfile
import warnings
from hashlib import sha256
from pathlib import Path

from .series import QSeries

_FORMAT = "qexp 1"


class ExpansionCache:
    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def _path(self, key: str) -> Path:
        return self.directory / (sha256(key.encode()).hexdigest()[:24] + ".qexp")

    @staticmethod
    def _payload(series: QSeries) -> str:
        return "".join(f"{e} {c}\n" for e, c in series.items())

    def store(self, key: str, series: QSeries) -> Path:
        if series.is_rational:
            raise ValueError("only integer series are cached")
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = self._payload(series)
        digest = sha256(payload.encode()).hexdigest()
        header = (
            f"{_FORMAT}\nkey {key}\nvaluation {series.valuation}\n"
            f"precision {series.precision}\ndigest {digest}\n"
        )
        path = self._path(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as handle:
                handle.write(header)
                handle.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def load(self, key: str, min_precision: int | None = None) -> QSeries | None:
        """Stored series for key, or None on miss/corruption/short entry.

        When ``min_precision`` is given, a deeper stored expansion is served
        truncated to exactly that precision.
        """
        path = self._path(key)
        try:
            text = path.read_text()
        except OSError:
            return None
        try:
            series = self._parse(text, key)
        except _CorruptEntry as exc:
            warnings.warn(f"cache entry for {key!r} is corrupted ({exc}); recomputing")
            try:
                path.unlink()
            except OSError:
                pass
            return None
        if min_precision is None:
            return series
        if series.precision < min_precision:
            return None
        return series.truncate(min_precision)

    @staticmethod
    def _parse(text: str, key: str) -> QSeries:
        lines = text.splitlines()
        if len(lines) < 5 or lines[0] != _FORMAT:
            raise _CorruptEntry("bad header")
        fields = {}
        for line in lines[1:5]:
            name, _, value = line.partition(" ")
            fields[name] = value
        if fields.get("key") != key:
            raise _CorruptEntry("key mismatch")
        payload = "".join(line + "\n" for line in lines[5:] if line)
        if sha256(payload.encode()).hexdigest() != fields.get("digest"):
            raise _CorruptEntry("digest mismatch")
        valuation = int(fields["valuation"])
        precision = int(fields["precision"])
        coeffs = [0] * (precision - valuation)
        for line in lines[5:]:
            if not line:
                continue
            e_str, _, c_str = line.partition(" ")
            coeffs[int(e_str) - valuation] = int(c_str)
        return QSeries(valuation, tuple(coeffs))


class _CorruptEntry(Exception):
    pass
