"""CSV dataset parsing and the vendored real-data fixtures."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import FixtureError, InvalidSampleError
from .samples import CensoredSample, Sample

__all__ = ["Dataset", "DatasetParseError", "parse_dataset", "read_dataset", "fixture_info",
           "fixture_names", "load_fixture"]


class DatasetParseError(InvalidSampleError):
    """A CSV row or header is malformed; the message names the line and column."""


@dataclass(frozen=True)
class Dataset:
    times: np.ndarray
    status: np.ndarray | None = None
    name: str | None = None

    @property
    def n(self) -> int:
        return self.times.size

    @property
    def n_censored(self) -> int:
        return 0 if self.status is None else int((self.status == 0).sum())

    def sample(self) -> Sample:
        return Sample(self.times)

    def censored_sample(self) -> CensoredSample:
        status = np.ones(self.n, dtype=np.int8) if self.status is None else self.status
        return CensoredSample(self.times, status)


def parse_dataset(text: str, source: str = "<input>") -> Dataset:
    """Parse CSV text with a ``time`` column and an optional ``status`` column."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetParseError(f"{source}: empty file, expected a header row") from None
    header = [h.strip().lstrip("﻿").lower() for h in header]
    if "time" not in header:
        raise DatasetParseError(f"{source}: header has no 'time' column (found {header})")
    ti = header.index("time")
    si = header.index("status") if "status" in header else None
    times, status = [], []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DatasetParseError(
                f"{source}: line {lineno}: expected {len(header)} fields, got {len(row)}"
            )
        raw = row[ti].strip()
        try:
            t = float(raw)
        except ValueError:
            raise DatasetParseError(f"{source}: line {lineno}, column 'time': not a number: {raw!r}") from None
        if not math.isfinite(t) or t <= 0:
            raise DatasetParseError(
                f"{source}: line {lineno}, column 'time': must be positive and finite, got {raw!r}"
            )
        times.append(t)
        if si is not None:
            raw = row[si].strip()
            if raw not in ("0", "1"):
                raise DatasetParseError(f"{source}: line {lineno}, column 'status': must be 0 or 1, got {raw!r}")
            status.append(int(raw))
    if not times:
        raise DatasetParseError(f"{source}: no data rows")
    return Dataset(
        np.asarray(times, dtype=float),
        np.asarray(status, dtype=np.int8) if si is not None else None,
    )


def read_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetParseError(f"{path}: cannot read: {exc.strerror}") from None
    ds = parse_dataset(text, str(path))
    return Dataset(ds.times, ds.status, path.name)


def _registry() -> dict:
    return json.loads(resources.files(__package__).joinpath("fixtures/registry.json").read_text())


def fixture_names() -> list[str]:
    return list(_registry())


def fixture_info(name: str) -> dict:
    reg = _registry()
    if name not in reg:
        raise FixtureError(f"unknown fixture {name!r}; choose from {', '.join(reg)}")
    return reg[name]


def load_fixture(name: str) -> Dataset:
    """Parsed vendored dataset; disabled fixtures raise :class:`FixtureError`."""
    info = fixture_info(name)
    if not info["enabled"]:
        raise FixtureError(f"fixture {name!r} is not vendored: {info['disabled_reason']}")
    text = resources.files(__package__).joinpath("fixtures", info["file"]).read_text()
    ds = parse_dataset(text, f"fixture {name}")
    return Dataset(ds.times, ds.status, name)
