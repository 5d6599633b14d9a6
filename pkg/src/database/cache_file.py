"""
Text-file persistence for correlator values and the alpha table.

Correlator file::

    kappa-psi-cache v1
    g=<int>;k=<multiindex>;t=<d1,d2,...>;v=<p/q>

Alpha file (``<cache>.alpha``)::

    kappa-psi-alpha v1
    <multiindex>\t<p/q>
"""
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Tuple, Union

import aiofiles
import aiofiles.os

from ..services.correlator import CorrelatorKey, degree_matches
from ..utils.errors import CacheCorruptionError, KappaPsiError
from ..utils.exact import format_rational, parse_rational
from ..utils.multiindex import MultiIndex

logger = logging.getLogger(__name__)

CACHE_HEADER = "kappa-psi-cache v1"
ALPHA_HEADER = "kappa-psi-alpha v1"


def format_record(key: CorrelatorKey, value: Fraction) -> str:
    taus = ",".join(str(d) for d in key.taus)
    return f"g={key.genus};k={key.kappa};t={taus};v={format_rational(value)}"


def parse_record(line: str, line_number: int = 0) -> Tuple[CorrelatorKey, Fraction]:
    """One record line; anything malformed or out of degree is corruption."""
    try:
        fields = dict(part.split("=", 1) for part in line.strip().split(";"))
        if set(fields) != {"g", "k", "t", "v"}:
            raise ValueError(f"expected fields g, k, t, v; got {sorted(fields)}")
        taus = tuple(int(d) for d in fields["t"].split(",")) if fields["t"] else ()
        key = CorrelatorKey(int(fields["g"]), MultiIndex.parse(fields["k"]), taus)
        value = parse_rational(fields["v"])
    except (ValueError, KappaPsiError) as e:
        raise CacheCorruptionError(f"line {line_number}: malformed record {line.strip()!r}: {e}") from e
    if not degree_matches(key):
        raise CacheCorruptionError(
            f"line {line_number}: {key} has degree {key.degree}, dimension is {key.dimension}"
        )
    return key, value


def _record_order(key: CorrelatorKey):
    return (key.genus, key.kappa.sort_key(), key.taus)


class CacheRepository:
    """Reads and writes the cache file and its alpha sibling."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self.alpha_path = Path(f"{self.path}.alpha")

    async def _read_lines(self, path: Path, header: str) -> List[str]:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            content = await f.read()
        lines = content.splitlines()
        if not lines or lines[0].strip() != header:
            raise CacheCorruptionError(f"{path}: missing or unknown header (expected {header!r})")
        return lines[1:]

    async def _write_lines(self, path: Path, header: str, lines: Iterable[str]):
        temp = path.with_name(path.name + ".tmp")
        async with aiofiles.open(temp, "w", encoding="utf-8") as f:
            await f.write(header + "\n")
            for line in lines:
                await f.write(line + "\n")
        await aiofiles.os.replace(temp, path)

    async def load(self) -> Dict[CorrelatorKey, Fraction]:
        """All records; an absent file is an empty cache."""
        if not self.path.exists():
            logger.info(f"No cache file at {self.path}, starting empty")
            return {}
        values: Dict[CorrelatorKey, Fraction] = {}
        for number, line in enumerate(await self._read_lines(self.path, CACHE_HEADER), start=2):
            if not line.strip():
                continue
            key, value = parse_record(line, number)
            if key in values and values[key] != value:
                raise CacheCorruptionError(f"line {number}: conflicting values for {key}")
            values[key] = value
        logger.info(f"Loaded {len(values)} cached correlators from {self.path}")
        return values

    async def save(self, values: Mapping[CorrelatorKey, Fraction]):
        ordered = sorted(values.items(), key=lambda item: _record_order(item[0]))
        await self._write_lines(self.path, CACHE_HEADER, (format_record(k, v) for k, v in ordered))
        logger.info(f"Saved {len(ordered)} correlators to {self.path}")

    async def load_alpha(self) -> Dict[MultiIndex, Fraction]:
        if not self.alpha_path.exists():
            return {}
        values: Dict[MultiIndex, Fraction] = {}
        for number, line in enumerate(await self._read_lines(self.alpha_path, ALPHA_HEADER), start=2):
            if not line.strip():
                continue
            try:
                index_text, value_text = line.split("\t")
                values[MultiIndex.parse(index_text)] = parse_rational(value_text)
            except (ValueError, KappaPsiError) as e:
                raise CacheCorruptionError(f"{self.alpha_path} line {number}: malformed entry {line!r}") from e
        logger.info(f"Loaded {len(values)} alpha constants from {self.alpha_path}")
        return values

    async def save_alpha(self, lines: List[str]):
        await self._write_lines(self.alpha_path, ALPHA_HEADER, lines)
        logger.info(f"Saved {len(lines)} alpha constants to {self.alpha_path}")
