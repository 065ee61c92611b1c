# src/ingest.py
"""
Parsing of the mapping corpus, category sizes and embedding vectors.

The corpus is CSV with header ``word,source,target,first_year,last_year``.
Category names are interned to dense integer ids in first-appearance order.
"""
import io, re, logging
from dataclasses import dataclass
from typing import Dict, List, Optional, TextIO, Iterable

import numpy as np
import pandas as pd

logger = logging.getLogger("metnet.ingest")

CORPUS_COLUMNS = ["word", "source", "target", "first_year", "last_year"]


class CorpusError(ValueError):
    """Malformed corpus row; carries the 1-based line number."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class CategorySizeError(ValueError):
    pass


class EmbeddingFormatError(ValueError):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass(frozen=True)
class Category:
    id: int
    name: str


@dataclass(frozen=True)
class MetaphorRecord:
    word: str
    source: int
    target: int
    first_year: Optional[int] = None
    last_year: Optional[int] = None


@dataclass(frozen=True)
class CorpusFormat:
    delimiter: str = ","
    self_loops: str = "reject"   # reject | skip

    def __post_init__(self):
        if self.self_loops not in ("reject", "skip"):
            raise ValueError(f"self_loops must be 'reject' or 'skip', got {self.self_loops!r}")


@dataclass
class ParsedCorpus:
    records: List[MetaphorRecord]
    categories: List[Category]
    duplicate_rows: int = 0
    skipped_self_loops: int = 0

    @property
    def n(self) -> int:
        return len(self.categories)

    def names(self) -> List[str]:
        return [c.name for c in self.categories]


@dataclass
class CategorySizeTable:
    sizes: Dict[int, int]
    derived: bool = False

    def __getitem__(self, cid: int) -> int:
        return self.sizes[cid]

    def __contains__(self, cid: int) -> bool:
        return cid in self.sizes


@dataclass
class EmbeddingTable:
    vectors: Dict[str, np.ndarray]
    dim: int
    duplicate_keys: int = 0

    def __contains__(self, key: str) -> bool:
        return key in self.vectors

    def get(self, key: str) -> Optional[np.ndarray]:
        return self.vectors.get(key)


def normalize_name(name: str) -> str:
    """Whitespace-collapsed, case-folded comparison key for category names."""
    return " ".join((name or "").split()).casefold()


def _clean_name(name: str) -> str:
    return " ".join((name or "").split())


def _parse_year(raw: str, line: int, column: str) -> Optional[int]:
    s = (raw or "").strip()
    if not s:
        return None
    try:
        return int(s)
    except ValueError:
        raise CorpusError(line, f"{column} is not an integer year: {s!r}")


def _read_table(stream: TextIO, **kwargs) -> pd.DataFrame:
    try:
        return pd.read_csv(stream, dtype=str, keep_default_na=False, engine="python", **kwargs)
    except pd.errors.ParserError as e:
        m = re.search(r"line (\d+)", str(e))
        raise CorpusError(int(m.group(1)) if m else 0, f"malformed row: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise CorpusError(1, "empty input") from e


def parse_corpus(stream: TextIO, fmt: Optional[CorpusFormat] = None) -> ParsedCorpus:
    """
    Parse the mapping corpus into records and interned categories.

    Row order is preserved. Identical rows are kept (distinct attestations)
    and counted in ``duplicate_rows``. Self-loop rows raise CorpusError under
    ``self_loops="reject"`` and are dropped and counted under ``"skip"``.
    """
    fmt = fmt or CorpusFormat()
    df = _read_table(stream, sep=fmt.delimiter, skip_blank_lines=False)
    header = [c.strip() for c in df.columns]
    if header != CORPUS_COLUMNS:
        raise CorpusError(1, f"expected header {','.join(CORPUS_COLUMNS)}, got {','.join(header)}")
    df.columns = header

    ids: Dict[str, int] = {}
    categories: List[Category] = []
    records: List[MetaphorRecord] = []
    seen = set()
    duplicates = 0
    skipped = 0

    def intern(name: str) -> int:
        key = normalize_name(name)
        if key not in ids:
            ids[key] = len(categories)
            categories.append(Category(ids[key], _clean_name(name)))
        return ids[key]

    for i, row in enumerate(df.itertuples(index=False)):
        line = i + 2
        values = ["" if (v is None or (isinstance(v, float) and np.isnan(v))) else str(v) for v in row]
        if not any(v.strip() for v in values):
            continue
        word, src, tgt, fy, ly = (v.strip() for v in values)
        if not word:
            raise CorpusError(line, "missing word")
        if not src or not tgt:
            raise CorpusError(line, "missing source or target category")
        first_year = _parse_year(fy, line, "first_year")
        last_year = _parse_year(ly, line, "last_year")
        if first_year is not None and last_year is not None and first_year > last_year:
            raise CorpusError(line, f"first_year {first_year} after last_year {last_year}")
        if normalize_name(src) == normalize_name(tgt):
            if fmt.self_loops == "reject":
                raise CorpusError(line, f"self-loop mapping {src!r} -> {tgt!r}")
            skipped += 1
            continue
        rec = MetaphorRecord(word, intern(src), intern(tgt), first_year, last_year)
        if rec in seen:
            duplicates += 1
        seen.add(rec)
        records.append(rec)

    if duplicates:
        logger.warning(f"{duplicates} duplicate corpus rows kept", extra={"count": duplicates})
    if skipped:
        logger.warning(f"{skipped} self-loop rows skipped", extra={"count": skipped})
    logger.info(f"Parsed {len(records)} records over {len(categories)} categories",
                extra={"count": len(records), "n_vertices": len(categories)})
    return ParsedCorpus(records, categories, duplicates, skipped)


def write_corpus(records: Iterable[MetaphorRecord], categories: List[Category], stream: TextIO) -> None:
    """Write records in the canonical corpus CSV shape."""
    names = {c.id: c.name for c in categories}
    rows = [[r.word, names[r.source], names[r.target],
             "" if r.first_year is None else str(r.first_year),
             "" if r.last_year is None else str(r.last_year)] for r in records]
    pd.DataFrame(rows, columns=CORPUS_COLUMNS).to_csv(stream, index=False, lineterminator="\n")


def derive_category_sizes(records: List[MetaphorRecord], categories: List[Category]) -> CategorySizeTable:
    """Size of a category = number of distinct words attested on either end of its mappings."""
    words: Dict[int, set] = {c.id: set() for c in categories}
    for r in records:
        words[r.source].add(r.word)
        words[r.target].add(r.word)
    sizes = {cid: len(ws) for cid, ws in words.items()}
    empty = [c.name for c in categories if sizes[c.id] == 0]
    if empty:
        raise CategorySizeError(f"cannot derive size for categories without records: {', '.join(empty)}")
    return CategorySizeTable(sizes, derived=True)


def parse_category_sizes(stream: Optional[TextIO],
                         categories: Optional[List[Category]] = None,
                         records: Optional[List[MetaphorRecord]] = None) -> CategorySizeTable:
    """
    Read a ``name,size`` table, or derive sizes from the corpus when ``stream`` is None.

    With ``categories`` given, names are resolved to ids and every corpus
    category must be covered.
    """
    if stream is None:
        if categories is None or records is None:
            raise CategorySizeError("no size table given and no corpus to derive sizes from")
        logger.info("No category size table; deriving sizes from distinct words")
        return derive_category_sizes(records, categories)

    try:
        df = _read_table(stream, header=None, names=["name", "size"], skip_blank_lines=True)
    except CorpusError as e:
        raise CategorySizeError(str(e)) from e
    by_name: Dict[str, int] = {}
    for i, (name, size) in enumerate(zip(df["name"], df["size"])):
        line = i + 1
        name, size = str(name).strip(), str(size).strip()
        if line == 1 and name.lower() == "name" and size.lower() == "size":
            continue
        try:
            value = int(size)
        except ValueError:
            raise CategorySizeError(f"line {line}: size is not an integer: {size!r}")
        if value <= 0:
            raise CategorySizeError(f"line {line}: size must be positive, got {value} for {name!r}")
        by_name[normalize_name(name)] = value

    if categories is None:
        # standalone table: ids follow file order
        return CategorySizeTable({i: v for i, v in enumerate(by_name.values())})

    missing = [c.name for c in categories if normalize_name(c.name) not in by_name]
    if missing:
        raise CategorySizeError(f"categories missing from size table: {', '.join(missing)}")
    return CategorySizeTable({c.id: by_name[normalize_name(c.name)] for c in categories})


def parse_embeddings(stream: TextIO, expected_dim: int) -> EmbeddingTable:
    """
    Read whitespace-delimited ``key v1 ... vD`` lines.

    A fastText ``.vec`` header (``count dim``) on the first line is skipped.
    Duplicate keys keep the last vector.
    """
    vectors: Dict[str, np.ndarray] = {}
    duplicates = 0
    for line_no, raw in enumerate(stream, start=1):
        parts = raw.split()
        if not parts:
            continue
        if line_no == 1 and len(parts) == 2 and expected_dim != 1 and all(p.isdigit() for p in parts):
            continue
        key, values = parts[0], parts[1:]
        if len(values) != expected_dim:
            raise EmbeddingFormatError(line_no, f"expected {expected_dim} components, got {len(values)}")
        try:
            vec = np.asarray(values, dtype=np.float64)
        except ValueError:
            raise EmbeddingFormatError(line_no, "non-numeric component")
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(line_no, "NaN or infinite component")
        if not np.any(vec):
            raise EmbeddingFormatError(line_no, f"zero vector for {key!r}")
        if key in vectors:
            duplicates += 1
        vectors[key] = vec
    if duplicates:
        logger.warning(f"{duplicates} duplicate embedding keys, last occurrence kept",
                       extra={"count": duplicates})
    return EmbeddingTable(vectors, expected_dim, duplicates)


def read_text(path: str) -> TextIO:
    """Open an input as UTF-8 text (BOM tolerated)."""
    with open(path, "r", encoding="utf-8-sig") as f:
        return io.StringIO(f.read())
