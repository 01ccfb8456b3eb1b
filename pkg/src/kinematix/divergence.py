"""Code similarity and code divergence over per-platform source-line sets.

Each platform contributes the set of normalized source lines needed to build
an application for one problem.  Two platforms are compared with the Jaccard
similarity ``|ci & cj| / |ci | cj|``; code divergence is the mean Jaccard
distance ``1 - s`` over all unordered platform pairs.  Everything is kept as
exact :class:`fractions.Fraction` and rounded to 4 decimals only for display.

Usage::

    kinematix-divergence manifest.toml --csv report.csv
"""
from __future__ import annotations

import argparse
import csv
import glob
import io
import itertools
import os
import sys
import warnings
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_COMMENT_STYLES = ("//", "#", "/*")
_KNOWN_STYLES = frozenset(DEFAULT_COMMENT_STYLES)


class EmptyComparisonError(ValueError):
    """Both line sets of a pair are empty, so their similarity is undefined."""

    def __init__(self, pair: tuple[str, str], problem: str = ""):
        self.pair = pair
        self.problem = problem
        where = f" for problem {problem!r}" if problem else ""
        super().__init__(f"empty comparison between {pair[0]!r} and {pair[1]!r}{where}")


class LineRecord(NamedTuple):
    path: str
    text: str


# ---------------------------------------------------------------------------
# Normalization


def _check_styles(styles: Iterable[str]) -> frozenset[str]:
    styles = frozenset(styles)
    unknown = styles - _KNOWN_STYLES
    if unknown:
        raise ValueError(f"unknown comment styles {sorted(unknown)}; known: {sorted(_KNOWN_STYLES)}")
    return styles


def strip_comments(text: str, styles: Iterable[str] = DEFAULT_COMMENT_STYLES, path: str = "") -> list[str]:
    """Physical lines of ``text`` with comments replaced by a space.

    Comment markers inside string or character literals are left alone.  An
    unterminated block comment swallows the rest of the file with a warning.
    """
    styles = _check_styles(styles)
    line_markers = [m for m in ("//", "#") if m in styles]
    block = "/*" in styles
    lines: list[str] = []
    cur: list[str] = []
    i, n = 0, len(text)
    quote = None
    block_start = None
    lineno = 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            lines.append("".join(cur))
            cur = []
            quote = None
            lineno += 1
            i += 1
            continue
        if block_start is not None:
            if text.startswith("*/", i):
                block_start = None
                cur.append(" ")
                i += 2
            else:
                i += 1
            continue
        if quote is not None:
            cur.append(ch)
            if ch == "\\" and i + 1 < n and text[i + 1] != "\n":
                cur.append(text[i + 1])
                i += 2
                continue
            if ch == quote:
                quote = None
            i += 1
            continue
        if ch in "\"'":
            quote = ch
            cur.append(ch)
            i += 1
            continue
        if block and text.startswith("/*", i):
            block_start = lineno
            i += 2
            continue
        if any(text.startswith(m, i) for m in line_markers):
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        cur.append(ch)
        i += 1
    lines.append("".join(cur))
    if block_start is not None:
        warnings.warn(
            f"{path or '<text>'}: unterminated block comment opened on line {block_start}; "
            "rest of file treated as comment",
            stacklevel=2,
        )
    return lines


def normalize_lines(text: str, path: str = "", styles: Iterable[str] = DEFAULT_COMMENT_STYLES) -> list[LineRecord]:
    """Comment-free, whitespace-collapsed, non-blank lines of a source file."""
    records = []
    for line in strip_comments(text, styles, path):
        norm = " ".join(line.split())
        if norm:
            records.append(LineRecord(path, norm))
    return records


# ---------------------------------------------------------------------------
# Line sets and metrics


@dataclass(frozen=True)
class PlatformLineSet:
    platform: str
    problem: str
    application: str
    records: frozenset[LineRecord] = field(default_factory=frozenset)

    @classmethod
    def from_sources(cls, platform, problem, application, sources, styles=DEFAULT_COMMENT_STYLES):
        """Build from ``{path: text}`` (or ``(path, text)`` pairs)."""
        items = sources.items() if hasattr(sources, "items") else sources
        records = set()
        for path, text in items:
            records.update(normalize_lines(text, str(path), styles))
        return cls(platform, problem, application, frozenset(records))

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class Similarity:
    value: Fraction
    union: int
    intersection: int

    @property
    def distance(self) -> Fraction:
        return 1 - self.value

    def rounded(self, places: int = 4) -> str:
        return format_fraction(self.value, places)


def format_fraction(x: Fraction, places: int = 4) -> str:
    """Decimal string of an exact rational, rounded half-to-even."""
    q = Decimal(1).scaleb(-places)
    return str((Decimal(x.numerator) / Decimal(x.denominator)).quantize(q, rounding=ROUND_HALF_EVEN))


def similarity_from_counts(union: int, intersection: int) -> Fraction:
    if union < 0 or intersection < 0 or intersection > union:
        raise ValueError(f"need 0 <= intersection <= union, got {intersection} / {union}")
    if union == 0:
        raise EmptyComparisonError(("?", "?"))
    return Fraction(intersection, union)


def similarity(ci: PlatformLineSet, cj: PlatformLineSet) -> Similarity:
    """Jaccard similarity of two platforms' line sets."""
    if (ci.application, ci.problem) != (cj.application, cj.problem):
        raise ValueError(
            "line sets belong to different application/problem: "
            f"{(ci.application, ci.problem)} vs {(cj.application, cj.problem)}"
        )
    union = len(ci.records | cj.records)
    inter = len(ci.records & cj.records)
    if union == 0:
        raise EmptyComparisonError((ci.platform, cj.platform), ci.problem)
    return Similarity(Fraction(inter, union), union, inter)


def code_divergence(sets: Sequence[PlatformLineSet]) -> Fraction:
    """Mean pairwise Jaccard distance over all unordered platform pairs."""
    if len(sets) < 2:
        raise ValueError("code divergence needs at least two platforms")
    ids = [s.platform for s in sets]
    if len(set(ids)) != len(ids):
        raise ValueError(f"platform ids must be unique: {ids}")
    total = Fraction(0)
    pairs = list(itertools.combinations(sets, 2))
    for a, b in pairs:
        total += similarity(a, b).distance
    return total / len(pairs)


# ---------------------------------------------------------------------------
# Manifest-driven analysis


@dataclass(frozen=True)
class PlatformSpec:
    name: str
    root: Path
    files: tuple[str, ...]
    comment_styles: tuple[str, ...]


@dataclass(frozen=True)
class Manifest:
    application: str
    problems: dict[str, tuple[PlatformSpec, ...]]
    path: Path | None = None


def load_manifest(path: str | os.PathLike) -> Manifest:
    """Read a TOML manifest.

    Layout::

        application = "kinematics"
        comment_styles = ["//", "#", "/*"]     # optional default

        [problems."invariant-masses".platforms.cpu]
        root = "cpu"                            # optional, relative to the manifest
        files = ["Vector.h", "src/*.cxx", "include/"]
        comment_styles = ["//", "/*"]           # optional override
    """
    path = Path(path)
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return parse_manifest(doc, path.parent, path)


def parse_manifest(doc: dict, base: Path, path: Path | None = None) -> Manifest:
    try:
        application = str(doc["application"])
        problems_doc = doc["problems"]
    except KeyError as exc:
        raise ValueError(f"manifest is missing required key {exc}") from None
    default_styles = tuple(doc.get("comment_styles", DEFAULT_COMMENT_STYLES))
    _check_styles(default_styles)
    problems = {}
    for problem, pdoc in problems_doc.items():
        platforms = []
        for name, spec in pdoc.get("platforms", {}).items():
            styles = tuple(spec.get("comment_styles", default_styles))
            _check_styles(styles)
            root = base / spec.get("root", ".")
            platforms.append(PlatformSpec(str(name), root, tuple(spec.get("files", ())), styles))
        if len(platforms) < 2:
            raise ValueError(f"problem {problem!r} needs at least two platforms")
        problems[str(problem)] = tuple(platforms)
    return Manifest(application, problems, path)


def _expand(root: Path, entry: str) -> list[Path]:
    target = root / entry
    if any(c in entry for c in "*?["):
        matches = sorted(Path(p) for p in glob.glob(str(target), recursive=True))
        files = [p for p in matches if p.is_file()]
        if not files:
            raise FileNotFoundError(f"no files match {target}")
        return files
    if target.is_dir():
        return sorted(p for p in target.rglob("*") if p.is_file())
    if not target.is_file():
        raise FileNotFoundError(f"manifest references missing file {target}")
    return [target]


def read_platform(spec: PlatformSpec, problem: str, application: str) -> PlatformLineSet:
    sources = {}
    for entry in spec.files:
        for p in _expand(spec.root, entry):
            rel = p.relative_to(spec.root).as_posix()
            sources[rel] = p.read_text(encoding="utf-8")
    return PlatformLineSet.from_sources(spec.name, problem, application, sources, spec.comment_styles)


@dataclass(frozen=True)
class PairRow:
    problem: str
    platforms: tuple[str, str]
    union: int
    intersection: int
    similarity: Fraction | None  # None: empty comparison

    @property
    def pair_label(self) -> str:
        return f"{self.platforms[0]} vs {self.platforms[1]}"


@dataclass
class DivergenceReport:
    application: str
    rows: list[PairRow]
    divergence: dict[str, Fraction | None]
    undefined: dict[str, tuple[str, str]]

    @property
    def overall(self) -> Fraction | None:
        """Mean of the per-problem divergences; None if any is undefined."""
        values = list(self.divergence.values())
        if not values or any(v is None for v in values):
            return None
        return sum(values, Fraction(0)) / len(values)

    def to_table(self) -> str:
        header = ("Similarity", "Union", "Intersection", "Platform pair", "Problem")
        body = []
        for r in self.rows:
            sim = "n/a" if r.similarity is None else format_fraction(r.similarity)
            body.append((sim, str(r.union), str(r.intersection), r.pair_label, r.problem))
        widths = [max(len(x) for x in col) for col in zip(header, *body)]
        lines = ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in (header, *body)]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append("")
        for problem, cd in self.divergence.items():
            if cd is None:
                a, b = self.undefined[problem]
                lines.append(f"CD[{problem}] = undefined (empty comparison {a} vs {b})")
            else:
                lines.append(f"CD[{problem}] = {format_fraction(cd)}")
        overall = self.overall
        lines.append(f"CD[overall] = {'undefined' if overall is None else format_fraction(overall)}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["Similarity", "Union", "Intersection", "Platform pair", "Problem"])
        for r in self.rows:
            sim = "" if r.similarity is None else format_fraction(r.similarity)
            w.writerow([sim, r.union, r.intersection, r.pair_label, r.problem])
        for problem, cd in self.divergence.items():
            w.writerow(["" if cd is None else format_fraction(cd), "", "", "CD", problem])
        overall = self.overall
        w.writerow(["" if overall is None else format_fraction(overall), "", "", "CD", "*"])
        return buf.getvalue()


def analyze(manifest: Manifest | str | os.PathLike) -> DivergenceReport:
    """Read every platform's files and compute pairwise similarity and divergence.

    A platform whose file list is empty makes each of its comparisons an empty
    comparison, which leaves that problem's divergence undefined.
    """
    if not isinstance(manifest, Manifest):
        manifest = load_manifest(manifest)
    rows: list[PairRow] = []
    divergence: dict[str, Fraction | None] = {}
    undefined: dict[str, tuple[str, str]] = {}
    for problem in sorted(manifest.problems):
        specs = manifest.problems[problem]
        sets = {s.name: read_platform(s, problem, manifest.application) for s in specs}
        empty = {s.name for s in specs if not s.files}
        total = Fraction(0)
        for a, b in itertools.combinations([s.name for s in specs], 2):
            ca, cb = sets[a], sets[b]
            union = len(ca.records | cb.records)
            inter = len(ca.records & cb.records)
            if a in empty or b in empty or union == 0:
                rows.append(PairRow(problem, (a, b), union, inter, None))
                undefined.setdefault(problem, (a, b))
                continue
            s = similarity(ca, cb)
            rows.append(PairRow(problem, (a, b), s.union, s.intersection, s.value))
            total += s.distance
        n_pairs = len(specs) * (len(specs) - 1) // 2
        divergence[problem] = None if problem in undefined else total / n_pairs
    rows.sort(key=lambda r: (r.problem, r.platforms))
    return DivergenceReport(manifest.application, rows, divergence, undefined)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kinematix-divergence",
        description="Code similarity and divergence of per-platform source trees.",
    )
    parser.add_argument("manifest", help="TOML manifest listing per-platform files")
    parser.add_argument("--csv", metavar="PATH", help="also write the report as CSV")
    args = parser.parse_args(argv)
    try:
        report = analyze(args.manifest)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_table())
    if args.csv:
        try:
            Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {args.csv}: {exc}", file=sys.stderr)
            return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
