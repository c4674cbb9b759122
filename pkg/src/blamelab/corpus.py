"""Corpus runner: programs paired with per-strategy expectation manifests.

A manifest is a sibling file `<name>.expect` next to `<name>.blame`, with
one section per strategy (see docs/corpus.md):

    [stateful]
    outcome = blame
    polarity = positive

Outcome kinds: `success` (optional exact `json`), `blame` (optional
`polarity`), `crash` (optional `kind`), and `attach-error` for contract
attachments rejected before any call.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .api import RunResult, run_source
from .connectives import Strategy
from .runtime.values import AMBIGUOUS_UNION

OUTCOME_KINDS = ("success", "blame", "crash", "attach-error")


class ManifestError(Exception):
    pass


@dataclass(frozen=True)
class Expectation:
    outcome: str
    polarity: str | None = None
    kind: str | None = None
    json: str | None = None

    def describe(self) -> str:
        extra = self.polarity or self.kind or self.json
        return f"{self.outcome}({extra})" if extra else self.outcome


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    program_path: Path
    expectations: dict[Strategy, Expectation]


@dataclass(frozen=True)
class CorpusResult:
    entry: str
    strategy: Strategy
    expected: Expectation
    result: RunResult
    passed: bool
    detail: str


def load_entry(manifest_path: Path) -> CorpusEntry:
    program_path = manifest_path.with_suffix(".blame")
    if not program_path.exists():
        raise ManifestError(f"{manifest_path}: no sibling program "
                            f"{program_path.name}")
    parser = configparser.RawConfigParser()
    try:
        parser.read_string(manifest_path.read_text(encoding="utf-8"),
                           source=str(manifest_path))
    except configparser.Error as e:
        raise ManifestError(f"{manifest_path}: {e}") from None
    expectations: dict[Strategy, Expectation] = {}
    for strategy in Strategy:
        if not parser.has_section(strategy.value):
            raise ManifestError(f"{manifest_path}: missing [{strategy.value}] section")
        section = parser[strategy.value]
        outcome = section.get("outcome", "").strip()
        if outcome not in OUTCOME_KINDS:
            raise ManifestError(f"{manifest_path}: [{strategy.value}] has bad "
                                f"outcome {outcome!r}")
        expectations[strategy] = Expectation(
            outcome=outcome,
            polarity=_clean(section.get("polarity")),
            kind=_clean(section.get("kind")),
            json=_clean(section.get("json")),
        )
    return CorpusEntry(manifest_path.stem, program_path, expectations)


def _clean(value: str | None) -> str | None:
    if value is None:
        return None
    value = value.strip()
    return value or None


def discover(directory: Path) -> list[CorpusEntry]:
    entries = [load_entry(p) for p in sorted(directory.glob("*.expect"))]
    if not entries:
        raise ManifestError(f"no *.expect manifests under {directory}")
    return entries


def matches(expected: Expectation, result: RunResult) -> tuple[bool, str]:
    actual = _describe_result(result)
    if expected.outcome == "success":
        ok = result.status == "success" and (
            expected.json is None or result.json_value == expected.json)
    elif expected.outcome == "blame":
        ok = result.status == "blame" and (
            expected.polarity is None
            or result.outcome.report.label.polarity == expected.polarity)
    elif expected.outcome == "crash":
        ok = result.status == "crash" and (
            expected.kind is None or result.outcome.kind == expected.kind)
    else:  # attach-error
        ok = result.status == "crash" and result.outcome.kind == AMBIGUOUS_UNION
    return ok, actual


def _describe_result(result: RunResult) -> str:
    if result.status == "success":
        return f"success({result.json_value})" if result.json_value else "success"
    if result.status == "blame":
        return f"blame({result.outcome.report.label.polarity})"
    if result.status == "crash":
        return f"crash({result.outcome.kind})"
    return result.status


def check_entry(entry: CorpusEntry,
                strategies: tuple[Strategy, ...] = tuple(Strategy)) -> list[CorpusResult]:
    source = entry.program_path.read_text(encoding="utf-8")
    out: list[CorpusResult] = []
    for strategy in strategies:
        expected = entry.expectations[strategy]
        result = run_source(source, strategy, filename=str(entry.program_path))
        ok, actual = matches(expected, result)
        out.append(CorpusResult(entry.name, strategy, expected, result, ok,
                                f"expected {expected.describe()}, got {actual}"))
    return out


def run_corpus(directory: Path,
               strategies: tuple[Strategy, ...] = tuple(Strategy)) -> list[CorpusResult]:
    results: list[CorpusResult] = []
    for entry in discover(directory):
        results.extend(check_entry(entry, strategies))
    return results


def format_table(results: list[CorpusResult]) -> str:
    width = max(len(r.entry) for r in results)
    lines = []
    for r in results:
        mark = "ok  " if r.passed else "FAIL"
        lines.append(f"{mark}  {r.entry:<{width}}  {r.strategy.value:<8}  {r.detail}")
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} checks passed")
    return "\n".join(lines)
