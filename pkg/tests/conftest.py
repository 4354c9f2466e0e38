"""Shared fixtures: bundled corpus records and a per-session classification
cache so the acceptance and property suites do not repeat identical runs."""

from __future__ import annotations

import pytest

from odecubic import Probe, classify, normalize_to_cubic
from odecubic.corpus import CorpusRecord, load_bundled_corpus, record_probe


@pytest.fixture(scope="session")
def corpus_records() -> dict[str, CorpusRecord]:
    return {record.id: record for record in load_bundled_corpus()}


class ClassificationCache:
    def __init__(self, records: dict[str, CorpusRecord]):
        self.records = records
        self._odes: dict[str, object] = {}
        self._results: dict[str, object] = {}

    def probe(self, rid: str) -> Probe:
        return record_probe(self.records[rid], seed=0, base=Probe())

    def ode(self, rid: str):
        if rid not in self._odes:
            record = self.records[rid]
            self._odes[rid] = normalize_to_cubic(record.equation, record.params,
                                                 self.probe(rid))
        return self._odes[rid]

    def classification(self, rid: str):
        if rid not in self._results:
            self._results[rid] = classify(self.ode(rid), self.probe(rid))
        return self._results[rid]


@pytest.fixture(scope="session")
def cache(corpus_records) -> ClassificationCache:
    return ClassificationCache(corpus_records)
