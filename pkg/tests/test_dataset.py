import json

import pytest

from claimcheck.dataset import (
    AnnotationRecord,
    DatasetPair,
    agreement,
    curate,
    load,
    load_annotations,
    stats,
)
from claimcheck.errors import InputValidationError
from claimcheck.lexer import TokenKind, tokenize


def pair(**kwargs):
    base = dict(
        smc="Some claim text here",
        scr="Claim summary",
        fca_url="https://factcheck.example/a",
        publisher="Checkers",
        source_country="IN",
        category="Politics",
        summarizable=True,
        smc_language="en",
        scr_language="en",
    )
    base.update(kwargs)
    return DatasetPair(**base)


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


def as_row(p: DatasetPair) -> dict:
    return {
        "smc": p.smc, "scr": p.scr, "fca_url": p.fca_url, "publisher": p.publisher,
        "source_country": p.source_country, "category": p.category,
        "summarizable": p.summarizable, "smc_language": p.smc_language,
        "scr_language": p.scr_language,
    }


class TestLoad:
    def test_well_formed_file(self, tmp_path):
        path = tmp_path / "data.jsonl"
        write_jsonl(path, [as_row(pair(smc=f"claim {i}")) for i in range(3)])
        result = load(path)
        assert result.ok
        assert [p.smc for p in result.pairs] == ["claim 0", "claim 1", "claim 2"]

    def test_bad_line_reported_with_line_number(self, tmp_path):
        path = tmp_path / "data.jsonl"
        rows = [as_row(pair(smc="good one"))]
        bad = as_row(pair())
        del bad["scr"]
        rows.append(bad)
        rows.append(as_row(pair(smc="good two")))
        write_jsonl(path, rows)
        result = load(path)
        assert len(result.pairs) == 2
        assert len(result.issues) == 1
        assert result.issues[0].line == 2
        assert "scr" in result.issues[0].message

    def test_invalid_json_line(self, tmp_path):
        path = tmp_path / "data.jsonl"
        path.write_text("{not json}\n" + json.dumps(as_row(pair())) + "\n", encoding="utf-8")
        result = load(path)
        assert len(result.pairs) == 1
        assert result.issues[0].line == 1

    def test_invalid_enum_rejected(self, tmp_path):
        path = tmp_path / "data.jsonl"
        write_jsonl(path, [as_row(pair()) | {"source_country": "XX"}])
        result = load(path)
        assert not result.pairs
        assert "source_country" in result.issues[0].message

    def test_bad_url_rejected(self, tmp_path):
        path = tmp_path / "data.jsonl"
        write_jsonl(path, [as_row(pair()) | {"fca_url": "not-a-url"}])
        result = load(path)
        assert not result.pairs

    def test_empty_file_warns(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.warns(UserWarning):
            result = load(path)
        assert result.pairs == [] and result.issues == []


class TestCurate:
    def test_exact_duplicates_collapse(self):
        pairs = [pair(), pair(), pair(smc="different")]
        assert len(curate(pairs)) == 2

    def test_url_only_difference_collapses(self):
        a = pair(smc="Fake video of lion https://t.co/abc in city")
        b = pair(smc="Fake video of lion https://t.co/xyz in city")
        curated = curate([a, b])
        assert len(curated) == 1
        assert curated[0].smc == "Fake video of lion in city"

    def test_non_summarizable_dropped(self):
        assert curate([pair(summarizable=False)]) == []

    def test_non_english_dropped(self):
        assert curate([pair(smc_language="hi")]) == []
        assert curate([pair(scr_language="ta-IN")]) == []
        assert len(curate([pair(smc_language="en-US")])) == 1

    def test_idempotent(self):
        pairs = [
            pair(smc="A claim https://x.org/a here"),
            pair(smc="A claim here"),
            pair(smc="Another claim", summarizable=True),
        ]
        once = curate(pairs)
        assert curate(once) == once

    def test_no_url_tokens_after_curation(self):
        curated = curate([pair(smc="see https://t.co/abc and www.x.in now")])
        for tok in tokenize(curated[0].smc).tokens:
            assert tok.kind != TokenKind.URL


class TestStats:
    def test_single_pair_medians(self):
        info = stats([pair(smc="a b c", scr="x y")])
        assert info.median_smc_words == 3
        assert info.median_scr_words == 2
        assert info.median_smc_chars == 5
        assert info.n_pairs == 1

    def test_counts_and_uniques(self):
        pairs = [
            pair(smc="one", scr="s1"),
            pair(smc="one", scr="s2"),
            pair(smc="two", scr="s1"),
        ]
        info = stats(pairs)
        assert info.n_pairs == 3
        assert info.n_unique_smc == 2
        assert info.n_unique_scr == 2
        assert info.n_unique_smc <= info.n_pairs
        assert info.n_unique_scr <= info.n_pairs

    def test_lower_median_for_even_sizes(self):
        pairs = [pair(smc="a " * n) for n in (1, 2, 3, 4)]  # word counts 1,2,3,4
        info = stats(pairs)
        assert info.median_smc_words == 2

    def test_country_percentages(self):
        pairs = [pair(source_country="IN")] * 3 + [pair(source_country="US", smc="u")]
        info = stats(pairs)
        assert info.country_percent["IN"] == 75.0
        assert info.country_percent["US"] == 25.0

    def test_empty_rejected(self):
        with pytest.raises(InputValidationError):
            stats([])

    def test_text_rendering(self):
        text = stats([pair()]).to_text()
        assert "pairs" in text and "unique claims" in text


class TestAgreement:
    def annotations(self, flags):
        records = []
        for i, (a, b) in enumerate(flags):
            records.append(AnnotationRecord(pair_id=f"p{i}", annotator_id="A", summarizable=a))
            records.append(AnnotationRecord(pair_id=f"p{i}", annotator_id="B", summarizable=b))
        return records

    def test_full_agreement(self):
        assert agreement(self.annotations([(True, True), (False, False)])) == 100.0

    def test_partial_agreement(self):
        flags = [(True, True), (True, False), (True, True), (False, False)]
        assert agreement(self.annotations(flags)) == 75.0

    def test_unpaired_records_rejected(self):
        records = self.annotations([(True, True)])
        records.append(AnnotationRecord(pair_id="solo", annotator_id="A", summarizable=True))
        with pytest.raises(InputValidationError) as err:
            agreement(records)
        assert "solo" in str(err.value)

    def test_load_annotations(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        rows = [
            {"pair_id": "p0", "annotator_id": "A", "summarizable": True, "category": "Health"},
            {"pair_id": "p0", "annotator_id": "B", "summarizable": True},
        ]
        path.write_text("\n".join(json.dumps(r) for r in rows), encoding="utf-8")
        records = load_annotations(path)
        assert agreement(records) == 100.0
