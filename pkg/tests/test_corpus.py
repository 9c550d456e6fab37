import json

import pytest

from litnav.corpus import (
    CorpusError,
    MalformedJsonError,
    MissingFieldError,
    YearOutOfRangeError,
    get_record,
    ingest_corpus,
    normalize_name,
    parse_record,
    serialize_record,
    store_from_records,
)


def line(**overrides) -> str:
    obj = {
        "uid": "P1",
        "title": "A Title",
        "authors": [{"name": "Ada Lovelace"}],
        "year": 2020,
        "abstract": "Some abstract.",
        "venue": "Venue",
        "keywords": ["Topic One"],
        "references": ["P2"],
    }
    obj.update(overrides)
    return json.dumps(obj)


class TestNormalizeName:
    def test_given_family(self):
        assert normalize_name("Alice Chen") == "chen, a."

    def test_family_comma_given(self):
        assert normalize_name("Chen, Alice") == "chen, a."

    def test_initials_already(self):
        assert normalize_name("A. Chen") == "chen, a."

    def test_multiple_given_names(self):
        assert normalize_name("Mary Jane Watson") == "watson, m. j."

    def test_single_token(self):
        assert normalize_name("Plato") == "plato"

    def test_whitespace_and_case(self):
        assert normalize_name("  alice   CHEN ") == "chen, a."

    def test_variants_collapse(self):
        forms = ["Alice Chen", "Chen, Alice", "A. Chen", "alice chen", "Chen,Alice"]
        assert len({normalize_name(f) for f in forms}) == 1

    def test_empty_raises(self):
        with pytest.raises(CorpusError):
            normalize_name("   ")


class TestParseRecord:
    def test_happy_path(self):
        rec = parse_record(line())
        assert rec.uid == "P1"
        assert rec.title == "A Title"
        assert rec.year == 2020
        assert rec.authors[0].canonical_name == "lovelace, a."
        assert rec.keywords == ("topic one",)
        assert rec.references == ("P2",)
        assert rec.source == "local"

    def test_malformed_json(self):
        with pytest.raises(MalformedJsonError):
            parse_record("{not json")

    def test_non_object(self):
        with pytest.raises(MalformedJsonError):
            parse_record("[1, 2]")

    @pytest.mark.parametrize("field", ["uid", "title", "year"])
    def test_missing_required(self, field):
        obj = json.loads(line())
        del obj[field]
        with pytest.raises(MissingFieldError):
            parse_record(json.dumps(obj))

    def test_blank_title(self):
        with pytest.raises(MissingFieldError):
            parse_record(line(title="   "))

    def test_year_not_int(self):
        with pytest.raises(MissingFieldError):
            parse_record(line(year="2020"))

    @pytest.mark.parametrize("year", [1799, 2101])
    def test_year_out_of_range(self, year):
        with pytest.raises(YearOutOfRangeError):
            parse_record(line(year=year))

    @pytest.mark.parametrize("year", [1800, 2100])
    def test_year_bounds_inclusive(self, year):
        assert parse_record(line(year=year)).year == year

    def test_optional_fields_default(self):
        rec = parse_record(json.dumps({"uid": "P9", "title": "T", "year": 2001}))
        assert rec.abstract == ""
        assert rec.authors == ()
        assert rec.venue == ""
        assert rec.doi is None
        assert rec.keywords == ()
        assert rec.references == ()

    def test_keywords_normalized_deduped(self):
        rec = parse_record(line(keywords=["Deep  Learning", "deep learning", "NLP"]))
        assert rec.keywords == ("deep learning", "nlp")

    def test_self_and_duplicate_references_dropped(self):
        rec = parse_record(line(references=["P1", "P2", "P2", "P3"]))
        assert rec.references == ("P2", "P3")

    def test_empty_author_names_skipped(self):
        rec = parse_record(line(authors=[{"name": "  "}, {"name": "Bo Li"}, "junk"]))
        assert [a.raw_name for a in rec.authors] == ["Bo Li"]

    def test_institution_kept(self):
        rec = parse_record(line(authors=[{"name": "Bo Li", "institution": "Lakeshore University"}]))
        assert rec.authors[0].institution == "Lakeshore University"


class TestIngest:
    def test_tallies(self):
        lines = [
            line(),
            line(uid="P2"),
            line(uid="P3"),
            "not json at all",
            line(uid="P8", year=1500),
            json.dumps({"uid": "P4", "year": 2000}),  # missing title
            line(),  # duplicate uid P1
            "",
            "   ",
        ]
        store = ingest_corpus(lines)
        stats = store.stats
        assert stats.accepted == 3
        assert stats.rejected == 3
        assert stats.deduplicated == 1
        assert stats.rejected_by_category == {
            "malformed_json": 1,
            "year_out_of_range": 1,
            "missing_field": 1,
        }
        assert store.uids() == ["P1", "P2", "P3"]

    def test_first_record_wins_on_duplicate(self):
        store = ingest_corpus([line(title="First"), line(title="Second")])
        assert get_record(store, "P1").title == "First"

    def test_fixture_corpora_clean(self, ai50_store, syn200_store):
        assert (ai50_store.stats.accepted, ai50_store.stats.rejected) == (50, 0)
        assert (syn200_store.stats.accepted, syn200_store.stats.rejected) == (200, 0)
        assert ai50_store.uids()[0] == "W001" and len(ai50_store) == 50
        assert len(syn200_store) == 200

    def test_store_is_immutable(self):
        store = ingest_corpus([line()])
        with pytest.raises(TypeError):
            store.records["P9"] = None

    def test_store_from_records_dedups(self):
        rec = parse_record(line())
        store = store_from_records([rec, rec])
        assert store.stats.accepted == 1
        assert store.stats.deduplicated == 1


class TestSerialize:
    def test_round_trip(self, ai50_store):
        for rec in ai50_store.records.values():
            again = parse_record(serialize_record(rec))
            assert again == rec

    def test_get_record_missing_is_none(self, ai50_store):
        assert get_record(ai50_store, "nope") is None
