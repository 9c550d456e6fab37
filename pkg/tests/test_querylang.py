import random

import pytest

from litnav.corpus import parse_record
from litnav.querylang import (
    And,
    Field,
    FieldTag,
    LocalCorpusClient,
    Not,
    Or,
    ParseError,
    Phrase,
    Word,
    YearRange,
    apply_ts_default,
    matches,
    parse_query,
    render_query,
    search,
    tokenize_text,
)
from oracles import eval_query, random_query

import json


def make_rec(**overrides):
    obj = {
        "uid": "R1",
        "title": "Deep learning for clinical triage",
        "abstract": "We study large language model safety in healthcare settings.",
        "authors": [{"name": "Alice Chen"}, {"name": "Bob Martinez"}],
        "year": 2021,
        "keywords": ["mental health", "evaluation"],
        "venue": "Journal of Computational Health",
    }
    obj.update(overrides)
    return parse_record(json.dumps(obj))


class TestTokenize:
    def test_lowercase_alnum_runs(self):
        assert tokenize_text("Hyphen-ated, C3PO! *star*") == ["hyphen", "ated", "c3po", "star"]

    def test_empty(self):
        assert tokenize_text("...") == []


class TestParsing:
    def test_precedence_not_over_and_over_or(self):
        ast = parse_query("TS=(a OR b AND NOT c)")
        assert ast == Field(
            FieldTag.TS,
            Or((Word("a"), And((Word("b"), Not(Word("c")))))),
        )

    def test_parens_override(self):
        ast = parse_query("TS=((a OR b) AND c)")
        assert ast == Field(
            FieldTag.TS,
            And((Or((Word("a"), Word("b"))), Word("c"))),
        )

    def test_nary_flattening(self):
        ast = parse_query("TS=(a OR b OR c)")
        assert ast == Field(FieldTag.TS, Or((Word("a"), Word("b"), Word("c"))))

    def test_binary_not_is_and_not(self):
        assert parse_query("TS=(a NOT b)") == parse_query("TS=(a AND NOT b)")

    def test_phrase_and_wildcard(self):
        ast = parse_query('TS=("mental health" OR neuro*)')
        assert ast == Field(
            FieldTag.TS,
            Or((Phrase("mental health"), Word("neuro", wildcard=True))),
        )

    def test_year_forms(self):
        assert parse_query("PY=(2010)") == Field(FieldTag.PY, YearRange(2010, 2010))
        assert parse_query("PY=(2010-2015)") == Field(FieldTag.PY, YearRange(2010, 2015))

    def test_bare_terms_default_to_ts(self):
        # parse keeps the bare term; normalization wraps it in TS
        assert parse_query("dementia") == Word("dementia")
        assert apply_ts_default(parse_query("dementia")) == Field(FieldTag.TS, Word("dementia"))
        mixed = apply_ts_default(parse_query("dementia AND AU=(novak)"))
        assert mixed == And(
            (Field(FieldTag.TS, Word("dementia")), Field(FieldTag.AU, Word("novak")))
        )

    def test_keywords_case_sensitive(self):
        # lowercase and/or/not are plain terms, not operators
        assert parse_query("TS=(and)") == Field(FieldTag.TS, Word("and"))

    @pytest.mark.parametrize(
        "bad,offset",
        [
            ("", 0),
            ("TS=(", 4),
            ("TS=()", 4),
            ("TS=(a AND )", 10),
            ("AND x", 0),
            ("ZZ=(a)", 0),
            ("TS=(a) OR", 9),
            ('TS=("open', 4),
            ("PY=(20x)", 4),
            ("TS=(a b)", 6),
        ],
    )
    def test_errors_carry_byte_offsets(self, bad, offset):
        with pytest.raises(ParseError) as info:
            parse_query(bad)
        assert info.value.offset == offset

    def test_year_range_inverted_rejected(self):
        with pytest.raises(ParseError):
            parse_query("PY=(2015-2010)")


class TestRendering:
    def test_canonical_examples(self):
        cases = {
            "TS=(a OR b AND c)": "TS=(a OR b AND c)",
            "TS=((a OR b) AND c)": "TS=((a OR b) AND c)",
            "TS=(a NOT b)": "TS=(a AND NOT b)",
            "dementia": "TS=(dementia)",
            'TS=("mental  health")': 'TS=("mental health")',
            "PY=(2010-2010)": "PY=(2010)",
        }
        for src, want in cases.items():
            assert render_query(parse_query(src)) == want

    def test_render_is_fixpoint(self):
        rng = random.Random(7)
        vocab = ["alpha", "beta", "gamma", "delta", "health", "graph"]
        for _ in range(200):
            ast = random_query(rng, vocab, ["chen", "novak"])
            once = render_query(ast)
            assert render_query(parse_query(once)) == once

    def test_parse_render_round_trip_structural(self):
        rng = random.Random(11)
        vocab = ["alpha", "beta", "gamma", "delta", "health", "graph"]
        for _ in range(200):
            ast = random_query(rng, vocab, ["chen", "novak"])
            assert parse_query(render_query(ast)) == apply_ts_default(ast)


class TestMatching:
    def test_ts_covers_title_abstract_keywords(self):
        rec = make_rec()
        assert matches(parse_query("TS=(triage)"), rec)
        assert matches(parse_query("TS=(safety)"), rec)
        assert matches(parse_query("TS=(evaluation)"), rec)
        assert not matches(parse_query("TS=(venue)"), rec)  # venue text is out of scope

    def test_field_scopes(self):
        rec = make_rec()
        assert matches(parse_query("TI=(triage)"), rec)
        assert not matches(parse_query("TI=(safety)"), rec)
        assert matches(parse_query("AB=(safety)"), rec)
        assert not matches(parse_query("AB=(triage)"), rec)

    def test_phrase_requires_contiguous_run(self):
        rec = make_rec()
        assert matches(parse_query('AB=("large language model")'), rec)
        assert not matches(parse_query('AB=("large model")'), rec)

    def test_phrase_does_not_span_scope_parts(self):
        rec = make_rec(title="deep learning", abstract="for dementia")
        assert not matches(parse_query('TS=("learning for")'), rec)

    def test_wildcard_prefix(self):
        rec = make_rec()
        assert matches(parse_query("TS=(triag*)"), rec)
        assert matches(parse_query("TS=(t*)"), rec)
        assert not matches(parse_query("TS=(riage*)"), rec)

    def test_au_matches_canonical_names(self):
        rec = make_rec()
        assert matches(parse_query("AU=(chen)"), rec)
        assert matches(parse_query('AU=("chen, a.")'), rec)
        # raw given name is folded to an initial and no longer matches
        assert not matches(parse_query("AU=(alice)"), rec)

    def test_py_ranges(self):
        rec = make_rec(year=2021)
        assert matches(parse_query("PY=(2021)"), rec)
        assert matches(parse_query("PY=(2018-2025)"), rec)
        assert not matches(parse_query("PY=(2022-2025)"), rec)

    def test_boolean_composition(self):
        rec = make_rec()
        assert matches(parse_query("TS=(triage) AND AU=(chen) AND PY=(2021)"), rec)
        assert matches(parse_query("TS=(nonexistent) OR TS=(triage)"), rec)
        assert not matches(parse_query("TS=(triage) NOT AB=(safety)"), rec)

    def test_de_morgan_spot(self):
        rec = make_rec()
        a = parse_query("TS=(triage)")
        b = parse_query("AB=(nonexistent)")
        lhs = Not(And((a, b)))
        rhs = Or((Not(a), Not(b)))
        assert matches(lhs, rec) == matches(rhs, rec)


class TestAgainstOracle:
    def test_random_queries_match_brute_force(self, syn200_store):
        rng = random.Random(404)
        records = list(syn200_store.records.values())
        vocab = sorted(
            {t for r in records[:60] for t in tokenize_text(r.title)}
        )[:50] + ["zeugma", "quasar", "absent"]
        au_vocab = sorted(
            {t for r in records[:40] for a in r.authors for t in tokenize_text(a.canonical_name)}
        )[:20]
        for _ in range(30):
            ast = random_query(rng, vocab, au_vocab)
            for rec in records:
                assert matches(ast, rec) == eval_query(ast, rec), render_query(ast)


class TestSearch:
    def test_order_year_desc_then_uid(self, ai50_store):
        hits = search(parse_query("TS=(dementia)"), ai50_store)
        keyed = [(-ai50_store.records[u].year, u) for u in hits]
        assert keyed == sorted(keyed)
        assert set(hits) == {
            u
            for u, r in ai50_store.records.items()
            if eval_query(parse_query("TS=(dementia)"), r)
        }

    def test_no_hits_is_empty(self, ai50_store):
        assert search(parse_query("TS=(zzzqqq)"), ai50_store) == []

    def test_local_client_contract(self, ai50_store):
        client = LocalCorpusClient(ai50_store)
        recs = client.search(parse_query("AU=(chen)"))
        assert [r.uid for r in recs] == search(parse_query("AU=(chen)"), ai50_store)
        assert "local" in client.name()
