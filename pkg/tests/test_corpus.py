"""Unit and property tests for article loading and filtering."""

from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentindex.corpus import (
    FilterConfig,
    NewsArticle,
    deduplicate,
    filter_exclusion_keywords,
    load_articles,
    normalize_and_gate,
    parse_timestamp,
    remove_auto_generated,
    run_filter_pipeline,
)

TS = datetime(2021, 3, 1, 10, 0, tzinfo=timezone.utc)


def art(id="a1", company="puma", source="wire", ts=TS, headline="puma ag steigert gewinn",
        body=None):
    return NewsArticle(id=id, company_id=company, source=source, published_at=ts,
                       headline=headline, body=body)


def write_jsonl(path, objs):
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj) + "\n")


def valid_line(id="a1", ts="2021-03-01T10:00:00+01:00"):
    return {"id": id, "company_id": "puma", "source": "wire", "published_at": ts,
            "headline": "puma ag steigert gewinn", "language": "de"}


class TestLoadArticles:
    def test_three_valid_lines(self, tmp_path):
        path = tmp_path / "a.jsonl"
        write_jsonl(path, [valid_line(f"a{i}") for i in range(3)])
        report = load_articles(path)
        assert len(report.articles) == 3
        assert report.diagnostics == []

    def test_malformed_line_diagnosed_with_line_number(self, tmp_path):
        path = tmp_path / "a.jsonl"
        with open(path, "w") as fh:
            fh.write(json.dumps(valid_line("a1")) + "\n")
            fh.write("{not json\n")
            fh.write(json.dumps(valid_line("a2")) + "\n")
        report = load_articles(path)
        assert [a.id for a in report.articles] == ["a1", "a2"]
        assert len(report.diagnostics) == 1
        assert "line 2" in report.diagnostics[0]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "a.jsonl"
        path.write_text("")
        report = load_articles(path)
        assert report.articles == [] and report.diagnostics == []

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "a.jsonl"
        path.write_text(json.dumps(valid_line()) + "\n\n\n")
        report = load_articles(path)
        assert len(report.articles) == 1 and report.diagnostics == []

    def test_duplicate_id_dropped_with_diagnostic(self, tmp_path):
        path = tmp_path / "a.jsonl"
        write_jsonl(path, [valid_line("a1"), valid_line("a1")])
        report = load_articles(path)
        assert len(report.articles) == 1
        assert "duplicate id" in report.diagnostics[0]

    def test_missing_field_diagnosed(self, tmp_path):
        path = tmp_path / "a.jsonl"
        bad = valid_line("a1")
        del bad["headline"]
        write_jsonl(path, [bad])
        report = load_articles(path)
        assert report.articles == []
        assert "headline" in report.diagnostics[0]

    def test_naive_timestamp_rejected(self, tmp_path):
        path = tmp_path / "a.jsonl"
        write_jsonl(path, [valid_line("a1", ts="2021-03-01T10:00:00")])
        report = load_articles(path)
        assert report.articles == []
        assert "published_at" in report.diagnostics[0]

    def test_zulu_timestamp_accepted(self):
        ts = parse_timestamp("2021-03-01T10:00:00Z")
        assert ts.utcoffset().total_seconds() == 0

    def test_unreadable_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            load_articles(tmp_path / "missing.jsonl")


class TestExclusionKeywords:
    CFG = FilterConfig(exclusions={"puma": ("zoo",)})

    def test_keyword_match_removes(self):
        kept, removed = filter_exclusion_keywords(
            [art(headline="puma im zoo ausgebrochen")], self.CFG)
        assert kept == [] and len(removed) == 1

    def test_no_match_keeps(self):
        kept, removed = filter_exclusion_keywords(
            [art(headline="puma ag steigert gewinn")], self.CFG)
        assert len(kept) == 1 and removed == []

    def test_empty_rule_is_vacuous(self):
        cfg = FilterConfig(exclusions={"puma": ()})
        kept, removed = filter_exclusion_keywords(
            [art(headline="puma im zoo ausgebrochen")], cfg)
        assert len(kept) == 1 and removed == []

    def test_other_company_unaffected(self):
        kept, removed = filter_exclusion_keywords(
            [art(company="adidas", headline="adidas im zoo")], self.CFG)
        assert len(kept) == 1

    def test_match_in_body(self):
        kept, removed = filter_exclusion_keywords(
            [art(headline="puma quartalszahlen", body="besuch im Zoo terminiert")], self.CFG)
        assert kept == [] and len(removed) == 1


class TestAutoGenerated:
    CFG = FilterConfig(auto_generated_phrases=("dieser artikel wurde automatisch erstellt",))

    def test_phrase_in_body_removes(self):
        kept, removed = remove_auto_generated(
            [art(body="Dieser Artikel wurde automatisch erstellt.")], self.CFG)
        assert kept == [] and len(removed) == 1

    def test_clean_body_kept(self):
        kept, removed = remove_auto_generated([art(body="redaktioneller inhalt")], self.CFG)
        assert len(kept) == 1 and removed == []

    def test_empty_phrase_list_keeps_all(self):
        kept, removed = remove_auto_generated([art()], FilterConfig())
        assert len(kept) == 1 and removed == []


class TestDeduplicate:
    def test_later_copy_removed(self):
        early = art(id="a1", ts=TS.replace(hour=9))
        late = art(id="a2", ts=TS.replace(hour=10))
        kept, removed = deduplicate([late, early])
        assert kept == [early] and removed == [late]

    def test_different_companies_both_kept(self):
        kept, removed = deduplicate([art(id="a1"), art(id="a2", company="adidas")])
        assert len(kept) == 2 and removed == []

    def test_timestamp_tie_breaks_by_id(self):
        a = art(id="a")
        b = art(id="b")
        kept, removed = deduplicate([b, a])
        assert kept == [a] and removed == [b]

    def test_case_insensitive_headline_key(self):
        a = art(id="a1", headline="Puma AG Steigert Gewinn", ts=TS.replace(hour=9))
        b = art(id="a2", headline="puma ag steigert gewinn")
        kept, _ = deduplicate([a, b])
        assert kept == [a]

    def test_idempotent(self):
        articles = [art(id=f"a{i}", ts=TS.replace(hour=9 + i % 3)) for i in range(6)]
        once, _ = deduplicate(articles)
        twice, removed = deduplicate(once)
        assert twice == once and removed == []


class TestNormalizeAndGate:
    def test_lowercases_headline(self):
        out = normalize_and_gate(art(headline="BMW Erhöht Dividende"), FilterConfig())
        assert out.headline == "bmw erhöht dividende"

    def test_body_dropped(self):
        out = normalize_and_gate(art(body="text"), FilterConfig())
        assert out.body is None

    def test_over_limit_removed(self):
        long = " ".join(["wort"] * 1001)
        assert normalize_and_gate(art(headline=long), FilterConfig()) is None

    def test_exactly_at_limit_kept(self):
        exact = " ".join(["wort"] * 1000)
        assert normalize_and_gate(art(headline=exact), FilterConfig()) is not None

    def test_config_rejects_zero_limit(self):
        with pytest.raises(ValueError):
            FilterConfig(max_headline_tokens=0)


headline_st = st.text(
    alphabet="abcdefghij zoö", min_size=1, max_size=40).filter(lambda s: s.strip())


@st.composite
def articles_st(draw):
    n = draw(st.integers(1, 12))
    out = []
    for i in range(n):
        out.append(NewsArticle(
            id=f"a{i}",
            company_id=draw(st.sampled_from(["puma", "adidas", "bmw"])),
            source=draw(st.sampled_from(["wire", "post"])),
            published_at=TS.replace(hour=draw(st.integers(0, 23))),
            headline=draw(headline_st),
            body=draw(st.one_of(st.none(), headline_st)),
        ))
    return out


@settings(max_examples=60, deadline=None)
@given(articles=articles_st(), keyword=st.sampled_from(["zo", "oö", "ab"]),
       phrase=st.sampled_from(["ij", "de"]))
def test_keyword_and_phrase_stages_commute(articles, keyword, phrase):
    cfg = FilterConfig(exclusions={"puma": (keyword,), "adidas": (keyword,), "bmw": (keyword,)},
                       auto_generated_phrases=(phrase,))
    kept_kp, _ = remove_auto_generated(filter_exclusion_keywords(articles, cfg)[0], cfg)
    kept_pk, _ = filter_exclusion_keywords(remove_auto_generated(articles, cfg)[0], cfg)
    assert [a.id for a in kept_kp] == [a.id for a in kept_pk]


@settings(max_examples=60, deadline=None)
@given(articles=articles_st())
def test_each_stage_partitions_input(articles):
    cfg = FilterConfig(exclusions={"puma": ("zo",)}, auto_generated_phrases=("ij",))
    for stage in (lambda a: filter_exclusion_keywords(a, cfg),
                  lambda a: remove_auto_generated(a, cfg),
                  deduplicate):
        kept, removed = stage(articles)
        assert len(kept) + len(removed) == len(articles)
        assert {id(a) for a in kept}.isdisjoint({id(a) for a in removed})
        assert [a for a in articles if a in kept or a in removed] == articles


def test_pipeline_stage_accounting(golden_dir):
    from sentindex.corpus import load_articles, load_filter_config

    config = load_filter_config(golden_dir / "filter_config.json")
    loaded = load_articles(golden_dir / "articles.jsonl")
    result = run_filter_pipeline(loaded.articles, config)
    removed_total = sum(len(v) for v in result.removed_by_stage.values())
    assert len(result.kept) + removed_total == len(loaded.articles)
    # every survivor is normalized: lowercase headline, no body
    assert all(a.headline == a.headline.lower() and a.body is None for a in result.kept)
