from __future__ import annotations

import io
import json
from datetime import date

import pytest
from hypothesis import given, strategies as st

from groupline import corpus
from groupline.errors import ParseError, SchemaError


def make_headline(hid="h1", text="a headline", day="2015-01-14", **kwargs):
    return corpus.Headline(
        id=hid, text=text, publish_date=date.fromisoformat(day), **kwargs
    )


def timeline_jsonl(records):
    return io.StringIO("\n".join(json.dumps(r) for r in records) + "\n")


class TestParseTimeline:
    def test_sorts_records_chronologically(self):
        records = [
            {"text": "A false alarm for crew", "date": "2015-01-17", "source": "washingtonpost"},
            {"text": "Astronauts relocate", "date": "2015-01-14", "source": "cnn"},
            {"text": "Astronauts back in U.S. part", "date": "2015-01-15", "source": "reuters"},
        ]
        timeline = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        assert len(timeline) == 3
        assert [h.publish_date.isoformat() for h in timeline] == [
            "2015-01-14",
            "2015-01-15",
            "2015-01-17",
        ]

    def test_already_sorted_input_is_preserved(self):
        records = [
            {"id": "a", "text": "first", "date": "2015-01-14"},
            {"id": "b", "text": "second", "date": "2015-01-14"},
            {"id": "c", "text": "third", "date": "2015-01-15"},
        ]
        timeline = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        assert [h.id for h in timeline] == ["a", "b", "c"]

    def test_parse_is_a_permutation(self):
        records = [
            {"id": f"h{i}", "text": f"headline {i}", "date": f"2015-01-{14 + (i * 7) % 10:02d}"}
            for i in range(12)
        ]
        timeline = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        assert sorted(h.id for h in timeline) == sorted(r["id"] for r in records)
        assert {h.text for h in timeline} == {r["text"] for r in records}

    def test_invalid_month_is_a_parse_error_with_line_number(self):
        records = [
            {"text": "fine", "date": "2015-01-14"},
            {"text": "broken", "date": "2015-13-01"},
        ]
        with pytest.raises(ParseError, match="line 2"):
            corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")

    def test_empty_file_is_an_error(self):
        with pytest.raises(ParseError, match="empty"):
            corpus.parse_timeline(io.StringIO(""), timeline_id="t")

    def test_missing_ids_get_deterministic_hashes(self):
        records = [{"text": "same pipeline", "date": "2015-01-14"}]
        t1 = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        t2 = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        assert t1.headlines[0].id == t2.headlines[0].id
        assert t1.headlines[0].id == corpus.headline_id("same pipeline", date(2015, 1, 14))

    def test_duplicate_text_date_records_get_distinct_ids(self):
        records = [
            {"text": "syndicated wire copy", "date": "2015-01-14", "source": "a"},
            {"text": "syndicated wire copy", "date": "2015-01-14", "source": "b"},
        ]
        timeline = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        ids = [h.id for h in timeline]
        assert len(set(ids)) == 2

    def test_timeline_roundtrip(self, tmp_path):
        records = [
            {"id": "a", "text": "first", "date": "2015-01-14", "source": "cnn", "url": "https://x"},
            {"id": "b", "text": "second", "date": "2015-01-15", "content": "body text"},
        ]
        timeline = corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")
        path = tmp_path / "t.jsonl"
        corpus.write_timeline(timeline, path)
        again = corpus.parse_timeline(path, timeline_id="t")
        assert again == timeline


class TestHeadlineInvariants:
    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            make_headline(text="   ")

    def test_day_difference_is_symmetric_and_zero_on_self(self):
        a = make_headline("a", day="2015-01-14")
        b = make_headline("b", day="2015-01-17")
        assert corpus.day_difference(a, b) == corpus.day_difference(b, a) == 3
        assert corpus.day_difference(a, a) == 0


class TestParseAnnotationSet:
    @pytest.fixture
    def timeline(self):
        records = [{"id": f"h{i}", "text": f"headline {i}", "date": "2015-01-14"} for i in range(4)]
        return corpus.parse_timeline(timeline_jsonl(records), timeline_id="t")

    def test_four_rows_cover_four_headlines(self, timeline):
        csv_text = "h0,1\nh1,1\nh2,2\nh3,3\n"
        annotation = corpus.parse_annotation_set(
            io.StringIO(csv_text), timeline, annotator_id="alice"
        )
        assert len(annotation.assignment) == 4
        assert annotation.assignment["h1"] == 1

    def test_missing_headline_is_named(self, timeline):
        with pytest.raises(ParseError, match="h3"):
            corpus.parse_annotation_set(
                io.StringIO("h0,1\nh1,1\nh2,2\n"), timeline, annotator_id="alice"
            )

    def test_duplicate_row_rejected(self, timeline):
        text = "h0,1\nh0,2\nh1,1\nh2,2\nh3,3\n"
        with pytest.raises(ParseError, match="duplicate"):
            corpus.parse_annotation_set(io.StringIO(text), timeline, annotator_id="alice")

    def test_group_numbers_are_nominal(self, timeline):
        left = corpus.parse_annotation_set(
            io.StringIO("h0,7\nh1,7\nh2,2\nh3,9\n"), timeline, annotator_id="a"
        )
        right = corpus.parse_annotation_set(
            io.StringIO("h0,0\nh1,0\nh2,1\nh3,4\n"), timeline, annotator_id="b"
        )
        assert left.to_partition().relabeling_equal(right.to_partition())
        assert len({left.assignment[h] for h in ("h0", "h1", "h2")}) == 2

    def test_annotator_from_header_comment(self, timeline):
        text = "# annotator: carol\nheadline_id,group_number\nh0,1\nh1,1\nh2,2\nh3,3\n"
        annotation = corpus.parse_annotation_set(io.StringIO(text), timeline)
        assert annotation.annotator_id == "carol"

    def test_annotation_csv_roundtrip(self, timeline):
        annotation = corpus.parse_annotation_set(
            io.StringIO("h0,1\nh1,1\nh2,2\nh3,3\n"), timeline, annotator_id="alice"
        )
        text = corpus.write_annotation_csv(annotation)
        again = corpus.parse_annotation_set(io.StringIO(text), timeline)
        assert again == annotation


@st.composite
def random_partition(draw, n=8):
    labels = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    return corpus.Partition("t", {f"h{i}": g for i, g in enumerate(labels)})


class TestPartitionEquivalence:
    @given(random_partition())
    def test_reflexive(self, p):
        assert p.relabeling_equal(p)

    @given(random_partition(), random_partition())
    def test_symmetric(self, p, q):
        assert p.relabeling_equal(q) == q.relabeling_equal(p)

    @given(random_partition(), random_partition(), random_partition())
    def test_transitive(self, p, q, r):
        if p.relabeling_equal(q) and q.relabeling_equal(r):
            assert p.relabeling_equal(r)

    @given(random_partition())
    def test_invariant_under_relabeling(self, p):
        relabeled = corpus.Partition(p.timeline_id, {k: v + 17 for k, v in p.groups.items()})
        assert p.relabeling_equal(relabeled)


def hlgd_entry(**overrides):
    entry = {
        "headline_a": "Astronauts relocate after false alarm",
        "headline_b": "A false alarm for crew on the International Space Station",
        "day_a": "2015-01-14",
        "day_b": "2015-01-17",
        "source_a": "cnn",
        "source_b": "washingtonpost",
        "authors_a": "",
        "authors_b": "Staff Writer",
        "url_a": "https://example.com/a",
        "url_b": "https://example.com/b",
        "cut": "training",
        "timeline": "space",
        "label": 1,
    }
    entry.update(overrides)
    return entry


class TestHlgdIO:
    def test_training_cut_maps_to_train(self):
        pairs = corpus.read_hlgd(io.StringIO(json.dumps([hlgd_entry()])))
        assert len(pairs) == 1
        assert pairs[0].cut == "train"
        assert pairs[0].label == 1
        assert pairs[0].day_diff == 3

    def test_roundtrip_preserves_all_schema_fields(self):
        entries = [
            hlgd_entry(),
            hlgd_entry(cut="validation", label=0, day_b="2015-01-15"),
            hlgd_entry(cut="testing", headline_b="Totally different", authors_b="X, Y"),
        ] * 4
        text = json.dumps(entries)
        pairs = corpus.read_hlgd(io.StringIO(text))
        assert len(pairs) == 12
        written = corpus.write_hlgd(pairs)
        again = corpus.read_hlgd(io.StringIO(written))
        assert again == pairs
        # second write is byte-identical
        assert corpus.write_hlgd(again) == written

    def test_roundtrip_keeps_authors_field(self):
        pairs = corpus.read_hlgd(io.StringIO(json.dumps([hlgd_entry(authors_a="A. Writer")])))
        written = json.loads(corpus.write_hlgd(pairs))
        assert written[0]["authors_a"] == "A. Writer"
        assert written[0]["authors_b"] == "Staff Writer"

    def test_unknown_cut_rejected(self):
        with pytest.raises(SchemaError, match="cut"):
            corpus.read_hlgd(io.StringIO(json.dumps([hlgd_entry(cut="holdout")])))

    def test_label_outside_binary_rejected(self):
        with pytest.raises(SchemaError, match="label"):
            corpus.read_hlgd(io.StringIO(json.dumps([hlgd_entry(label=2)])))

    def test_missing_label_rejected(self):
        entry = hlgd_entry()
        del entry["label"]
        with pytest.raises(SchemaError, match="label"):
            corpus.read_hlgd(io.StringIO(json.dumps([entry])))


class TestLabeledPair:
    def test_day_diff_must_match_dates(self):
        a = make_headline("a", day="2015-01-14")
        b = make_headline("b", text="other", day="2015-01-17")
        with pytest.raises(ValueError):
            corpus.LabeledPair(a, b, 5, 1, "train", "t")

    def test_from_headlines_computes_day_diff(self):
        a = make_headline("a", day="2015-01-14")
        b = make_headline("b", text="other", day="2015-01-17")
        pair = corpus.LabeledPair.from_headlines(a, b, 0, "dev")
        assert pair.day_diff == 3


def test_space_excerpt_fixture_parses(space_excerpt, space_excerpt_groups):
    assert len(space_excerpt) == 47
    assert space_excerpt.timeline_id == "space-excerpt"
    assert len(space_excerpt_groups.as_sets()) == 12
