"""Event log durability: sequencing, write-through, and corruption detection."""

import json

import pytest

from vocabtutor.errors import CorruptLog, StorageFailure
from vocabtutor.store import EVENT_KINDS, Event, EventStore, read_event_log

REG = {"learnerId": "l1", "classId": "c1"}
EXPOSURE = {"learnerId": "l1", "wordId": "w1", "dimension": "listening"}


class TestAppend:
    def test_first_event_gets_seq_one(self):
        store = EventStore()
        e = store.append("learnerRegistration", REG, ts=0.0)
        assert e.seq == 1

    def test_sequences_strictly_increase(self):
        store = EventStore()
        e1 = store.append("learnerRegistration", REG, ts=0.0)
        e2 = store.append("learningExposure", EXPOSURE, ts=1.0)
        assert (e1.seq, e2.seq) == (1, 2)
        assert store.next_seq == 3

    def test_malformed_payload_rejected_before_assignment(self):
        store = EventStore()
        with pytest.raises(ValueError, match="missing"):
            store.append("learningExposure", {"learnerId": "l1"}, ts=0.0)
        with pytest.raises(ValueError, match="unknown event kind"):
            store.append("nonsense", {}, ts=0.0)
        assert len(store) == 0
        assert store.next_seq == 1

    def test_all_kinds_have_required_keys(self):
        assert set(EVENT_KINDS) == {
            "learnerRegistration", "groupAssignment", "wordIntroduction",
            "learningExposure", "assessmentResponse", "phaseChange",
        }

    def test_append_event_requires_matching_seq(self):
        store = EventStore()
        with pytest.raises(CorruptLog):
            store.append_event(Event(seq=5, ts=0.0, kind="learnerRegistration", payload=REG))


class TestWriteThrough:
    def test_events_hit_disk_immediately(self, tmp_path):
        path = tmp_path / "log.jsonl"
        store = EventStore(path)
        store.append("learnerRegistration", REG, ts=0.0)
        # no close: write-through must have flushed already
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0])["kind"] == "learnerRegistration"
        store.close()

    def test_context_manager_closes(self, tmp_path):
        path = tmp_path / "log.jsonl"
        with EventStore(path) as store:
            store.append("learnerRegistration", REG, ts=0.0)
            store.append("learningExposure", EXPOSURE, ts=1.0)
        assert len(read_event_log(path)) == 2

    def test_unopenable_path(self, tmp_path):
        with pytest.raises(StorageFailure):
            EventStore(tmp_path / "missing-dir" / "log.jsonl")

    def test_write_jsonl_round_trip(self, tmp_path):
        store = EventStore()
        store.append("learnerRegistration", REG, ts=0.0)
        store.append("learningExposure", EXPOSURE, ts=2.5)
        out = tmp_path / "export.jsonl"
        store.write_jsonl(out)
        back = read_event_log(out)
        assert back == list(store.events())


class TestReadEventLog:
    def write_lines(self, tmp_path, lines):
        path = tmp_path / "log.jsonl"
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path

    def good_lines(self):
        store = EventStore()
        store.append("learnerRegistration", REG, ts=0.0)
        store.append("learningExposure", EXPOSURE, ts=1.0)
        store.append("learningExposure", dict(EXPOSURE, wordId="w2"), ts=1.0)
        return [e.to_json() for e in store.events()]

    def test_reads_what_store_wrote(self, tmp_path):
        path = self.write_lines(tmp_path, self.good_lines())
        events = read_event_log(path)
        assert [e.seq for e in events] == [1, 2, 3]
        assert events[1].payload["wordId"] == "w1"

    def test_blank_lines_ignored(self, tmp_path):
        lines = self.good_lines()
        lines.insert(1, "")
        path = self.write_lines(tmp_path, lines)
        assert len(read_event_log(path)) == 3

    def test_invalid_json_names_line(self, tmp_path):
        lines = self.good_lines()
        lines[1] = '{"seq": 2, "ts": '
        path = self.write_lines(tmp_path, lines)
        with pytest.raises(CorruptLog, match="line 2"):
            read_event_log(path)

    def test_sequence_gap_detected(self, tmp_path):
        lines = self.good_lines()
        del lines[1]
        path = self.write_lines(tmp_path, lines)
        with pytest.raises(CorruptLog, match="expected seq 2"):
            read_event_log(path)

    def test_payload_validation_applied(self, tmp_path):
        lines = self.good_lines()
        doc = json.loads(lines[1])
        del doc["payload"]["wordId"]
        lines[1] = json.dumps(doc)
        path = self.write_lines(tmp_path, lines)
        with pytest.raises(CorruptLog, match="missing"):
            read_event_log(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageFailure):
            read_event_log(tmp_path / "absent.jsonl")

    def test_truncated_prefix_still_reads(self, tmp_path):
        lines = self.good_lines()[:2]
        path = self.write_lines(tmp_path, lines)
        assert len(read_event_log(path)) == 2
