import json
from unittest.mock import Mock

import pytest

from src.errors import CacheCorrupted
from src.exporter.csv_exporter import CSV_COLUMNS, CSVExporter
from src.exporter.json_exporter import JSONExporter
from src.exporter.result_cache import SCHEMA_VERSION, ResultCache, ResultLine, line_checksum
from src.numtheory.dirichlet import characters_of_exact_order, galois_orbits
from src.numtheory.relclass import h_minus


@pytest.fixture
def zeta5_line():
    orbit = galois_orbits(characters_of_exact_order(5, 4))[0]
    return ResultLine.from_record(h_minus(orbit), timestamp="2024-01-01T00:00:00+00:00")


@pytest.fixture
def sample_lines():
    def make(conductor, h, eq4):
        return ResultLine(
            conductor=conductor, degree=4, label=f"{conductor}.4.1", conrey_label=f"{conductor}.2",
            w=2, q=1, h_minus=h, eq2_ok=True, eq4_ok=eq4, oracle_ok=True, mechanism_ok=True,
            timestamp="2024-01-01T00:00:00+00:00",
        )
    return [make(5, "1", True), make(16, "1", 'n/a'), make(1297, "123456789012345678901234567890", 'n/a')]


@pytest.fixture
def cache(tmp_path):
    return ResultCache(tmp_path / "results" / "cache.jsonl", Mock())


class TestResultLine:
    def test_from_record(self, zeta5_line):
        assert zeta5_line.conductor == 5
        assert zeta5_line.degree == 4
        assert zeta5_line.label == "5.4.1"
        assert zeta5_line.conrey_label == "5.2"
        assert zeta5_line.w == 10
        assert zeta5_line.h_minus == "1"
        assert zeta5_line.eq4_ok is True
        assert zeta5_line.all_checks_ok
        assert zeta5_line.schema_version == SCHEMA_VERSION

    def test_payload(self, zeta5_line):
        payload = zeta5_line.to_payload()
        assert payload['kind'] == 'field'
        assert len(line_checksum(payload)) == 16


class TestResultCache:
    def test_missing_file(self, cache):
        assert cache.replay() == []
        assert cache.completed() == {}

    def test_append_and_replay(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])
        cache.append_conductor(16, [4, 8], sample_lines[1:2])
        cache.append_conductor(1297, [4], sample_lines[2:])

        assert cache.replay() == sample_lines
        assert cache.completed() == {4: {5, 16, 1297}, 8: {16}}
        assert cache.replay()[2].h_minus == "123456789012345678901234567890"

    def test_every_line_has_checksum(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])

        rows = [json.loads(raw) for raw in cache.path.read_text().splitlines()]
        assert [row['kind'] for row in rows] == ['field', 'checkpoint']
        for row in rows:
            checksum = row.pop('checksum')
            assert checksum == line_checksum(row)

    def test_duplicates_collapse(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])
        cache.append_conductor(5, [4], sample_lines[:1])

        assert cache.replay() == sample_lines[:1]

    def test_unfinished_conductor_dropped(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])
        payload = sample_lines[1].to_payload()
        payload['checksum'] = line_checksum(payload)
        with open(cache.path, 'a') as handle:
            handle.write(json.dumps(payload, sort_keys=True) + '\n')

        assert cache.replay() == sample_lines[:1]
        assert cache.completed() == {4: {5}}

    def test_checksum_mismatch(self, cache, sample_lines):
        cache.append_conductor(1297, [4], sample_lines[2:])
        text = cache.path.read_text().replace("123456789012345678901234567890",
                                              "123456789012345678901234567891")
        cache.path.write_text(text)

        with pytest.raises(CacheCorrupted):
            cache.replay()
        with pytest.raises(CacheCorrupted):
            cache.completed()

    def test_unreadable_line(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])
        with open(cache.path, 'a') as handle:
            handle.write('{"kind": "field", \n')

        with pytest.raises(CacheCorrupted):
            cache.replay()

    def test_unfinished_last_line_ignored(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])
        with open(cache.path, 'a') as handle:
            handle.write('{"kind": "field", "cond')

        assert cache.replay() == sample_lines[:1]
        assert cache.completed() == {4: {5}}

        cache.append_conductor(16, [4], sample_lines[1:2])
        assert cache.replay() == sample_lines[:2]
        assert cache.path.read_text().endswith("\n")
        assert "cond\n" not in cache.path.read_text()

    def test_complete_bad_line_still_refused(self, cache, sample_lines):
        cache.append_conductor(5, [4], sample_lines[:1])
        with open(cache.path, 'a') as handle:
            handle.write('{"kind": "field", "cond\n')

        with pytest.raises(CacheCorrupted):
            cache.replay()
        cache.append_conductor(16, [4], sample_lines[1:2])
        with pytest.raises(CacheCorrupted):
            cache.replay()

    def test_schema_mismatch(self, cache):
        payload = {'kind': 'checkpoint', 'schema_version': SCHEMA_VERSION + 1,
                   'conductor': 5, 'degrees': [4], 'timestamp': 'x'}
        payload['checksum'] = line_checksum(payload)
        cache.path.parent.mkdir(parents=True, exist_ok=True)
        cache.path.write_text(json.dumps(payload) + '\n')

        with pytest.raises(CacheCorrupted):
            cache.replay()


class TestCSVExporter:
    def test_header_and_rows(self, tmp_path, sample_lines):
        path = CSVExporter(tmp_path / "out" / "results.csv").export(sample_lines)
        rows = path.read_text().splitlines()

        assert rows[0] == "conductor,degree,label,w,h_minus,eq2_ok,eq4_ok,oracle_ok,mechanism_ok"
        assert rows[0].split(',') == CSV_COLUMNS
        assert len(rows) == 4
        assert rows[1] == "5,4,5.4.1,2,1,true,true,true,true"
        assert rows[2] == "16,4,16.4.1,2,1,true,n/a,true,true"
        assert rows[3].split(',')[4] == "123456789012345678901234567890"

    def test_empty_cache(self, tmp_path):
        path = CSVExporter(tmp_path / "empty.csv").export([])
        assert path.read_text().splitlines() == [",".join(CSV_COLUMNS)]

    def test_to_frame(self, tmp_path, sample_lines):
        frame = CSVExporter(tmp_path / "x.csv").to_frame(sample_lines)
        assert list(frame.columns) == CSV_COLUMNS
        assert list(frame['eq4_ok']) == ['true', 'n/a', 'n/a']


class TestJSONExporter:
    def test_document(self, tmp_path, sample_lines):
        path = JSONExporter(tmp_path / "results.json").export(sample_lines)
        document = json.loads(path.read_text())

        assert document['schema_version'] == SCHEMA_VERSION
        assert document['field_count'] == 3
        assert [r['label'] for r in document['records']] == ["5.4.1", "16.4.1", "1297.4.1"]
        assert all('timestamp' not in r for r in document['records'])
        assert document['records'][1]['eq4_ok'] == 'n/a'

    def test_reexport_is_identical(self, tmp_path, sample_lines):
        first = JSONExporter(tmp_path / "a.json").export(sample_lines).read_text()
        relabeled = [
            ResultLine(**{**line.__dict__, 'timestamp': "2030-06-01T12:00:00+00:00"})
            for line in sample_lines
        ]
        second = JSONExporter(tmp_path / "b.json").export(relabeled).read_text()
        assert first == second
