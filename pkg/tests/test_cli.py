import json
import logging
from pathlib import Path
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from src.cli import main
from src.utils.logging_utils import LOGGER_NAME


@pytest.fixture
def runner(monkeypatch):
    monkeypatch.delenv('RELCLASS_CACHE', raising=False)
    monkeypatch.delenv('RELCLASS_ENDPOINT', raising=False)
    yield CliRunner()
    # Handlers point at the runner's streams, which are closed by now.
    logging.getLogger(LOGGER_NAME).handlers.clear()


class TestHMinusCommand:
    def test_zeta5(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['hminus', '5', '4'])

        assert result.exit_code == 0
        assert "Field 5.4.1 (Conrey 5.2)" in result.output
        assert "h_minus        1" in result.output
        assert "w              10" in result.output
        assert "norm           40" in result.output
        assert "eq4            ok" in result.output

    def test_zeta17(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['hminus', '17', '16'])

        assert result.exit_code == 0
        assert "w              34" in result.output
        assert "h_minus        1" in result.output

    def test_no_such_field(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['hminus', '8', '4'])
        assert result.exit_code == 2

    def test_bad_degree(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['hminus', '5', '6'])
        assert result.exit_code == 2

    def test_internal_failure_exits_1(self, runner):
        with runner.isolated_filesystem():
            with patch('src.numtheory.relclass.analytic_oracle', return_value=5.0):
                result = runner.invoke(main, ['hminus', '5', '4'])
        assert result.exit_code == 1


class TestSplittingCommand:
    def test_examples(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['splitting', '3', '4'])
            assert result.exit_code == 0
            assert "order of p mod 2n   2" in result.output
            assert "factor degrees      {2}" in result.output

            result = runner.invoke(main, ['splitting', '5', '4'])
            assert "factor degrees      {1, 1}" in result.output
            assert "consistent          True" in result.output

    @pytest.mark.parametrize("p", ['4', '9'])
    def test_invalid_prime(self, runner, p):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['splitting', p, '4'])
        assert result.exit_code == 2


class TestScanAndExport:
    def test_scan_export_roundtrip(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['scan', '--max-conductor', '30', '--degrees', '4',
                                          '--a-max', '1', '--cache', 'out/cache.jsonl'])
            assert result.exit_code == 0
            assert "violations: 0" in result.output
            assert Path('out/cache.jsonl').exists()

            result = runner.invoke(main, ['export', '--cache', 'out/cache.jsonl'])
            assert result.exit_code == 0
            rows = Path('out/cache.csv').read_text().splitlines()
            assert rows[0] == "conductor,degree,label,w,h_minus,eq2_ok,eq4_ok,oracle_ok,mechanism_ok"
            assert rows[1].startswith("5,4,5.4.1,10,1,")

            result = runner.invoke(main, ['export', '--cache', 'out/cache.jsonl',
                                          '--format', 'json-doc', '--output', 'doc.json'])
            assert result.exit_code == 0
            document = json.loads(Path('doc.json').read_text())
            assert document['field_count'] == len(rows) - 1

    def test_resume_is_idempotent(self, runner):
        with runner.isolated_filesystem():
            args = ['scan', '--max-conductor', '20', '--degrees', '4', '--cache', 'cache.jsonl']
            runner.invoke(main, args)
            first = Path('cache.jsonl').read_text()

            result = runner.invoke(main, args)
            assert result.exit_code == 0
            assert "Conductors replayed from cache" in result.output
            assert Path('cache.jsonl').read_text() == first

    def test_empty_scan(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['scan', '--max-conductor', '2', '--degrees', '4',
                                          '--cache', 'cache.jsonl'])
        assert result.exit_code == 0
        assert "fields: 0" in result.output

    def test_cache_from_environment(self, runner, monkeypatch):
        with runner.isolated_filesystem():
            monkeypatch.setenv('RELCLASS_CACHE', 'env/cache.jsonl')
            result = runner.invoke(main, ['scan', '--max-conductor', '16', '--degrees', '4'])
            assert result.exit_code == 0
            assert Path('env/cache.jsonl').exists()

    def test_zero_workers_rejected(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['scan', '--max-conductor', '20', '--degrees', '4',
                                          '--workers', '0', '--cache', 'cache.jsonl'])
            assert result.exit_code == 2
            assert not Path('cache.jsonl').exists()

    def test_bounds_from_config_file(self, runner):
        with runner.isolated_filesystem():
            Path('relclass.yaml').write_text("bounds:\n  0: 10\n")
            result = runner.invoke(main, ['--config', 'relclass.yaml', 'scan', '--max-conductor', '16',
                                          '--degrees', '4', '--a-max', '0', '--cache', 'cache.jsonl'])
        assert result.exit_code == 0
        assert "exceeds published bound 10" in result.output

    def test_bad_degrees(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['scan', '--max-conductor', '20', '--degrees', 'four'])
        assert result.exit_code == 2

    def test_unknown_format(self, runner):
        with runner.isolated_filesystem():
            Path('cache.jsonl').write_text('')
            result = runner.invoke(main, ['export', '--cache', 'cache.jsonl', '--format', 'xml'])
        assert result.exit_code == 2

    def test_missing_cache(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['export', '--cache', 'nope.jsonl'])
        assert result.exit_code == 2

    def test_corrupted_cache(self, runner):
        with runner.isolated_filesystem():
            Path('cache.jsonl').write_text('{"kind": "checkpoint", "checksum": "0"}\n')
            result = runner.invoke(main, ['export', '--cache', 'cache.jsonl'])
        assert result.exit_code == 1


class TestCrosscheckCommand:
    def test_without_endpoint(self, runner):
        with runner.isolated_filesystem():
            runner.invoke(main, ['scan', '--max-conductor', '16', '--degrees', '4',
                                 '--cache', 'cache.jsonl'])
            result = runner.invoke(main, ['crosscheck', '--cache', 'cache.jsonl'])

        assert result.exit_code == 0
        assert "checked: 3  matched: 0  unavailable: 3" in result.output


class TestConfigOption:
    def test_explicit_missing_config(self, runner):
        with runner.isolated_filesystem():
            result = runner.invoke(main, ['--config', 'missing.yaml', 'splitting', '3', '4'])
        assert result.exit_code == 2

    def test_config_file_values(self, runner):
        with runner.isolated_filesystem():
            Path('relclass.yaml').write_text(
                "scan:\n  max_conductor: 16\n  degrees: [4]\ncache:\n  path: from_file.jsonl\n"
            )
            result = runner.invoke(main, ['--config', 'relclass.yaml', 'scan'])
            assert result.exit_code == 0
            assert Path('from_file.jsonl').exists()
            assert "Scanned conductors <= 16" in result.output
