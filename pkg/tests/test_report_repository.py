"""
Tests for the experiment report model and the report output repository.
"""
import json
import math

import pytest

from engulfing.helpers.error_handlers import ReportError
from engulfing.models.report import ExperimentReport, Provenance, format_cell
from engulfing.repositories.report_repository import ReportRepository


@pytest.fixture
def report():
    return ExperimentReport(
        experiment_id='demo',
        function_tag='quad',
        columns=['h', 'ratio', 'bounded', 'note'],
        rows=[
            {'h': 1.0, 'ratio': 1.5, 'bounded': True, 'note': 'first'},
            {'h': 2.0, 'ratio': math.inf, 'bounded': False, 'note': None},
        ],
        verdicts={'ratio': 'increasing'},
        flags=['demo flag'],
        parameters={'k': 2.0},
        provenance=Provenance(seed=7, config_hash='abc', tool_version='1.0.0'),
    )


@pytest.fixture
def repository(tmp_path):
    return ReportRepository(tmp_path)


@pytest.mark.unit
class TestReportModel:
    """Test serialized forms of ExperimentReport"""

    def test_json_writes_infinity(self, report):
        text = report.to_json()
        assert 'Infinity' in text
        assert text.endswith('}\n')
        assert json.loads(text)['provenance']['seed'] == 7

    def test_json_round_trip(self, report):
        assert ExperimentReport.from_json(report.to_json()) == report

    def test_csv(self, report):
        assert report.to_csv() == "h,ratio,bounded,note\n1.0,1.5,true,first\n2.0,inf,false,\n"

    def test_columns(self, report):
        assert report.column('note') == ['first', None]
        assert report.numeric_column('ratio') == [1.5, math.inf]
        assert report.numeric_column('bounded') == [None, None]

    @pytest.mark.parametrize('cell, expected', [
        (None, ''),
        (True, 'true'),
        (False, 'false'),
        (math.inf, 'inf'),
        (-math.inf, '-inf'),
        (0.1, '0.1'),
        (3, '3'),
        ('kink', 'kink'),
    ])
    def test_format_cell(self, cell, expected):
        assert format_cell(cell) == expected


@pytest.mark.unit
class TestReportRepository:
    """Test writing and reading report files"""

    def test_save_and_load(self, repository, report, tmp_path):
        path = repository.save(report, 'out/demo.json')
        assert path == tmp_path / 'out' / 'demo.json'
        assert repository.load('out/demo.json') == report

    def test_save_csv(self, repository, report):
        path = repository.save(report, 'demo.csv', 'csv')
        assert path.read_text(encoding='utf-8').startswith('h,ratio,bounded,note\n')

    def test_save_svg(self, repository):
        path = repository.save_svg('<svg/>\n', 'plot.svg')
        assert path.read_text(encoding='utf-8') == '<svg/>\n'

    def test_unknown_format(self, repository, report):
        with pytest.raises(ReportError):
            repository.save(report, 'demo.xml', 'xml')

    def test_load_missing_file(self, repository):
        with pytest.raises(ReportError):
            repository.load('missing.json')

    def test_load_invalid_report(self, repository, tmp_path):
        (tmp_path / 'bad.json').write_text('{"experiment_id": "x"}', encoding='utf-8')
        with pytest.raises(ReportError):
            repository.load('bad.json')

    def test_write_under_file_fails(self, repository, tmp_path):
        (tmp_path / 'blocker').write_text('', encoding='utf-8')
        with pytest.raises(ReportError):
            repository.write_text('blocker/report.json', '{}')

    def test_load_unreadable_file(self, repository, report, mocker):
        repository.save(report, 'demo.json')
        mocker.patch('pathlib.Path.read_text', side_effect=PermissionError('denied'))
        with pytest.raises(ReportError) as exc_info:
            repository.load('demo.json')
        assert exc_info.value.details['path'].endswith('demo.json')
