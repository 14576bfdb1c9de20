"""
Repository for report output files.
"""
import logging
from pathlib import Path
from typing import Optional, Union

from ..helpers.error_handlers import ReportError
from ..models.report import ExperimentReport

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv')


class ReportRepository:
    """Repository for writing and reading experiment reports and plots"""

    def __init__(self, base_dir: Optional[Union[str, Path]] = None):
        self.base_dir = Path(base_dir) if base_dir else None

    def _resolve(self, path: Union[str, Path]) -> Path:
        target = Path(path)
        if self.base_dir is not None and not target.is_absolute():
            target = self.base_dir / target
        return target

    def write_text(self, path: Union[str, Path], text: str) -> Path:
        target = self._resolve(path)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, 'w', encoding='utf-8', newline='\n') as handle:
                handle.write(text)
        except OSError as e:
            logger.error(f"Error writing {target}: {e}")
            raise ReportError(f"Failed to write {target}: {str(e)}", {'path': str(target)}) from e
        logger.info(f"Wrote {target} ({len(text)} characters)")
        return target

    def render(self, report: ExperimentReport, fmt: str = 'json') -> str:
        """Serialized report in the requested format"""
        if fmt == 'json':
            return report.to_json()
        if fmt == 'csv':
            return report.to_csv()
        raise ReportError(f"Unknown report format '{fmt}'; expected one of {', '.join(FORMATS)}",
                          {'format': fmt})

    def save(self, report: ExperimentReport, path: Union[str, Path], fmt: str = 'json') -> Path:
        """Write a report as JSON or CSV"""
        return self.write_text(path, self.render(report, fmt))

    def save_svg(self, svg: str, path: Union[str, Path]) -> Path:
        """Write an SVG document"""
        return self.write_text(path, svg)

    def load(self, path: Union[str, Path]) -> ExperimentReport:
        """Read a JSON report back"""
        target = self._resolve(path)
        try:
            text = target.read_text(encoding='utf-8')
        except OSError as e:
            logger.error(f"Error reading {target}: {e}")
            raise ReportError(f"Failed to read {target}: {str(e)}", {'path': str(target)}) from e
        try:
            return ExperimentReport.from_json(text)
        except ValueError as e:
            raise ReportError(f"{target} is not a valid experiment report: {str(e)}", {'path': str(target)}) from e
