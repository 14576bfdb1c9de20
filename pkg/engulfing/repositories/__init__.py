"""
Repository layer: built-in function catalog and report output files.
"""
from .catalog_repository import CATALOG_ORDER, CatalogRepository
from .report_repository import ReportRepository

__all__ = [
    'CATALOG_ORDER',
    'CatalogRepository',
    'ReportRepository'
]
