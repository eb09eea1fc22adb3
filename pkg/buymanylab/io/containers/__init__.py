from .base import DataContainer, dump_json
from .marginalmenu import MarginalMenu
from .report import ReportTable

__all__ = ["DataContainer", "dump_json", "MarginalMenu", "ReportTable"]
