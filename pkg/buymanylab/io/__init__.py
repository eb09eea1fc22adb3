from .containers import DataContainer, MarginalMenu, ReportTable, dump_json
from .instance import Instance, instance_document, load_instance, menu_document, save_instance

__all__ = [
    "DataContainer",
    "MarginalMenu",
    "ReportTable",
    "dump_json",
    "Instance",
    "instance_document",
    "load_instance",
    "menu_document",
    "save_instance",
]
