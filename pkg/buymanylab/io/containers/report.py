from dataclasses import dataclass
from typing import Iterator, List, Optional

import pandas as pd

from buymanylab.io.containers.base import DataContainer


@dataclass
class ReportTable(DataContainer[pd.DataFrame]):
    """
    A per-atom (or per-entry) report table wrapping a pandas DataFrame.

    Methods:
        columns: The column names.
        row_count(): Number of rows.
        to_csv(path): Write the table, or return it as a string when ``path`` is None.
    """

    def __post_init__(self):
        if not isinstance(self.data, pd.DataFrame):
            raise TypeError("data must be a pandas DataFrame")

    @property
    def columns(self) -> List[str]:
        return list(self.data.columns)

    def row_count(self) -> int:
        return len(self.data)

    def __iter__(self) -> Iterator[str]:
        return iter(self.columns)

    def __len__(self) -> int:
        return self.row_count()

    def describe(self) -> str:
        return f"Report with {len(self.columns)} columns and {self.row_count()} rows"

    def to_records(self) -> List[dict]:
        return self.data.to_dict(orient="records")

    def to_csv(self, path: Optional[str] = None) -> Optional[str]:
        return self.data.to_csv(path, index=False, float_format="%.17g")
