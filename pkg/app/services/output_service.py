"""
Output Service
Renders result tables as CSV or JSON lines and writes them out.
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from app.config.settings import settings
from app.models.schemas import OutputFormat

logger = logging.getLogger(__name__)


class OutputService:
    """Single writer for every tabular result."""

    def __init__(self, fmt: Union[OutputFormat, str] = OutputFormat.csv):
        self.fmt = OutputFormat(fmt)

    def render(self, rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
        """Fixed column order, 15 significant digits, '\\n' line endings."""
        frame = pd.DataFrame(rows, columns=list(columns))
        if self.fmt == OutputFormat.csv:
            return frame.to_csv(index=False, float_format=settings.float_format(), lineterminator="\n")

        if frame.empty:
            return ""
        text = frame.to_json(orient="records", lines=True, double_precision=settings.FLOAT_SIG_DIGITS)
        return text if text.endswith("\n") else text + "\n"

    def write(self, rows: List[Dict[str, Any]], columns: Sequence[str], out: Optional[Path] = None) -> str:
        """Write to `out` when given; the rendered text is returned either way."""
        text = self.render(rows, columns)
        if out is not None:
            out = Path(out)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(text, encoding="utf-8")
            logger.info(f"Wrote {len(rows)} rows to {out}")
        return text
