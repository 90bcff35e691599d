"""
Markdown run reports rendered from assets/report_template.md.j2
"""
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from broadcastkit.utils.display_utils import format_value
from broadcastkit.utils.io_utils import safe_text_save

ASSETS_DIR = Path(__file__).resolve().parent.parent / "assets"
REPORT_TEMPLATE = "report_template.md.j2"


def _environment() -> Environment:
    return Environment(
        loader=FileSystemLoader(str(ASSETS_DIR)),
        undefined=StrictUndefined,
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
    )


def render_report(
    command: str,
    config: Dict[str, Any],
    summary: Sequence[str],
    columns: Sequence[str] = (),
    rows: Sequence[Sequence[Any]] = (),
    evidence_note: Optional[str] = None,
) -> str:
    template = _environment().get_template(REPORT_TEMPLATE)
    return template.render(
        command=command,
        config=sorted(config.items()),
        summary=list(summary),
        columns=list(columns),
        rows=[[format_value(value) for value in row] for row in rows],
        evidence_note=evidence_note,
    )


def write_report(file_path: Path, **kwargs) -> Tuple[bool, Optional[str]]:
    return safe_text_save(file_path, render_report(**kwargs))
