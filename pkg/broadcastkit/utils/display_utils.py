import math
from typing import Iterable, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


def boxed_message(msg: str):
    border = "─" * (len(msg) + 4)
    console.print(f"\n┌{border}┐")
    console.print(f"│  {msg}  │")
    console.print(f"└{border}┘\n")


def arrow_message(step: str):
    console.print(f"➡️  {step}")


def rich_message(msg: str, style="bold green"):
    console.print(Panel(msg, style=style, expand=False))


def status_message(task: str, success=True):
    symbol = "✔" if success else "✖"
    color = "green" if success else "red"
    console.print(f"[{color}]{symbol} {task}[/{color}]", highlight=False)


def verdict_message(universal: bool, detail: str = ""):
    label = "UNIVERSAL" if universal else "NOT-UNIVERSAL"
    style = "bold green" if universal else "bold yellow"
    suffix = f"  {detail}" if detail else ""
    console.print(f"[{style}]{label}[/{style}]{suffix}", highlight=False)


def results_table(title: str, columns: Sequence[str], rows: Iterable[Sequence]):
    table = Table(title=title, show_lines=False)
    for column in columns:
        table.add_column(column, justify="right")
    for row in rows:
        table.add_row(*(format_value(value) for value in row))
    console.print(table)


def format_value(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "n/a"
    if isinstance(value, complex):
        return f"{value.real:.10g}{value.imag:+.10g}j"
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def goodbye_message():
    rich_message("Goodbye! 👋", style="bold green")
