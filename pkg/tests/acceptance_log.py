"""Collects one pass/fail line per acceptance criterion for the summary."""

LINES: list[str] = []


def record(label: str, ok: bool, detail: str) -> None:
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    print(LINES[-1])
