"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES: list[str] = []


def record(tag: str, title: str, ok: bool, detail: str) -> bool:
    LINES.append(f"[{'PASS' if ok else 'FAIL'}] {tag:<4} {title}: {detail}")
    print(LINES[-1])
    return ok
