"""Collects one pass/fail line per acceptance criterion; conftest prints
them in the terminal summary so the result survives output capture."""

lines = []


def record(number, ok, detail):
    lines.append((number, f"criterion {number}: "
                          f"{'PASS' if ok else 'FAIL'} - {detail}"))
