"""Per-criterion pass/fail lines, echoed into the pytest terminal summary."""

LINES: list[str] = []


def report(number: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number:02d} {status} - {detail}"
    LINES.append(line)
    print(line)
