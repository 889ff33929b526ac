from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_spd(rng: np.random.Generator, p: int, spread: float = 2.0) -> np.ndarray:
    """Random SPD matrix with eigenvalues in [1, 1 + spread], trace-normalised to p."""
    Q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    lam = 1.0 + spread * rng.random(p)
    V = (Q * lam) @ Q.T
    V = 0.5 * (V + V.T)
    return V * p / np.trace(V)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


PILOT_FILE = __import__("pathlib").Path(__file__).parent / "fixtures" / "pilots.json"


def pilot(name: str) -> dict:
    """Recorded pilot run (seed, params, value) from scripts/pilots.py."""
    import json

    return json.loads(PILOT_FILE.read_text(encoding="utf-8"))[name]


# criterion -> (passed, detail), filled in by test_acceptance.py
ACCEPTANCE: dict = {}


def report(criterion: str, passed: bool, detail: str) -> bool:
    ACCEPTANCE[criterion] = (bool(passed), detail)
    print(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: [int(t) if t.isdigit() else t for t in k.replace("(", " ").split()]):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
