from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = Path(__file__).resolve().parent / "fixtures"
CONFIGS = ROOT / "configs"

# acceptance outcomes, reported once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, name, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] AC{key:02d} {name}: {detail}")


@pytest.fixture(scope="session")
def ground_grid():
    from gravlg import io, scan

    cfg = io.load_config(CONFIGS / "ground_scan.json")
    return scan.grid_scan(cfg.tau_range, cfg.resolution, cfg.params, cfg.init)
