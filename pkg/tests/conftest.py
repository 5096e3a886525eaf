import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def small_world():
    from fsconflict.synth import SynthConfig, generate

    return generate(SynthConfig(seed=0))


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory, small_world):
    from fsconflict.synth import write_dataset

    d = tmp_path_factory.mktemp("world")
    write_dataset(small_world, d)
    return d


@pytest.fixture(scope="session")
def small_fused(small_dataset):
    from fsconflict.pipeline import fuse_dataset, load_dataset

    ds = load_dataset(small_dataset / "admin.shp", small_dataset / "fs", small_dataset / "acled.csv")
    fused, report = fuse_dataset(ds)
    return ds, fused, report


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
