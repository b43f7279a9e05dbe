import numpy as np
import pytest

from kilnopt.preprocess import default_rules, run_pipeline
from kilnopt.synth import default_plant_spec, generate_synthetic_plant, inject_artifacts


@pytest.fixture(scope="session")
def small_raw():
    """A 6,000-minute plant with injected duplicates, missing cells, and
    negative readings. Shared read-only across the whole session."""
    ds = generate_synthetic_plant(default_plant_spec(seed=0, duration_minutes=6000))
    ds, log = inject_artifacts(
        ds,
        duplicate_fraction=0.002,
        missing_fraction=0.003,
        negative_fraction=0.001,
        seed=1,
    )
    return ds, log


@pytest.fixture(scope="session")
def small_clean(small_raw):
    ds, _ = small_raw
    clean, _ = run_pipeline(ds, default_rules())
    return clean


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
