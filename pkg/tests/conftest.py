import dataclasses
from pathlib import Path

import numpy as np
import pytest

from graphdigit.config import RunConfig
from graphdigit.geometry import GraphGeometry

REPO_ROOT = Path(__file__).resolve().parents[1]
SYNTH32_CONFIG = REPO_ROOT / "configs" / "synth32.json"


@pytest.fixture(scope="session")
def geom() -> GraphGeometry:
    return GraphGeometry()


@pytest.fixture(scope="session")
def synth_config() -> RunConfig:
    return RunConfig.load(SYNTH32_CONFIG)


@pytest.fixture(scope="session")
def synth_config_path() -> Path:
    return SYNTH32_CONFIG


@pytest.fixture(scope="session")
def dataset32(synth_config, tmp_path_factory):
    """The frozen 32-image acceptance dataset, generated once per session."""
    from graphdigit.synth import generate_dataset

    out = tmp_path_factory.mktemp("synth32")
    manifest = generate_dataset(
        synth_config.n_images,
        synth_config.geometry,
        synth_config.style,
        out,
        blank_fraction=synth_config.blank_fraction,
        duration_range=synth_config.duration_range,
    )
    return out, manifest


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture
def tiny_geom() -> GraphGeometry:
    """Small geometry for fast synthetic cases."""
    return dataclasses.replace(GraphGeometry(), image_width_px=200, slot_count=12, time_origin_col=4)
