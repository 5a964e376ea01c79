from __future__ import annotations

from pathlib import Path

import pytest

from curvelattice.config import Configuration, Curve, load_configuration

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def tree_config(weights, edges, prefix="C") -> Configuration:
    labels = [f"{prefix}{i}" for i in range(len(weights))]
    curves = tuple(Curve(labels[i], w) for i, w in enumerate(weights))
    return Configuration(curves, tuple((labels[a], labels[b]) for a, b in edges))


def chain_config(weights, prefix="C") -> Configuration:
    return tree_config(weights, [(i, i + 1) for i in range(len(weights) - 1)], prefix)


@pytest.fixture
def config_path():
    return lambda name: CONFIG_DIR / name


@pytest.fixture
def load():
    return lambda name: load_configuration(CONFIG_DIR / name)
