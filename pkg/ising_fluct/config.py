from dataclasses import dataclass, field, fields, replace
from logging import getLogger
from pathlib import Path

import yaml

from ising_fluct import paths
from ising_fluct.exceptions import DomainError

logger = getLogger("IsingFluctConfig")


@dataclass(frozen=True)
class SeriesConfig:
    tol: float = 1e-14
    max_terms: int = 10_000_000


@dataclass(frozen=True)
class RootsConfig:
    xtol: float = 1e-12
    scan_points: int = 1000


@dataclass(frozen=True)
class FiniteChainConfig:
    max_iter: int = 10_000
    scan_points: int = 200
    xtol: float = 1e-4


@dataclass(frozen=True)
class GeneralizedConfig:
    step: float = 1e-4
    tol: float = 1e-15


@dataclass(frozen=True)
class SweepConfig:
    workers: int = 1


@dataclass(frozen=True)
class VerifyConfig:
    tol: float = 1e-10


@dataclass(frozen=True)
class IsingFluctConfig:
    series: SeriesConfig = field(default_factory=SeriesConfig)
    roots: RootsConfig = field(default_factory=RootsConfig)
    finite_chain: FiniteChainConfig = field(default_factory=FiniteChainConfig)
    generalized: GeneralizedConfig = field(default_factory=GeneralizedConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    verify: VerifyConfig = field(default_factory=VerifyConfig)


def _read_yaml(path: Path) -> dict:
    with open(path) as f:
        config = yaml.load(f, Loader=yaml.FullLoader)
    return config or {}


def _overlay(base: IsingFluctConfig, config: dict, source) -> IsingFluctConfig:
    known_sections = {f.name: f for f in fields(base)}
    unknown = [k for k in config.keys() if k not in known_sections]
    if len(unknown) > 0:
        msg = f"unknown config sections in {source}:\n    {unknown}"
        logger.error(msg)
        raise DomainError(msg)

    updates = {}
    for section_name, section_values in config.items():
        section = getattr(base, section_name)
        section_values = section_values or {}
        known_keys = {f.name: f.type for f in fields(section)}
        unexpected_keys = [k for k in section_values if k not in known_keys]
        if len(unexpected_keys) > 0:
            msg = f"unexpected keys in [{section_name}] of {source}:\n    {unexpected_keys}"
            logger.error(msg)
            raise DomainError(msg)
        # YAML reads 1e-14 (no dot) as a string, so coerce through the field type
        coerced = {key: known_keys[key](value) for key, value in section_values.items()}
        updates[section_name] = replace(section, **coerced)
    return replace(base, **updates)


def load_config(path: Path = None) -> IsingFluctConfig:
    """
    Read the shipped defaults, then overlay the user file at `path` (if given).
    """
    config = _overlay(
        IsingFluctConfig(), _read_yaml(paths.default_config_path), "defaults"
    )
    if path is not None:
        path = Path(path)
        logger.info(f"load config overrides from {path}")
        config = _overlay(config, _read_yaml(path), path)
    return config
