"""Run configuration and the key/value config-file format.

Config files hold one `key = value` per line; `#` starts a comment. List
values are comma or space separated. Interference pairs repeat the `edge`
key (`edge = 1 2`). Recognized keys: k, n, tprime, regime, snr_db, r,
trials, min_outages, seed, edge.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Union

from .topology import (
    REGIME_INTERFERENCE,
    REGIME_NO_INTERFERENCE,
    REGIMES,
    InterferenceGraph,
)


class ConfigError(ValueError):
    """Invalid run configuration or config file."""


@dataclass(frozen=True)
class SchemeConfig:
    """Everything a run needs: scheme shape, regime, sweep grids, MC controls.

    interference_edges lists interfering relay pairs; in the interference
    regime an empty list means the complete graph (every pair interferes).
    """

    K: int = 2
    N: int = 2
    tprime: int = 8
    regime: str = REGIME_NO_INTERFERENCE
    interference_edges: tuple = ()
    snr_db: tuple = (20.0, 25.0, 30.0, 35.0, 40.0, 45.0)
    r_list: tuple = (0.25, 0.5, 0.75)
    trials: int = 100_000
    min_outages: int = 100
    seed: int = 1

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 1:
            raise ConfigError(f"k must be an integer >= 1, got {self.K!r}")
        if not isinstance(self.N, int) or self.N < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.N!r}")
        if not isinstance(self.tprime, int) or self.tprime < 1:
            raise ConfigError(f"tprime must be an integer >= 1, got {self.tprime!r}")
        if self.regime not in REGIMES:
            raise ConfigError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.regime == REGIME_INTERFERENCE and self.K < 2:
            raise ConfigError("the interference regime needs k >= 2")
        try:
            InterferenceGraph.from_pairs(self.K, self.interference_edges)
        except ValueError as exc:
            raise ConfigError(f"bad interference edge: {exc}") from None
        if not self.snr_db:
            raise ConfigError("snr_db must list at least one value")
        if any(db <= 0.0 for db in self.snr_db):
            raise ConfigError("snr_db values must be positive")
        if any(b <= a for a, b in zip(self.snr_db, self.snr_db[1:])):
            raise ConfigError("snr_db values must be strictly increasing")
        if not self.r_list:
            raise ConfigError("r must list at least one value")
        if any(not 0.0 <= r <= 1.0 for r in self.r_list):
            raise ConfigError("r values must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.r_list, self.r_list[1:])):
            raise ConfigError("r values must be strictly increasing")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not isinstance(self.min_outages, int) or self.min_outages < 1:
            raise ConfigError(
                f"min_outages must be an integer >= 1, got {self.min_outages!r}"
            )
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @property
    def graph(self) -> Optional[InterferenceGraph]:
        """Interference graph in effect, or None outside the interference regime."""
        if self.regime != REGIME_INTERFERENCE:
            return None
        if self.interference_edges:
            return InterferenceGraph.from_pairs(self.K, self.interference_edges)
        return InterferenceGraph.complete(self.K)


_INT_KEYS = {"k", "n", "tprime", "trials", "min_outages", "seed"}
_FLOAT_LIST_KEYS = {"snr_db", "r"}
_KEY_TO_FIELD = {
    "k": "K",
    "n": "N",
    "tprime": "tprime",
    "regime": "regime",
    "snr_db": "snr_db",
    "r": "r_list",
    "trials": "trials",
    "min_outages": "min_outages",
    "seed": "seed",
}


def parse_config_file(path: Union[str, Path]) -> dict:
    """Read a config file into a raw {key: value} dict (edges under 'edges')."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values: dict = {"edges": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if key == "edge":
            parts = val.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: edge needs two relay ids")
            try:
                values["edges"].append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: edge ids must be integers") from None
        elif key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: {key} must be an integer") from None
        elif key in _FLOAT_LIST_KEYS:
            try:
                values[key] = tuple(float(p) for p in val.replace(",", " ").split())
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: {key} must list numbers") from None
        elif key == "regime":
            values[key] = val
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def load_config(path: Optional[Union[str, Path]] = None, **overrides) -> SchemeConfig:
    """Build a config from an optional file plus keyword overrides (None = keep).

    Override names are SchemeConfig field names; flags take precedence over
    file values, which take precedence over defaults.
    """
    field_names = {f.name for f in fields(SchemeConfig)}
    kwargs: dict = {}
    if path is not None:
        values = parse_config_file(path)
        edges = values.pop("edges")
        if edges:
            kwargs["interference_edges"] = tuple(edges)
        for key, val in values.items():
            kwargs[_KEY_TO_FIELD[key]] = val
    for key, val in overrides.items():
        if key not in field_names:
            raise ConfigError(f"unknown config field {key!r}")
        if val is not None:
            kwargs[key] = val
    return SchemeConfig(**kwargs)
