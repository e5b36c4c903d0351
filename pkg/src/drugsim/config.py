"""Run configuration and the flat ``key = value`` config file format.

Blank lines and ``#`` comments are ignored. Every key is optional; see
:class:`RunConfig` for the defaults.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping, Optional

from .core import ProtocolParams
from .energy import EnergyDomainError, EnergyModel
from .topology import ConfigError, sink_position

PROTOCOLS = ("drug", "spin", "flooding")


@dataclass(frozen=True)
class RunConfig:
    node_count: int = 100
    area_w_m: float = 1000.0
    area_h_m: float = 1000.0
    radio_range_m: float = 150.0
    sink: str = "center"
    protocol: str = "drug"
    e_elec_j_per_bit: float = 50e-9
    eps_amp_j_per_bit_m2: float = 100e-12
    initial_energy_j: float = 0.5
    threshold_j: float = 0.05
    data_bits: int = 2000
    control_bits: int = 64
    per_hop_latency_s: float = 0.01
    ack_wait_s: float = 0.05
    max_retries: int = 2
    event_rate_hz: float = 1.0
    duration_s: float = 500.0
    snapshot_s: float = 5.0
    seed: int = 0
    reinit_period_s: float = 0.0
    trace: bool = False

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    @property
    def energy_model(self) -> EnergyModel:
        return EnergyModel(self.e_elec_j_per_bit, self.eps_amp_j_per_bit_m2,
                           self.initial_energy_j, self.threshold_j)

    @property
    def protocol_params(self) -> ProtocolParams:
        return ProtocolParams(
            data_bits=self.data_bits,
            control_bits=self.control_bits,
            ack_wait_s=self.ack_wait_s,
            max_retries=self.max_retries,
            threshold=self.threshold_j,
            jitter_s=self.per_hop_latency_s / 10.0,
            seed=self.seed,
        )


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def _fail(key, why):
    raise ConfigError(f"{key}: {why}")


def validate(cfg: RunConfig) -> None:
    for key in ("node_count", "data_bits"):
        if getattr(cfg, key) < 1:
            _fail(key, "must be a positive integer")
    for key in ("control_bits", "max_retries", "seed"):
        if getattr(cfg, key) < 0:
            _fail(key, "must be non-negative")
    for key in ("area_w_m", "area_h_m", "radio_range_m", "per_hop_latency_s",
                "ack_wait_s", "duration_s", "snapshot_s"):
        if not getattr(cfg, key) > 0:
            _fail(key, "must be positive")
    for key in ("event_rate_hz", "reinit_period_s"):
        if getattr(cfg, key) < 0:
            _fail(key, "must be non-negative")
    if cfg.control_bits >= cfg.data_bits:
        _fail("control_bits", "must be smaller than data_bits")
    if cfg.protocol not in PROTOCOLS:
        _fail("protocol", f"must be one of {', '.join(PROTOCOLS)}")
    sink_position(cfg.sink, cfg.area_w_m, cfg.area_h_m)
    try:
        cfg.energy_model
    except EnergyDomainError as exc:
        names = {"e_elec": "e_elec_j_per_bit", "eps_amp": "eps_amp_j_per_bit_m2",
                 "initial_energy": "initial_energy_j", "participation_threshold": "threshold_j"}
        msg = str(exc)
        key = next((v for k, v in names.items() if msg.startswith(k)), "threshold_j")
        _fail(key, msg)


def _coerce(key: str, raw):
    typ = FIELD_TYPES[key]
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if typ == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if typ == "int":
            return int(text)
        if typ == "float":
            return float(text)
    except ValueError:
        _fail(key, f"expected {typ}, got {text!r}")
    return text


def read_config_file(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in FIELD_TYPES:
                _fail(key, "unknown key")
            values[key] = value.strip()
    return values


def parse_config(path=None, overrides: Optional[Mapping] = None) -> RunConfig:
    """Load ``path`` (may be None), apply ``overrides`` and validate."""
    values = read_config_file(path) if path is not None else {}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in FIELD_TYPES:
            _fail(key, "unknown key")
        values[key] = value
    typed = {k: _coerce(k, v) for k, v in values.items()}
    return RunConfig(**typed)
