"""First-order radio energy model.

All energies are in joules. The default constants correspond to
50 nJ/bit for the transceiver electronics and 100 pJ/bit/m^2 for the
transmit amplifier, with a free-space (d^2) loss.

The per-message charges (:func:`tx_cost`, :func:`rx_cost`) are what the
simulator applies. The remaining functions are closed forms for a k-bit
message crossing n equal hops of length r; they are used as oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

E_ELEC = 50e-9
EPS_AMP = 100e-12


class EnergyDomainError(ValueError):
    """Raised for negative bit counts, distances or hop counts."""


@dataclass(frozen=True)
class EnergyModel:
    e_elec: float = E_ELEC
    eps_amp: float = EPS_AMP
    initial_energy: float = 0.5
    participation_threshold: float = 0.05

    def __post_init__(self):
        for name in ("e_elec", "eps_amp", "initial_energy", "participation_threshold"):
            if not getattr(self, name) > 0:
                raise EnergyDomainError(f"{name} must be strictly positive")
        if self.participation_threshold >= self.initial_energy:
            raise EnergyDomainError("participation_threshold must be below initial_energy")


DEFAULT_MODEL = EnergyModel()


def _check_nonneg(**values):
    for name, v in values.items():
        if v < 0:
            raise EnergyDomainError(f"{name} must be non-negative, got {v!r}")


def _check_hops(n):
    if n < 1:
        raise EnergyDomainError(f"hop count must be >= 1, got {n!r}")


def tx_cost(model: EnergyModel, k: float, d: float) -> float:
    """Energy to transmit ``k`` bits over ``d`` meters."""
    _check_nonneg(k=k, d=d)
    return model.e_elec * k + model.eps_amp * k * d * d


def rx_cost(model: EnergyModel, k: float) -> float:
    """Energy to receive ``k`` bits."""
    _check_nonneg(k=k)
    return model.e_elec * k


def direct_energy(model: EnergyModel, k: float, n: int, r: float) -> float:
    """Single transmission straight to a destination ``n * r`` meters away."""
    _check_hops(n)
    _check_nonneg(k=k, r=r)
    return k * (model.e_elec + model.eps_amp * n * n * r * r)


def multihop_receive_energy(model: EnergyModel, k: float, n: int) -> float:
    """Receive energy spent by the ``n - 1`` intermediate relays."""
    _check_hops(n)
    _check_nonneg(k=k)
    return (n - 1) * model.e_elec * k


def multihop_total_energy(model: EnergyModel, k: float, n: int, r: float) -> float:
    """n transmissions of r meters plus n - 1 relay receptions.

    The final receiver (the sink) is not charged.
    """
    _check_hops(n)
    _check_nonneg(k=k, r=r)
    return k * ((2 * n - 1) * model.e_elec + model.eps_amp * n * r * r)


def singlehop_pair_energy(model: EnergyModel, k: float, r: float) -> float:
    """One transmission over r meters plus its reception, both charged."""
    _check_nonneg(k=k, r=r)
    return k * (2 * model.e_elec + model.eps_amp * r * r)
