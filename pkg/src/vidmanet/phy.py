"""TwoRayGround propagation and the range test built on it."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ZeroDistance

SPEED_OF_LIGHT = 299792458.0


@dataclass(frozen=True)
class RadioParams:
    # Defaults give a nominal range of ~250 m (914 MHz WaveLAN-style radio).
    tx_power: float = 0.28183815
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    antenna_height_tx: float = 1.5
    antenna_height_rx: float = 1.5
    frequency: float = 914e6
    system_loss: float = 1.0
    rx_threshold: float = 3.652e-10

    def __post_init__(self):
        for name in ("tx_power", "gain_tx", "gain_rx", "antenna_height_tx",
                     "antenna_height_rx", "frequency", "rx_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.system_loss < 1:
            raise ValueError("system_loss must be >= 1")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency

    @property
    def crossover_distance(self) -> float:
        return 4 * math.pi * self.antenna_height_tx * self.antenna_height_rx / self.wavelength


def friis_power(d: float, p: RadioParams) -> float:
    lam = p.wavelength
    return p.tx_power * p.gain_tx * p.gain_rx * lam * lam / ((4 * math.pi * d) ** 2 * p.system_loss)


def two_ray_power(d: float, p: RadioParams) -> float:
    ht, hr = p.antenna_height_tx, p.antenna_height_rx
    return p.tx_power * p.gain_tx * p.gain_rx * ht * ht * hr * hr / (d ** 4 * p.system_loss)


def received_power_at(d: float, p: RadioParams) -> float:
    """Received power in watts at distance ``d``; two-ray branch from the crossover on."""
    if d <= 0:
        raise ZeroDistance("received power is undefined at zero distance")
    if d < p.crossover_distance:
        return friis_power(d, p)
    return two_ray_power(d, p)


def received_power(tx: tuple[float, float], rx: tuple[float, float], p: RadioParams) -> float:
    return received_power_at(math.hypot(rx[0] - tx[0], rx[1] - tx[1]), p)


def in_range_at(d: float, p: RadioParams) -> bool:
    return received_power_at(d, p) >= p.rx_threshold


def nominal_range(p: RadioParams) -> float:
    """Largest distance at which the received power still meets the threshold."""
    dc = p.crossover_distance
    if two_ray_power(dc, p) >= p.rx_threshold:
        ht, hr = p.antenna_height_tx, p.antenna_height_rx
        num = p.tx_power * p.gain_tx * p.gain_rx * ht * ht * hr * hr
        return (num / (p.rx_threshold * p.system_loss)) ** 0.25
    lam = p.wavelength
    num = p.tx_power * p.gain_tx * p.gain_rx * lam * lam
    return math.sqrt(num / (p.rx_threshold * p.system_loss)) / (4 * math.pi)
