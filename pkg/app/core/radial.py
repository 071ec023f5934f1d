"""Rigid-sphere radial terms and the per-mode equalization filter bank.

b_n(kR) = -4 pi i^n * i / (kR)^2 / h'_n^(2)(kR)

The equalizer of mode m inverts sum_{n>=|m|} b_n [N_{n,m}(pi/2)]^2, is
soft-limited to ``max_gain_db`` above its smallest gain, and is realized as a
real FIR delayed by half its length.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike

from app.core.config import settings
from app.core.dsp import bin_frequencies, hermitian_response, ordered_map, realize_fir
from app.core.errors import ConfigurationError, DomainError, NumericalError
from app.core.harmonics import EquatorFactorTable, equator_table
from app.core.sphmath import sph_hankel2_deriv
from app.schemas.common import parse_model
from app.schemas.radial import FilterBankSummary, ModeSummary, RadialConfig

logger = logging.getLogger(__name__)

I_POWERS = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def radial_term_kr(n: int, kr: ArrayLike):
    """b_n as a function of the dimensionless kR > 0."""
    kr = np.asarray(kr, dtype=float)
    if np.any(~(kr > 0)):
        raise DomainError("radial term is singular at kR <= 0")
    h_deriv = np.asarray(sph_hankel2_deriv(n, kr), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        b = -4 * np.pi * I_POWERS[n % 4] * (1j / kr**2) / h_deriv
    # h' overflows only where the term is negligible
    b = np.where(np.isfinite(b), b, 0.0)
    return b.item() if b.ndim == 0 else b


def radial_term_bn(n: int, omega: ArrayLike, cfg: RadialConfig):
    """b_n(omega R / c, R) for angular frequency omega > 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(~(omega > 0)):
        raise DomainError("radial term needs omega > 0")
    return radial_term_kr(n, omega * cfg.radius / cfg.speed_of_sound)


def summed_orders(m: int, truncation: int) -> np.ndarray:
    """Orders n = |m|, |m|+2, ... <= truncation; the others vanish on the equator."""
    return np.arange(abs(m), truncation + 1, 2)


def mode_strength_sum(
    m: int,
    omega: ArrayLike,
    table: EquatorFactorTable,
    cfg: RadialConfig,
    truncation: Optional[int] = None,
):
    """Truncated sum_{n'=|m|} b_n'(omega R/c) [N_{n',m}(pi/2)]^2."""
    if truncation is None:
        truncation = cfg.truncation_order
    if abs(m) > cfg.max_order:
        raise DomainError(f"mode {m} exceeds max_order {cfg.max_order}")
    if table.max_order < truncation:
        raise ConfigurationError(
            f"equator table of order {table.max_order} does not reach truncation order {truncation}"
        )
    omega = np.asarray(omega, dtype=float)
    total = np.zeros(omega.shape, dtype=complex)
    for n in summed_orders(m, truncation):
        total = total + radial_term_bn(int(n), omega, cfg) * table.value(int(n), m) ** 2
    return total.item() if total.ndim == 0 else total


@dataclass(frozen=True)
class EqualizationFilterBank:
    """Per-|m| equalizers: stored responses and the FIRs realizing them.

    ``firs[m]`` transformed equals ``responses[m] * exp(-i w_k modeling_delay)``.
    """

    config: RadialConfig
    responses: np.ndarray
    firs: np.ndarray
    modeling_delay: int
    regularization_active: np.ndarray
    raw_responses: Optional[np.ndarray] = field(default=None, compare=False)

    @property
    def max_order(self) -> int:
        return self.config.max_order

    @property
    def frequencies(self) -> np.ndarray:
        return bin_frequencies(self.config.fir_length, self.config.sample_rate)

    def fir(self, m: int) -> np.ndarray:
        return self.firs[abs(m)]

    def response(self, m: int) -> np.ndarray:
        return self.responses[abs(m)]

    def valid_band(self, m: int) -> Optional[tuple[float, float]]:
        """Widest run of non-DC bins where regularization is inactive, in Hz."""
        inactive = ~self.regularization_active[abs(m)].copy()
        inactive[0] = False
        best: Optional[tuple[int, int]] = None
        start = None
        for k, ok in enumerate(np.append(inactive, False)):
            if ok and start is None:
                start = k
            elif not ok and start is not None:
                if best is None or k - start > best[1] - best[0] + 1:
                    best = (start, k - 1)
                start = None
        if best is None:
            return None
        freqs = self.frequencies
        return float(freqs[best[0]]), float(freqs[best[1]])

    def summary(self) -> FilterBankSummary:
        modes = []
        for m in range(self.max_order + 1):
            peak = float(np.max(np.abs(self.responses[m])))
            modes.append(
                ModeSummary(
                    mode=m,
                    peak_gain_db=20 * np.log10(peak) if peak > 0 else float("-inf"),
                    valid_band_hz=self.valid_band(m),
                )
            )
        return FilterBankSummary(config=self.config, modeling_delay=self.modeling_delay, modes=modes)


def soft_limit(raw: np.ndarray, max_gain_db: float) -> tuple[np.ndarray, float]:
    """raw / sqrt(1 + (|raw|/L)^2) with L = 10^(G/20) * min|raw|; returns (limited, L)."""
    magnitude = np.abs(raw)
    g_ref = float(np.min(magnitude))
    ceiling = 10 ** (max_gain_db / 20) * g_ref
    return raw / np.hypot(1.0, magnitude / ceiling), ceiling


def _design_mode(m: int, cfg: RadialConfig, table: EquatorFactorTable):
    freqs = bin_frequencies(cfg.fir_length, cfg.sample_rate)
    omega = 2 * np.pi * freqs[1:]
    strength = mode_strength_sum(m, omega, table, cfg)
    zero_bins = np.flatnonzero(strength == 0)
    if zero_bins.size:
        k = int(zero_bins[0]) + 1
        raise NumericalError(
            f"mode strength of |m|={m} underflows to 0 at bin {k} ({freqs[k]:.2f} Hz)",
            mode=m,
            bin_index=k,
        )

    raw = np.zeros(cfg.bin_count, dtype=complex)
    raw[1:] = 1.0 / strength
    limited = np.zeros(cfg.bin_count, dtype=complex)
    limited[1:], ceiling = soft_limit(raw[1:], cfg.max_gain_db)
    limited = hermitian_response(limited, cfg.fir_length)

    attenuation_db = np.full(cfg.bin_count, np.inf)
    with np.errstate(divide="ignore"):
        attenuation_db[1:] = 20 * np.log10(np.abs(raw[1:]) / np.abs(limited[1:]))
    active = attenuation_db > settings.PASSBAND_ATTENUATION_DB
    logger.debug("|m|=%d: ceiling %.3g, %d/%d bins limited", m, ceiling, active.sum(), active.size)
    return raw, limited, active


def design_equalizers(
    cfg: RadialConfig, table: Optional[EquatorFactorTable] = None
) -> EqualizationFilterBank:
    """Design the equalization filter bank for modes |m| = 0..max_order."""
    cfg = parse_model(RadialConfig, cfg.model_dump())
    if table is None:
        table = equator_table(cfg.truncation_order)
    if table.max_order < cfg.truncation_order:
        raise ConfigurationError(
            f"equator table of order {table.max_order} does not reach "
            f"truncation order {cfg.truncation_order}"
        )

    designs = ordered_map(lambda m: _design_mode(m, cfg, table), range(cfg.max_order + 1))
    raw = np.stack([d[0] for d in designs])
    responses = np.stack([d[1] for d in designs])
    active = np.stack([d[2] for d in designs])
    firs = realize_fir(responses, cfg.fir_length, cfg.modeling_delay)

    bank = EqualizationFilterBank(
        config=cfg,
        responses=responses,
        firs=firs,
        modeling_delay=cfg.modeling_delay,
        regularization_active=active,
        raw_responses=raw,
    )
    for m in range(cfg.max_order + 1):
        band = bank.valid_band(m)
        if band is None:
            logger.warning("regularization is active over the whole band of |m|=%d", m)
        else:
            logger.info("|m|=%d equalizer valid from %.1f Hz to %.1f Hz", m, band[0], band[1])
    logger.info(
        "designed %d equalizers (R=%.4f m, fs=%g Hz, L=%d, delay=%d)",
        cfg.max_order + 1, cfg.radius, cfg.sample_rate, cfg.fir_length, cfg.modeling_delay,
    )
    return bank


def synthesize_bank(cfg: RadialConfig, responses: np.ndarray) -> EqualizationFilterBank:
    """Bank from caller-provided responses, realized through the same FIR path."""
    responses = np.asarray(responses, dtype=complex)
    if responses.shape != (cfg.max_order + 1, cfg.bin_count):
        raise ConfigurationError(
            f"responses must have shape {(cfg.max_order + 1, cfg.bin_count)}, got {responses.shape}"
        )
    responses = hermitian_response(responses, cfg.fir_length)
    return EqualizationFilterBank(
        config=cfg,
        responses=responses,
        firs=realize_fir(responses, cfg.fir_length, cfg.modeling_delay),
        modeling_delay=cfg.modeling_delay,
        regularization_active=np.zeros(responses.shape, dtype=bool),
    )
