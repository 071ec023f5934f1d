"""End-to-end run: simulate a plane wave, design filters, encode, render, report.

Encoded channels are measured on the filter bank's bin grid. Simulated
captures are a circular convolution of length L and the encoder adds a
linear convolution of length F, so with L a multiple of F the ratio of
channel spectrum to source spectrum at the bank's bins is exact.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from app.core.dsp import bin_frequencies
from app.core.encoder import AmbisonicSignalSet, encode
from app.core.harmonics import acn, acn_indices
from app.core.radial import EqualizationFilterBank, design_equalizers
from app.core.renderer import analytic_test_hrtf, render_binaural
from app.core.simulator import SimulationResult, simulate_capture, truth_file
from app.schemas.audio import SidecarMetadata
from app.schemas.common import parse_model
from app.schemas.geometry import ArrayGeometry
from app.schemas.pipeline import ChannelReport, PipelineParams, PipelineReport
from app.schemas.radial import RadialConfig
from app.schemas.simulation import PlaneWaveSource
from app.services.audio_io import MultichannelBuffer, write_wav
from app.services.bank_store import save_bank

logger = logging.getLogger(__name__)

EVALUATED_BAND_HZ = (200.0, 4000.0)
MAGNITUDE_TOLERANCE_DB = 1.0
PHASE_TOLERANCE_DEG = 5.0
ZERO_CHANNEL_FLOOR_DB = 40.0


def measure_transfer(
    signals: np.ndarray, source: np.ndarray, fft_length: int, delay: int
) -> np.ndarray:
    """Spectra of ``signals`` over the source spectrum on the ``fft_length`` bin grid.

    ``delay`` samples of latency are removed from the phase. Returns
    (channels, fft_length // 2 + 1); bins where the source has no energy
    come back as NaN.
    """
    signals = np.atleast_2d(signals)
    if source.size % fft_length:
        raise ValueError(f"source length {source.size} is not a multiple of {fft_length}")
    needed = max(signals.shape[1], source.size, fft_length)
    size = 1 << (needed - 1).bit_length()
    step = size // fft_length
    spectra = np.fft.rfft(signals, n=size, axis=1)[:, ::step]
    source_spectrum = np.fft.rfft(source, n=size)[::step]
    k = np.arange(fft_length // 2 + 1)
    undelay = np.exp(2j * np.pi * k * delay / fft_length)
    with np.errstate(divide="ignore", invalid="ignore"):
        return spectra * undelay / source_spectrum


def _intersect(
    band: tuple[float, float], other: Optional[tuple[float, float]]
) -> Optional[tuple[float, float]]:
    if other is None:
        return None
    lo, hi = max(band[0], other[0]), min(band[1], other[1])
    return (lo, hi) if lo <= hi else None


def _band_mask(freqs: np.ndarray, band: tuple[float, float]) -> np.ndarray:
    return (freqs >= band[0]) & (freqs <= band[1])


def evaluate_channels(
    ambi: AmbisonicSignalSet,
    sim: SimulationResult,
    bank: EqualizationFilterBank,
    band: tuple[float, float] = EVALUATED_BAND_HZ,
) -> list[ChannelReport]:
    """Compare every encoded channel with its truth coefficient.

    Nonzero channels must match in magnitude and phase over ``band``
    intersected with the valid band of their mode; zero channels must stay
    ``ZERO_CHANNEL_FLOOR_DB`` below the strongest channel.
    """
    fft_length = bank.config.fir_length
    freqs = bin_frequencies(fft_length, ambi.sample_rate)
    ratio = measure_transfer(ambi.channels, sim.source_signal, fft_length, ambi.latency_samples)
    truth = sim.truth_coeffs

    magnitude = np.abs(ratio)
    peak = float(np.max(magnitude[:, _band_mask(freqs, band)]))
    scale = float(np.max(np.abs(truth)))

    reports = []
    for idx in acn_indices(ambi.order):
        c = acn(idx.n, idx.m)
        t = float(truth[c])
        channel_band = _intersect(band, bank.valid_band(idx.m))

        if abs(t) <= 1e-12 * scale:
            measured_band = channel_band or band
            level = float(np.max(magnitude[c, _band_mask(freqs, measured_band)]))
            below = None if level == 0 else 20 * math.log10(peak / level)
            reports.append(
                ChannelReport(
                    acn=c,
                    n=idx.n,
                    m=idx.m,
                    truth=t,
                    silent=True,
                    band_hz=measured_band,
                    level_below_peak_db=below,
                    passed=below is None or below >= ZERO_CHANNEL_FLOOR_DB,
                )
            )
            continue

        if channel_band is None:
            logger.warning("channel %d (n=%d, m=%d) has no valid band to evaluate", c, idx.n, idx.m)
            reports.append(ChannelReport(acn=c, n=idx.n, m=idx.m, truth=t, passed=False))
            continue

        measured = ratio[c, _band_mask(freqs, channel_band)]
        error_db = 20 * np.log10(np.abs(measured / t))
        phase_deg = np.degrees(np.abs(np.angle(measured / t)))
        max_error = float(np.max(np.abs(error_db)))
        max_phase = float(np.max(phase_deg))
        reports.append(
            ChannelReport(
                acn=c,
                n=idx.n,
                m=idx.m,
                truth=t,
                band_hz=channel_band,
                mean_magnitude_db=float(np.mean(20 * np.log10(np.abs(measured)))),
                max_magnitude_error_db=max_error,
                max_phase_error_deg=max_phase,
                passed=max_error <= MAGNITUDE_TOLERANCE_DB and max_phase <= PHASE_TOLERANCE_DEG,
            )
        )
    return reports


@dataclass(frozen=True)
class PipelineOutcome:
    source: PlaneWaveSource
    geometry: ArrayGeometry
    simulation: SimulationResult
    bank: EqualizationFilterBank
    ambisonics: AmbisonicSignalSet
    binaural: np.ndarray
    binaural_latency: int
    report: PipelineReport


def run_pipeline(params: PipelineParams) -> PipelineOutcome:
    """Simulate, design, encode and render in memory."""
    params = parse_model(PipelineParams, params.model_dump())
    geom = ArrayGeometry(
        radius=params.radius, mic_count=params.mic_count, speed_of_sound=params.speed_of_sound
    )
    src = parse_model(
        PlaneWaveSource,
        {
            "azimuth": math.radians(params.azimuth_deg),
            "amplitude": params.amplitude,
            "signal": params.signal,
        },
    )
    sim = simulate_capture(src, geom, params.sample_rate, params.length, order=params.order)
    cfg = parse_model(
        RadialConfig,
        {
            "radius": params.radius,
            "speed_of_sound": params.speed_of_sound,
            "sample_rate": params.sample_rate,
            "fir_length": params.fir_length,
            "max_order": params.order,
            "max_gain_db": params.max_gain_db,
        },
    )
    bank = design_equalizers(cfg)
    ambi = encode(sim.mic_signals, geom, bank, params.order, sample_rate=params.sample_rate)

    hrtf = analytic_test_hrtf(
        params.order, params.sample_rate, params.fir_length, params.radius, params.speed_of_sound
    )
    ears, ear_latency = render_binaural(ambi, hrtf)

    channels = evaluate_channels(ambi, sim, bank)
    report = PipelineReport(
        azimuth_deg=params.azimuth_deg,
        radius=params.radius,
        mic_count=params.mic_count,
        order=params.order,
        sample_rate=params.sample_rate,
        fir_length=params.fir_length,
        simulation_truncation=sim.truncation,
        evaluated_band_hz=EVALUATED_BAND_HZ,
        valid_band_hz={m: bank.valid_band(m) for m in range(params.order + 1)},
        ambisonic_latency_samples=ambi.latency_samples,
        binaural_latency_samples=ear_latency,
        channels=channels,
        passed=all(c.passed for c in channels),
    )
    failed = [c.acn for c in channels if not c.passed]
    if failed:
        logger.warning("channels failing the accuracy check: %s", failed)
    else:
        logger.info("all %d channels within tolerance", len(channels))
    return PipelineOutcome(
        source=src,
        geometry=geom,
        simulation=sim,
        bank=bank,
        ambisonics=ambi,
        binaural=ears,
        binaural_latency=ear_latency,
        report=report,
    )


def report_frame(report: PipelineReport) -> pd.DataFrame:
    rows = []
    for c in report.channels:
        row = c.model_dump(exclude={"band_hz"})
        row["band_low_hz"], row["band_high_hz"] = c.band_hz or (None, None)
        rows.append(row)
    return pd.DataFrame(rows)


def write_outputs(outcome: PipelineOutcome, out_dir: Union[str, Path]) -> dict[str, Path]:
    """Write every artifact of a run into ``out_dir``; returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = outcome.report
    sim = outcome.simulation
    paths = {
        "mics": out / "mics.wav",
        "truth": out / "truth.json",
        "bank": out / "bank.emafb",
        "ambisonics": out / "ambi.wav",
        "binaural": out / "binaural.wav",
        "report_json": out / "report.json",
        "report_csv": out / "report.csv",
    }

    write_wav(
        paths["mics"],
        MultichannelBuffer(sim.mic_signals, sim.sample_rate),
        SidecarMetadata(
            kind="mics",
            sample_rate=sim.sample_rate,
            channel_count=report.mic_count,
            geometry=outcome.geometry,
        ),
    )
    truth = truth_file(outcome.source, report.order)
    paths["truth"].write_text(truth.model_dump_json(indent=2) + "\n")
    save_bank(paths["bank"], outcome.bank)

    ambi = outcome.ambisonics
    write_wav(
        paths["ambisonics"],
        MultichannelBuffer(ambi.channels, ambi.sample_rate),
        SidecarMetadata(
            kind="ambisonics",
            sample_rate=ambi.sample_rate,
            order=ambi.order,
            channel_count=ambi.channels.shape[0],
            geometry=outcome.geometry,
            latency_samples=ambi.latency_samples,
        ),
    )
    write_wav(
        paths["binaural"],
        MultichannelBuffer(outcome.binaural, ambi.sample_rate),
        SidecarMetadata(
            kind="binaural",
            sample_rate=ambi.sample_rate,
            channel_count=2,
            latency_samples=outcome.binaural_latency,
        ),
    )

    paths["report_json"].write_text(report.model_dump_json(indent=2) + "\n")
    report_frame(report).to_csv(paths["report_csv"], index=False)
    logger.info("pipeline artifacts written to %s", out)
    return paths
