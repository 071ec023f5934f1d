"""Command-line entry point: ``ema simulate | design-filters | encode | render | pipeline``."""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from app.core.config import settings
from app.core.encoder import AmbisonicSignalSet, encode
from app.core.errors import ConfigurationError, EmaError, MismatchError, ShapeError
from app.core.pipeline import run_pipeline, write_outputs
from app.core.radial import design_equalizers
from app.core.renderer import analytic_test_hrtf, hrtf_sh_transform, render_binaural
from app.core.simulator import simulate_capture, truth_file
from app.schemas.audio import SidecarMetadata
from app.schemas.common import parse_model
from app.schemas.geometry import ArrayGeometry
from app.schemas.pipeline import PipelineParams
from app.schemas.radial import RadialConfig
from app.schemas.simulation import PlaneWaveSource
from app.services.audio_io import MultichannelBuffer, read_sidecar, read_wav, sidecar_path, write_wav
from app.services.bank_store import load_bank, save_bank
from app.services.hrtf_store import load_grid

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _add_acoustics(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--radius", type=float, default=settings.DEFAULT_RADIUS_M, help="Sphere radius (m)")
    parser.add_argument(
        "--speed-of-sound", type=float, default=settings.SPEED_OF_SOUND, help="Speed of sound (m/s)"
    )
    parser.add_argument(
        "--sample-rate", type=int, default=settings.DEFAULT_SAMPLE_RATE, help="Sample rate (Hz)"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ema",
        description="Equatorial microphone array to ambisonics toolchain.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sim = sub.add_parser("simulate", help="Plane wave captured by a rigid-sphere ring")
    sim.add_argument("--azimuth-deg", type=float, required=True, help="Incidence azimuth (degrees)")
    sim.add_argument("--mics", type=int, required=True, help="Number of microphones on the ring")
    _add_acoustics(sim)
    sim.add_argument("--length", type=int, default=8192, help="Samples (power of two)")
    sim.add_argument("--signal", default="impulse", help="impulse | noise | sine:<Hz>")
    sim.add_argument("--amplitude", type=float, default=1.0)
    sim.add_argument("--order", type=int, default=None, help="Order of the truth coefficients")
    sim.add_argument("--truncation", type=int, default=None, help="Simulation truncation order")
    sim.add_argument("--out", required=True, help="Microphone WAV")
    sim.add_argument("--truth", required=True, help="Truth coefficients JSON")
    sim.set_defaults(handler=_simulate)

    design = sub.add_parser("design-filters", help="Design the radial equalization filter bank")
    _add_acoustics(design)
    design.add_argument("--order", type=int, required=True, help="Highest mode |m|")
    design.add_argument("--fir-length", type=int, default=settings.DEFAULT_FIR_LENGTH)
    design.add_argument("--max-gain-db", type=float, default=settings.DEFAULT_MAX_GAIN_DB)
    design.add_argument("--truncation-order", type=int, default=None)
    design.add_argument("--out", required=True, help="Filter bank (.emafb)")
    design.set_defaults(handler=_design_filters)

    enc = sub.add_parser("encode", help="Microphone signals to ACN/N3D ambisonics")
    enc.add_argument("--in", dest="input", required=True, help="Microphone WAV, channel q = mic q")
    enc.add_argument("--geometry", required=True, help="Geometry JSON")
    enc.add_argument("--bank", required=True, help="Filter bank (.emafb)")
    enc.add_argument("--order", type=int, required=True)
    enc.add_argument(
        "--compensate-delay",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="Trim the modeling delay so channels align with the input",
    )
    enc.add_argument("--out", required=True, help="Ambisonic WAV")
    enc.set_defaults(handler=_encode)

    ren = sub.add_parser("render", help="Ambisonics to binaural")
    ren.add_argument("--ambi", required=True, help="Ambisonic WAV")
    source = ren.add_mutually_exclusive_group(required=True)
    source.add_argument("--hrtf", help="HRTF grid file")
    source.add_argument("--test-hrtf", action="store_true", help="Analytic rigid-sphere HRTF")
    ren.add_argument("--order", type=int, default=None, help="HRTF order (default: ambisonic order)")
    ren.add_argument(
        "--hrtf-length", type=int, default=settings.DEFAULT_FIR_LENGTH, help="Test HRTF FFT length"
    )
    ren.add_argument(
        "--compensate-delay",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="Trim the HRTF modeling delay",
    )
    ren.add_argument("--out", required=True, help="Binaural WAV")
    ren.set_defaults(handler=_render)

    pipe = sub.add_parser("pipeline", help="simulate, design-filters, encode, render and report")
    pipe.add_argument("--azimuth-deg", type=float, required=True)
    pipe.add_argument("--mics", type=int, required=True)
    pipe.add_argument("--order", type=int, required=True)
    _add_acoustics(pipe)
    pipe.add_argument("--length", type=int, default=8192)
    pipe.add_argument("--fir-length", type=int, default=settings.DEFAULT_FIR_LENGTH)
    pipe.add_argument("--max-gain-db", type=float, default=settings.DEFAULT_MAX_GAIN_DB)
    pipe.add_argument("--out-dir", default="pipeline-out")
    pipe.add_argument("--strict", action="store_true", help="Exit 1 when a channel fails the report")
    pipe.set_defaults(handler=_pipeline)

    return parser


def _simulate(args: argparse.Namespace) -> int:
    geom = parse_model(
        ArrayGeometry,
        {"radius": args.radius, "mic_count": args.mics, "speed_of_sound": args.speed_of_sound},
    )
    src = parse_model(
        PlaneWaveSource,
        {"azimuth": math.radians(args.azimuth_deg), "amplitude": args.amplitude, "signal": args.signal},
    )
    order = geom.max_mode if args.order is None else args.order
    result = simulate_capture(
        src, geom, args.sample_rate, args.length, truncation=args.truncation, order=order
    )
    write_wav(
        args.out,
        MultichannelBuffer(result.mic_signals, args.sample_rate),
        SidecarMetadata(
            kind="mics", sample_rate=args.sample_rate, channel_count=geom.mic_count, geometry=geom
        ),
    )
    Path(args.truth).write_text(truth_file(src, order).model_dump_json(indent=2) + "\n")
    return 0


def _design_filters(args: argparse.Namespace) -> int:
    data = {
        "radius": args.radius,
        "speed_of_sound": args.speed_of_sound,
        "sample_rate": args.sample_rate,
        "fir_length": args.fir_length,
        "max_order": args.order,
        "max_gain_db": args.max_gain_db,
    }
    if args.truncation_order is not None:
        data["truncation_order"] = args.truncation_order
    bank = design_equalizers(parse_model(RadialConfig, data))
    save_bank(args.out, bank)
    return 0


def _read_geometry(path: str) -> ArrayGeometry:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}: geometry is not valid JSON ({e})") from e
    return parse_model(ArrayGeometry, data)


def _encode(args: argparse.Namespace) -> int:
    geom = _read_geometry(args.geometry)
    bank = load_bank(args.bank)
    capture = read_wav(args.input)
    ambi = encode(
        capture.samples,
        geom,
        bank,
        args.order,
        sample_rate=capture.sample_rate,
        compensate_delay=args.compensate_delay,
    )
    write_wav(
        args.out,
        MultichannelBuffer(ambi.channels, ambi.sample_rate),
        SidecarMetadata(
            kind="ambisonics",
            sample_rate=ambi.sample_rate,
            order=ambi.order,
            channel_count=ambi.channels.shape[0],
            geometry=geom,
            latency_samples=ambi.latency_samples,
        ),
    )
    return 0


def _read_ambisonics(path: str) -> tuple[AmbisonicSignalSet, Optional[SidecarMetadata]]:
    buffer = read_wav(path)
    meta = read_sidecar(path) if sidecar_path(path).exists() else None
    if meta is not None and meta.kind != "ambisonics":
        raise MismatchError(f"{path}: sidecar describes {meta.kind}, not ambisonics")
    order = math.isqrt(buffer.channel_count) - 1
    if (order + 1) ** 2 != buffer.channel_count:
        raise ShapeError(f"{path}: {buffer.channel_count} channels is not (N+1)^2")
    ambi = AmbisonicSignalSet(
        order=order,
        channels=buffer.samples,
        sample_rate=buffer.sample_rate,
        latency_samples=meta.latency_samples if meta else 0,
    )
    return ambi, meta


def _render(args: argparse.Namespace) -> int:
    ambi, meta = _read_ambisonics(args.ambi)
    order = ambi.order if args.order is None else args.order
    if args.test_hrtf:
        geom = meta.geometry if meta and meta.geometry else None
        hrtf = analytic_test_hrtf(
            order,
            ambi.sample_rate,
            args.hrtf_length,
            radius=geom.radius if geom else None,
            speed_of_sound=geom.speed_of_sound if geom else None,
        )
    else:
        hrtf = hrtf_sh_transform(load_grid(args.hrtf), order)
    ears, latency = render_binaural(ambi, hrtf, compensate_delay=args.compensate_delay)
    write_wav(
        args.out,
        MultichannelBuffer(ears, ambi.sample_rate),
        SidecarMetadata(
            kind="binaural", sample_rate=ambi.sample_rate, channel_count=2, latency_samples=latency
        ),
    )
    return 0


def _pipeline(args: argparse.Namespace) -> int:
    params = parse_model(
        PipelineParams,
        {
            "azimuth_deg": args.azimuth_deg,
            "radius": args.radius,
            "mic_count": args.mics,
            "order": args.order,
            "sample_rate": args.sample_rate,
            "length": args.length,
            "fir_length": args.fir_length,
            "max_gain_db": args.max_gain_db,
            "speed_of_sound": args.speed_of_sound,
        },
    )
    outcome = run_pipeline(params)
    paths = write_outputs(outcome, args.out_dir)
    status = "passed" if outcome.report.passed else "FAILED"
    print(f"report {status}: {paths['report_json']}")
    if args.strict and not outcome.report.passed:
        return 1
    return 0


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format=LOG_FORMAT,
    )
    try:
        return args.handler(args)
    except (EmaError, OSError) as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"ema {args.command}: error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
