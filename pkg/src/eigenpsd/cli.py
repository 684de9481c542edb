"""Command-line interface: simulate scenes, enhance recordings, sweep tau.

Configuration comes from key = value sections in an INI-style file plus flag
overrides (flags > file > defaults). Exit codes: 0 success, 1 usage error,
2 I/O error, 3 numerical failure.
"""

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import metrics, pipeline, wavio
from .beamformer import MODES
from .errors import (
    DegenerateInput,
    EigenpsdError,
    FormatError,
    InvalidConfig,
    InvalidOrder,
    InvalidTau,
    NoConvergence,
    NotPositiveDefinite,
    SingularMatrix,
)
from .simulate import ScenarioSpec, long_term_spectrum, simulate_scenario
from .spatial import ArrayScene, parse_geometry

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

_USAGE_ERRORS = (InvalidConfig, InvalidTau, InvalidOrder, DegenerateInput)
_NUMERICAL_ERRORS = (NotPositiveDefinite, NoConvergence, SingularMatrix)


@dataclass
class RunConfig:
    mode: str = "mwf_inst"
    tau: float = 1.0
    geometry: str = "linear:5:0.08"
    doa_deg: float = 0.0
    sample_rate: float = 16000.0
    frame_len: int = 512
    speed_of_sound: float = 343.0
    snr_db: float = 5.0
    duration: float = 10.0
    seed: int = 0
    metrics: bool = False
    input: str = ""
    output: str = ""
    reference: str = ""
    noise_shaping: str = ""
    gain_floor_db: float = math.nan  # nan means off
    hybrid_diffuse: bool = False

    def scene(self) -> ArrayScene:
        return ArrayScene(
            mic_positions=parse_geometry(self.geometry),
            source_doa_deg=self.doa_deg,
            speed_of_sound=self.speed_of_sound,
            sample_rate=self.sample_rate,
            frame_len=self.frame_len,
        )


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELD_TYPES[name]
    if kind in (bool, "bool"):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind in (int, "int"):
        return int(raw)
    if kind in (float, "float"):
        return float(raw)
    return raw


def load_config(path: str | None, overrides: dict) -> RunConfig:
    cfg = RunConfig()
    if path:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise FormatError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise InvalidConfig(f"bad config {path}: {exc}") from exc
        for section in parser.sections():
            for key, raw in parser.items(section):
                if key not in _FIELD_TYPES:
                    raise InvalidConfig(f"unknown config key {key!r} in [{section}]")
                try:
                    setattr(cfg, key, _coerce(key, raw))
                except ValueError as exc:
                    raise InvalidConfig(f"bad value for {key!r}: {exc}") from exc
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def _load_input(cfg: RunConfig, scene: ArrayScene) -> np.ndarray:
    rate, samples = wavio.read_wav(cfg.input)
    if rate != scene.sample_rate:
        raise InvalidConfig(
            f"input sample rate {rate} Hz differs from configured {scene.sample_rate} Hz"
        )
    if samples.shape[1] != scene.num_mics:
        raise InvalidConfig(
            f"input has {samples.shape[1]} channels, scene expects {scene.num_mics}"
        )
    return samples


def cmd_enhance(cfg: RunConfig) -> int:
    if cfg.mode not in MODES:
        raise InvalidConfig(f"unknown mode {cfg.mode!r}, expected one of {MODES}")
    if not cfg.input or not cfg.output:
        raise InvalidConfig("enhance needs --input and --output")
    scene = cfg.scene()
    samples = _load_input(cfg, scene)
    floor = None if math.isnan(cfg.gain_floor_db) else cfg.gain_floor_db
    result = pipeline.enhance_all(samples, scene, cfg.tau,
                                  hybrid_diffuse=cfg.hybrid_diffuse,
                                  gain_floor_db=floor)
    out = result.outputs[cfg.mode]
    wavio.write_wav(cfg.output, scene.sample_rate, out)
    print(f"wrote {cfg.output} ({cfg.mode}, tau={cfg.tau:g} s, "
          f"{result.num_frames} frames x {result.num_bins} bins)")
    if cfg.metrics:
        if not cfg.reference:
            raise InvalidConfig("--metrics needs --reference (clean mic-1 image)")
        _, ref = wavio.read_wav(cfg.reference)
        n = min(ref.shape[0], out.shape[0])
        report = metrics.score(ref[:n, 0], out[:n], scene.sample_rate)
        print(report.format())
    return EXIT_OK


def cmd_simulate(cfg: RunConfig) -> int:
    if not cfg.output:
        raise InvalidConfig("simulate needs --output (mixture WAV path)")
    scene = cfg.scene()
    source = None
    if cfg.input:
        rate, data = wavio.read_wav(cfg.input)
        if rate != scene.sample_rate:
            raise InvalidConfig(
                f"source sample rate {rate} Hz differs from configured {scene.sample_rate} Hz"
            )
        source = data[:, 0]
    shaping = None
    if cfg.noise_shaping:
        rate, data = wavio.read_wav(cfg.noise_shaping)
        if rate != scene.sample_rate:
            raise InvalidConfig("noise-shaping WAV must match the scene sample rate")
        shaping = long_term_spectrum(data[:, 0], scene)
    spec = ScenarioSpec(scene=scene, duration=cfg.duration, snr_db=cfg.snr_db,
                        seed=cfg.seed, source=source, noise_shaping=shaping)
    scenario = simulate_scenario(spec)
    wavio.write_wav(cfg.output, scene.sample_rate, scenario.mixture)
    ref_path = cfg.reference or _default_reference_path(cfg.output)
    wavio.write_wav(ref_path, scene.sample_rate, scenario.reference)
    print(f"wrote {cfg.output} (mixture, {scene.num_mics} ch, snr={cfg.snr_db:g} dB, "
          f"seed={cfg.seed}) and {ref_path} (reference)")
    return EXIT_OK


def _default_reference_path(output: str) -> str:
    if output.lower().endswith(".wav"):
        return output[:-4] + "_ref.wav"
    return output + "_ref.wav"


def cmd_sweep(cfg: RunConfig, taus: list[float], modes: list[str],
              csv_path: str | None) -> int:
    for mode in modes:
        if mode not in MODES:
            raise InvalidConfig(f"unknown mode {mode!r}, expected one of {MODES}")
    if not taus:
        raise InvalidConfig("sweep needs at least one --tau value")
    scene = cfg.scene()
    if cfg.input:
        samples = _load_input(cfg, scene)
        if not cfg.reference:
            raise InvalidConfig("sweep over a recorded input needs --reference")
        _, ref = wavio.read_wav(cfg.reference)
        reference = ref[:, 0]
    else:
        scenario = simulate_scenario(ScenarioSpec(
            scene=scene, duration=cfg.duration, snr_db=cfg.snr_db, seed=cfg.seed))
        samples = scenario.mixture
        reference = scenario.reference

    rows = []
    for tau in taus:
        result = pipeline.enhance_all(samples, scene, tau,
                                      hybrid_diffuse=cfg.hybrid_diffuse)
        for mode in modes:
            out = result.outputs[mode]
            n = min(reference.shape[0], out.shape[0])
            report = metrics.score(reference[:n], out[:n], scene.sample_rate)
            rows.append((mode, tau, report.fw_seg_sir, report.cepstral_distance))

    header = f"{'mode':<12} {'tau_s':>8} {'fw_seg_sir_db':>14} {'cd_db':>8}"
    print(header)
    print("-" * len(header))
    for mode, tau, sir, cd in rows:
        print(f"{mode:<12} {tau:>8g} {sir:>14.4f} {cd:>8.4f}")
    csv_lines = ["mode,tau_s,fw_seg_sir_db,cd_db"]
    csv_lines += [f"{m},{t:g},{s:.6f},{c:.6f}" for m, t, s, c in rows]
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write("\n".join(csv_lines) + "\n")
        print(f"wrote {csv_path}")
    else:
        print()
        print("\n".join(csv_lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenpsd",
        description="Multichannel speech enhancement via eigenspace PSD tracking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="INI-style config file (key = value sections)")
        p.add_argument("--mode", choices=MODES)
        p.add_argument("--tau", type=float, help="averaging time constant in seconds")
        p.add_argument("--geometry", help="'linear:M:spacing_m' or 'x,y,z; x,y,z; ...'")
        p.add_argument("--doa-deg", type=float, dest="doa_deg",
                       help="source direction relative to broadside")
        p.add_argument("--snr-db", type=float, dest="snr_db")
        p.add_argument("--sample-rate", type=float, dest="sample_rate")
        p.add_argument("--frame-len", type=int, dest="frame_len")
        p.add_argument("--duration", type=float, help="seconds of synthesized scene")
        p.add_argument("--seed", type=int)
        p.add_argument("--metrics", action="store_const", const=True, default=None)
        p.add_argument("--input", help="input WAV path")
        p.add_argument("--output", help="output path")
        p.add_argument("--reference", help="clean reference WAV path")
        p.add_argument("--noise-shaping", dest="noise_shaping",
                       help="WAV whose long-term spectrum shapes the diffuse noise")
        p.add_argument("--gain-floor-db", type=float, dest="gain_floor_db")
        p.add_argument("--hybrid-diffuse", action="store_const", const=True,
                       default=None, dest="hybrid_diffuse",
                       help="use the smooth diffuse PSD inside the instantaneous estimate")

    p_enh = sub.add_parser("enhance", help="filter a multichannel WAV")
    add_common(p_enh)
    p_sim = sub.add_parser("simulate", help="render a synthetic mixture + reference")
    add_common(p_sim)
    p_swp = sub.add_parser("sweep", help="metric table over time constants and modes")
    add_common(p_swp)
    p_swp.add_argument("--taus", help="comma-separated list of time constants")
    p_swp.add_argument("--modes", help="comma-separated list of filter modes")
    p_swp.add_argument("--csv", help="write the machine-readable table here")
    return parser


_OVERRIDE_KEYS = tuple(_FIELD_TYPES)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS if hasattr(args, k)}
        cfg = load_config(args.config, overrides)
        if args.command == "enhance":
            return cmd_enhance(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        try:
            taus = [float(t) for t in args.taus.split(",")] if args.taus else [cfg.tau]
        except ValueError as exc:
            raise InvalidConfig(f"bad --taus list: {exc}") from exc
        modes = [m.strip() for m in args.modes.split(",")] if args.modes else [cfg.mode]
        return cmd_sweep(cfg, taus, modes, args.csv)
    except _NUMERICAL_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EigenpsdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
