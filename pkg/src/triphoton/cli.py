"""Command-line front end: config parsing, sweep/validate/reduce subcommands.

Configuration format: flat ``key = value`` lines with dotted section
prefixes, ``#`` comments, case-sensitive keys. Frequencies are declared
as central wavelengths in nm, spectral widths in rad/s, lengths in
meters, phases in radians; everything is converted to internal units at
parse time.

Sections::

    source.type = cpdc | topdc
    source.lambda_a_nm / lambda_b_nm / lambda_c_nm
    source.pump.shape = gaussian | lorentzian | sinc_squared | tabulated
    source.pump.sigma_rad_s          (gaussian)
    source.pump.gamma_rad_s          (lorentzian)
    source.pump.width_rad_s          (sinc_squared)
    source.pump.file                 (tabulated: two-column detuning/value)
    source.pump.center_offset_rad_s  (optional, default 0)
    source.pm1.* / source.pm2.*      (same schema; separable joint density)
    geometry.length_a1_m ... length_p2_m, phase_a1_rad ... phase_p2_rad
        or geometry.delta_l_m / delta_l_prime_m / delta_l_dprime_m / delta_phi_rad
    geometry.topdc_choice = 1 | 2 | 3
    amplitudes.k1 / k2 / c_mag_sq    (optional; default equal, baseline 1)
    sweep.variable = delta_phi | delta_l | delta_l_prime | delta_l_dprime | diagonal
    sweep.start / sweep.stop / sweep.n_points
    validate.ratios = 1,0.3,0.1      (comma separated)
    validate.coupling_slope / n_pump / n_prime / n_dprime
    validate.support_multiplier / delay_span_widths / n_delays
    output.csv_precision             (significant digits, default 12)
    output.directory                 (overridden by --out)

``sweep`` writes sweep.csv and metrics.csv, ``validate`` writes
validate.csv, ``reduce`` prints the reduced geometry in config syntax so
it can be pasted back as a direct-reduced geometry. Every run writes
run_meta.json (config hash, tool version, wall time). Runs are
deterministic: identical configs give byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .coherence import DelayTriple
from .errors import (InsufficientSamplingError, IntegrationError,
                     NormalizationError, ParseError, ValidationError)
from .experiments import (SweepSpec, SweepTable, SweepVariable,
                          extract_dip_profile, extract_fringe_metrics, run_sweep)
from .oracle import LinearShift, OracleConfig, factorization_error_sweep
from .pathgeom import (CentralFrequencies, PathConfiguration, ReducedParameters,
                       SourceKind, carrier_wavenumbers, reduce_cpdc, reduce_topdc)
from .rates import AlternativeAmplitudes, SourceModel
from .spectra import Gaussian, Lorentzian, Separable, SincSquared, Tabulated

_LENGTH_KEYS = [f"length_{t}_m" for t in
                ("a1", "b1", "c1", "p1", "a2", "b2", "c2", "p2")]
_PHASE_KEYS = [f"phase_{t}_rad" for t in
               ("a1", "b1", "c1", "p1", "a2", "b2", "c2", "p2")]
_DIRECT_KEYS = ["delta_l_m", "delta_l_prime_m", "delta_l_dprime_m", "delta_phi_rad"]

_SWEEP_VARIABLES = {
    "delta_phi": SweepVariable.DELTA_PHI,
    "delta_l": SweepVariable.DELTA_L,
    "delta_l_prime": SweepVariable.DELTA_L_PRIME,
    "delta_l_dprime": SweepVariable.DELTA_L_DPRIME,
    "diagonal": SweepVariable.DIAGONAL,
}


@dataclass(frozen=True)
class ValidateSpec:
    """Oracle comparison settings for the ``validate`` subcommand."""

    ratios: tuple[float, ...] = (1.0, 0.3, 0.1, 0.03, 0.01)
    coupling_slope: float = 0.0
    n_pump: int = 65
    n_prime: int = 65
    n_dprime: int = 65
    support_multiplier: float = 8.0
    delay_span_widths: float = 1.5
    n_delays: int = 3


@dataclass(frozen=True)
class RunConfig:
    """Fully validated configuration in internal units."""

    source: SourceModel
    geometry: ReducedParameters
    path_config: PathConfiguration | None
    amps: AlternativeAmplitudes
    sweep: SweepSpec | None
    validate: ValidateSpec
    csv_precision: int
    out_dir: str | None
    config_sha256: str


class _KeyStore:
    """Parsed key/value lines with consumption tracking."""

    def __init__(self, text: str):
        self.entries: dict[str, tuple[str, int]] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"expected 'key = value', got {raw.strip()!r}",
                                 line_no=line_no)
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ParseError("empty key", line_no=line_no)
            if key in self.entries:
                raise ParseError(f"duplicate key {key!r}", line_no=line_no)
            self.entries[key] = (value, line_no)
        self._unused = set(self.entries)

    def has(self, key: str) -> bool:
        return key in self.entries

    def get(self, key: str, default=None, required: bool = False) -> str | None:
        if key not in self.entries:
            if required:
                raise ValidationError(f"missing required key {key!r}")
            return default
        self._unused.discard(key)
        return self.entries[key][0]

    def get_float(self, key: str, default=None, required: bool = False):
        raw = self.get(key, required=required)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ParseError(f"{key}: {raw!r} is not a number",
                             line_no=self.entries[key][1]) from None

    def get_int(self, key: str, default=None, required: bool = False):
        raw = self.get(key, required=required)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ParseError(f"{key}: {raw!r} is not an integer",
                             line_no=self.entries[key][1]) from None

    def finish(self) -> None:
        if self._unused:
            key = sorted(self._unused)[0]
            raise ValidationError(f"unknown key {key!r}")


def _build_density(store: _KeyStore, prefix: str, base_dir: Path):
    shape = store.get(f"{prefix}.shape", required=True).lower()
    offset = store.get_float(f"{prefix}.center_offset_rad_s", default=0.0)
    if shape == "gaussian":
        width = store.get_float(f"{prefix}.sigma_rad_s", required=True)
        _require_positive(f"{prefix}.sigma_rad_s", width)
        return Gaussian(sigma=width, center_offset=offset)
    if shape == "lorentzian":
        width = store.get_float(f"{prefix}.gamma_rad_s", required=True)
        _require_positive(f"{prefix}.gamma_rad_s", width)
        return Lorentzian(gamma=width, center_offset=offset)
    if shape == "sinc_squared":
        width = store.get_float(f"{prefix}.width_rad_s", required=True)
        _require_positive(f"{prefix}.width_rad_s", width)
        return SincSquared(width=width, center_offset=offset)
    if shape == "tabulated":
        rel = store.get(f"{prefix}.file", required=True)
        path = Path(rel)
        if not path.is_absolute():
            path = base_dir / path
        if not path.exists():
            raise ValidationError(f"{prefix}.file: no such file: {path}")
        try:
            return Tabulated.from_file(path).normalize()
        except (ValueError, NormalizationError) as e:
            raise ValidationError(f"{prefix}.file: {e}") from e
    raise ValidationError(f"{prefix}.shape: unknown shape {shape!r}")


def _require_positive(key: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValidationError(f"{key} must be positive, got {value!r}")


def _build_geometry(store: _KeyStore, kind: SourceKind):
    eight = [k for k in _LENGTH_KEYS + _PHASE_KEYS if store.has(f"geometry.{k}")]
    direct = [k for k in _DIRECT_KEYS if store.has(f"geometry.{k}")]
    choice = store.get_int("geometry.topdc_choice", default=1)
    if choice not in (1, 2, 3):
        raise ValidationError("geometry.topdc_choice must be 1, 2 or 3")
    if eight and direct:
        raise ValidationError(
            "geometry overspecified: give either the eight-length form or the "
            "direct reduced form, not both")
    if not eight and not direct:
        raise ValidationError(
            "geometry underspecified: give eight lengths/phases or the direct "
            "reduced parameters")
    if direct:
        reduced = ReducedParameters(
            delta_l=store.get_float("geometry.delta_l_m", default=0.0),
            delta_l_prime=store.get_float("geometry.delta_l_prime_m", default=0.0),
            delta_l_dprime=store.get_float("geometry.delta_l_dprime_m", default=0.0),
            delta_phi=store.get_float("geometry.delta_phi_rad", default=0.0),
            topdc_choice=choice if kind is SourceKind.TOPDC else 1,
        )
        return reduced, None
    lengths = {k: store.get_float(f"geometry.{k}", default=0.0) for k in _LENGTH_KEYS}
    phases = {k: store.get_float(f"geometry.{k}", default=0.0) for k in _PHASE_KEYS}
    try:
        pc = PathConfiguration(
            **{f"l_{k.split('_')[1]}": v for k, v in lengths.items()},
            **{f"phi_{k.split('_')[1]}": v for k, v in phases.items()},
        )
    except ValueError as e:
        raise ValidationError(f"geometry: {e}") from e
    if kind is SourceKind.TOPDC:
        reduced = reduce_topdc(pc, choice)
    else:
        reduced = reduce_cpdc(pc)
    return reduced, pc


def parse_config(text: str, base_dir: Path | str = ".") -> RunConfig:
    """Parse and validate configuration text into internal units."""
    base_dir = Path(base_dir)
    store = _KeyStore(text)

    type_raw = store.get("source.type", required=True).lower()
    try:
        kind = SourceKind(type_raw)
    except ValueError:
        raise ValidationError(f"source.type must be cpdc or topdc, got {type_raw!r}") \
            from None

    wavelengths = {}
    for key in ("source.lambda_a_nm", "source.lambda_b_nm", "source.lambda_c_nm"):
        v = store.get_float(key, required=True)
        _require_positive(key, v)
        wavelengths[key] = v
    centrals = CentralFrequencies.from_wavelengths_nm(
        wavelengths["source.lambda_a_nm"], wavelengths["source.lambda_b_nm"],
        wavelengths["source.lambda_c_nm"])

    pump = _build_density(store, "source.pump", base_dir)
    pm = Separable(_build_density(store, "source.pm1", base_dir),
                   _build_density(store, "source.pm2", base_dir))
    source = SourceModel(kind, pump, pm, centrals)

    geometry, path_config = _build_geometry(store, kind)

    k1 = store.get_float("amplitudes.k1", default=math.sqrt(0.5))
    k2 = store.get_float("amplitudes.k2", default=math.sqrt(0.5))
    c_sq = store.get_float("amplitudes.c_mag_sq", default=1.0)
    try:
        amps = AlternativeAmplitudes(k1_mag=k1, k2_mag=k2, c_mag_sq=c_sq)
    except ValueError as e:
        raise ValidationError(f"amplitudes: {e}") from e

    sweep = None
    if store.has("sweep.variable"):
        var_raw = store.get("sweep.variable").lower()
        if var_raw not in _SWEEP_VARIABLES:
            raise ValidationError(f"sweep.variable: unknown variable {var_raw!r}")
        start = store.get_float("sweep.start", required=True)
        stop = store.get_float("sweep.stop", required=True)
        n = store.get_int("sweep.n_points", required=True)
        if n < 3:
            raise ValidationError("sweep.n_points must be at least 3")
        if not start < stop:
            raise ValidationError("sweep.start must be below sweep.stop")
        sweep = SweepSpec(_SWEEP_VARIABLES[var_raw], start, stop, n,
                          geometry, source, amps)

    ratios_raw = store.get("validate.ratios")
    if ratios_raw is not None:
        try:
            ratios = tuple(float(t) for t in ratios_raw.split(",") if t.strip())
        except ValueError:
            raise ValidationError(f"validate.ratios: bad list {ratios_raw!r}") from None
        if not ratios or any(r <= 0 for r in ratios):
            raise ValidationError("validate.ratios must be positive numbers")
    else:
        ratios = ValidateSpec().ratios
    defaults = ValidateSpec()
    validate = ValidateSpec(
        ratios=ratios,
        coupling_slope=store.get_float("validate.coupling_slope",
                                       default=defaults.coupling_slope),
        n_pump=store.get_int("validate.n_pump", default=defaults.n_pump),
        n_prime=store.get_int("validate.n_prime", default=defaults.n_prime),
        n_dprime=store.get_int("validate.n_dprime", default=defaults.n_dprime),
        support_multiplier=store.get_float("validate.support_multiplier",
                                           default=defaults.support_multiplier),
        delay_span_widths=store.get_float("validate.delay_span_widths",
                                          default=defaults.delay_span_widths),
        n_delays=store.get_int("validate.n_delays", default=defaults.n_delays),
    )

    precision = store.get_int("output.csv_precision", default=12)
    if not 1 <= precision <= 17:
        raise ValidationError("output.csv_precision must be between 1 and 17")
    out_dir = store.get("output.directory")

    store.finish()
    return RunConfig(
        source=source, geometry=geometry, path_config=path_config, amps=amps,
        sweep=sweep, validate=validate, csv_precision=precision, out_dir=out_dir,
        config_sha256=hashlib.sha256(text.encode("utf-8")).hexdigest(),
    )


def _fmt(value: float, precision: int) -> str:
    return f"{value:.{precision}g}"


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _sweep_metrics_rows(table: SweepTable, precision: int) -> list[list[str]]:
    fringe_like = table.variable in (SweepVariable.DELTA_PHI, SweepVariable.DELTA_L)
    try:
        if fringe_like:
            m = extract_fringe_metrics(table)
            return [["status", "ok"],
                    ["visibility", _fmt(m.visibility, precision)],
                    ["period", _fmt(m.period, precision)],
                    ["envelope_halfwidth", _fmt(m.envelope_halfwidth, precision)]]
        p = extract_dip_profile(table)
        return [["status", "ok"],
                ["extremum_kind", p.extremum_kind.value],
                ["depth", _fmt(p.depth, precision)],
                ["fwhm", _fmt(p.fwhm, precision)],
                ["not_monotone", str(p.not_monotone).lower()]]
    except (InsufficientSamplingError, ValueError) as e:
        return [["status", "extraction_failed"], ["reason", str(e)]]


def run_sweep_cmd(config: RunConfig, out_dir: Path) -> list[Path]:
    if config.sweep is None:
        raise ValidationError("sweep subcommand requires a sweep section")
    table = run_sweep(config.sweep)
    prec = config.csv_precision
    name = table.variable.value
    rows = [[name, _fmt(v, prec), _fmt(r.rate, prec), _fmt(r.gamma_mag, prec),
             _fmt(r.gamma_prime_mag, prec), _fmt(r.cosine_argument, prec)]
            for v, r in zip(table.values, table.results)]
    sweep_path = out_dir / "sweep.csv"
    _write_csv(sweep_path, ["parameter_name", "parameter_value", "rate",
                            "gamma_mag", "gamma_prime_mag", "cosine_argument"], rows)
    metrics_path = out_dir / "metrics.csv"
    _write_csv(metrics_path, ["field", "value"], _sweep_metrics_rows(table, prec))
    return [sweep_path, metrics_path]


def _validate_delays(config: RunConfig) -> list[DelayTriple]:
    src = config.source
    pm = src.phase_matching
    tau_p = 1.0 / src.pump.characteristic_width
    tau_1 = 1.0 / pm.d1.characteristic_width
    tau_2 = 1.0 / pm.d2.characteristic_width
    spec = config.validate
    fractions = np.linspace(0.0, spec.delay_span_widths, spec.n_delays)
    return [DelayTriple(f * tau_p, f * tau_1, f * tau_2) for f in fractions]


def run_validate_cmd(config: RunConfig, out_dir: Path) -> list[Path]:
    spec = config.validate
    coupling = LinearShift(spec.coupling_slope) if spec.coupling_slope != 0.0 else None
    cfg = OracleConfig(n_pump=spec.n_pump, n_prime=spec.n_prime,
                       n_dprime=spec.n_dprime,
                       support_multiplier=spec.support_multiplier,
                       pump_coupling=coupling)
    rows = factorization_error_sweep(config.source, _validate_delays(config),
                                     list(spec.ratios), cfg)
    prec = config.csv_precision
    out_rows = [[_fmt(r.ratio, prec), _fmt(r.delays.delta_tau, prec),
                 _fmt(r.delays.delta_tau_prime, prec),
                 _fmt(r.delays.delta_tau_dprime, prec),
                 _fmt(r.factorized, prec), _fmt(r.oracle, prec),
                 _fmt(r.rel_error, prec)] for r in rows]
    path = out_dir / "validate.csv"
    _write_csv(path, ["ratio", "delta_tau", "delta_tau_prime", "delta_tau_dprime",
                      "factorized", "oracle", "rel_error"], out_rows)
    return [path]


def _reduce_block(reduced: ReducedParameters, kind: SourceKind,
                  centrals: CentralFrequencies) -> list[str]:
    lines = [
        f"geometry.delta_l_m = {reduced.delta_l!r}",
        f"geometry.delta_l_prime_m = {reduced.delta_l_prime!r}",
        f"geometry.delta_l_dprime_m = {reduced.delta_l_dprime!r}",
        f"geometry.delta_phi_rad = {reduced.delta_phi!r}",
    ]
    if kind is SourceKind.TOPDC:
        lines.append(f"geometry.topdc_choice = {reduced.topdc_choice}")
    kp, k1, k2 = carrier_wavenumbers(centrals, kind, reduced.topdc_choice)
    lines.append(f"# carriers rad/m: k_p0 = {kp!r}, k0_prime = {k1!r}, "
                 f"k0_dprime = {k2!r}")
    return lines


def run_reduce_cmd(config: RunConfig, out_dir: Path) -> list[Path]:
    kind = config.source.kind
    centrals = config.source.centrals
    lines = [f"# reduced geometry (source.type = {kind.value})"]
    if config.path_config is not None and kind is SourceKind.TOPDC:
        for choice in (1, 2, 3):
            lines.append(f"# choice {choice}")
            lines.extend(_reduce_block(reduce_topdc(config.path_config, choice),
                                       kind, centrals))
    else:
        lines.extend(_reduce_block(config.geometry, kind, centrals))
    print("\n".join(lines))
    return []


def run(subcommand: str, config: RunConfig, out_dir: Path) -> list[Path]:
    """Dispatch a subcommand; returns the files written (besides run_meta)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    if subcommand == "sweep":
        outputs = run_sweep_cmd(config, out_dir)
    elif subcommand == "validate":
        outputs = run_validate_cmd(config, out_dir)
    elif subcommand == "reduce":
        outputs = run_reduce_cmd(config, out_dir)
    else:
        raise ValidationError(f"unknown subcommand {subcommand!r}")
    meta = {
        "subcommand": subcommand,
        "config_sha256": config.config_sha256,
        "tool_version": __version__,
        "wall_time_s": time.perf_counter() - started,
        "outputs": [p.name for p in outputs],
    }
    (out_dir / "run_meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return outputs


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triphoton",
        description="Temporal three-photon interference simulator")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, text in (("sweep", "run a parameter sweep and extract metrics"),
                       ("validate", "compare the factorized engine to the 3D oracle"),
                       ("reduce", "print the reduced length parameters")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="configuration file path")
        p.add_argument("--out", default=None,
                       help="output directory (default: output.directory from "
                            "the config, else ./triphoton_out)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (current implementation is serial)")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; no randomness is used")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: ValidationError: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as e:
        print(f"error: ConfigFileError: {e}", file=sys.stderr)
        return 1
    try:
        config = parse_config(text, base_dir=Path(args.config).resolve().parent)
        out_dir = Path(args.out or config.out_dir or "triphoton_out")
        run(args.subcommand, config, out_dir)
    except (ParseError, ValidationError, IntegrationError,
            InsufficientSamplingError, NormalizationError) as e:
        message = " ".join(str(e).split())
        print(f"error: {type(e).__name__}: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
