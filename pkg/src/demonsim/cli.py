"""Command-line interface: sweep, tomography and verify subcommands.

`sweep` runs the demon over a temperature/mismatch grid and writes one CSV
row per grid point (plus report figures), `tomography` exports process
matrices and the distance to the mismatch-free run, `verify` replays the
package's invariant suites and exits nonzero when any of them breaks.

An optional config file holds flat key=value lines whose keys are the flag
names without the leading dashes; explicit flags win over file values.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from . import units
from .channels import (
    channel_to_chi,
    chi_to_text,
    process_distance,
)
from .protocol import (
    ProtocolConfig,
    demon_condition,
    measurement_channel,
    protocol_channel,
    run_protocol,
    tradeoff_report,
)

FLUCT_WRITE_TOL = 1e-9

# Desk-scale defaults: the nine pseudo-temperatures of the reference dataset
# and five mismatch angles from aligned to fully scrambled control.
DEFAULT_KT_PEV = (2.6, 3.4, 4.2, 4.9, 5.9, 7.0, 8.6, 10.7, 13.8)
DEFAULT_PHI = (0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2)

CSV_HEADER = (
    "kT_peV,phi_rad,p01,sigma_nats,i_gain_nats,avg_kl_nats,"
    "delta_s_f_nats,mutual_info_nats,fluct_avg,demon"
)


@dataclass(frozen=True)
class SweepGrid:
    """Grid of sweep points; kt values are peV unless beta_mode is set."""

    kt_values: tuple
    phi_values: tuple
    omega0_khz: float = 2.0
    omega1_khz: float = 3.0
    noise_q: float = 0.0
    beta_mode: bool = False


@dataclass(frozen=True)
class SweepRow:
    kt_pev: float
    phi_rad: float
    p01: float
    sigma_nats: float
    i_gain_nats: float
    avg_kl_nats: float
    delta_s_f_nats: float
    mutual_info_nats: float
    fluct_avg: float
    demon: int


def _row_to_csv(row: SweepRow) -> str:
    if abs(row.fluct_avg - 1.0) > FLUCT_WRITE_TOL:
        raise ValueError(
            f"refusing to write row with broken fluctuation identity: "
            f"<exp(...)> = {row.fluct_avg!r} at kT={row.kt_pev}, phi={row.phi_rad}"
        )
    values = [getattr(row, f.name) for f in fields(SweepRow)]
    return ",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in values)


def sweep_rows(grid: SweepGrid):
    """Evaluate the grid in deterministic order: temperature outer, phi inner."""
    rows = []
    for kt in grid.kt_values:
        for phi in grid.phi_values:
            if grid.beta_mode:
                cfg = ProtocolConfig(
                    beta_internal=float(kt),
                    phi=float(phi),
                    omega0_khz=grid.omega0_khz,
                    omega1_khz=grid.omega1_khz,
                    noise_q=grid.noise_q,
                )
                kt_pev = units.kt_pev_from_beta_internal(cfg.beta, grid.omega1_khz)
            else:
                cfg = ProtocolConfig(
                    kt_pev=float(kt),
                    phi=float(phi),
                    omega0_khz=grid.omega0_khz,
                    omega1_khz=grid.omega1_khz,
                    noise_q=grid.noise_q,
                )
                kt_pev = float(kt)
            report = tradeoff_report(run_protocol(cfg))
            rows.append(
                SweepRow(
                    kt_pev=kt_pev,
                    phi_rad=float(phi),
                    p01=cfg.mismatch_probability,
                    sigma_nats=report.sigma,
                    i_gain_nats=report.i_gain,
                    avg_kl_nats=report.avg_kl,
                    delta_s_f_nats=report.delta_s_f,
                    mutual_info_nats=report.mutual_info,
                    fluct_avg=report.fluct_avg,
                    demon=int(demon_condition(report)),
                )
            )
    return rows


def cmd_sweep(grid: SweepGrid, out_path: str, plots: bool = True):
    rows = sweep_rows(grid)
    parent = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(parent, exist_ok=True)
    with open(out_path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(_row_to_csv(row) + "\n")
    written = [out_path]
    if plots:
        from .figures import render_sweep_figures

        written.extend(render_sweep_figures(rows, out_path))
    return rows, written


def cmd_tomography(phi: float, noise_q: float, out_dir: str, plots: bool = True):
    """Write process matrices and the distance to the mismatch-free map."""
    os.makedirs(out_dir, exist_ok=True)
    kt_ref = DEFAULT_KT_PEV[0]
    ideal_cfg = ProtocolConfig(kt_pev=kt_ref, phi=phi)
    reference_cfg = ProtocolConfig(kt_pev=kt_ref, phi=0.0)

    chi_meas = channel_to_chi(measurement_channel(ProtocolConfig(kt_pev=kt_ref, phi=0.0)))
    chi_proto = channel_to_chi(protocol_channel(ideal_cfg))
    chi_reference = channel_to_chi(protocol_channel(reference_cfg))

    written = {}

    def _write(name, text):
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write(text)
        written[name] = path
        return path

    _write("chi_measurement.txt", chi_to_text(chi_meas))
    _write("chi_protocol.txt", chi_to_text(chi_proto))

    requested_chi = chi_proto
    if noise_q > 0.0:
        noisy_meas = channel_to_chi(
            measurement_channel(ProtocolConfig(kt_pev=kt_ref, phi=0.0, noise_q=noise_q))
        )
        noisy_proto = channel_to_chi(
            protocol_channel(ProtocolConfig(kt_pev=kt_ref, phi=phi, noise_q=noise_q))
        )
        _write("chi_measurement_noisy.txt", chi_to_text(noisy_meas))
        _write("chi_protocol_noisy.txt", chi_to_text(noisy_proto))
        requested_chi = noisy_proto

    delta = process_distance(requested_chi, chi_reference)
    delta_lines = [f"phi={phi:.17g}", f"delta={delta:.17g}"]
    if noise_q > 0.0:
        delta_lines.append(f"delta_ideal={process_distance(chi_proto, chi_reference):.17g}")
    _write("delta.txt", "\n".join(delta_lines) + "\n")

    if plots:
        from .figures import render_chi_figure, render_distance_figure

        curve_phis = np.linspace(0.0, np.pi / 2, 9)
        curve = [
            process_distance(
                channel_to_chi(protocol_channel(ProtocolConfig(kt_pev=kt_ref, phi=float(p)))),
                chi_reference,
            )
            for p in curve_phis
        ]
        written["chi_measurement.png"] = render_chi_figure(
            chi_meas, "Measurement process", os.path.join(out_dir, "chi_measurement.png")
        )
        written["process_distance.png"] = render_distance_figure(
            curve_phis, curve, phi, delta, os.path.join(out_dir, "process_distance.png")
        )
    return delta, written


def cmd_verify(seed: int = 0, inject_nonunital: bool = False) -> int:
    """Replay the invariant suites; returns a process exit code."""
    from .verify import run_verification

    return run_verification(seed=seed, inject_nonunital=inject_nonunital)


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw_line in fh:
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line is not key=value: {line!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


_CONVERTERS = {
    "kt_min": float,
    "kt_max": float,
    "kt_steps": int,
    "phi_min": float,
    "phi_max": float,
    "phi_steps": int,
    "omega0_khz": float,
    "omega1_khz": float,
    "noise_q": float,
    "out": str,
    "phi": float,
    "out_dir": str,
    "seed": int,
    "beta_internal": lambda s: s.lower() in ("1", "true", "yes"),
    "no_plots": lambda s: s.lower() in ("1", "true", "yes"),
}


def _apply_config(args: argparse.Namespace, argv) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    for key, raw in _load_config(args.config).items():
        dest = key.replace("-", "_")
        if dest not in _CONVERTERS or not hasattr(args, dest):
            raise SystemExit(f"unknown config key for this command: {key}")
        flag = f"--{dest.replace('_', '-')}"
        if any(a == flag or a.startswith(flag + "=") for a in argv):
            continue  # explicit flag wins over the file
        setattr(args, dest, _CONVERTERS[dest](raw))
    return args


def _grid_axis(name, vmin, vmax, steps, defaults):
    given = [v is not None for v in (vmin, vmax, steps)]
    if not any(given):
        return tuple(defaults)
    if not all(given):
        raise SystemExit(f"give all of --{name}-min/--{name}-max/--{name}-steps or none")
    if steps < 1:
        raise SystemExit(f"--{name}-steps must be >= 1")
    if steps == 1:
        return (float(vmin),)
    return tuple(np.linspace(float(vmin), float(vmax), int(steps)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demonsim",
        description="Measurement-feedback demon simulator for a spin-1/2 system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a temperature x mismatch grid and write CSV")
    sweep.add_argument("--kt-min", type=float, default=None)
    sweep.add_argument("--kt-max", type=float, default=None)
    sweep.add_argument("--kt-steps", type=int, default=None)
    sweep.add_argument("--phi-min", type=float, default=None)
    sweep.add_argument("--phi-max", type=float, default=None)
    sweep.add_argument("--phi-steps", type=int, default=None)
    sweep.add_argument("--omega0-khz", type=float, default=2.0)
    sweep.add_argument("--omega1-khz", type=float, default=3.0)
    sweep.add_argument("--noise-q", type=float, default=0.0)
    sweep.add_argument("--beta-internal", action="store_true",
                       help="interpret the kt range as dimensionless beta*hbar*omega1")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    sweep.add_argument("--config", default=None, help="flat key=value config file")

    tomo = sub.add_parser("tomography", help="export process matrices and distances")
    tomo.add_argument("--phi", type=float, required=True, help="mismatch angle in radians")
    tomo.add_argument("--noise-q", type=float, default=0.0)
    tomo.add_argument("--out-dir", required=True)
    tomo.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    tomo.add_argument("--config", default=None, help="flat key=value config file")

    verify = sub.add_parser("verify", help="replay the package invariant suites")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--inject-nonunital", action="store_true", help=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args = _apply_config(args, argv)

    if args.command == "sweep":
        kt_values = _grid_axis("kt", args.kt_min, args.kt_max, args.kt_steps, DEFAULT_KT_PEV)
        phi_values = _grid_axis("phi", args.phi_min, args.phi_max, args.phi_steps, DEFAULT_PHI)
        if args.beta_internal and args.kt_min is None:
            # no explicit range: reuse the default temperatures, converted
            kt_values = tuple(
                units.beta_internal_from_kt(kt, args.omega1_khz) for kt in DEFAULT_KT_PEV
            )
        grid = SweepGrid(
            kt_values=kt_values,
            phi_values=phi_values,
            omega0_khz=args.omega0_khz,
            omega1_khz=args.omega1_khz,
            noise_q=args.noise_q,
            beta_mode=args.beta_internal,
        )
        start = time.perf_counter()
        rows, written = cmd_sweep(grid, args.out, plots=not args.no_plots)
        elapsed = time.perf_counter() - start
        print(f"wrote {len(rows)} rows in {elapsed:.2f} s")
        for path in written:
            print(f"  {path}")
        return 0

    if args.command == "tomography":
        delta, written = cmd_tomography(
            args.phi, args.noise_q, args.out_dir, plots=not args.no_plots
        )
        print(f"process distance to the mismatch-free map: {delta:.6g}")
        for path in written.values():
            print(f"  {path}")
        return 0

    if args.command == "verify":
        return cmd_verify(seed=args.seed, inject_nonunital=args.inject_nonunital)

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
