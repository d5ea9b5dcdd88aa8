"""Command-line front end and bit-stable data export.

Subcommands: wavefield, xsection, phaseshifts, asympt-compare, sweep.
All CSV output uses '.' decimals, ',' separators, LF line endings, a
mandatory header row, and fixed 17-significant-digit float formatting, so
identical inputs give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ScatteringError
from .partialwave import (
    PhaseShiftSet,
    ScatterConfig,
    evaluate_grid,
    phase_shifts_from_json,
    phase_shifts_to_json,
)
from .phasesolve import potential_from_json, solve_potential_shifts
from .specfun import SeriesControl
from .xsection import (
    dsigma_full,
    dsigma_leading,
    f_theta_asymptotic,
    one_d_summary,
    sigma_total_asymptotic,
    sigma_total_mode_terms,
)

DEFAULT_RTOL = 1e-12
DEFAULT_SOLVE_LMAX = 8

WAVEFIELD_HEADER = "r,theta,re_psi,im_psi,re_psi_in,im_psi_in,re_psi_sc,im_psi_sc"
XSECTION_HEADER = "r,theta,dsigma,jr,jtheta,gamma"
ASYMPT_HEADER = "r,theta,dsigma,f2_asympt,ratio"


def _fmt(x: float) -> str:
    # fixed 17-significant-digit formatting; never shortest-round-trip
    return format(float(x), ".17g")


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _resolve_rtol(args) -> float:
    if getattr(args, "rtol", None) is not None:
        return args.rtol
    env = os.environ.get("SCATTERKIT_RTOL")
    if env:
        return float(env)
    return DEFAULT_RTOL


@dataclass(frozen=True)
class SweepSpec:
    """Batch description: dimensions, wavenumber, grids, shift source, outputs."""

    n_list: tuple[int, ...]
    k: float
    r_min: float
    r_max: float
    r_count: int
    r_scale: str
    theta_count: int
    shifts_source: dict
    out_dir: str | None

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        raw = json.loads(text)
        try:
            rg = raw["r_grid"]
            tg = raw["theta_grid"]
            spec = cls(
                n_list=tuple(int(n) for n in raw["n_list"]),
                k=float(raw["k"]),
                r_min=float(rg["min"]),
                r_max=float(rg["max"]),
                r_count=int(rg["count"]),
                r_scale=str(rg.get("scale", "linear")),
                theta_count=int(tg["count"]),
                shifts_source=dict(raw["shifts_source"]),
                out_dir=raw.get("outputs", {}).get("dir"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed sweep spec: {exc}") from exc
        spec.validate()
        return spec

    def validate(self) -> None:
        if not self.n_list:
            raise DomainError("n_list must be nonempty")
        if self.r_count < 1 or self.theta_count < 1:
            raise DomainError("grids must be nonempty")
        if not self.r_min > 0:
            raise DomainError("r_min must be > 0")
        if self.r_scale not in ("linear", "log"):
            raise DomainError(f"unknown r scale {self.r_scale!r}")


def _r_grid(r_min: float, r_max: float, count: int, scale: str) -> np.ndarray:
    if not r_min > 0:
        raise DomainError("r_min must be > 0")
    if count < 1:
        raise DomainError("r grid must be nonempty")
    if count == 1:
        return np.array([r_min])
    if scale == "log":
        return np.geomspace(r_min, r_max, count)
    return np.linspace(r_min, r_max, count)


def _theta_grid(n: int, count: int, interior: bool) -> np.ndarray:
    if n == 1:
        return np.array([0.0, math.pi])
    if count < 1:
        raise DomainError("theta grid must be nonempty")
    if interior:
        # midpoint rule keeps away from the axis where the tilt is undefined
        return (np.arange(count) + 0.5) * math.pi / count
    return np.linspace(0.0, math.pi, count)


def _load_shift_source(args, rtol: float) -> tuple[ScatterConfig, PhaseShiftSet]:
    """Resolve --shifts / --delta / --potential into a config and shift set."""
    series = SeriesControl(rel_tol=rtol)
    n, k = args.n, args.k
    if args.shifts is not None:
        file_n, file_k, shifts = phase_shifts_from_json(Path(args.shifts).read_text())
        n = n if n is not None else file_n
        k = k if k is not None else file_k
    elif args.delta is not None:
        if n is None or k is None:
            raise DomainError("--delta needs explicit --n and --k")
        shifts = PhaseShiftSet.from_deltas(
            float(tok) for tok in args.delta.split(",") if tok.strip()
        )
    elif args.potential is not None:
        if n is None or k is None:
            raise DomainError("--potential needs explicit --n and --k")
        # --lmax names the solve range here; field truncation stays on the
        # auto policy so the solved shifts can be evaluated at any radius
        config = ScatterConfig(n=n, k=k, series=series)
        lsolve = args.lmax if args.lmax is not None else DEFAULT_SOLVE_LMAX
        results = solve_potential_shifts(config, potential_from_json(
            Path(args.potential).read_text()), lsolve)
        shifts = PhaseShiftSet.from_deltas(m.delta for m in results)
        return config, shifts
    else:
        raise DomainError("one of --shifts, --delta, --potential is required")
    if n is None or k is None:
        raise DomainError("--n and --k are required (or implied by --shifts)")
    return ScatterConfig(n=n, k=k, lmax=args.lmax, series=series), shifts


def cmd_wavefield(args) -> int:
    config, shifts = _load_shift_source(args, _resolve_rtol(args))
    r = _r_grid(args.r_min, args.r_max, args.r_count, args.r_scale)
    theta = _theta_grid(config.n, args.theta_count, interior=False)
    psi, psi_in, psi_sc = evaluate_grid(config, shifts, r, theta, jobs=args.jobs)
    rows = []
    for i, rv in enumerate(r):  # r-major, theta-minor
        for j, tv in enumerate(theta):
            rows.append(
                (
                    rv, tv,
                    psi[i, j].real, psi[i, j].imag,
                    psi_in[i, j].real, psi_in[i, j].imag,
                    psi_sc[i, j].real, psi_sc[i, j].imag,
                )
            )
    out = Path(args.out) / "wavefield.csv"
    _write_csv(out, WAVEFIELD_HEADER, rows)
    print(out)
    return 0


def _xsection_rows(config, shifts, r_values, theta_values, with_asympt):
    rows = []
    for rv in r_values:
        for tv in theta_values:
            sample = dsigma_full(config, shifts, float(rv), float(tv), degenerate_ok=True)
            row = [rv, tv, sample.dsigma_domega, sample.jr_sc, sample.jtheta_sc, sample.gamma]
            if with_asympt:
                f2 = abs(f_theta_asymptotic(config, shifts, float(tv)).f) ** 2
                row.append(f2)
                row.append(sample.dsigma_domega / f2 if f2 > 0 else float("nan"))
            rows.append(row)
    return rows


def cmd_xsection(args) -> int:
    config, shifts = _load_shift_source(args, _resolve_rtol(args))
    out_dir = Path(args.out)
    if config.n == 1:
        summary = one_d_summary(shifts)
        out = out_dir / "summary.json"
        _write_text(out, json.dumps(summary, indent=2) + "\n")
        print(out)
        return 0
    r = _r_grid(args.r_min, args.r_max, args.r_count, args.r_scale)
    theta = _theta_grid(config.n, args.theta_count, interior=True)
    header = XSECTION_HEADER + (",f2_asympt,ratio" if args.asympt else "")
    rows = _xsection_rows(config, shifts, r, theta, args.asympt)
    _write_csv(out_dir / "xsection.csv", header, rows)
    summary = {
        "sigma_total": sigma_total_asymptotic(config, shifts),
        "per_l": list(sigma_total_mode_terms(config, shifts)),
    }
    _write_text(out_dir / "summary.json", json.dumps(summary, indent=2) + "\n")
    print(out_dir / "xsection.csv")
    print(out_dir / "summary.json")
    return 0


def cmd_phaseshifts(args) -> int:
    rtol = _resolve_rtol(args)
    if args.n is None or args.k is None:
        raise DomainError("--n and --k are required")
    config = ScatterConfig(n=args.n, k=args.k, series=SeriesControl(rel_tol=rtol))
    potential = potential_from_json(Path(args.potential).read_text())
    lsolve = args.lmax if args.lmax is not None else DEFAULT_SOLVE_LMAX
    results = solve_potential_shifts(config, potential, lsolve)
    shifts = PhaseShiftSet.from_deltas(m.delta for m in results)
    out = Path(args.out) / "shifts.json"
    _write_text(out, phase_shifts_to_json(args.n, args.k, shifts))
    print(out)
    return 0


def cmd_asympt_compare(args) -> int:
    config, shifts = _load_shift_source(args, _resolve_rtol(args))
    r = _r_grid(args.r_min, args.r_max, args.r_count, args.r_scale)
    theta = _theta_grid(config.n, args.theta_count, interior=True)
    rows = []
    for rv in r:
        for tv in theta:
            ds = dsigma_leading(config, shifts, float(rv), float(tv))
            f2 = abs(f_theta_asymptotic(config, shifts, float(tv)).f) ** 2
            rows.append((rv, tv, ds, f2, ds / f2 if f2 > 0 else float("nan")))
    out = Path(args.out) / "asympt_compare.csv"
    _write_csv(out, ASYMPT_HEADER, rows)
    print(out)
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec.from_json(Path(args.spec).read_text())
    # explicit --out wins; a directory named in the spec is the fallback
    out_dir = Path(spec.out_dir) if args.out == "." and spec.out_dir else Path(args.out)
    rtol = _resolve_rtol(args)
    series = SeriesControl(rel_tol=rtol)

    src = spec.shifts_source
    if "inline" in src:
        base_shifts = PhaseShiftSet.from_deltas(float(d) for d in src["inline"])
    elif "file" in src:
        _, _, base_shifts = phase_shifts_from_json(Path(src["file"]).read_text())
    elif "potential" in src:
        base_shifts = None  # solved per dimension below
    else:
        raise DomainError("shifts_source must name inline, file, or potential")

    r = _r_grid(spec.r_min, spec.r_max, spec.r_count, spec.r_scale)
    written = []
    for n in spec.n_list:
        config = ScatterConfig(n=n, k=spec.k, series=series)
        if base_shifts is None:
            potential = potential_from_json(Path(src["potential"]).read_text())
            results = solve_potential_shifts(config, potential, DEFAULT_SOLVE_LMAX)
            shifts = PhaseShiftSet.from_deltas(m.delta for m in results)
        else:
            shifts = base_shifts

        theta_w = _theta_grid(n, spec.theta_count, interior=False)
        psi, psi_in, psi_sc = evaluate_grid(config, shifts, r, theta_w, jobs=args.jobs)
        rows = []
        for i, rv in enumerate(r):
            for j, tv in enumerate(theta_w):
                rows.append(
                    (
                        rv, tv,
                        psi[i, j].real, psi[i, j].imag,
                        psi_in[i, j].real, psi_in[i, j].imag,
                        psi_sc[i, j].real, psi_sc[i, j].imag,
                    )
                )
        path_w = out_dir / f"wavefield_n{n}.csv"
        _write_csv(path_w, WAVEFIELD_HEADER, rows)
        written.append(path_w)

        if n == 1:
            path_s = out_dir / f"summary_n{n}.json"
            _write_text(path_s, json.dumps(one_d_summary(shifts), indent=2) + "\n")
            written.append(path_s)
        else:
            theta_x = _theta_grid(n, spec.theta_count, interior=True)
            rows = _xsection_rows(config, shifts, r, theta_x, with_asympt=False)
            path_x = out_dir / f"xsection_n{n}.csv"
            _write_csv(path_x, XSECTION_HEADER, rows)
            written.append(path_x)
            summary = {
                "sigma_total": sigma_total_asymptotic(config, shifts),
                "per_l": list(sigma_total_mode_terms(config, shifts)),
            }
            path_s = out_dir / f"summary_n{n}.json"
            _write_text(path_s, json.dumps(summary, indent=2) + "\n")
            written.append(path_s)
    for p in written:
        print(p)
    return 0


def _add_common(p: argparse.ArgumentParser, grids: bool = True) -> None:
    p.add_argument("--n", type=int, default=None, help="spatial dimension (>= 1)")
    p.add_argument("--k", type=float, default=None, help="wavenumber (> 0)")
    p.add_argument("--lmax", type=int, default=None,
                   help="incident truncation / highest solved l (default: auto)")
    p.add_argument("--rtol", type=float, default=None,
                   help="series tolerance (env SCATTERKIT_RTOL overrides default)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--jobs", type=int, default=os.cpu_count(),
                   help="parallel workers for grid evaluation")
    if grids:
        p.add_argument("--shifts", default=None, help="phase-shift JSON file")
        p.add_argument("--delta", default=None,
                       help="inline comma-separated shifts, e.g. '0.5,-0.2'")
        p.add_argument("--potential", default=None, help="potential JSON file")
        p.add_argument("--r-min", type=float, default=1.0)
        p.add_argument("--r-max", type=float, default=10.0)
        p.add_argument("--r-count", type=int, default=10)
        p.add_argument("--r-scale", choices=("linear", "log"), default="linear")
        p.add_argument("--theta-count", type=int, default=9)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatterkit",
        description="Finite-distance scattering fields, cross sections, and "
                    "phase-shift solvers in arbitrary dimension.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wavefield", help="tabulate psi, psi_in, psi_sc on an (r, theta) grid")
    _add_common(p)
    p.set_defaults(func=cmd_wavefield)

    p = sub.add_parser("xsection", help="current-resolved differential cross sections")
    _add_common(p)
    p.add_argument("--asympt", action="store_true",
                   help="append |f(theta)|^2 and finite/asymptotic ratio columns")
    p.set_defaults(func=cmd_xsection)

    p = sub.add_parser("phaseshifts", help="solve a model potential for delta_l")
    _add_common(p, grids=False)
    p.add_argument("--potential", required=True, help="potential JSON file")
    p.set_defaults(func=cmd_phaseshifts)

    p = sub.add_parser("asympt-compare",
                       help="finite-distance dsigma against the asymptotic |f|^2")
    _add_common(p)
    p.set_defaults(func=cmd_asympt_compare)

    p = sub.add_parser("sweep", help="batch run over a dimension list from a spec file")
    _add_common(p, grids=False)
    p.add_argument("--spec", required=True, help="sweep spec JSON file")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScatteringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
