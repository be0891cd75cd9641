"""Command-line interface: gen, contact, certify, scaling, lhs, scan.

Outputs are deterministic: identical invocations produce byte-identical
JSON and CSV artifacts. Complex numbers appear as [re, im] pairs. The
environment variable STEERCERT_TOL_ZERO overrides the zero threshold.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import certify as cert
from . import families as fam
from . import lhs as lhslab
from . import nullspace as nsp
from . import scaling as scal
from .io import (
    canonical_json,
    complex_pair,
    load_state,
    matrix_to_doc,
    vector_from_doc,
)
from .linalg import DEFAULT_TOL, DensityMatrix, Tolerances

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_BAD_DIMENSION = 3

MAX_TOTAL_DIM = 16


class DimensionError(Exception):
    """Raised when an input cut is outside the supported range."""


def _tolerances(args) -> Tolerances:
    eps_zero = DEFAULT_TOL.eps_zero
    env = os.environ.get("STEERCERT_TOL_ZERO")
    if env:
        eps_zero = float(env)
    if getattr(args, "eps_zero", None) is not None:
        eps_zero = args.eps_zero
    return Tolerances(eps_zero=eps_zero)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_params(spec: str) -> dict:
    raw = spec.strip()
    if not raw.startswith("{"):
        raw = Path(spec).read_text(encoding="utf-8")
    doc = json.loads(raw)
    if not isinstance(doc, dict):
        raise ValueError("parameter document must be a flat JSON object")
    return doc


def _as_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"expected a number or [re, im] pair, got {value!r}")


def _load_vector(spec: str) -> np.ndarray:
    raw = spec.strip()
    if not raw.startswith("{"):
        raw = Path(spec).read_text(encoding="utf-8")
    return vector_from_doc(json.loads(raw))


def _check_dims(rho: DensityMatrix) -> None:
    if rho.dims[0] * rho.dims[1] > MAX_TOTAL_DIM:
        raise DimensionError(f"cut {rho.dims} exceeds the supported total dimension {MAX_TOTAL_DIM}")


# ---------------------------------------------------------------- gen

_GEN_FAMILIES = ("h_block", "cholesky", "spectral", "x", "bell_mix", "two_product", "werner")


def _generate(family: str, p: dict) -> DensityMatrix:
    if family == "h_block":
        params = fam.HBlockParams(
            h00=float(p["h00"]), h11=float(p["h11"]), h22=float(p["h22"]),
            h01=_as_complex(p.get("h01", 0)), h02=_as_complex(p.get("h02", 0)),
            h12=_as_complex(p.get("h12", 0)),
        )
        rho = fam.from_h_block(params)
    elif family == "cholesky":
        params = fam.CholeskyParams(
            a=float(p["a"]), b=float(p["b"]), c=float(p["c"]),
            x=_as_complex(p.get("x", 0)), y=_as_complex(p.get("y", 0)),
            z=_as_complex(p.get("z", 0)),
        )
        rho, _ = fam.cholesky_branch(params)
    elif family == "spectral":
        params = fam.SpectralParams(
            nu1=float(p["nu1"]), nu2=float(p["nu2"]), nu3=float(p["nu3"]),
            theta12=float(p.get("theta12", 0)), theta13=float(p.get("theta13", 0)),
            theta23=float(p.get("theta23", 0)), phi12=float(p.get("phi12", 0)),
            phi13=float(p.get("phi13", 0)), phi23=float(p.get("phi23", 0)),
        )
        rho, _ = fam.spectral_branch(params)
    elif family == "x":
        rho = fam.x_family(float(p["a"]), float(p["b"]), float(p["c"]), _as_complex(p.get("z", 0)))
    elif family == "bell_mix":
        rho = fam.bell_mix(float(p["p"]), float(p["q"]), float(p["r"]))
    elif family == "two_product":
        rho = fam.two_product_one_entangled(
            float(p["p"]), float(p["q"]), float(p["r"]),
            float(p["theta"]), float(p.get("phi", 0)),
        )
    elif family == "werner":
        rho = fam.werner(float(p["v"]))
    else:
        raise ValueError(f"unknown family {family!r}; choose one of {_GEN_FAMILIES}")

    placement = None
    if "placement" in p:
        pl = p["placement"]
        placement = fam.PlacementParams(
            thetaA=float(pl.get("thetaA", 0)), phiA=float(pl.get("phiA", 0)),
            thetaB=float(pl.get("thetaB", 0)), phiB=float(pl.get("phiB", 0)),
        )
    g = None
    if "filter_g" in p:
        rows = p["filter_g"]
        g = np.array([[_as_complex(v) for v in row] for row in rows], dtype=np.complex128)
        if g.shape != (2, 2):
            raise ValueError("filter_g must be a 2x2 matrix")
    if placement is not None or g is not None:
        rho = fam.place_and_filter(rho, placement, g)
    return rho


def cmd_gen(args) -> int:
    rho = _generate(args.family, _load_params(args.params))
    _emit(canonical_json(matrix_to_doc(rho)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- contact

def cmd_contact(args) -> int:
    tol = _tolerances(args)
    rho = load_state(args.state)
    _check_dims(rho)
    if rho.dims != (2, 2):
        raise DimensionError("the contact pipeline needs a two-qubit state")
    datum = nsp.find_boundary_contact(rho, tol)
    if datum is None:
        doc = {"found": False, "alpha": None, "beta": None, "residual": None,
               "filtered_class": False, "coherence": None}
    else:
        witness = nsp.recognize_filtered_class(rho, datum, tol)
        if witness is not None:
            coherence = witness.coherence
        else:
            rho_std, _, _ = nsp.normal_form(rho, datum, tol)
            coherence = cert.tangential_coherence(rho_std)
        doc = {
            "found": True,
            "alpha": [complex_pair(z) for z in datum.alpha],
            "beta": [complex_pair(z) for z in datum.beta],
            "residual": datum.residual,
            "filtered_class": witness is not None,
            "coherence": complex_pair(coherence),
        }
    if args.seed is not None:
        doc["seed"] = args.seed
    _emit(canonical_json(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- certify

def _verdict_doc(rho: DensityMatrix, tol: Tolerances) -> dict:
    verdict = cert.product_null_verdict(rho, tol)
    doc = {
        "npt": verdict.npt,
        "min_pt_eigenvalue": verdict.min_pt_eigenvalue,
        "steerable_AtoB": verdict.steerable_a_to_b,
        "steerable_BtoA": verdict.steerable_b_to_a,
        "mechanism": verdict.mechanism,
        "coherence": complex_pair(verdict.coherence),
        "w_bd": cert.w_bd(rho),
        "boundary_minor": None,
        "contact": None,
    }
    if verdict.contact is not None:
        rho_std, _, _ = nsp.normal_form(rho, verdict.contact, tol)
        doc["boundary_minor"] = cert.boundary_minor(rho_std, tol)
        doc["contact"] = {
            "alpha": [complex_pair(z) for z in verdict.contact.alpha],
            "beta": [complex_pair(z) for z in verdict.contact.beta],
            "residual": verdict.contact.residual,
        }
    return doc


def _general_cut_doc(rho: DensityMatrix, alpha0, alpha1, tol: Tolerances) -> dict:
    result = cert.support_kernel_criterion(rho, alpha0, alpha1, tol)
    is_ppt, min_eig = cert.ppt_check(rho, tol)
    return {
        "npt": not is_ppt,
        "min_pt_eigenvalue": min_eig,
        "steerable_AtoB": cert.YES if result.fires else cert.UNDETERMINED,
        "steerable_BtoA": cert.UNDETERMINED,
        "mechanism": cert.MECH_SUPPORT_KERNEL if result.fires else cert.MECH_NONE,
        "coherence": complex_pair(result.block.v),
        "w_bd": None,
        "boundary_minor": result.npt_minor if result.fires else None,
        "contact": None,
        "support_kernel": {
            "fires": result.fires,
            "rank_a": result.block.rank_a,
            "npt_minor": result.npt_minor,
        },
    }


def cmd_certify(args) -> int:
    tol = _tolerances(args)
    rho = load_state(args.state)
    _check_dims(rho)
    if args.alpha0 is not None or args.alpha1 is not None:
        if args.alpha0 is None or args.alpha1 is None:
            raise ValueError("provide both --alpha0 and --alpha1 or neither")
        doc = _general_cut_doc(rho, _load_vector(args.alpha0), _load_vector(args.alpha1), tol)
    elif rho.dims == (2, 2):
        doc = _verdict_doc(rho, tol)
    else:
        raise DimensionError(
            f"cut {rho.dims} needs --alpha0/--alpha1 for the support-kernel criterion"
        )
    if args.seed is not None:
        doc["seed"] = args.seed
    _emit(canonical_json(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- scaling

def cmd_scaling(args) -> int:
    tol = _tolerances(args)
    rho = load_state(args.state)
    _check_dims(rho)
    dx, dy = rho.dims
    if args.alpha0 is not None:
        alpha0 = _load_vector(args.alpha0)
        alpha1 = _load_vector(args.alpha1)
    elif dx == 2:
        alpha0 = np.array([1, 0], dtype=np.complex128)
        alpha1 = np.array([0, 1], dtype=np.complex128)
    else:
        raise DimensionError("untrusted dimension > 2 needs --alpha0/--alpha1")
    grid = scal.default_t_grid(args.tmin, args.tmax, args.npoints)
    if dy == 2 and args.phi is None:
        family = scal.sigma_family(rho, alpha0, alpha1, grid, tol)
    else:
        if args.phi is None or args.beta is None:
            raise DimensionError("trusted dimension > 2 needs --phi/--beta for the compression")
        family = scal.compressed_slice(
            rho, alpha0, alpha1, _load_vector(args.phi), _load_vector(args.beta), grid, tol
        )
    report = scal.scaling_fit(family, tol=tol)
    curve = scal.defect_curve(family, tol)

    if args.csv:
        lines = ["t,m,Rx,Ry,Rz,abs_b,d,u,delta"]
        for k, t in enumerate(family.t_grid):
            lines.append(
                ",".join(
                    repr(float(v))
                    for v in (
                        t, family.m[k], family.bloch[k, 0], family.bloch[k, 1],
                        family.bloch[k, 2], abs(family.b[k]), family.d[k],
                        family.u[k], family.delta[k],
                    )
                )
            )
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")

    doc = {
        "slope_b": report.slope_b,
        "slope_d": report.slope_d,
        "d_below_floor": report.d_below_floor,
        "l_hat": report.l_hat,
        "c_hat": report.c_hat,
        "passes": report.passes,
        "window": list(report.window),
        "n_points": report.n_points,
        "defect_c_bound": curve.c_bound,
        "defect_degenerate": curve.degenerate,
    }
    if report.l_hat > tol.eps_zero:
        doc["cap_constant"] = scal.recommended_cap_constant(report)
    if args.seed is not None:
        doc["seed"] = args.seed
    _emit(canonical_json(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- lhs

def _parse_settings(args) -> tuple[list, list[float] | None]:
    if args.settings_file:
        doc = json.loads(Path(args.settings_file).read_text(encoding="utf-8"))
        if not isinstance(doc, list):
            raise ValueError("settings file must hold a JSON list")
        settings = []
        for entry in doc:
            if isinstance(entry, list) and len(entry) == 3:
                settings.append(np.asarray(entry, dtype=float))
            else:
                settings.append(vector_from_doc(entry))
        return settings, None
    if not args.settings:
        raise ValueError("provide --settings t1,t2,... or --settings-file")
    t_values = [float(s) for s in args.settings.split(",") if s.strip()]
    if any(t <= 0 for t in t_values):
        raise ValueError("t values must be positive")
    kets = [
        np.array([1.0, t], dtype=np.complex128) / math.sqrt(1.0 + t * t) for t in t_values
    ]
    return kets, t_values


def cmd_lhs(args) -> int:
    tol = _tolerances(args)
    rho = load_state(args.state)
    _check_dims(rho)
    if rho.dims != (2, 2):
        raise DimensionError("the LHS lab runs on the two-qubit cut")
    settings, t_values = _parse_settings(args)
    asm = lhslab.assemblage_from_state(rho, settings, tol)
    grid_sizes = [int(s) for s in str(args.grid).split(",") if s.strip()]

    cap_constant = args.cap_constant
    if cap_constant is None and t_values is not None:
        alpha0 = np.array([1, 0], dtype=np.complex128)
        alpha1 = np.array([0, 1], dtype=np.complex128)
        try:
            family = scal.sigma_family(rho, alpha0, alpha1, scal.default_t_grid(), tol)
            report = scal.scaling_fit(family, tol=tol)
            if report.l_hat > tol.eps_zero:
                cap_constant = scal.recommended_cap_constant(report)
        except ValueError:
            cap_constant = None
    if cap_constant is None:
        cap_constant = 5.0

    rows = []
    summary = []
    for size in grid_sizes:
        grid = lhslab.build_grid(size, include_contact=args.contact_atom)
        sol = lhslab.lhs_lp(asm, grid, args.lp_tol)
        summary.append(
            {"grid_size": size, "residual": sol.residual, "feasible": sol.feasible,
             "iterations": sol.iterations}
        )
        if t_values is not None:
            for t in t_values:
                rows.append((size, t, sol.residual, lhslab.cap_mass(sol, grid, t, cap_constant)))
        else:
            rows.append((size, None, sol.residual, None))

    if args.csv:
        lines = ["grid_size,t,residual,cap_mass"]
        for size, t, residual, mass in rows:
            lines.append(
                ",".join(
                    "" if v is None else (repr(float(v)) if not isinstance(v, int) else str(v))
                    for v in (size, t, residual, mass)
                )
            )
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")

    doc = {"cap_constant": cap_constant, "lp_tol": args.lp_tol, "runs": summary}
    if args.seed is not None:
        doc["seed"] = args.seed
    _emit(canonical_json(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- scan

def _lattice_axis(spec) -> np.ndarray:
    if not (isinstance(spec, list) and len(spec) == 3):
        raise ValueError("lattice axis must be [start, stop, count]")
    start, stop, count = float(spec[0]), float(spec[1]), int(spec[2])
    if count < 0:
        raise ValueError("lattice count must be nonnegative")
    return np.linspace(start, stop, count) if count else np.empty(0)


def _scan_rows(args, tol: Tolerances):
    lattice = _load_params(args.lattice)
    fixed = _load_params(args.params) if args.params else {}
    if args.family == "bell_mix":
        header = ["p", "q", "r", "abs_coherence"]
        points = []
        for p in _lattice_axis(lattice["p"]):
            for q in _lattice_axis(lattice["q"]):
                r = 1.0 - p - q
                if p <= 0 or q <= 0 or r <= 0:
                    continue
                rho = fam.bell_mix(p, q, r)
                points.append(([p, q, r, abs(p - q) / 2], rho))
        return header, points
    if args.family in ("cholesky", "x"):
        a = float(fixed.get("a", 1.0))
        b = float(fixed.get("b", 1.0))
        c = float(fixed.get("c", 1.0))
        x = _as_complex(fixed.get("x", 0)) if args.family == "cholesky" else 0j
        y = _as_complex(fixed.get("y", 0)) if args.family == "cholesky" else 0j
        header = ["re_z", "im_z", "abs_coherence"]
        points = []
        for re_z in _lattice_axis(lattice["re_z"]):
            for im_z in _lattice_axis(lattice["im_z"]):
                z = complex(re_z, im_z)
                params = fam.CholeskyParams(a, b, c, x, y, z)
                rho, coherence = fam.cholesky_branch(params)
                points.append(([re_z, im_z, abs(coherence)], rho))
        return header, points
    raise ValueError(f"unknown scan family {args.family!r}")


def cmd_scan(args) -> int:
    tol = _tolerances(args)
    header, points = _scan_rows(args, tol)
    columns = header + ["min_pt_eig", "npt", "steerable_AtoB", "steerable_BtoA", "mechanism"]
    lines = []
    if args.seed is not None:
        lines.append(f"# seed={args.seed}")
    lines.append(",".join(columns))
    for values, rho in points:
        verdict = cert.product_null_verdict(rho, tol)
        row = [repr(float(v)) for v in values]
        row += [
            repr(verdict.min_pt_eigenvalue),
            str(verdict.npt).lower(),
            verdict.steerable_a_to_b,
            verdict.steerable_b_to_a,
            verdict.mechanism,
        ]
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steercert",
        description="Boundary-contact certification of entanglement and projective steering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--seed", type=int, help="seed recorded in the output header")
        p.add_argument("--eps-zero", type=float, dest="eps_zero", help="zero threshold override")

    p = sub.add_parser("gen", help="generate a family state as matrix JSON")
    p.add_argument("--family", required=True, choices=_GEN_FAMILIES)
    p.add_argument("--params", required=True, help="flat JSON object (inline or path)")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("contact", help="find a product-null boundary contact")
    p.add_argument("--state", required=True)
    common(p)
    p.set_defaults(func=cmd_contact)

    p = sub.add_parser("certify", help="entanglement/steering verdict")
    p.add_argument("--state", required=True)
    p.add_argument("--alpha0", help="untrusted vector JSON (general cuts)")
    p.add_argument("--alpha1", help="untrusted vector JSON (general cuts)")
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("scaling", help="boundary-scaling exponents and defect curve")
    p.add_argument("--state", required=True)
    p.add_argument("--alpha0")
    p.add_argument("--alpha1")
    p.add_argument("--phi", help="trusted support vector for compression")
    p.add_argument("--beta", help="trusted kernel vector for compression")
    p.add_argument("--tmin", type=float, default=1e-4)
    p.add_argument("--tmax", type=float, default=1e-2)
    p.add_argument("--npoints", type=int, default=20)
    p.add_argument("--csv", help="write the (t, Bloch profile) table here")
    common(p)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("lhs", help="discretized LHS feasibility and cap masses")
    p.add_argument("--state", required=True)
    p.add_argument("--settings", help="comma-separated positive t values")
    p.add_argument("--settings-file", help="JSON list of vector docs or Bloch triples")
    p.add_argument("--grid", default="200", help="grid size or comma list for trends")
    p.add_argument("--contact-atom", action="store_true", help="append the exact north-pole atom")
    p.add_argument("--cap-constant", type=float, dest="cap_constant", help="cap constant K")
    p.add_argument("--lp-tol", type=float, dest="lp_tol", default=lhslab.LP_TOL)
    p.add_argument("--csv", help="write the (grid_size, t, residual, cap_mass) trend here")
    common(p)
    p.set_defaults(func=cmd_lhs)

    p = sub.add_parser("scan", help="verdict lattice over a family parameter grid")
    p.add_argument("--family", required=True, choices=("bell_mix", "cholesky", "x"))
    p.add_argument("--lattice", required=True, help="JSON axes, e.g. {\"p\":[0.1,0.8,8],...}")
    p.add_argument("--params", help="fixed family parameters as flat JSON")
    common(p)
    p.set_defaults(func=cmd_scan)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_DIMENSION
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
