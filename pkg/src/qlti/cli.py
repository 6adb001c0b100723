"""Command-line front end: ``qlti <subcommand> ...``.

Exit status is 0 on success, 2 for malformed input, 3 for a numerical failure
and 4 when a pole or degeneracy guard trips. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .apps import (
    CavityLossModel,
    FeedbackOscillator,
    cavity_F,
    hidden_squeezing_metrics,
    lossy_squeezer_sdm,
    oscillator_bound,
    oscillator_H,
    oscillator_transfer,
    r_lim,
    two_mode_invariants,
    two_mode_sigma_delta,
)
from .core import (
    FrequencyGrid,
    GuardError,
    MatrixFunction,
    NumericalError,
    conjugate_symplectic_residual,
)
from .decompose import circuit_eval, mesh_decompose, optical_decomposition
from .detect import (
    Heterodyne,
    Homodyne,
    LineOscillator,
    Synodyne,
    multimode_reconstruct,
    photocurrent_spectrum,
)
from .io import (
    SchemaError,
    circuit_to_doc,
    dilation_to_doc,
    doc_to_circuit,
    doc_to_dilation,
    doc_to_matfn,
    doc_to_noise,
    dump_json,
    load_json,
    matfn_to_doc,
    noise_to_doc,
    validate,
    write_csv,
)
from .quantize import dilate, minimal_noise
from .sdm import SpectralDensityMatrix, open_system_bound, uncertainty_margin, vacuum_sdm, williamson
from .transfer import sample_transfer_function

EXIT_OK, EXIT_SCHEMA, EXIT_NUMERIC, EXIT_GUARD = 0, 2, 3, 4


def _grid(args) -> FrequencyGrid | None:
    if args.count is None:
        return None
    if args.spacing == "log":
        return FrequencyGrid.log(args.start, args.stop, args.count)
    return FrequencyGrid.linear(args.start, args.stop, args.count)


def _emit(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _load_function(args, path=None):
    """Read a matfn document, or sample a transfer spec on the grid flags."""
    doc = load_json(path or args.input)
    name = validate(doc)
    if name == "qlti.transfer/1":
        grid = _grid(args)
        if grid is None:
            raise SchemaError("a qlti.transfer/1 input needs --count/--start/--stop")
        return sample_transfer_function(doc, grid)
    if name != "qlti.matfn/1":
        raise SchemaError(f"expected a matrix function, got {name}")
    return doc_to_matfn(doc)


def _report_failures(failures: dict, grid: FrequencyGrid | None, tol=None):
    for k in sorted(failures):
        w = f" omega={grid.omega[k]:.17g}" if grid is not None and k < len(grid) else ""
        t = f" tol={tol:.3g}" if tol is not None else ""
        print(f"  index={k}{w}{t}: {failures[k]}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    doc = load_json(args.input)
    name = validate(doc)
    rows = []
    if name == "qlti.circuit/1":
        circ = doc_to_circuit(doc)
        source = doc_to_matfn(doc["source"]) if "source" in doc else None
        for k, w in enumerate(circ.grid.omega):
            M = circuit_eval(circ, w)
            res = conjugate_symplectic_residual(M)
            rec = np.linalg.norm(M - source.samples[k]) / np.linalg.norm(source.samples[k]) if source else np.nan
            rows.append((w, res, rec))
        cols = ["omega", "group_residual", "reconstruction_residual"]
        worst = {k: f"group {r[1]:.3e} reconstruction {r[2]:.3e}" for k, r in enumerate(rows)
                 if not (r[1] <= args.tol * max(1.0, np.linalg.norm(circuit_eval(circ, r[0])) ** 2))
                 or (source is not None and not r[2] <= args.tol)}
        grid = circ.grid
    else:
        F = _load_function(args)
        grid = F.grid
        if isinstance(F, SpectralDensityMatrix):
            margins = F.margins()
            rows = list(zip(grid.omega, margins))
            cols = ["omega", "uncertainty_margin"]
            worst = {k: f"margin {m:.3e}" for k, m in enumerate(margins) if m < -args.tol}
        elif doc.get("kind") == "dilation" and "blocks" in doc:
            dil = doc_to_dilation(doc)
            res = dil.residuals()
            rows = list(zip(grid.omega, res))
            cols = ["omega", "group_residual"]
            worst = {k: f"residual {r:.3e}" for k, r in enumerate(res)
                     if r > args.tol * max(1.0, np.linalg.norm(dil.M_ext.samples[k]) ** 2)}
        else:
            if F.rows != F.cols or F.rows % 2:
                raise SchemaError("check needs a square even-dimensional matrix function")
            res = [conjugate_symplectic_residual(x) for x in F.samples]
            rows = list(zip(grid.omega, res))
            cols = ["omega", "group_residual"]
            worst = {k: f"residual {r:.3e}" for k, r in enumerate(res)
                     if r > args.tol * max(1.0, np.linalg.norm(F.samples[k]) ** 2)}
    _emit(write_csv("check", cols, rows, meta={"input": name, "tol": args.tol}), args.output)
    if worst:
        print(f"check failed at {len(worst)} frequencies", file=sys.stderr)
        _report_failures(worst, grid, args.tol)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_quantize(args) -> int:
    G = _load_function(args)
    if isinstance(G, SpectralDensityMatrix):
        raise SchemaError("quantize needs a transfer matrix, not an SDM")
    model = minimal_noise(G, rank_tol=args.rank_tol)
    res = model.constraint_residual()
    _emit(dump_json(noise_to_doc(model)), args.output)
    bad = {k: f"constraint residual {r:.3e}" for k, r in enumerate(res) if r > args.tol}
    if bad:
        _report_failures(bad, G.grid, args.tol)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_dilate(args) -> int:
    doc = load_json(args.input)
    name = validate(doc)
    if name == "qlti.noise/1":
        model = doc_to_noise(doc)
    else:
        model = minimal_noise(_load_function(args), rank_tol=args.rank_tol)
    dil = dilate(model, tol=args.tol)
    _emit(dump_json(dilation_to_doc(dil)), args.output)
    return EXIT_OK


def cmd_decompose(args) -> int:
    doc = load_json(args.input)
    name = validate(doc)
    if name == "qlti.noise/1":
        raise SchemaError("decompose needs a square matrix function (dilate first)")
    if name == "qlti.matfn/1" and doc.get("kind") == "dilation" and "blocks" in doc:
        M = doc_to_dilation(doc).as_group_element()
    else:
        M = doc_to_matfn(doc) if name == "qlti.matfn/1" else _load_function(args)
    if isinstance(M, SpectralDensityMatrix):
        raise SchemaError("decompose needs a transfer matrix, not an SDM")
    circ = optical_decomposition(M, tol=args.tol)
    meshes = None
    if args.mesh and not circ.failures:
        meshes = [
            {key: mesh_decompose(getattr(circ, key)[k]) for key in ("V1", "W1", "W2", "V2")}
            for k in range(len(circ.grid))
        ]
    _emit(dump_json(circuit_to_doc(circ, meshes=meshes, source=M)), args.output)
    if circ.failures:
        print("decomposition failed at some frequencies", file=sys.stderr)
        _report_failures(circ.failures, circ.grid, args.tol)
        return EXIT_NUMERIC
    return EXIT_OK


def _load_sdm(args, path) -> SpectralDensityMatrix:
    S = _load_function(args, path)
    if isinstance(S, MatrixFunction):
        S = SpectralDensityMatrix(S.grid, S.samples)
    return S


def cmd_williamson(args) -> int:
    S = _load_sdm(args, args.input)
    form = williamson(S, eps=args.eps, tol=args.tol)
    n = form.n
    cols = ["omega"] + [f"sigma_{j + 1}" for j in range(n)] + [f"delta_{j + 1}" for j in range(n)] + ["margin"]
    rows = [
        [w, *form.sigma[k], *form.delta[k], uncertainty_margin(S.samples[k])]
        for k, w in enumerate(S.grid.omega)
    ]
    _emit(write_csv("williamson", cols, rows), args.output)
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.model:
        model = doc_to_noise(load_json(args.model))
        grid = model.grid
        S_in = _load_sdm(args, args.input) if args.input else vacuum_sdm(model.n, grid)
        m = model.m
        cols = ["omega"] + [f"{c}_{i + 1}" for c in ("lhs", "rhs", "rhs_noise") for i in range(m)]
        rows, bad = [], {}
        for k, w in enumerate(grid.omega):
            rep = open_system_bound(model.G, model.N, S_in, w)
            rows.append([w, *rep.lhs, *rep.rhs, *rep.rhs_noise_only])
            if np.any(rep.lhs < rep.rhs - args.tol):
                bad[k] = f"bound violated, slack {rep.slack.min():.3e}"
        _emit(write_csv("bound", cols, rows), args.output)
        if bad:
            _report_failures(bad, grid, args.tol)
            return EXIT_NUMERIC
        return EXIT_OK
    if not args.input:
        raise SchemaError("bound needs an SDM input or --model")
    S = _load_sdm(args, args.input)
    margins = S.margins()
    _emit(write_csv("bound", ["omega", "margin"], zip(S.grid.omega, margins)), args.output)
    bad = {k: f"margin {x:.3e}" for k, x in enumerate(margins) if x < -args.tol}
    if bad:
        _report_failures(bad, S.grid, args.tol)
        return EXIT_NUMERIC
    return EXIT_OK


def _parse_complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _parse_tones(text: str) -> dict:
    tones = {}
    for part in text.split(","):
        f, _, a = part.partition(":")
        tones[float(f)] = tones.get(float(f), 0) + _parse_complex(a)
    return tones


def _embed_lines(lo: LineOscillator, n: int, mode: int) -> LineOscillator:
    """Place a single-mode LO on quadratures ``(mode, n + mode)`` of ``n`` modes."""
    if not 0 <= mode < n:
        raise SchemaError(f"--target {mode} outside 0..{n - 1}")
    weights = []
    for c in lo.weights:
        v = np.zeros(2 * n, dtype=complex)
        v[[mode, n + mode]] = c
        weights.append(v)
    return LineOscillator(lo.freqs, tuple(weights))


def cmd_detect(args) -> int:
    S = _load_sdm(args, args.input)
    if args.mode == "homodyne":
        lo = Homodyne(args.theta, args.amp)
    elif args.mode == "heterodyne":
        lo = Heterodyne(args.omega0, _parse_complex(args.alpha0))
    elif args.mode == "synodyne":
        lo = Synodyne(args.omega0, _parse_complex(args.alpha_plus), _parse_complex(args.alpha_minus))
    else:
        if not args.tones:
            raise SchemaError("--mode general needs --tones 'W:alpha,...'")
        lo = LineOscillator.from_complex_tones(_parse_tones(args.tones))
    if S.n > 1:
        lo = _embed_lines(lo.lines(), S.n, args.target)
    omegas = S.grid.omega if args.at is None else np.array([float(x) for x in args.at.split(",")])
    spec = photocurrent_spectrum(S, lo, omegas)
    _emit(write_csv(f"detect-{args.mode}", ["omega", "spectrum"], zip(spec.omega, spec.values)), args.output)
    if args.tomography:
        rec = np.stack([multimode_reconstruct(S, w) for w in S.grid.omega])
        dump_json(matfn_to_doc(SpectralDensityMatrix(S.grid, rec)), args.tomography)
    return EXIT_OK


# ---------------------------------------------------------------------------
# demos


def demo_cavity(args) -> int:
    model = CavityLossModel(args.R, args.phi0, args.tau_rt)
    grid = _grid(args) or FrequencyGrid.linear(0.0, np.pi / 2, 33)
    rows, samples = [], []
    for w in grid.omega:
        fp, fm = cavity_F(model, w), cavity_F(model, -w)
        S = lossy_squeezer_sdm(fp, fm, args.r)
        samples.append(S)
        h = hidden_squeezing_metrics(S)
        rl = r_lim(fp, fm) if abs(fp) > 0 and abs(fm) > 0 else float("nan")
        rows.append([w, abs(fp) ** 2, abs(fm) ** 2, h.Lambda_C, h.Lambda_R, h.hidden, rl, uncertainty_margin(S)])
    cols = ["omega", "F_plus_sq", "F_minus_sq", "Lambda_C", "Lambda_R", "hidden", "r_lim", "margin"]
    meta = {"R": args.R, "phi0": args.phi0, "tau_rt": args.tau_rt, "r": args.r, "seed": args.seed}
    _emit(write_csv("demo-cavity", cols, rows, meta=meta), args.output)
    if args.sdm_out:
        dump_json(matfn_to_doc(SpectralDensityMatrix(grid, np.stack(samples))), args.sdm_out)
    return EXIT_OK


def demo_oscillator(args) -> int:
    osc = FeedbackOscillator(args.eta, args.tau)
    grid = _grid(args) or FrequencyGrid.linear(0.0, 3.0 / args.tau, 64)
    rows = []
    for w in grid.omega:
        h0, hg, _, _ = oscillator_H(osc, w)
        bound, achieved = oscillator_bound(osc, w)
        res = conjugate_symplectic_residual(oscillator_transfer(osc, w))
        rows.append([w, abs(h0) ** 2, abs(hg) ** 2, bound, achieved, achieved / bound, res])
    cols = ["omega", "H0_abs2", "HG_abs2", "bound", "achieved", "ratio", "group_residual"]
    meta = {"eta": args.eta, "tau": args.tau, "seed": args.seed}
    _emit(write_csv("demo-oscillator", cols, rows, meta=meta), args.output)
    return EXIT_OK


def demo_two_mode(args) -> int:
    S = two_mode_sigma_delta(args.r1, args.r2)
    sig_c, dlt_c = two_mode_invariants(args.r1, args.r2)
    grid = FrequencyGrid(np.array([1.0]))
    form = williamson(SpectralDensityMatrix(grid, S[None]))
    rows = [[args.r1, args.r2, S[0, 0].real, S[0, 1].imag, sig_c, dlt_c, form.sigma[0, 0], form.delta[0, 0]]]
    cols = ["r1", "r2", "Sigma", "Delta", "Sigma_closed_form", "Delta_closed_form", "sigma_williamson", "delta_williamson"]
    _emit(write_csv("demo-two-mode", cols, rows, meta={"seed": args.seed}), args.output)
    if args.sdm_out:
        dump_json(matfn_to_doc(SpectralDensityMatrix(grid, S[None])), args.sdm_out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_grid(p):
    g = p.add_argument_group("frequency grid (for qlti.transfer/1 inputs and sweeps)")
    g.add_argument("--start", type=float, default=0.0, help="first frequency (rad/s)")
    g.add_argument("--stop", type=float, default=1.0, help="last frequency (rad/s)")
    g.add_argument("--count", type=int, default=None, help="number of grid points")
    g.add_argument("--spacing", choices=["linear", "log"], default="linear")


def _add_io(p, needs_input=True):
    if needs_input:
        p.add_argument("input", help="input JSON document")
    p.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qlti", description="Quantum LTI systems toolkit.")
    ap.add_argument("--version", action="version", version=f"qlti {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="group residual of a matfn/dilation/circuit, or SDM physicality")
    _add_io(p)
    _add_grid(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("quantize", help="minimal noise model of a transfer matrix")
    _add_io(p)
    _add_grid(p)
    p.add_argument("--rank-tol", type=float, default=1e-10)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("dilate", help="conjugate-symplectic dilation of a noise model")
    _add_io(p)
    _add_grid(p)
    p.add_argument("--rank-tol", type=float, default=1e-10)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("decompose", help="seven-factor optical circuit of a group element")
    _add_io(p)
    _add_grid(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--mesh", action="store_true", help="also lower each interferometer to a mesh")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("williamson", help="invariants (sigma, delta) of an SDM as CSV")
    _add_io(p)
    _add_grid(p)
    p.add_argument("--eps", type=float, default=0.0, help="diagonal regularization")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_williamson)

    p = sub.add_parser("bound", help="uncertainty margins, or the open-system bound with --model")
    p.add_argument("input", nargs="?", help="SDM (input SDM when --model is given; vacuum if omitted)")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--model", help="qlti.noise/1 document")
    p.add_argument("--tol", type=float, default=1e-9)
    _add_grid(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("detect", help="photocurrent spectrum for a local oscillator")
    _add_io(p)
    _add_grid(p)
    p.add_argument("--mode", choices=["homodyne", "heterodyne", "synodyne", "general"], required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--amp", type=float, default=1.0)
    p.add_argument("--omega0", type=float, default=0.0)
    p.add_argument("--alpha0", default="1")
    p.add_argument("--alpha-plus", default="1")
    p.add_argument("--alpha-minus", default="0")
    p.add_argument("--tones", help="general LO as 'W1:alpha1,W2:alpha2' (complex amplitudes)")
    p.add_argument("--target", type=int, default=0, help="mode the LO addresses in a multimode SDM")
    p.add_argument("--at", help="comma-separated frequencies (default: the SDM grid)")
    p.add_argument("--tomography", help="write the synodyne-reconstructed SDM here")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("demo", help="worked examples emitting CSV")
    dsub = p.add_subparsers(dest="demo", required=True)
    d = dsub.add_parser("cavity", help="hidden squeezing behind a detuned lossy cavity")
    d.add_argument("--R", type=float, default=0.9)
    d.add_argument("--phi0", type=float, default=0.3)
    d.add_argument("--tau-rt", type=float, default=1.0)
    d.add_argument("--r", type=float, default=1.0)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--sdm-out")
    d.add_argument("-o", "--output", default="-")
    _add_grid(d)
    d.set_defaults(func=demo_cavity)
    d = dsub.add_parser("oscillator", help="feedback oscillator bound saturation")
    d.add_argument("--eta", type=float, default=0.5)
    d.add_argument("--tau", type=float, default=1.0)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("-o", "--output", default="-")
    _add_grid(d)
    d.set_defaults(func=demo_oscillator)
    d = dsub.add_parser("two-mode", help="two-mode sideband-asymmetry generator")
    d.add_argument("--r1", type=float, default=0.5)
    d.add_argument("--r2", type=float, default=1.0)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--sdm-out")
    d.add_argument("-o", "--output", default="-")
    d.set_defaults(func=demo_two_mode)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"qlti: input error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GuardError as exc:
        print(f"qlti: guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"qlti: numerical failure: {exc}", file=sys.stderr)
        failures = getattr(exc, "failures", None)
        if failures:
            _report_failures(failures, None)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError) as exc:
        print(f"qlti: input error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    raise SystemExit(main())
