"""Command-line front end.

    bandlab <task> --config run.json --out results/ [--threads n]

Tasks: bands, surfaces, sectors, perturb, normalform, tb-lieb, deform, validate,
and the canned figure configurations (fig5, fig7 .. fig15, deform-w), for which
--config is optional and may only override numerical settings.

Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 potential not admissible
(validate only).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .hamiltonian import (NumericalError, assemble, band_structure, cluster_values,
                          default_cluster_tol, eigensolve, make_basis, surfaces_on_grid)
from .lattice_bz import M_POINT, build_orbit_table, standard_path
from .normal_form import effective_mass_tensor, fit_from_potential, resolvent_coefficients
from .perturbation import (ORDER_SEQUENCES, deformation_splitting, first_order, leading_coefficients,
                           leading_coefficients_unit, ordering_case, vertex_coefficients)
from .potential import (FourierPotential, from_bump_lattice, from_coefficients, from_cosine_modes,
                        from_gaussian_lattice, from_samples, validate_admissible)
from .sectors import SIGMAS, all_sector_spectra, degenerate_pair, sigma_name
from .tight_binding import LIEB_SITES, tb_band_structure, tb_contrast_report

log = logging.getLogger("bandlab")

TASKS = ("bands", "surfaces", "sectors", "perturb", "normalform", "tb-lieb", "deform", "validate")

TOP_KEYS = {"task", "potential", "epsilon", "N", "B", "path_samples", "grid_n", "stencil_radius",
            "method", "deformation", "tol", "contrast", "V0_list"}
POTENTIAL_KEYS = {
    "cosine": {"kind", "modes", "N_V"},
    "gaussian-lattice": {"kind", "centers", "signs", "V0", "sigma", "N_V"},
    "samples-file": {"kind", "path", "N_V"},
    "bump-lattice": {"kind", "centers", "signs", "grid", "radius", "N_V"},
}
DEFAULTS = {"epsilon": 1.0, "N": 12, "B": 5, "path_samples": 31, "grid_n": 20,
            "stencil_radius": 1e-2, "method": "sectors", "tol": 1e-8}

SQUARE_SITES = ((0.5, 0.25), (0.25, 0.5), (0.75, 0.5), (0.5, 0.75))


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------- formatting

def fmt(x) -> str:
    return format(float(x), ".17g")


def _to_text(obj, indent=0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_to_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_to_text(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _to_text(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        return _to_text([obj.real, obj.imag])
    return json.dumps(str(obj))


def write_json(path: Path, obj) -> None:
    path.write_text(_to_text(obj) + "\n")


def write_bands_csv(path: Path, bs) -> None:
    B = bs.bands.shape[1]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["s", "k1", "k2"] + [f"mu_{b + 1}" for b in range(B)])
        for s, k, row in zip(bs.s, bs.k, bs.bands):
            wr.writerow([fmt(s), fmt(k[0]), fmt(k[1])] + [fmt(v) for v in row])


# ---------------------------------------------------------------- config

def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ConfigError(f"{where}: missing key {key!r}")
    return d[key]


def _pairs(x, where: str):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError(f"{where}: expected a list of [x1, x2] points")
    return arr


def build_potential(block: dict, N: int, base_dir: Path = Path(".")) -> FourierPotential:
    if not isinstance(block, dict):
        raise ConfigError("potential must be an object")
    kind = _require(block, "kind", "potential")
    if kind not in POTENTIAL_KEYS:
        raise ConfigError(f"potential: unknown kind {kind!r} (expected one of {sorted(POTENTIAL_KEYS)})")
    extra = set(block) - POTENTIAL_KEYS[kind]
    if extra:
        raise ConfigError(f"potential ({kind}): unknown keys {sorted(extra)}")
    N_V = int(block.get("N_V", 2 * N + 1))
    try:
        if kind == "cosine":
            modes = [((int(m[0]), int(m[1])), float(a)) for m, a in _require(block, "modes", "potential")]
            return from_cosine_modes(modes, block.get("N_V"))
        if kind == "gaussian-lattice":
            centers = _pairs(_require(block, "centers", "potential"), "potential.centers")
            return from_gaussian_lattice(centers, _require(block, "signs", "potential"),
                                         float(_require(block, "V0", "potential")),
                                         float(_require(block, "sigma", "potential")), N_V)
        if kind == "bump-lattice":
            centers = _pairs(_require(block, "centers", "potential"), "potential.centers")
            return from_bump_lattice(centers, _require(block, "signs", "potential"), N_V,
                                     int(block.get("grid", 512)), float(block.get("radius", 0.2)))
        path = base_dir / _require(block, "path", "potential")
        return from_samples(read_samples_csv(path), N_V, f"samples {path.name}")
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError, IndexError, OSError) as exc:
        raise ConfigError(f"potential ({kind}): {exc}") from exc


def read_samples_csv(path: Path) -> np.ndarray:
    """CSV of n^2 rows (x1, x2, value) on the grid x = (i/n, j/n); a header row is allowed."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec:
                continue
            try:
                rows.append([float(v) for v in rec[:3]])
            except ValueError:
                if rows:
                    raise
    data = np.asarray(rows, float)
    n = int(round(math.sqrt(len(data))))
    if n * n != len(data) or data.shape[1] != 3:
        raise ValueError(f"{path}: expected n^2 rows of (x1, x2, value), got {len(data)}")
    grid = np.full((n, n), np.nan)
    i = np.rint(np.mod(data[:, 0], 1.0) * n).astype(int) % n
    j = np.rint(np.mod(data[:, 1], 1.0) * n).astype(int) % n
    grid[i, j] = data[:, 2]
    if np.isnan(grid).any():
        raise ValueError(f"{path}: samples do not cover the {n}x{n} grid")
    return grid


def load_config(path: Path | None, task: str) -> dict:
    cfg = {}
    if path is not None:
        try:
            cfg = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    extra = set(cfg) - TOP_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    if "task" in cfg and cfg["task"] != task:
        raise ConfigError(f"config task {cfg['task']!r} does not match command {task!r}")
    out = dict(DEFAULTS)
    out.update(cfg)
    for key in ("N", "B", "path_samples", "grid_n"):
        if not isinstance(out[key], int) or out[key] < 1:
            raise ConfigError(f"{key} must be a positive integer")
    if isinstance(out["epsilon"], bool) or not isinstance(out["epsilon"], (int, float)):
        raise ConfigError("epsilon must be a number")
    if out["method"] not in ("sectors", "dense"):
        raise ConfigError("method must be 'sectors' or 'dense'")
    return out


# ---------------------------------------------------------------- figures

def _bump(centers, signs):
    return {"kind": "bump-lattice", "centers": [list(c) for c in centers], "signs": list(signs)}


FIGURES = {
    "fig5": {"potential": {"kind": "cosine", "modes": []}, "epsilon": 0.0},
    "fig7": {"potential": _bump(LIEB_SITES, (1, -1, -1)), "epsilon": 2.0},
    "fig8": {"potential": _bump(LIEB_SITES, (-1, 1, 1)), "epsilon": 2.0},
    "fig9": {"potential": _bump(LIEB_SITES, (-1, -1, -1)), "epsilon": 4.0},
    "fig10": {"potential": _bump([(0.5, 0.5)], (-1,)), "epsilon": 2.0},
    "fig11": {"potential": _bump(LIEB_SITES, (1, -1, -1)), "epsilon": 2.0},
    "fig12": {"potential": _bump(SQUARE_SITES, (1, 1, 1, 1)), "epsilon": 2.0},
    "deform-w": {"potential": _bump(LIEB_SITES, (-1, -1, -1)), "epsilon": 4.0,
                 "deformation": {"W": {"kind": "cosine", "modes": []}, "eta": 1e-3}},
}
# deep-well families, one run per depth
GAUSSIAN_FIGURES = {"fig13": "lieb", "fig14": "square", "fig15": "twisted"}
GAUSSIAN_V0 = (10.0, 100.0, 500.0, 1000.0, 2000.0)
GAUSSIAN_SIGMA = 1e-3
FIGURE_OVERRIDES = {"N", "B", "path_samples", "V0_list"}


def gaussian_family_potential(family: str, V0: float, N_V: int) -> FourierPotential:
    if family == "lieb":
        return from_gaussian_lattice(LIEB_SITES, (-1, -1, -1), V0, GAUSSIAN_SIGMA, N_V)
    if family == "square":
        return from_gaussian_lattice([(0.0, 0.0)], (-1,), V0, GAUSSIAN_SIGMA, N_V)
    # -V0 (cos 2pi(x1 + 2 x2) + cos 2pi(2 x1 - x2)): admissible, not reflection invariant
    return from_cosine_modes([((1, 2), -V0 / 2.0)], N_V)


def deform_w0() -> FourierPotential:
    """W0(x) = 2 cos(2 pi (x1 + x2))."""
    return from_coefficients({(1, 1): 1.0, (-1, -1): 1.0}, 1, "2cos(2pi(x1+x2))")


# ---------------------------------------------------------------- tasks

def observed_ordering(spectra) -> dict:
    """Order of the lowest +1, -1 and +-i levels at M, and where the +-i pair sits."""
    low = {sigma_name(s): float(spectra[s].eigenvalues[0]) for s in SIGMAS}
    vals = {"S": 0.5 * (low["+i"] + low["-i"]), "+1": low["+1"], "-1": low["-1"]}
    seq = tuple(sorted(vals, key=vals.get))
    label = next((k for k, v in ORDER_SEQUENCES.items() if v == seq), "none")
    union = np.sort(np.concatenate([spectra[s].eigenvalues for s in SIGMAS]))
    pair_bands = [int(i) + 1 for i in np.flatnonzero(np.abs(union - low["+i"]) <= default_cluster_tol(low["+i"]))]
    return {"sequence": list(seq), "matches_row": label, "lowest": low,
            "pair_gap": abs(low["+i"] - low["-i"]), "touching_bands": pair_bands}


def run_sectors(V, cfg) -> tuple[dict, list[str]]:
    table = build_orbit_table(cfg["N"])
    spectra = all_sector_spectra(V, cfg["epsilon"], table, min(cfg["B"], len(table.representatives)))
    obs = observed_ordering(spectra)
    union = np.concatenate([spectra[s].eigenvalues for s in SIGMAS])
    out = {
        "epsilon": cfg["epsilon"], "N": cfg["N"],
        "sectors": [spectra[s].to_json() for s in SIGMAS],
        "clusters": [[v, m] for v, m in cluster_values(union)],
        "observed": obs,
    }
    lines = [f"sector spectra at M (eps={cfg['epsilon']}, N={cfg['N']})"]
    for s in SIGMAS:
        lines.append(f"  {sigma_name(s):>3}: " + " ".join(fmt(x) for x in spectra[s].eigenvalues))
    lines.append(f"  ordering (low to high): {' < '.join(obs['sequence'])}"
                 f"  [row {obs['matches_row']}]  +-i pair in bands {obs['touching_bands']}")
    return out, lines


def run_perturb(V, cfg) -> tuple[dict, list[str]]:
    eps = cfg["epsilon"]
    pred = first_order(V, eps)
    case = ordering_case(V)
    V00, V01, V11 = vertex_coefficients(V)
    out = {
        "epsilon": eps, "V00": V00, "V01": V01, "V11": V11,
        "first_order": {"mu_S": pred.mu_S, "mu_plus1": pred.mu_plus1, "mu_minus1": pred.mu_minus1,
                        "nondegenerate": pred.nondegenerate, "sequence": list(pred.sequence())},
        "ordering_case": {"label": case.label, "ordering": case.ordering},
    }
    if pred.nondegenerate and eps != 0:
        a, b, g = leading_coefficients(V, eps)
        au, bu, gu = leading_coefficients_unit(V, eps)
        out["leading_coefficients"] = {"alpha": a, "beta": b, "gamma": g}
        out["leading_coefficients_unit_norm"] = {"alpha": au, "beta": bu, "gamma": gu}
    lines = [f"first-order at M (eps={eps}): V00={fmt(V00)} V01={fmt(V01)} V11={fmt(V11)}",
             f"  mu_S={fmt(pred.mu_S)} mu_+1={fmt(pred.mu_plus1)} mu_-1={fmt(pred.mu_minus1)}",
             f"  ordering case {case.label}: {case.ordering}"]
    return out, lines


def run_normalform(V, cfg) -> tuple[dict, list[str]]:
    eps, N = cfg["epsilon"], cfg["N"]
    basis = make_basis(N)
    A, nf = resolvent_coefficients(V, eps, basis, method=cfg["method"])
    out = {"epsilon": eps, "N": N, "resolvent": nf.to_json()}
    out["resolvent"]["re_gamma_conj_beta"] = nf.re_gamma_conj_beta
    T = effective_mass_tensor(A)
    out["effective_mass_tensor"] = [[[[T.upsilon[p, q, r, s] for s in range(2)] for r in range(2)]
                                     for q in range(2)] for p in range(2)]
    lines = [f"normal form at M (eps={eps}, N={N}): mu_S={fmt(nf.mu_S)}",
             f"  resolvent alpha={fmt(nf.alpha)} |beta|={fmt(abs(nf.beta))} |gamma|={fmt(abs(nf.gamma))}"]
    try:
        fit = fit_from_potential(V, eps, cfg["stencil_radius"], basis, mu_S=nf.mu_S, threads=cfg["threads"])
        out["fit"] = fit.to_json()
        out["fit"]["re_gamma_conj_beta"] = fit.re_gamma_conj_beta
        out["relative_difference"] = {
            "alpha": abs(fit.alpha - nf.alpha) / max(abs(nf.alpha), 1e-300),
            "beta_abs": abs(abs(fit.beta) - abs(nf.beta)) / max(abs(nf.beta), 1e-300),
            "gamma_abs": abs(abs(fit.gamma) - abs(nf.gamma)) / max(abs(nf.gamma), 1e-300),
        }
        lines.append(f"  fit       alpha={fmt(fit.alpha)} |beta|={fmt(abs(fit.beta))} "
                     f"|gamma|={fmt(abs(fit.gamma))} residual={fit.fit_residual:.3e}")
    except NumericalError as exc:
        out["fit"] = {"rejected": str(exc)}
        lines.append(f"  fit rejected: {exc}")
    return out, lines


def run_deform(V, cfg, base_dir: Path) -> tuple[dict, list[str]]:
    block = cfg.get("deformation")
    if not isinstance(block, dict) or set(block) - {"W", "eta"}:
        raise ConfigError("deformation must be an object with keys 'W' and 'eta'")
    eta = float(_require(block, "eta", "deformation"))
    W = _require(block, "W", "deformation")
    if isinstance(W, dict) and W.get("kind") == "cosine" and not W.get("modes"):
        W = deform_w0()  # empty cosine mode list stands for the default 2 cos(2 pi (x1 + x2))
    else:
        W = build_potential(W, cfg["N"], base_dir)
    eps, N = cfg["epsilon"], cfg["N"]
    basis = make_basis(N)
    mu_S, phi1, phi2 = degenerate_pair(V, eps, build_orbit_table(N), basis)
    nu_p, nu_m, diag, off = deformation_splitting(phi1, phi2, W, eta, basis.indices, mu_S)
    total = V.scaled(eps) + W.scaled(eta)
    w, _ = eigensolve(assemble(total, 1.0, M_POINT, basis), vectors=False)
    near = np.sort(w[np.argsort(np.abs(w - mu_S))[:2]])
    gap = float(near[1] - near[0])
    out = {
        "epsilon": eps, "eta": eta, "N": N, "mu_S": mu_S,
        "W_admissible": validate_admissible(W).admissible,
        "predicted": {"nu_plus": nu_p, "nu_minus": nu_m, "diag": diag, "offdiag_abs": off,
                      "gap": nu_p - nu_m},
        "computed": {"pair": [float(near[0]), float(near[1])], "gap": gap, "gap_over_eta": gap / eta if eta else None},
        "cluster_tol": default_cluster_tol(mu_S),
    }
    lines = [f"deformation at M (eps={eps}, eta={eta}): mu_S={fmt(mu_S)}",
             f"  predicted gap {fmt(nu_p - nu_m)}, computed gap {fmt(gap)}"]
    return out, lines


def run_validate(V, cfg) -> tuple[dict, list[str], bool]:
    rep = validate_admissible(V, cfg["tol"])
    out = {"real": rep.is_real, "even": rep.is_even, "rotation_invariant": rep.is_rotation_invariant,
           "reflection_invariant": rep.is_reflection_invariant, "admissible": rep.admissible,
           "max_violation": rep.max_violation, "tol": cfg["tol"]}
    lines = [f"admissible: {rep.admissible} (real={rep.is_real}, even={rep.is_even}, "
             f"rotation={rep.is_rotation_invariant}); reflection-invariant: {rep.is_reflection_invariant}"]
    lines += [f"  max {k} violation {fmt(v)}" for k, v in rep.max_violation.items()]
    return out, lines, rep.admissible


def run_tb(cfg, out_dir: Path) -> list[str]:
    path = standard_path(cfg["path_samples"])
    with open(out_dir / "tb.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["s", "k1", "k2", "E_minus", "E_zero", "E_plus"])
        for s, b in zip(path.arclength, tb_band_structure(path)):
            wr.writerow([fmt(s), fmt(b.k[0]), fmt(b.k[1]), fmt(b.E_minus), fmt(b.E_zero), fmt(b.E_plus)])
    lines = [f"tight-binding Lieb bands along Gamma-X-M-Gamma ({len(path.points)} points)"]
    contrast = cfg.get("contrast")
    if contrast is not None:
        if not isinstance(contrast, dict) or set(contrast) - {"V0", "sigma", "N", "fit"}:
            raise ConfigError("contrast must be an object with keys among V0, sigma, N, fit")
        rep = tb_contrast_report(contrast.get("V0", list(GAUSSIAN_V0)), contrast.get("sigma", GAUSSIAN_SIGMA),
                                 contrast.get("N", 14), fit=contrast.get("fit", True))
        write_json(out_dir / "tb_contrast.json", rep)
        for r in rep:
            lines.append(f"  V0={fmt(r['V0'])}: pair size {r['pair_size']}, gap to third "
                         f"{fmt(r['gap_pair_to_third'])}, rescaled spread {fmt(r['rescaled_spread'])}")
    return lines


def execute(task: str, cfg: dict, out_dir: Path, base_dir: Path = Path(".")) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = [f"task: {task}"]
    status = 0
    if task == "tb-lieb":
        report += run_tb(cfg, out_dir)
        (out_dir / "report.txt").write_text("\n".join(report) + "\n")
        return 0
    if "potential" not in cfg:
        raise ConfigError("missing key 'potential'")
    V = build_potential(cfg["potential"], cfg["N"], base_dir)
    report.append(f"potential: {V.metadata}")
    eps = float(cfg["epsilon"])
    cfg["epsilon"] = eps
    if task != "validate":
        sym = validate_admissible(V, cfg["tol"])
        if not sym.admissible:
            log.warning("potential is not admissible: %s", sym.max_violation)
            report.append("warning: potential is not admissible")
    if task == "bands":
        bs = band_structure(V, eps, standard_path(cfg["path_samples"]), cfg["B"], cfg["N"], cfg["threads"])
        write_bands_csv(out_dir / "bands.csv", bs)
        report.append(f"bands: {len(bs.k)} k-points, B={cfg['B']}, N={cfg['N']}")
    elif task == "surfaces":
        bs = surfaces_on_grid(V, eps, cfg["grid_n"], cfg["B"], cfg["N"], cfg["threads"])
        write_bands_csv(out_dir / "bands.csv", bs)
        report.append(f"surfaces: {bs.grid_shape[0]}x{bs.grid_shape[1]} grid, B={cfg['B']}, N={cfg['N']}")
    elif task == "sectors":
        out, lines = run_sectors(V, cfg)
        write_json(out_dir / "sectors.json", out)
        report += lines
    elif task == "perturb":
        out, lines = run_perturb(V, cfg)
        write_json(out_dir / "prediction.json", out)
        report += lines
    elif task == "normalform":
        out, lines = run_normalform(V, cfg)
        write_json(out_dir / "normalform.json", out)
        report += lines
    elif task == "deform":
        out, lines = run_deform(V, cfg, base_dir)
        write_json(out_dir / "deform.json", out)
        report += lines
    elif task == "validate":
        out, lines, ok = run_validate(V, cfg)
        write_json(out_dir / "validate.json", out)
        report += lines
        status = 0 if ok else 3
    (out_dir / "report.txt").write_text("\n".join(report) + "\n")
    return status


def reproduce_figure(name: str, out_dir: Path, overrides: dict | None = None, threads: int = 1) -> int:
    """Band data, sector spectra and first-order prediction for a named figure configuration."""
    overrides = dict(overrides or {})
    extra = set(overrides) - FIGURE_OVERRIDES - {"task"}
    if extra:
        raise ConfigError(f"figure runs only accept overrides of {sorted(FIGURE_OVERRIDES)}, got {sorted(extra)}")
    overrides.pop("task", None)
    cfg = dict(DEFAULTS, threads=threads)
    if name in GAUSSIAN_FIGURES:
        cfg.update({"epsilon": 1.0, "N": 14, "B": 5})
        cfg.update(overrides)
        family = GAUSSIAN_FIGURES[name]
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = [f"figure {name}: {family} Gaussian family, sigma={GAUSSIAN_SIGMA}"]
        for V0 in cfg.get("V0_list", GAUSSIAN_V0):
            sub = out_dir / f"V0_{fmt(V0)}"
            sub.mkdir(exist_ok=True)
            V = gaussian_family_potential(family, float(V0), 2 * cfg["N"] + 1)
            _figure_bundle(V, cfg, sub, lines, f"V0={fmt(V0)}")
        (out_dir / "report.txt").write_text("\n".join(lines) + "\n")
        return 0
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}")
    fig = FIGURES[name]
    cfg.update(fig)
    cfg.update(overrides)
    out_dir.mkdir(parents=True, exist_ok=True)
    V = build_potential(cfg["potential"], cfg["N"])
    lines = [f"figure {name}: {V.metadata}, eps={cfg['epsilon']}"]
    _figure_bundle(V, cfg, out_dir, lines, name)
    if "deformation" in cfg:
        out, more = run_deform(V, cfg, Path("."))
        write_json(out_dir / "deform.json", out)
        lines += more
        total = V.scaled(cfg["epsilon"]) + deform_w0().scaled(out["eta"])
        bs = band_structure(total, 1.0, standard_path(cfg["path_samples"]), cfg["B"], cfg["N"], threads)
        write_bands_csv(out_dir / "bands_deformed.csv", bs)
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")
    return 0


def _figure_bundle(V, cfg, out_dir: Path, lines: list, tag: str) -> None:
    bs = band_structure(V, cfg["epsilon"], standard_path(cfg["path_samples"]), cfg["B"], cfg["N"],
                        cfg.get("threads", 1))
    write_bands_csv(out_dir / "bands.csv", bs)
    sec, sl = run_sectors(V, cfg)
    write_json(out_dir / "sectors.json", sec)
    pred, pl = run_perturb(V, cfg)
    pred["observed"] = sec["observed"]
    write_json(out_dir / "prediction.json", pred)
    lines.append(f"[{tag}]")
    lines += sl + pl


# ---------------------------------------------------------------- entry point

FIGURE_NAMES = tuple(FIGURES) + tuple(GAUSSIAN_FIGURES)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bandlab", description=__doc__.split("\n")[0])
    ap.add_argument("task", choices=TASKS + FIGURE_NAMES)
    ap.add_argument("--config", type=Path, default=None, help="JSON run configuration")
    ap.add_argument("--out", type=Path, required=True, help="output directory")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.task in FIGURE_NAMES:
            overrides = {}
            if args.config is not None:
                try:
                    overrides = json.loads(args.config.read_text())
                except (OSError, json.JSONDecodeError) as exc:
                    raise ConfigError(f"cannot read config: {exc}") from exc
            return reproduce_figure(args.task, args.out, overrides, args.threads)
        if args.config is None:
            raise ConfigError("--config is required for this task")
        cfg = load_config(args.config, args.task)
        cfg["threads"] = max(1, args.threads)
        return execute(args.task, cfg, args.out, args.config.parent)
    except ConfigError as exc:
        print(f"bandlab: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"bandlab: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
