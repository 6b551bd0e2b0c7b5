"""Command-line front end: verification runs with JSON reports and CSV artifacts.

Every subcommand writes a report
``{schema, command, params, seed, checks, artifacts, data}`` and exits with
0 when all checks pass, 1 on a numeric failure and 2 on a configuration
error.  Complex numbers are written ``re+imi`` on the command line and in
config files.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from . import algebra, braiding, connections, fock, transport
from .algebra import DomainError
from .serialize import CACHE_ENV, OperatorCache, operator_to_json, to_jsonable
from .solutions import appendix, contours, integrals, master
from .solutions.bethe import bethe as find_bethe_vectors

SCHEMA = 1


class ConfigError(Exception):
    """Invalid flags or configuration file."""


def parse_complex(text) -> complex:
    """Parse ``"0.7+0.3i"``, ``"-2i"`` or ``"1.5"`` (a ``j`` suffix also works)."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j").replace("I", "j"))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def format_complex(z) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def parse_ints(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def parse_complex_list(text) -> np.ndarray | None:
    if text is None:
        return None
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    return np.array([parse_complex(x) for x in items])


class Report:
    def __init__(self, command, params, seed):
        self.command, self.params, self.seed = command, params, seed
        self.checks, self.artifacts, self.data = [], [], {}

    def check(self, name, value, tolerance, passed=None, mode="lt"):
        """Record a check; by default it passes when ``value < tolerance``."""
        value = float(value) if np.isscalar(value) else value
        if passed is None:
            passed = value < tolerance if mode == "lt" else value > tolerance
        self.checks.append({"name": name, "value": value, "tolerance": tolerance,
                            "pass": bool(passed)})

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def as_dict(self) -> dict:
        return to_jsonable({"schema": SCHEMA, "command": self.command, "params": self.params,
                            "seed": self.seed, "checks": self.checks,
                            "artifacts": self.artifacts, "data": self.data})


class Context:
    def __init__(self, args, report):
        self.args, self.report = args, report
        self.rng = np.random.default_rng(args.seed)
        root = os.environ.get(CACHE_ENV) or args.cache_dir
        self.cache = OperatorCache(root)
        self.outdir = Path(args.artifacts_dir) if args.artifacts_dir else None

    def write_csv(self, name, header, rows):
        if self.outdir is None:
            return
        self.outdir.mkdir(parents=True, exist_ok=True)
        path = self.outdir / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([format_complex(x) if isinstance(x, (complex, np.complexfloating))
                            else x for x in r])
        self.report.artifacts.append(str(path))

    def write_json(self, name, doc):
        if self.outdir is None:
            return
        self.outdir.mkdir(parents=True, exist_ok=True)
        path = self.outdir / name
        path.write_text(json.dumps(to_jsonable(doc), indent=1))
        self.report.artifacts.append(str(path))


# ---------------------------------------------------------------------------
# model helpers
# ---------------------------------------------------------------------------

_MODEL_ALIASES = {"kz_gl": "symmetric", "symmetric": "symmetric", "gl": "symmetric",
                  "kz_o": "matching", "matching": "matching", "o": "matching"}


def _space(args):
    model = _MODEL_ALIASES.get(args.model)
    t = parse_complex(args.t)
    if model == "symmetric":
        return algebra.sym_model(args.m, t, parse_complex(args.hbar))
    if model == "matching":
        return algebra.matching_model(args.n, t, parse_complex(args.hbar))
    raise ConfigError(f"model {args.model!r} has no diagram model")


def _int_t(args) -> int:
    t = parse_complex(args.t)
    if t.imag != 0 or t.real != int(t.real) or t.real < 1:
        raise ConfigError(f"Fock models need a positive integer t, got {args.t!r}")
    return int(t.real)


def _fock_connection(args, ctx, kind, hbar):
    t = _int_t(args)
    if kind == "kappa":
        sp = fock.fock_space(t, args.d)
        ops = {(i, j): fock.kappa(sp, i, j).dense()
               for i, j in itertools.combinations(range(1, args.d + 1), 2)}
        return connections.make_connection("kappa", ops, hbar, dim_base=args.d), sp.dim
    if kind == "dynamical":
        d = args.m + args.n
        sp = fock.fock_space(t, d)
        sub = fock.weight_subspace(sp, fock.WeightPair(None, (t - 1,) * args.m + (1,) * args.n))
        ops = {}
        for i, j in itertools.combinations(range(1, d + 1), 2):
            key = {"op": "truncated_casimir", "t": t, "d": d, "m": args.m, "n": args.n, "pair": [i, j]}
            ops[i, j] = ctx.cache.get_or_build(key, lambda: fock.truncated_casimir(sp, sub, i, j).matrix)
        return connections.make_connection("dynamical", ops, hbar, dim_base=d), sub.dim
    if kind == "dual_so":
        sp = fock.fock_space(t, args.n)
        sub = fock.so_weight_subspace(sp, (1 - t / 2,) * args.n)
        ops = {}
        for a, b in itertools.combinations(range(1, args.n + 1), 2):
            key = {"op": "so_dual", "t": t, "n": args.n, "pair": [a, b]}
            ops[a, b] = ctx.cache.get_or_build(key, lambda: fock.so_dual_coefficient(sp, sub, a, b).matrix)
        return connections.make_connection("dual_so", ops, hbar, dim_base=args.n), sub.dim
    raise ConfigError(f"unknown connection kind {kind!r}")


def _connection(args, ctx):
    hbar = parse_complex(args.hbar)
    if args.model in ("kz_gl", "kz_o"):
        space = _space(args)
        return connections.make_connection(args.model, space, hbar), space
    spec, _ = _fock_connection(args, ctx, args.model, hbar)
    return spec, None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_casimir(args, ctx):
    space = _space(args)
    i, j = parse_ints(args.pair)
    key = {"op": "casimir", "model": space.model, "m": args.m, "n": args.n,
           "t": format_complex(space.params.t), "pair": [i, j]}
    cold = algebra.casimir(space, i, j).matrix
    cached = ctx.cache.get_or_build(key, lambda: cold, space.labels())
    ctx.report.check("cache_bit_identical", float(not np.array_equal(cached, cold)), 0.5)
    defect = 0.0
    allc = algebra.all_casimirs(space)
    for k in range(1, space.strands + 1):
        if k in (i, j):
            continue
        get = lambda a, b: allc[(min(a, b), max(a, b))]
        C = get(i, j)
        D = get(i, k) + get(j, k)
        defect = max(defect, float(np.abs(C @ D - D @ C).max()))
    ctx.report.check("infinitesimal_braid", defect, 1e-12)
    ctx.report.data.update({"labels": space.labels(), "matrix": cold,
                            "cache": {"hits": ctx.cache.hits, "misses": ctx.cache.misses}})
    ctx.write_json(f"casimir_{space.model}_{i}{j}.json", operator_to_json(cold, space.labels()))


def cmd_flatness(args, ctx):
    spec, _ = _connection(args, ctx)
    res = connections.flatness_check(spec, tol=args.tol, seed=args.seed)
    ctx.report.check("triple_commutator", res["triple"], args.tol)
    ctx.report.check("disjoint_commutator", res["disjoint"], args.tol)
    ctx.report.check("curvature_probe", res["curvature_probe"], res["probe_tolerance"])
    ctx.report.data.update({"dim": spec.dim, "dim_base": spec.dim_base, **res})


def cmd_duality(args, ctx):
    t, d = _int_t(args), args.d
    sp = fock.fock_space(t, d)
    worst = 0.0
    for i, j in itertools.combinations(range(1, d + 1), 2):
        lhs = 2 * fock.omega_fock(sp, i, j).matrix
        rhs = (-fock.kappa(sp, i, j).matrix + fock.glw_generator(sp, i, i).matrix
               + fock.glw_generator(sp, j, j).matrix)
        diff = lhs - rhs
        worst = max(worst, float(abs(diff).max()) if diff.nnz else 0.0)
    ctx.report.check("duality_identity", worst, args.tol)
    ctx.report.data.update({"fock_dim": sp.dim})


def _swap_for(space, i):
    if space.model == "symmetric":
        if i == space.params.m:
            raise ConfigError("half twists act on two V or two dual strands only")
        return algebra.casimir_gl(space, i, i + 1).dense()
    return algebra.permutation_operator(space, i, i + 1).dense()


def cmd_monodromy(args, ctx):
    space = _space(args)
    hbar = parse_complex(args.hbar)
    spec = connections.make_connection(args.model if args.model in ("kz_gl", "kz_o") else
                                       ("kz_gl" if space.model == "symmetric" else "kz_o"),
                                       space, hbar)
    z = parse_complex_list(args.z)
    z = transport.default_basepoint(space.strands) if z is None else z
    if args.half_twist:
        i = int(args.half_twist)
        P = _swap_for(space, i)
        res = transport.monodromy(spec, transport.half_twist(i, z), rtol=args.rtol, swap=P)
        pred = np.linalg.eigvals(P @ sla.expm(1j * np.pi * spec.coefficient(i, i + 1)))
    elif args.full_twist:
        res = transport.monodromy(spec, transport.full_twist(z), rtol=args.rtol)
        total = sum(spec.coefficient(*p) for p in spec.pairs())
        pred = np.exp(2j * np.pi * np.linalg.eigvals(total))
        M = res.matrix.dense()
        for k in range(1, space.strands):
            try:
                P = _swap_for(space, k)
            except ConfigError:
                continue
            Tk = transport.monodromy(spec, transport.half_twist(k, z), rtol=args.rtol, swap=P)
            B = Tk.matrix.dense()
            ctx.report.check(f"full_twist_central_{k}", np.abs(M @ B - B @ M).max(), 1e-8)
    else:
        i, j = parse_ints(args.loop or "1,2")
        res = transport.monodromy(spec, transport.pure_braid_loop(i, j, z), rtol=args.rtol)
        pred = transport.local_exponents(spec, min(i, j), max(i, j))["eigenvalues"]
        if space.model == "symmetric" and space.params.m == 1 and space.dim == 1:
            closed = np.exp(-2j * np.pi * hbar * space.params.t)
            ctx.report.check("closed_form", abs(res.matrix.dense()[0, 0] - closed), 1e-8)
    M = res.matrix.dense()
    eig = np.linalg.eigvals(M)
    ctx.report.check("spectrum", braiding.eigen_distance(eig, pred), 1e-6)
    ctx.report.data.update({"word": res.braid_word, "matrix": M, "eigenvalues": eig,
                            "predicted": pred, "condition": res.condition, "stats": res.stats})
    ctx.write_csv("monodromy.csv", ["row", "col", "value"],
                  [(r, c, M[r, c]) for r in range(M.shape[0]) for c in range(M.shape[1])])


def cmd_dk_compare(args, ctx):
    m, k = args.m, args.strand
    t, hbar = parse_complex(args.t), parse_complex(args.hbar)
    space = algebra.sym_model(m, t, hbar)
    spec = connections.make_connection("kz_gl", space, hbar)
    z = transport.default_basepoint(space.strands)
    P = _swap_for(space, k)
    mono = transport.monodromy(spec, transport.half_twist(k, z), swap=P)
    q = np.exp(1j * np.pi * hbar)
    # within a block the local generator index is the position inside the block
    gen = (k - 1) % m
    T = braiding.hecke_generators(m, braiding.HeckeParams(q))[gen]
    res = braiding.dk_compare(mono, T)
    q_bad = q * np.exp(1j * args.q_phase)
    ctl = braiding.dk_compare(mono, braiding.hecke_generators(m, braiding.HeckeParams(q_bad))[gen])
    ctx.report.check("charpoly_deviation", res["deviation"], args.tol)
    ctx.report.check("negative_control", ctl["deviation"], 1e-2, mode="gt")
    ctx.report.data.update({"q": q, "scalar": res["scalar"], "charpoly_kz": res["charpoly_kz"],
                            "charpoly_quantum": res["charpoly_quantum"],
                            "eigen_distance": res["eigen_distance"],
                            "control_deviation": ctl["deviation"], "q_phase": args.q_phase,
                            "strands": [k, k + 1]})


def _four_point_samples(rng, count):
    pts = []
    while len(pts) < count:
        z = connections.generic_base_point(rng, 4, scale=2.0, min_gap=0.3)
        try:
            appendix.appendix_section(z, 0.3, 1.1, 1, 0)
        except DomainError:
            continue
        x = appendix.cross_ratio(z)
        if abs(x - 1) > 0.05 and abs(x) > 0.05:
            pts.append(z)
    return pts


def cmd_appendix_check(args, ctx):
    hbar, t = parse_complex(args.hbar), parse_complex(args.t)
    pts = _four_point_samples(ctx.rng, args.points)
    rows = []
    worst_disp, worst_kz = 0.0, 0.0
    for (c1, c2), z in itertools.product(((1, 0), (0, 1)), pts):
        disp = max(appendix.displayed_residual(z, hbar, t, c1, c2, perm) for perm in appendix.SYMMETRIES)
        kz = max(appendix.kz_residuals(z, hbar, t, c1, c2))
        worst_disp, worst_kz = max(worst_disp, disp), max(worst_kz, kz)
        rows.append([c1, c2, *z, disp, kz])
    ctx.report.check("displayed_system", worst_disp, args.tol)
    ctx.report.check("kz_system", worst_kz, args.tol)
    ctx.write_csv("appendix_residuals.csv", ["c1", "c2", "z1", "z2", "z3", "z4", "displayed", "kz"], rows)


def _ordering(text):
    if text in integrals.FOUR_POINT_ORDERINGS:
        return integrals.FOUR_POINT_ORDERINGS[text]
    return parse_ints(text)


def cmd_integral_solution(args, ctx):
    hbar, t = parse_complex(args.hbar), parse_complex(args.t)
    m = args.m
    data = master.empty_sector_data(m, t, hbar)
    if m == 1:
        table = master.derived_table(1, 2)
    else:
        table = master.verbatim_table() if args.table == "verbatim" else master.derived_table(m, 3)
    z0 = parse_complex_list(args.z)
    if z0 is None:
        z0 = np.arange(2 * m) * 2.0 + 0.1j * np.cos(np.arange(2 * m) * 1.7)
    spec = connections.make_connection("kz_gl", algebra.sym_model(m, t), hbar)
    orderings = [_ordering(x) for x in args.l] if args.l else list(integrals.FOUR_POINT_ORDERINGS.values())
    include = not args.bare_integrand
    cols, rows = [], []
    for l in orderings:
        def section(z, l=l):
            r = integrals.integral_solution(l, z, data, table, include_single=include, derivatives=True)
            return r.u, r.du
        u = integrals.integral_solution(l, z0, data, table, include_single=include)
        cols.append(u.u)
        ctx.report.check(f"tail_{''.join(map(str, l))}", u.tail, 1e-8)
        rows.append([",".join(map(str, l)), *z0, *u.u])
        if args.fit:
            fit = connections.central_fit(section, spec, z0, with_derivative=True, seed=args.seed)
            ctx.report.check(f"fit_residual_{''.join(map(str, l))}", fit["residual"], args.tol)
            ctx.report.data.setdefault("fits", []).append(
                {"l": l, "exponents_over_hbar": {f"{i}{j}": e / hbar for (i, j), e in fit["exponents"].items()},
                 "residual": fit["residual"], "rank": fit["rank"]})
    U = np.array(cols).T
    sv = np.linalg.svd(U, compute_uv=False)
    if U.shape[1] > 1:
        ctx.report.check("independence_sigma_min", sv.min(), 1e-6, mode="gt")
    ctx.report.data.update({"u": U, "singular_values": sv, "table": table.source,
                            "include_single": include})
    ctx.write_csv("integral_solution.csv",
                  ["l"] + [f"z{k + 1}" for k in range(len(z0))] + [f"u{k + 1}" for k in range(U.shape[0])],
                  rows)


def cmd_residue_check(args, ctx):
    mbar = args.mbar
    l = parse_ints(args.l) if args.l else tuple(range(1, mbar + 1))
    zp = parse_complex_list(args.zprime)
    if zp is None:
        zp = np.arange(mbar + 1) * 1.0 + 0.2j * np.sin(np.arange(mbar + 1))
    if args.sigma:
        sigmas = [parse_ints(args.sigma)]
    else:
        sigmas = contours.all_orderings(mbar)
        if args.samples and args.samples < len(sigmas):
            # always keep the one sigma with a nonzero target
            hit = [s for s in sigmas if contours.residue_target(l, s) != 0]
            rest = [s for s in sigmas if contours.residue_target(l, s) == 0]
            pick = ctx.rng.choice(len(rest), size=args.samples - len(hit), replace=False)
            sigmas = hit + [rest[k] for k in sorted(pick)]
    scale = (2 * np.pi) ** mbar
    rows, worst = [], 0.0
    for s in sigmas:
        val = contours.residue_limit_check(l, s, zp)
        tgt = contours.residue_target(l, s)
        err = abs(val - tgt) / scale
        worst = max(worst, err)
        rows.append([",".join(map(str, s)), val, tgt, err])
    ctx.report.check("residue_limit", worst, args.tol)
    ctx.report.data.update({"l": l, "values": [{"sigma": r[0], "value": r[1], "target": r[2]} for r in rows]})
    ctx.write_csv("residue_check.csv", ["sigma", "value", "target", "relative_error"], rows)


def cmd_bethe(args, ctx):
    m = args.m
    t, hbar = parse_complex(args.t), parse_complex(args.hbar)
    data = master.empty_sector_data(m, t, hbar)
    table = master.derived_table(1, 2) if m == 1 else master.derived_table(m, 3)
    z = parse_complex_list(args.z)
    if z is None:
        z = connections.generic_base_point(ctx.rng, 2 * m)
    space = algebra.sym_model(m, t)
    res = find_bethe_vectors(z, data, table, space, nseeds=args.seeds, seed=args.seed)
    if res["count"] == 0:
        ctx.report.check("critical_points_found", 0, 1, mode="gt")
    worst = max((p["max_residual"] for p in res["points"]), default=0.0)
    ctx.report.check("eigen_residual", worst, args.tol)
    if m == 1 and res["points"]:
        exact = -t / (z[0] - z[1])
        ctx.report.check("closed_form_point", abs(res["points"][0]["point"][0] - exact), 1e-10)
    ctx.report.data.update({"z": z, "count": res["count"], "failed_seeds": res["failed_seeds"],
                            "points": [{k: p[k] for k in ("point", "hessian_condition", "residuals")}
                                       for p in res["points"]]})
    ctx.write_csv("bethe.csv", ["index"] + [f"t{k + 1}" for k in range(data.mbar)] +
                  ["hessian_condition", "max_residual"],
                  [[k, *p["point"], p["hessian_condition"], p["max_residual"]]
                   for k, p in enumerate(res["points"])])


def cmd_gaudin_scan(args, ctx):
    space = _space(args)
    z = connections.generic_base_point(ctx.rng, space.strands)
    H = [h.dense() for h in algebra.gaudin(space, z)]
    ctx.report.check("sum_zero", np.abs(sum(H)).max(), 1e-12)
    comm = max((np.abs(a @ b - b @ a).max() for a, b in itertools.combinations(H, 2)), default=0.0)
    ctx.report.check("commutators", comm, 1e-10)
    scan = algebra.spectrum_scan(space, args.trials, args.seed)
    need = args.trials - max(1, args.trials // 50)
    ctx.report.check("simple_spectrum_trials", scan["simple_count"], need,
                     passed=scan["simple_count"] >= need)
    ctx.report.data.update({"dim": space.dim, "min_gap": scan["min_gap"],
                            "simple_count": scan["simple_count"], "trials": args.trials})
    ctx.write_csv("gaudin_scan.csv", ["trial", "t", "min_gap", "simple"],
                  [[r["trial"], r["t"], r["min_gap"], r["simple"]] for r in scan["trials"]])


def cmd_so_duality(args, ctx):
    t = _int_t(args)
    res = fock.so_duality(t, args.n)
    ctx.report.check("identity_chain", res["chain_defect"], 1e-12)
    ctx.report.check("dimension_match", abs(res["invariant_dim"] - res["diagram_dim"]), 0.5)
    sv = res["intertwiner_singular_values"]
    if len(sv):
        ctx.report.check("intertwiner_exists", sv.min() / max(1.0, sv.max()), 1e-10)
    ctx.report.data.update(res)


COMMANDS = {
    "casimir": cmd_casimir, "flatness": cmd_flatness, "duality": cmd_duality,
    "monodromy": cmd_monodromy, "dk-compare": cmd_dk_compare,
    "appendix-check": cmd_appendix_check, "integral-solution": cmd_integral_solution,
    "residue-check": cmd_residue_check, "bethe": cmd_bethe, "gaudin-scan": cmd_gaudin_scan,
    "so-duality": cmd_so_duality,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="report path (printed to stdout as well)")
    common.add_argument("--artifacts-dir", help="directory for CSV/JSON artifacts")
    common.add_argument("--cache-dir", help=f"operator cache directory (overridden by ${CACHE_ENV})")
    common.add_argument("--quiet", action="store_true", help="do not print the report")

    def model_opts(p, model="kz_gl", m=2, n=2, t="0.7+0.3i", hbar="0.31", tol=1e-10):
        p.add_argument("--model", default=model)
        p.add_argument("--m", type=int, default=m)
        p.add_argument("--n", type=int, default=n)
        p.add_argument("--t", default=t)
        p.add_argument("--hbar", default=hbar)
        p.add_argument("--tol", type=float, default=tol)

    parser = argparse.ArgumentParser(prog="kzlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("casimir", parents=[common])
    model_opts(p)
    p.add_argument("--pair", default="1,2")
    p = sub.add_parser("flatness", parents=[common])
    model_opts(p)
    p.add_argument("--d", type=int, default=3)
    p = sub.add_parser("duality", parents=[common])
    model_opts(p, t="2", tol=1e-12)
    p.add_argument("--d", type=int, default=3)
    p = sub.add_parser("monodromy", parents=[common])
    model_opts(p, m=1, n=2)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--loop", help="pure braid generator i,j")
    g.add_argument("--half-twist", help="swap strands i and i+1")
    g.add_argument("--full-twist", action="store_true")
    p.add_argument("--z", help="comma-separated base point")
    p.add_argument("--rtol", type=float, default=1e-10)
    p = sub.add_parser("dk-compare", parents=[common])
    model_opts(p, tol=1e-6)
    p.add_argument("--strand", type=int, default=3, help="twist strands k, k+1 of one block")
    p.add_argument("--q-phase", type=float, default=0.1, help="phase of the negative-control q")
    p = sub.add_parser("appendix-check", parents=[common])
    model_opts(p, t="1.37+0.21i", hbar="0.3+0.05i", tol=1e-8)
    p.add_argument("--points", type=int, default=20)
    p = sub.add_parser("integral-solution", parents=[common])
    model_opts(p, t="1.37+0.21i", hbar="0.3+0.05i", tol=1e-5)
    p.add_argument("--l", action="append", help="ordering l (comma list) or l1/l2; repeatable")
    p.add_argument("--z", help="comma-separated base point")
    p.add_argument("--table", choices=["derived", "verbatim"], default="derived")
    p.add_argument("--bare-integrand", action="store_true",
                   help="drop the single-variable factors of the master function")
    p.add_argument("--fit", action="store_true", help="fit the central correction and report it")
    p = sub.add_parser("residue-check", parents=[common])
    p.add_argument("--mbar", type=int, default=2)
    p.add_argument("--l", help="ordering l")
    p.add_argument("--sigma", help="single sigma to evaluate")
    p.add_argument("--samples", type=int, default=0, help="random subset of sigmas")
    p.add_argument("--zprime", help="comma-separated z' points")
    p.add_argument("--tol", type=float, default=1e-6)
    p = sub.add_parser("bethe", parents=[common])
    model_opts(p, t="1.37+0.21i", tol=1e-6)
    p.add_argument("--z", help="comma-separated base point")
    p.add_argument("--seeds", type=int, default=40)
    p = sub.add_parser("gaudin-scan", parents=[common])
    model_opts(p)
    p.add_argument("--trials", type=int, default=50)
    p = sub.add_parser("so-duality", parents=[common])
    model_opts(p, t="3", tol=1e-12)
    return parser


def _apply_config(parser, argv):
    """Parse twice: config values become defaults, explicit flags win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    cfg.pop("command", None)
    known = vars(args)
    unknown = [k for k in cfg if k.replace("-", "_") not in known]
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def run(argv=None) -> tuple[int, dict | None]:
    """Execute one subcommand; returns ``(exit status, report dict)``."""
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return (2 if exc.code else 0), None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2, None
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command", "config", "output", "artifacts_dir", "cache_dir", "quiet", "seed")}
    report = Report(args.command, params, args.seed)
    try:
        COMMANDS[args.command](args, Context(args, report))
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2, None
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        report.check("numeric_error", 1.0, 0.0, passed=False)
        report.data["error"] = str(exc)
    doc = report.as_dict()
    text = json.dumps(doc, indent=1)
    if args.output:
        Path(args.output).write_text(text)
    if not args.quiet:
        print(text)
    for c in doc["checks"]:
        if not c["pass"]:
            print(f"FAIL {c['name']}: {c['value']} (tolerance {c['tolerance']})", file=sys.stderr)
    return (0 if report.passed else 1), doc


def main(argv=None) -> int:
    return run(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
