"""Command-line entry point: ``riemannsum <subcommand> [options]``.

Every run echoes its resolved configuration, writes a header row naming the
columns, and exits with 0 (ok / check passed), 1 (usage error) or 2 (a
numerical check missed its tolerance).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2

SUBCOMMANDS = ("density", "coprime", "ppt", "lehmer", "sector", "equidist", "fermat",
               "iep", "derange", "poisson", "modelset", "spectrum", "primqc", "twisted")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict
    output_format: str = "csv"
    output_path: str | None = None
    seed: int | None = None

    def as_dict(self):
        return {"subcommand": self.subcommand, "parameters": self.parameters,
                "output_format": self.output_format, "output_path": self.output_path,
                "seed": self.seed}


@dataclass
class Result:
    columns: list
    rows: list
    summary: dict = field(default_factory=dict)
    # (passed, expected, actual, tolerance) or None for non-check subcommands
    check: tuple | None = None


# ---------------------------------------------------------------------------
# value formatting

def _fmt(v):
    """12 significant digits for floats, exact text for integers and rationals."""
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(v, (list, tuple)):
        return [_fmt(x) for x in v]
    if isinstance(v, dict):
        return {k: _fmt(x) for k, x in v.items()}
    return v


def _csv_cell(v):
    v = _fmt(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    return str(v)


def render(cfg: RunConfig, res: Result, status: str) -> str:
    if cfg.output_format == "json":
        doc = {"subcommand": cfg.subcommand, "config": _fmt(cfg.as_dict()),
               "columns": res.columns, "rows": [_fmt(list(r)) for r in res.rows],
               "summary": _fmt(res.summary), "status": status}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_fmt(cfg.as_dict()), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(res.columns)
    for r in res.rows:
        w.writerow([_csv_cell(v) for v in r])
    buf.write("# summary: " + json.dumps(_fmt(res.summary), sort_keys=True) + "\n")
    buf.write(f"# status: {status}\n")
    return buf.getvalue()


def _rel(actual, expected):
    return abs(actual - expected) / abs(expected)


def _within(actual, expected, tol):
    return (_rel(actual, expected) <= tol, expected, actual, tol)


# ---------------------------------------------------------------------------
# subcommands

_SETS = {
    "all1": (1, "all"), "all2": (2, "all"), "all3": (3, "all"),
    "prim2": (2, "prim"), "prim3": (3, "prim"), "prim4": (4, "prim"),
    "prim_star": (2, "prim_star"), "odd_prim": (2, "odd_prim"),
}


def _expected_density(dim, kind):
    from .arith import zeta
    if kind == "all":
        return 1.0
    if kind == "prim":
        return 1.0 / zeta(dim)
    return {"prim_star": 4 / math.pi ** 2, "odd_prim": 2 / math.pi ** 2}[kind]


def _test_function(name, dim):
    from .core import ball_indicator, box_indicator, sector_indicator, smooth_bump
    if name == "ball":
        return ball_indicator((0.0,) * dim, 1.0)
    if name == "box":
        return box_indicator((-0.5,) * dim, (0.5,) * dim)
    if name == "bump":
        return smooth_bump((0.0,) * dim, 1.0)
    if name == "sector":
        if dim != 2:
            raise UsageError("sector test function needs a 2-d set")
        return sector_indicator(0.0, 1.0, 1.0)
    raise UsageError(f"unknown test function {name!r}")


def _density_rows(est):
    return [[e, s.real, s.imag, p.real, p.imag] for e, s, p in
            zip(est.epsilons, est.scaled_sums, est.density_samples)]


def cmd_density(a):
    from .core import IntegerPointSet, default_schedule, estimate_density
    dim, kind = _SETS[a.set]
    f = _test_function(a.f, dim)
    est = estimate_density(f, IntegerPointSet(dim, kind), default_schedule(a.eps_min, a.eps_max))
    expected = _expected_density(dim, kind) if a.expected is None else a.expected
    value = est.extrapolated.real
    return Result(["eps", "re_sum", "im_sum", "re_density", "im_density"], _density_rows(est),
                  {"extrapolated": value, "error_estimate": est.error_estimate,
                   "integral": est.integral, "expected": expected,
                   "rel_err": _rel(value, expected)},
                  _within(value, expected, a.tol))


def cmd_coprime(a):
    from .arith import coprime_fraction
    target = 6 / math.pi ** 2
    rows, ok, worst = [], True, None
    for n in a.n:
        fr = coprime_fraction(n)
        count = fr.numerator * (n * n // fr.denominator)
        rel = _rel(float(fr), target)
        rows.append([n, count, float(fr), rel])
        if a.tol is not None and rel > a.tol:
            ok, worst = False, (n, float(fr))
    check = None
    if a.tol is not None:
        actual = worst[1] if worst else float(coprime_fraction(a.n[-1]))
        check = (ok, target, actual, a.tol)
    return Result(["n", "coprime_pairs", "fraction", "rel_err"], rows,
                  {"expected": target}, check)


def cmd_ppt(a):
    from .pythagoras import enumerate_ppt, somos_fixture
    triples = enumerate_ppt(a.zmax)
    rows = [[i + 1, t.x, t.y, t.z] for i, t in enumerate(triples)]
    summary = {"count": len(rows)}
    check = None
    if a.check_fixture:
        fixture = somos_fixture()
        have = {r[0]: tuple(r[1:]) for r in rows}
        bad = [r for r in fixture if have.get(r[0]) != tuple(r[1:])]
        summary["fixture_rows"] = len(fixture)
        summary["fixture_mismatches"] = len(bad)
        check = (not bad, len(fixture), len(fixture) - len(bad), 0)
    return Result(["N", "x", "y", "z"], rows, summary, check)


def cmd_lehmer(a):
    from .pythagoras import lehmer_ratio
    rows = []
    for n in a.n:
        r = lehmer_ratio(n)
        rows.append([n, round(r * n), r])
    return Result(["N", "z_N", "ratio"], rows, {"limit": 2 * math.pi})


def cmd_sector(a):
    from .pythagoras import sector_count, sector_limit
    count = sector_count(a.n, Fraction(a.alpha), Fraction(a.beta))
    expected = sector_limit(float(Fraction(a.alpha)), float(Fraction(a.beta)))
    ratio = count / a.n
    return Result(["N", "alpha", "beta", "count", "ratio"],
                  [[a.n, Fraction(a.alpha), Fraction(a.beta), count, ratio]],
                  {"expected": expected, "rel_err": _rel(ratio, expected)},
                  _within(ratio, expected, a.tol))


def _angle(text):
    """Angles may be given as multiples of pi: ``pi/4``, ``2pi``, ``0.5``."""
    t = text.replace(" ", "").lower()
    if "pi" in t:
        num, _, den = t.partition("/")
        coef = num.replace("*", "").replace("pi", "") or "1"
        return float(Fraction(coef)) * math.pi / float(Fraction(den or "1"))
    return float(t)


def cmd_equidist(a):
    from .pythagoras import equidistribution_stat
    t1, t2 = _angle(a.theta1), _angle(a.theta2)
    st = equidistribution_stat(t1, t2, a.hmax)
    asym = 2 * (t2 - t1) / math.pi ** 2 * a.hmax
    summary = {"expected_ratio": st["expected"], "asymptotic_count": asym,
               "ratio_rel_err": _rel(st["ratio"], st["expected"]),
               "count_rel_err": _rel(st["count"], asym)}
    ok = summary["ratio_rel_err"] <= a.tol and summary["count_rel_err"] <= a.tol
    worst = max(summary["ratio_rel_err"], summary["count_rel_err"])
    return Result(["theta1", "theta2", "h_max", "count", "total", "ratio"],
                  [[t1, t2, a.hmax, st["count"], st["total"], st["ratio"]]], summary,
                  (ok, 0.0, worst, a.tol))


def cmd_fermat(a):
    from .pythagoras import fermat_characterization_check
    r = fermat_characterization_check(a.zmax)
    rows = [list(m) for m in r["mismatches"]]
    return Result(["z", "observed", "predicted"], rows,
                  {"z_max": a.zmax, "consistent": r["consistent"], "mismatches": len(rows)},
                  (r["consistent"], 0, len(rows), 0))


def cmd_iep(a):
    from .arith import iep_mobius_identity_check, iep_odd_identity_check, random_lattice_function
    rng = random.Random(a.seed)
    rows, failures = [], 0
    for trial in range(a.trials):
        d = rng.choice(a.dims)
        f = random_lattice_function(rng, d, a.max_radius)
        r = iep_mobius_identity_check(f)
        rows.append([trial, "mobius", d, r.lhs, r.rhs, r.equal])
        g = random_lattice_function(rng, 2, a.max_radius)
        s = iep_odd_identity_check(g)
        rows.append([trial, "odd", 2, s.lhs, s.rhs, s.equal])
        failures += (not r.equal) + (not s.equal)
    return Result(["trial", "identity", "dim", "lhs", "rhs", "equal"], rows,
                  {"identities": len(rows), "failures": failures},
                  (failures == 0, 0, failures, 0))


def cmd_derange(a):
    from .arith import derangement_stats
    rows, ok = [], True
    for n in range(1, a.nmax + 1):
        st = derangement_stats(n)
        dev = abs(float(st.probability) - math.exp(-1))
        bound = 1 / math.factorial(n + 1)
        ok &= dev < bound
        rows.append([n, st.count, st.probability, float(st.probability), dev, bound])
    return Result(["n", "D_n", "probability", "probability_float", "abs_dev", "bound"], rows,
                  {"limit": math.exp(-1)}, (ok, 0.0, 0.0 if ok else 1.0, 0.0))


def _rational_vector(values, d):
    if values is None:
        return None
    eta = [Fraction(v) for v in values]
    if len(eta) != d:
        raise UsageError(f"--eta needs {d} components")
    return eta


def cmd_poisson(a):
    from .fourier import GaussianFunction, Lattice, poisson_check
    eta = _rational_vector(a.eta, a.dim)
    r = poisson_check(GaussianFunction(a.dim, a.t), Lattice.integer(a.dim), eta)
    rows = [[a.dim, a.t, r["lhs"].real, r["lhs"].imag, r["rhs"].real, r["rhs"].imag,
             r["abs_err"]]]
    return Result(["dim", "t", "re_lhs", "im_lhs", "re_rhs", "im_rhs", "abs_err"], rows,
                  {"eta": [str(v) for v in eta] if eta else None},
                  (r["abs_err"] < a.tol, 0.0, r["abs_err"], a.tol))


def _scheme(path):
    from .fourier import CutProjectScheme, fibonacci_scheme
    return fibonacci_scheme() if path is None else CutProjectScheme.from_json(path)


def cmd_modelset(a):
    from .core import ball_indicator, default_schedule, estimate_density
    from .fourier import ModelSet
    scheme = _scheme(a.scheme)
    src = ModelSet(scheme)
    pts, _ = src.enumerate(a.R)
    summary = {"points": len(pts), "expected_density": scheme.density,
               "density_warning": scheme.density_warning}
    rows = [[float(p) for p in row] for row in pts] if a.emit_points else []
    ok = True
    if scheme.physical_dim == 1 and len(pts) > 1:
        gaps = np.unique(np.round(np.diff(pts[:, 0]), 9))
        summary["gap_values"] = gaps.tolist()
        if len(gaps) == 2:
            summary["gap_ratio"] = float(gaps[1] / gaps[0])
        vol = 2 * a.R
    else:
        vol = math.pi ** (scheme.physical_dim / 2) / math.gamma(scheme.physical_dim / 2 + 1) \
            * a.R ** scheme.physical_dim
    summary["counted_density"] = len(pts) / vol
    f = ball_indicator((0.0,) * scheme.physical_dim, 1.0)
    est = estimate_density(f, src, default_schedule(a.eps_min))
    summary["estimated_density"] = est.extrapolated.real
    rel = _rel(est.extrapolated.real, scheme.density)
    ok = rel <= a.tol
    return Result([f"x_{i + 1}" for i in range(scheme.physical_dim)], rows, summary,
                  (ok, scheme.density, est.extrapolated.real, a.tol))


def cmd_spectrum(a):
    from .fourier import qc_spectrum
    scheme = _scheme(a.scheme)
    entries = qc_spectrum(scheme, a.xi_cutoff, a.amp_floor)
    d = scheme.physical_dim
    rows = [list(e.xi) + [e.amplitude.real, e.amplitude.imag, None] for e in entries]
    return Result([f"xi_{i + 1}" for i in range(d)] + ["re_a", "im_a", "n_xi"], rows,
                  {"entries": len(rows), "a0": scheme.density})


def cmd_primqc(a):
    from .core import smooth_bump
    from .fourier import prim_poisson_check
    f = smooth_bump((0.0,) * a.dim, a.radius)
    rows, errs = [], []
    for X in a.cutoffs:
        r = prim_poisson_check(a.dim, f, a.N, X)
        rows.append([X, r["lhs"], r["rhs"], r["abs_err"], r["tail_estimate"], r["terms"]])
        errs.append(r["abs_err"])
    decreasing = all(b < c for b, c in zip(errs[1:], errs[:-1]))
    lhs = rows[-1][1]
    final_rel = errs[-1] / abs(lhs)
    ok = decreasing and final_rel < a.tol
    return Result(["xi_cutoff", "lhs", "rhs", "abs_err", "tail_estimate", "terms"], rows,
                  {"strictly_decreasing": decreasing, "final_rel_err": final_rel,
                   "mertens": r["mertens"]},
                  (ok, 0.0, final_rel, a.tol))


def cmd_twisted(a):
    from .core import default_schedule
    from .fourier import n_of_xi, prim_coefficient_limit, twisted_density_check
    eta = _rational_vector(a.eta, a.dim)
    f = _test_function(a.f, a.dim)
    est = twisted_density_check(a.dim, eta, f, default_schedule(a.eps_min, a.eps_max))
    expected = prim_coefficient_limit(n_of_xi(eta), a.dim)
    value = est.extrapolated.real
    return Result(["eps", "re_sum", "im_sum", "re_density", "im_density"], _density_rows(est),
                  {"extrapolated": value, "imag": est.extrapolated.imag,
                   "error_estimate": est.error_estimate, "expected": expected,
                   "n_eta": n_of_xi(eta), "rel_err": _rel(value, expected)},
                  _within(value, expected, a.tol))


# ---------------------------------------------------------------------------
# parser

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    p = _Parser(prog="riemannsum", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default=None, help="write here instead of stdout")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="cap worker threads (same as RIEMANNSUM_NUM_THREADS)")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    def add(name, func, help_):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.set_defaults(func=func)
        return s

    s = add("density", cmd_density, "constant density of an integer point set")
    s.add_argument("--set", choices=sorted(_SETS), default="prim2")
    s.add_argument("--f", choices=("ball", "box", "bump", "sector"), default="ball")
    s.add_argument("--eps-min", type=float, default=1e-3)
    s.add_argument("--eps-max", type=float, default=2.0 ** -4)
    s.add_argument("--expected", type=float, default=None)
    s.add_argument("--tol", type=float, default=0.01)

    s = add("coprime", cmd_coprime, "fraction of coprime pairs in [1, N]^2")
    s.add_argument("--n", type=_positive_int, nargs="+", default=[10 ** 4, 10 ** 6])
    s.add_argument("--tol", type=float, default=None)

    s = add("ppt", cmd_ppt, "primitive Pythagorean triples by hypotenuse")
    s.add_argument("--zmax", type=int, default=9425)
    s.add_argument("--check-fixture", action="store_true")

    s = add("lehmer", cmd_lehmer, "z_N / N")
    s.add_argument("--n", type=_positive_int, nargs="+", default=[100])

    s = add("sector", cmd_sector, "sector count P(N; alpha, beta)")
    s.add_argument("--n", type=_positive_int, default=10 ** 6)
    s.add_argument("--alpha", default="0")
    s.add_argument("--beta", default="1")
    s.add_argument("--tol", type=float, default=0.02)

    s = add("equidist", cmd_equidist, "rational points of S^1 on an arc")
    s.add_argument("--theta1", default="0")
    s.add_argument("--theta2", default="pi/4")
    s.add_argument("--hmax", type=_positive_int, default=10 ** 4)
    s.add_argument("--tol", type=float, default=0.02)

    s = add("fermat", cmd_fermat, "hypotenuse multiplicities against 2^(nu-1)")
    s.add_argument("--zmax", type=int, default=10 ** 4)

    s = add("iep", cmd_iep, "random exact checks of the Moebius and odd-lattice identities")
    s.add_argument("--trials", type=_positive_int, default=50)
    s.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    s.add_argument("--max-radius", type=int, default=12)
    s.add_argument("--seed", type=int, default=0)

    s = add("derange", cmd_derange, "derangement probabilities against 1/e")
    s.add_argument("--nmax", type=_positive_int, default=20)

    s = add("poisson", cmd_poisson, "Poisson summation for a Gaussian on Z^d")
    s.add_argument("--dim", type=int, choices=(1, 2, 3), default=1)
    s.add_argument("--t", type=float, default=1.0)
    s.add_argument("--eta", nargs="+", default=None)
    s.add_argument("--tol", type=float, default=1e-10)

    s = add("modelset", cmd_modelset, "points, gaps and density of a model set")
    s.add_argument("--scheme", default=None, help="scheme JSON (default: Fibonacci)")
    s.add_argument("--R", type=float, default=1000.0)
    s.add_argument("--eps-min", type=float, default=1e-3)
    s.add_argument("--emit-points", action="store_true")
    s.add_argument("--tol", type=float, default=0.01)

    s = add("spectrum", cmd_spectrum, "Bragg positions and amplitudes of a model set")
    s.add_argument("--scheme", default=None)
    s.add_argument("--xi-cutoff", type=float, default=5.0)
    s.add_argument("--amp-floor", type=float, default=1e-3)

    s = add("primqc", cmd_primqc, "Poisson-type expansion of the primitive points")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--radius", type=float, default=6.0)
    s.add_argument("--N", type=_positive_int, default=8)
    s.add_argument("--cutoffs", type=float, nargs="+", default=[4, 8, 16, 32])
    s.add_argument("--tol", type=float, default=0.01)

    s = add("twisted", cmd_twisted, "density of primitive points twisted by a character")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--eta", nargs="+", default=["1/2", "0"])
    s.add_argument("--f", choices=("ball", "box", "bump", "sector"), default="ball")
    s.add_argument("--eps-min", type=float, default=1e-3)
    s.add_argument("--eps-max", type=float, default=2.0 ** -4)
    s.add_argument("--tol", type=float, default=0.03)
    return p


_PLUMBING = {"func", "subcommand", "format", "output", "threads", "seed"}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if a.subcommand is None:
            raise UsageError(f"choose a subcommand: {', '.join(SUBCOMMANDS)}")
        if a.threads is not None:
            os.environ["RIEMANNSUM_NUM_THREADS"] = str(a.threads)
        params = {k: (str(v) if isinstance(v, Fraction) else v)
                  for k, v in sorted(vars(a).items()) if k not in _PLUMBING}
        cfg = RunConfig(a.subcommand, params, a.format, a.output, getattr(a, "seed", None))
        res = a.func(a)
    except UsageError as e:
        print(f"usage error: {e}", file=stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=stderr)
        return EXIT_USAGE

    status, code = "ok", EXIT_OK
    if res.check is not None:
        passed, expected, actual, tol = res.check
        status = "pass" if passed else "fail"
        if not passed:
            code = EXIT_TOLERANCE
            print(f"tolerance failure: expected={_fmt(expected)} actual={_fmt(actual)} "
                  f"tolerance={_fmt(tol)}", file=stderr)
    text = render(cfg, res, status)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())
