"""Command-line front end for reproducible verification runs and exports.

Subcommands: verify, census, relations, spectrum, bethe.  Every run emits
one JSON report envelope echoing the configuration; exit codes are 0 on
all-pass, 1 on a failed check, 2 on a resource budget violation, 3 on a
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .bethe import (ROOTS_HEADER, dispersion_check, energy,
                    ground_energy_density, roots_rows, solve_ground_state,
                    thermo_report)
from .census import census_equations_json, ybe_census
from .errors import BudgetError, ConfigError, VlabError
from .operators import (SPECTRUM_HEADER, SectorBasis,
                        chemical_potential_projection, eigenspectrum,
                        hamiltonian_from_couplings,
                        hamiltonian_from_log_derivative, spectrum_rows,
                        transfer_matrix)
from .relations import catalog_as_json, evaluate_relations
from .weights import (Branch, BranchParams, check_elimination_identities,
                      check_invariant_constraints, compute_invariants,
                      make_weights, reference_invariants)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BUDGET, EXIT_CONFIG = 0, 1, 2, 3

TABLE1_COUNTS = {2: 6, 3: 36, 4: 57, 5: 24}

_FAMILY = {Branch.B1A: "branch1", Branch.B1B: "branch1",
           Branch.S1S: "branch1", Branch.B2A: "branch2",
           Branch.B2B: "branch2", Branch.S2S: "branch2"}


def splitmix64(seed):
    """Deterministic 64-bit stream; the documented sampler of every run."""
    state = seed & 0xFFFFFFFFFFFFFFFF
    while True:
        state = (state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        yield (z ^ (z >> 31)) / 2.0 ** 64


@dataclass
class RunConfig:
    branch: str = "1A"
    epsilon1: int = 1
    epsilon2: int = 1
    d_sign: int = 1
    gamma: complex = 0.8 + 0.0j
    seed: int = 20108
    tolerance: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    gamma_perturb: float = 0.0

    _KEYS = ("branch", "epsilon1", "epsilon2", "d_sign", "gamma", "seed",
             "tolerance", "out", "format", "workers", "gamma_perturb")

    @classmethod
    def from_file(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        unknown = set(raw) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls()
        for key, value in raw.items():
            if key == "gamma":
                value = _parse_gamma(value)
            setattr(cfg, key, value)
        cfg.validate()
        return cfg

    def validate(self):
        try:
            Branch.parse(self.branch)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.epsilon1 not in (1, -1) or self.epsilon2 not in (1, -1) \
                or self.d_sign not in (1, -1):
            raise ConfigError("epsilon1/epsilon2/d_sign must be +-1")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def params(self):
        return BranchParams(gamma=self.gamma, epsilon1=self.epsilon1,
                            epsilon2=self.epsilon2, d_sign=self.d_sign)

    def echo(self):
        d = asdict(self)
        d["gamma"] = [self.gamma.real, self.gamma.imag] \
            if isinstance(self.gamma, complex) else self.gamma
        return d


def _parse_gamma(value):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    if isinstance(value, str):
        parts = value.split(",")
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    raise ConfigError(f"cannot parse gamma {value!r} (use RE or RE,IM)")


def envelope(config, checks, started):
    """Report wrapper shared by all subcommands."""
    return {
        "tool": "vlab",
        "version": __version__,
        "sampler": "splitmix64",
        "config": config.echo() if isinstance(config, RunConfig) else config,
        "wall_time_s": round(time.time() - started, 3),
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def _sample_points(cfg, count):
    """Deterministic complex (lambda1, lambda2) pairs from the run seed."""
    stream = splitmix64(cfg.seed)
    pairs = []
    for _ in range(count):
        a, b, c, d = (next(stream) for _ in range(4))
        pairs.append((complex(2 * a - 1, 2 * b - 1) * 0.8,
                      complex(2 * c - 1, 2 * d - 1) * 0.8))
    return pairs


def _check(name, residual, tol):
    return {"name": name, "residual": float(residual),
            "tolerance": float(tol), "passed": bool(residual <= tol)}


def _ybe_check(cfg, n_samples=20):
    from .operators import ybe_residual
    branch = Branch.parse(cfg.branch)
    params = cfg.params()
    pairs = _sample_points(cfg, n_samples)

    def one(pair):
        l1, l2 = pair
        if cfg.gamma_perturb:
            # mismatched anisotropy on leg 2 breaks integrability
            from .operators import l_tensor
            p2 = replace(params, gamma=params.gamma + cfg.gamma_perturb)
            r = l_tensor(make_weights(branch, params, l1 - l2))
            t1 = l_tensor(make_weights(branch, params, l1))
            t2 = l_tensor(make_weights(branch, p2, l2))
            lhs = np.einsum("ipjq,plkr,qmrn->ijklmn", r, t1, t2)
            rhs = np.einsum("jqkr,iprn,plqm->ijklmn", t2, t1, r)
            return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))
        return ybe_residual(branch, params, l1, l2)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            residuals = list(pool.map(one, pairs))
    else:
        residuals = [one(p) for p in pairs]
    tol = cfg.tolerance.get("ybe", 1e-10)
    return [_check("ybe_max_residual", max(residuals), tol)]


def _invariants_check(cfg, n_samples=10):
    branch = Branch.parse(cfg.branch)
    params = cfg.params()
    ref = reference_invariants(branch, params)
    stream = splitmix64(cfg.seed)
    worst = 0.0
    taken = 0
    while taken < n_samples:
        lam = complex(2 * next(stream) - 1, 2 * next(stream) - 1) * 0.8
        try:
            inv = compute_invariants(make_weights(branch, params, lam))
        except VlabError:
            continue
        taken += 1
        for name in vars(ref):
            want = complex(getattr(ref, name))
            got = complex(getattr(inv, name))
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    tol = cfg.tolerance.get("invariants", 1e-10)
    checks = [_check("invariant_table_match", worst, tol)]
    cons = check_invariant_constraints(ref, family=_FAMILY[branch])
    cons.update(check_elimination_identities(ref))
    checks.append(_check("invariant_constraints", max(cons.values()),
                         cfg.tolerance.get("constraints", 1e-10)))
    return checks


def _relations_check(cfg, n_samples=20):
    branch = Branch.parse(cfg.branch)
    params = cfg.params()
    ref = reference_invariants(branch, params)
    worst = 0.0
    for l1, l2 in _sample_points(cfg, n_samples):
        try:
            w0 = make_weights(branch, params, l1 - l2)
            w1 = make_weights(branch, params, l1)
            w2 = make_weights(branch, params, l2)
        except VlabError:
            continue
        worst = max(worst, max(evaluate_relations(w0, w1, w2,
                                                  ref.psi).values()))
    tol = cfg.tolerance.get("relations", 1e-10)
    return [_check("relations_max_residual", worst, tol)]


def _commute_check(cfg, lengths=(2, 3, 4, 5)):
    branch = Branch.parse(cfg.branch)
    params = cfg.params()
    pairs = _sample_points(cfg, 2)
    l1, l2 = pairs[0][0], pairs[1][0]
    checks = []
    for length in lengths:
        t1 = transfer_matrix(branch, params, l1, length).dense()
        t2 = transfer_matrix(branch, params, l2, length).dense()
        prod = t1 @ t2
        resid = np.max(np.abs(prod - t2 @ t1)) / np.max(np.abs(prod))
        checks.append(_check(f"commutator_L{length}", resid,
                             cfg.tolerance.get("commute", 1e-9)))
    return checks


def _hamiltonian_check(cfg, length=4):
    branch = Branch.parse(cfg.branch)
    params = cfg.params()
    hc = hamiltonian_from_couplings(branch, params, length)
    hl = hamiltonian_from_log_derivative(branch, params, length)
    resid, _coef = chemical_potential_projection(hl, hc, length)
    tol = cfg.tolerance.get("hamiltonian", 1e-7)
    return [_check(f"hamiltonian_match_L{length}", resid, tol)]


_SCOPES = {"ybe": _ybe_check, "invariants": _invariants_check,
           "relations": _relations_check, "commute": _commute_check,
           "hamiltonian": _hamiltonian_check}


def cmd_verify(args, cfg):
    started = time.time()
    checks = []
    for scope in args.scope:
        fn = _SCOPES[scope]
        if scope == "hamiltonian":
            checks.extend(fn(cfg, length=args.L or 4))
        elif scope == "commute":
            lengths = (args.L,) if args.L else (2, 3, 4, 5)
            checks.extend(fn(cfg, lengths=lengths))
        else:
            checks.extend(fn(cfg))
    report = envelope(cfg, checks, started)
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_census(args, cfg):
    started = time.time()
    report = ybe_census(ansatz=args.model)
    checks = []
    if args.model == "nineteen-vertex":
        checks.append({"name": "table_counts",
                       "expected": {str(k): v for k, v
                                    in TABLE1_COUNTS.items()},
                       "observed": {str(k): v for k, v
                                    in report.counts.items()},
                       "passed": report.counts == TABLE1_COUNTS})
        checks.append({"name": "total", "expected": 123,
                       "observed": report.total,
                       "passed": report.total == 123})
    else:
        gauged_three = report.gauged_counts.get(3, 0)
        checks.append({"name": "six_vertex_three_term", "expected": 6,
                       "observed": gauged_three,
                       "passed": gauged_three == 6})
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            json.dump(census_equations_json(), fh, indent=1)
    out = envelope(cfg, checks, started)
    out["census"] = report.as_json()
    _emit(out, args.out)
    return EXIT_OK if out["passed"] else EXIT_CHECK_FAILED


def cmd_relations(args, cfg):
    started = time.time()
    data = catalog_as_json()
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=1)
    out = envelope(cfg, [{"name": "catalog_size", "observed": len(data),
                          "expected": 99, "passed": len(data) == 99}],
                   started)
    _emit(out, args.out)
    return EXIT_OK if out["passed"] else EXIT_CHECK_FAILED


def cmd_spectrum(args, cfg):
    started = time.time()
    branch = Branch.parse(cfg.branch)
    params = cfg.params()
    length = args.L
    ham = hamiltonian_from_log_derivative(branch, params, length) \
        if args.operator == "hamiltonian" else \
        transfer_matrix(branch, params, cfg.gamma / 2, length,
                        representation="sparse")
    sectors = [args.sector] if args.sector is not None \
        else list(range(-length, length + 1))
    rows = []
    for sz in sectors:
        basis = SectorBasis.build(length, sz)
        spec = eigenspectrum(ham, basis, method=args.method, k=args.k)
        rows.extend(spectrum_rows(cfg.branch, length, sz, spec))
    _write_csv(args.out, SPECTRUM_HEADER, rows)
    report = envelope(cfg, [{"name": "spectrum_rows",
                             "observed": len(rows), "passed": True}],
                      started)
    _emit(report, None)
    return EXIT_OK


def cmd_bethe(args, cfg):
    started = time.time()
    if args.bethe_cmd == "solve":
        state = solve_ground_state(args.L, epsilon1=cfg.epsilon1)
        _write_csv(args.out, ROOTS_HEADER, roots_rows(state))
        checks = [_check("bae_residual", state.residual, 1e-6 * args.L)]
        report = envelope(cfg, checks, started)
        report["energy"] = energy(state)
        _emit(report, None)
        return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED
    if args.bethe_cmd == "thermo":
        data = thermo_report()
        quad_val, closed = data["e_inf_quadrature"], data["e_inf_closed"]
        checks = [_check("e_inf_match", abs(quad_val - closed), 1e-10)]
        report = envelope(cfg, checks, started)
        report["thermo"] = data
        _emit(report, args.out)
        return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED
    # dispersion
    dev = dispersion_check(samples=args.samples)
    checks = [_check("dispersion_max_dev", dev, 1e-8)]
    report = envelope(cfg, checks, started)
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def _write_csv(path, header, rows):
    fh = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if path:
            fh.close()


def _emit(report, path):
    text = json.dumps(report, indent=1, default=_json_default)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"unserializable {type(obj)}")


class _Parser(argparse.ArgumentParser):
    # usage mistakes are configuration errors (exit 3), not resource ones
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--branch", default=None,
                        help="1A, 1B, 2A, 2B, 1S or 2S")
    common.add_argument("--eps1", type=int, choices=(1, -1), default=None)
    common.add_argument("--eps2", type=int, choices=(1, -1), default=None)
    common.add_argument("--dsign", type=int, choices=(1, -1), default=None)
    common.add_argument("--gamma", default=None, help="RE or RE,IM")
    common.add_argument("--gamma-perturb", type=float, default=None,
                        help="detune gamma on one leg (breaks the checks)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--tol", type=float, default=None,
                        help="override every check tolerance")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("--format", choices=("csv", "json"), default=None)

    parser = _Parser(
        prog="vlab",
        description="verification runs for PT-invariant nineteen-vertex "
                    "models")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", parents=[common],
                       help="run a verification suite")
    p.add_argument("--scope", nargs="+", default=["ybe"],
                   choices=sorted(_SCOPES))
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("census", parents=[common],
                       help="count the component equations")
    p.add_argument("--model", default="nineteen-vertex",
                   choices=("nineteen-vertex", "six-vertex"))
    p.add_argument("--dump", default=None, help="write equations JSON here")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("relations", parents=[common],
                       help="dump the relation catalog")
    p.add_argument("--dump", default=None, help="write catalog JSON here")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("spectrum", parents=[common],
                       help="sector eigenvalues as CSV")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--sector", type=int, default=None)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--method", default="dense",
                   choices=("dense", "iterative"))
    p.add_argument("--operator", default="hamiltonian",
                   choices=("hamiltonian", "transfer"))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bethe", parents=[common],
                       help="root solver and thermodynamics")
    psub = p.add_subparsers(dest="bethe_cmd", required=True, parser_class=_Parser)
    ps = psub.add_parser("solve", parents=[common])
    ps.add_argument("--L", type=int, required=True)
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=cmd_bethe)
    pt = psub.add_parser("thermo", parents=[common])
    pt.add_argument("--out", default=None)
    pt.set_defaults(func=cmd_bethe)
    pd = psub.add_parser("dispersion", parents=[common])
    pd.add_argument("--samples", type=int, default=20)
    pd.add_argument("--out", default=None)
    pd.set_defaults(func=cmd_bethe)
    return parser


def _merge_config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.branch is not None:
        cfg.branch = args.branch
    if args.eps1 is not None:
        cfg.epsilon1 = args.eps1
    if args.eps2 is not None:
        cfg.epsilon2 = args.eps2
    if args.dsign is not None:
        cfg.d_sign = args.dsign
    if args.gamma is not None:
        cfg.gamma = _parse_gamma(args.gamma)
    if getattr(args, "gamma_perturb", None) is not None:
        cfg.gamma_perturb = args.gamma_perturb
    if args.seed is not None:
        cfg.seed = args.seed
    if args.tol is not None:
        cfg.tolerance = {k: args.tol for k in
                         ("ybe", "invariants", "constraints", "relations",
                          "commute", "hamiltonian")}
    if args.workers is not None:
        cfg.workers = args.workers
    if args.format is not None:
        cfg.format = args.format
    cfg.validate()
    return cfg


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merge_config(args)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except VlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
