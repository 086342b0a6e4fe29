"""Command-line front end: expand, basis, hecke, verify, sweep.

Exit codes: 0 all checks passed, 1 a verification check failed, 2 usage or
budget error.  JSON output keeps every coefficient as a decimal string so
results are bit-exact across platforms; no floating point appears anywhere.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from .cache import ExpansionCache
from .eta import EtaQuotient, NonIntegralPrefactor
from .hecke import CASES, CaseStudy, build_basis_form, hecke_Tpn
from .series import QSeries
from .verify import GridSpec, nondivisibility_sweep, run_case_verification

ENV_CACHE_DIR = "QLIMITS_CACHE_DIR"
DEFAULT_CACHE_DIR = ".qlimits-cache"


class UsageError(Exception):
    """Raised for invalid configurations; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    case_ids: tuple[str, ...] = ()
    form: str | None = None
    eta: str | None = None
    level: int | None = None
    scale: int = 1
    shift: int = 0
    primes: tuple[int, ...] = ()
    m: int | None = None
    mmax: int | None = None
    op: str | None = None
    precision: int = 40
    n_check: int = 40
    budget: int = 250_000
    bound: int = 2000
    fmt: str = "table"
    cache_dir: str = ""
    use_default_grid: bool = False
    entries: list[str] = field(default_factory=list)


def _named_forms() -> dict[str, tuple[str, "CaseStudy", str]]:
    """name -> (role, case, label)."""
    return {
        "g": ("cusp", CASES["eo"], "g"),
        "L": ("mult_raw", CASES["eo"], "L"),
        "F": ("master", CASES["eo"], "F"),
        "g1": ("cusp", CASES["gko"], "g1"),
        "L1": ("mult", CASES["gko"], "L1"),
        "G": ("master", CASES["gko"], "G"),
        "g2": ("cusp", CASES["bg"], "g2"),
        "L2": ("mult", CASES["bg"], "L2"),
        "H": ("master", CASES["bg"], "H"),
        "phi2_gko": ("phiseed", CASES["gko"], "phi2_gko"),
        "phi2_bg": ("phiseed", CASES["bg"], "phi2_bg"),
    }


def _build_named(name: str, precision: int) -> QSeries:
    role, case, _ = _named_forms()[name]
    if role == "cusp":
        return case.cusp_series(precision)
    if role == "mult":
        return case.multiplier_series(precision)
    if role == "mult_raw":
        return case.mult_eta.expand(precision)
    if role == "master":
        return case.master_series(precision)
    if role == "phiseed":
        return case.phi_seed_series(precision)
    raise AssertionError(role)


def _series_payload(label: str, series: QSeries) -> dict:
    return {
        "form": label,
        "valuation": series.valuation,
        "precision": series.precision,
        "coeffs": [[e, str(c)] for e, c in series.items()],
    }


def _emit_series(label: str, series: QSeries, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_series_payload(label, series), indent=2, sort_keys=True)
    lines = [f"{label}: {series.pretty(max_terms=12)}"]
    lines += [f"  q^{e}: {c}" for e, c in series.items()]
    return "\n".join(lines)


def _resolve_cache_dir(flag_value: str | None) -> str:
    return flag_value or os.environ.get(ENV_CACHE_DIR) or DEFAULT_CACHE_DIR


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_expand(cfg: RunConfig) -> int:
    if bool(cfg.form) == bool(cfg.eta):
        raise UsageError("expand needs exactly one of --form or --eta")
    if cfg.precision < 1:
        raise UsageError("--precision must be >= 1")
    cache = ExpansionCache(_resolve_cache_dir(cfg.cache_dir or None))
    if cfg.form:
        if cfg.form not in _named_forms():
            raise UsageError(
                f"unknown form {cfg.form!r}; known: {', '.join(sorted(_named_forms()))}"
            )
        key, label = f"form:{cfg.form}", cfg.form
        series = cache.load(key, cfg.precision)
        if series is None:
            series = _build_named(cfg.form, cfg.precision)
            cache.store(key, series)
    else:
        try:
            quotient = EtaQuotient.parse(cfg.eta, cfg.level)
        except (ValueError, NonIntegralPrefactor) as exc:
            raise UsageError(f"bad eta descriptor {cfg.eta!r}: {exc}") from None
        key = f"eta:{cfg.eta}|level:{quotient.level}|scale:{cfg.scale}|shift:{cfg.shift}"
        label = str(quotient)
        series = cache.load(key, cfg.precision)
        if series is None:
            series = quotient.expand_scaled(
                cfg.precision, scale=cfg.scale, shift=cfg.shift
            )
            cache.store(key, series)
    print(_emit_series(label, series, cfg.fmt))
    return 0


def cmd_basis(cfg: RunConfig) -> int:
    case = _single_case(cfg)
    if cfg.m is None:
        raise UsageError("basis needs --m")
    if not case.is_basis_index(cfg.m):
        raise UsageError(
            f"m={cfg.m} is outside the basis index set of case {case.id} "
            f"(m >= -1 with m mod {case.basis_index_mod} in "
            f"{sorted(case.basis_index_residues)})"
        )
    basis = build_basis_form(case, cfg.m, cfg.precision)
    if cfg.fmt == "json":
        payload = _series_payload(f"{case.id}:basis[{cfg.m}]", basis.series)
        payload["recipe"] = [[r, str(c)] for r, c in basis.recipe]
        payload["eliminated_exponents"] = list(basis.eliminated)
        payload["forced_zero_exponents"] = list(basis.forced_zero)
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(_emit_series(f"{case.id}:basis[{cfg.m}]", basis.series, cfg.fmt))
        combo = " + ".join(f"({c}) * E_{r}" for r, c in basis.recipe)
        print(f"  recipe: {combo}")
        print(f"  eliminated at exponents: {list(basis.eliminated)}")
        print(f"  zero without elimination: {list(basis.forced_zero)}")
    return 0


def cmd_hecke(cfg: RunConfig) -> int:
    if not cfg.form:
        raise UsageError("hecke needs --form")
    if cfg.form not in _named_forms():
        raise UsageError(f"unknown form {cfg.form!r}")
    op = (cfg.op or "").upper()
    if op not in ("T", "U", "V", "THETA"):
        raise UsageError("--op must be one of T, U, V, theta")
    n = cfg.m if cfg.m is not None else 1
    if op == "THETA" and n < 1:
        raise UsageError("theta power --m must be >= 1")
    if n < 0:
        raise UsageError("--m must be >= 0")
    role, case, _ = _named_forms()[cfg.form]
    if op == "THETA":
        series = _build_named(cfg.form, cfg.precision).theta(n)
        print(_emit_series(f"theta^{n}({cfg.form})", series, cfg.fmt))
        return 0
    if not cfg.primes:
        raise UsageError(f"--op {op} needs --prime")
    p = cfg.primes[0]
    if op == "T":
        if role != "master":
            raise UsageError("--op T applies to the master forms F, G, H")
        if not case.admissible_prime(p):
            res, mod = case.prime_residue
            raise UsageError(
                f"prime {p} is not admissible for case {case.id}: "
                f"needs p = {res} (mod {mod}), coprime to {case.level}"
            )
        f = _build_named(cfg.form, p**n * cfg.precision)
        series = hecke_Tpn(f, case.weight, case.character, p, n, cfg.precision)
        print(_emit_series(f"{cfg.form}|T({p}^{n})", series, cfg.fmt))
        return 0
    f = _build_named(cfg.form, p**n * cfg.precision if op == "U" else cfg.precision)
    if op == "U":
        series = f.u(p**n).truncate(cfg.precision)
    else:
        series = f.v(p**n)
    print(_emit_series(f"{cfg.form}|{op}({p}^{n})", series, cfg.fmt))
    return 0


def _grid_for(cfg: RunConfig, case: CaseStudy) -> GridSpec:
    if cfg.use_default_grid or not cfg.primes:
        grid = GridSpec.default(case.id)
        if cfg.n_check != grid.n_check or cfg.budget != grid.series_budget:
            grid = GridSpec(case.id, grid.cells, cfg.n_check, cfg.budget)
        return grid
    mmax = cfg.mmax if cfg.mmax is not None else 0
    for p in cfg.primes:
        if not case.admissible_prime(p):
            res, mod = case.prime_residue
            raise UsageError(
                f"prime {p} violates the residue filter of case {case.id}: "
                f"{p} is not = {res} (mod {mod}) coprime to level {case.level}"
                + (" (p=2 allowed)" if case.allow_p2 else "")
            )
    try:
        return GridSpec(
            case.id,
            tuple((p, mmax) for p in cfg.primes),
            cfg.n_check,
            cfg.budget,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_verify(cfg: RunConfig) -> int:
    worst = 0
    payloads = []
    for case_id in cfg.case_ids:
        case = CASES[case_id]
        grid = _grid_for(cfg, case)
        report = run_case_verification(case, grid)
        payloads.append(report)
        if report.budget_violations:
            worst = max(worst, 2)
        elif not report.all_passed:
            worst = max(worst, 1)
    if cfg.fmt == "json":
        print(json.dumps([r.to_dict() for r in payloads], indent=2, sort_keys=True))
    else:
        for report in payloads:
            print("\n".join(report.lines()))
            status = "PASS" if report.all_passed else "FAIL"
            print(
                f"case {report.case_id}: {status} "
                f"({len(report.entries)} checks, {report.failures} failures, "
                f"{report.budget_violations} beyond budget)"
            )
    return worst


def cmd_sweep(cfg: RunConfig) -> int:
    worst = 0
    payloads = []
    for case_id in cfg.case_ids:
        report = nondivisibility_sweep(CASES[case_id], cfg.bound)
        payloads.append(report)
        if not report.all_passed:
            worst = 1
    if cfg.fmt == "json":
        print(json.dumps([r.to_dict() for r in payloads], indent=2, sort_keys=True))
    else:
        for report in payloads:
            print("\n".join(report.lines()))
    return worst


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlimits",
        description=(
            "Exact q-expansions of eta-quotient modular forms and certified "
            "verification of their p-adic valuation, congruence, and Hecke "
            "operator laws."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, with_case=True):
        if with_case:
            sp.add_argument(
                "--case", default="all", choices=[*CASES, "all"],
                help="case study id (default: all where sensible)",
            )
        sp.add_argument("--format", default="table", choices=["table", "json"])
        sp.add_argument("--precision", type=int, default=40,
                        help="number of known q-exponents (O(q^N) cutoff)")

    sp = sub.add_parser("expand", help="expand a named form or raw eta quotient")
    sp.add_argument("--form", help="named form: " + ", ".join(sorted(_named_forms())))
    sp.add_argument("--eta", help='raw quotient, e.g. "4:2,8:2"')
    sp.add_argument("--level", type=int, help="level for --eta (default: lcm)")
    sp.add_argument("--scale", type=int, default=1, help="expand at q -> q^scale")
    sp.add_argument("--shift", type=int, default=0, help="add a constant")
    sp.add_argument("--cache-dir", default="", help="expansion cache directory")
    add_common(sp, with_case=False)

    sp = sub.add_parser("basis", help="construct a basis form with principal part q^-m")
    sp.add_argument("--m", type=int, required=True)
    add_common(sp)

    sp = sub.add_parser("hecke", help="apply T, U, V, or theta to a named form")
    sp.add_argument("--form", required=True)
    sp.add_argument("--op", required=True, help="T | U | V | theta")
    sp.add_argument("--prime", type=int, action="append", default=[])
    sp.add_argument("--m", type=int, default=1, help="power: T(p^m), U(p^m), V(p^m), theta^m")
    add_common(sp, with_case=False)

    sp = sub.add_parser("verify", help="run the certified verification grids")
    sp.add_argument("--default-grid", action="store_true",
                    help="use the built-in default grid (also the fallback)")
    sp.add_argument("--prime", type=int, action="append", default=[],
                    help="grid prime (repeatable)")
    sp.add_argument("--mmax", type=int, help="m_max applied to every --prime")
    sp.add_argument("--ncheck", type=int, default=40,
                    help="coefficients checked per identity")
    sp.add_argument("--budget", type=int, default=250_000,
                    help="maximum series expansion length")
    add_common(sp)

    sp = sub.add_parser("sweep", help="nondivisibility sweep: p never divides C(p)")
    sp.add_argument("--primes-below", type=int, default=2000, dest="bound")
    add_common(sp)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    case_attr = getattr(args, "case", "all")
    case_ids = tuple(CASES) if case_attr == "all" else (case_attr,)
    return RunConfig(
        command=args.command,
        case_ids=case_ids,
        form=getattr(args, "form", None),
        eta=getattr(args, "eta", None),
        level=getattr(args, "level", None),
        scale=getattr(args, "scale", 1),
        shift=getattr(args, "shift", 0),
        primes=tuple(getattr(args, "prime", []) or []),
        m=getattr(args, "m", None),
        mmax=getattr(args, "mmax", None),
        op=getattr(args, "op", None),
        precision=getattr(args, "precision", 40),
        n_check=getattr(args, "ncheck", 40),
        budget=getattr(args, "budget", 250_000),
        bound=getattr(args, "bound", 2000),
        fmt=getattr(args, "format", "table"),
        cache_dir=getattr(args, "cache_dir", ""),
        use_default_grid=getattr(args, "default_grid", False),
    )


def _single_case(cfg: RunConfig) -> CaseStudy:
    if len(cfg.case_ids) != 1:
        raise UsageError("this command needs an explicit --case (eo, gko, or bg)")
    return CASES[cfg.case_ids[0]]


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    cfg = _config_from_args(args)
    handlers = {
        "expand": cmd_expand,
        "basis": cmd_basis,
        "hecke": cmd_hecke,
        "verify": cmd_verify,
        "sweep": cmd_sweep,
    }
    try:
        return handlers[cfg.command](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
