"""``ncqft`` command line.

Global flags go before the subcommand::

    ncqft --config cfg.json --format json lsz amp process.json

Exit codes: 0 success, 1 verification failure, 2 usage or config error.

Structured records carry ``schema_version``.  JSON output keeps full binary64
precision; complex numbers are written as ``{"re": ..., "im": ...}`` in JSON and
as ``*_re`` / ``*_im`` column pairs in CSV.

``lsz amp`` record fields: ``schema_version``, ``process``, ``n_in``, ``n_out``,
``core``, ``normalization``, ``amplitude``, ``modulus``, ``phase`` (argument of
the amplitude, radians), ``nc_phase_exponent``, ``nc_phase_factor``.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .correlators import FieldPoint, WightmanSpec, green_star_momentum, pairing_formula, wightman_star_momentum
from .fock import ModeLattice, TruncationError, matrix_oracle_vev, normal_order, vev
from .haag import TheoryPair, amplitude_coincidence_check, leg_splits, polynomial_core, random_process, random_theory_pair
from .kinematics import ConfigError, SpacetimeDims, ThetaMatrix, parse_config
from .lsz import (
    NORMALIZATIONS,
    AmputatedGreenFn,
    ScatteringProcess,
    contact_core,
    free_core,
    lattice_for,
    lsz_amplitude,
    nc_phase_exponent,
    nc_phase_factor,
    twisted_contact_core,
)
from .parsing import (
    ParseError,
    PlaneWaveSum,
    format_complex,
    format_plane_wave,
    format_poly,
    format_word,
    parse_star_expression,
    parse_word,
)
from .star import PlaneWaveSymbol, PolySymbol
from .verify import SUITES, run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_CONFIG = {"d": 1, "l": 2, "theta0": 0.3, "mass": 1.0, "n_modes": 4, "seed": 0}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    dims: SpacetimeDims
    theta: ThetaMatrix
    lattice: ModeLattice
    mass: float = 1.0
    normalization: str = "box"
    fmt: str = "human"
    tolerance: float = 1e-12
    precision: int = 12
    seed: int = 0
    source: str = "<default>"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigError(f"normalization must be one of {NORMALIZATIONS}")
        if self.lattice.dims != self.dims or self.theta.dims != self.dims:
            raise ConfigError("lattice, theta and dims disagree")


def build_config(raw: dict, source: str = "<default>", **overrides) -> RunConfig:
    """Validate a raw config dict (missing keys fall back to the defaults)."""
    merged = {**DEFAULT_CONFIG, **raw} if raw else dict(DEFAULT_CONFIG)
    if raw and any(k in raw for k in ("theta", "theta_block")):
        merged.pop("theta0", None)
    if "theta" not in merged and "theta_block" not in merged and "theta0" in merged:
        dims = SpacetimeDims(int(merged["d"]), int(merged["l"]))
        merged["theta"] = ThetaMatrix.canonical(dims, merged["theta0"]).entries.tolist()
    parsed = parse_config(merged, source)
    dims, theta = parsed["dims"], parsed["theta"]
    mass = float(merged.get("mass", 1.0))
    if "modes" in merged:
        lattice = ModeLattice(dims, tuple(tuple(m) for m in merged["modes"]), mass)
    else:
        rng = np.random.default_rng(int(merged.get("seed", 0)))
        lattice = ModeLattice.random(dims, int(merged.get("n_modes", 4)), rng, mass)
    return RunConfig(dims, theta, lattice, mass, seed=int(merged.get("seed", 0)), source=source, **overrides)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc


# --- output -----------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _flat(record: dict) -> dict:
    out = {}
    for k, v in record.items():
        if isinstance(v, complex):
            out[f"{k}_re"] = repr(v.real)
            out[f"{k}_im"] = repr(v.imag)
        elif isinstance(v, float):
            out[k] = repr(v)
        elif isinstance(v, (list, tuple, dict)):
            out[k] = json.dumps(_jsonable(v))
        else:
            out[k] = v
    return out


def render(records: list[dict], fmt: str, precision: int = 12, columns: list[str] | None = None) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(records), indent=2) + "\n"
    if fmt == "csv":
        flat = [_flat(r) for r in records]
        header = list(flat[0]) if flat else list(columns or [])
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        return buf.getvalue()
    lines = []
    for i, r in enumerate(records):
        if i:
            lines.append("")
        for k, v in r.items():
            if isinstance(v, complex):
                v = format_complex(v, precision)
            elif isinstance(v, float):
                v = f"{v:.{precision}g}"
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                lines.append(f"{k}:")
                for item in v:
                    lines.append("  - " + ", ".join(f"{a}={_human(b, precision)}" for a, b in item.items()))
                continue
            lines.append(f"{k}: {v}")
    return "\n".join(lines) + ("\n" if lines else "")


def _human(v, precision):
    if isinstance(v, complex):
        return format_complex(v, precision)
    if isinstance(v, float):
        return f"{v:.{precision}g}"
    return str(v)


def _emit(cfg: RunConfig, records, columns=None, out=None):
    (out or sys.stdout).write(render(records, cfg.fmt, cfg.precision, columns))


def _complex_columns(*names):
    cols = []
    for n in names:
        cols += [f"{n}_re", f"{n}_im"]
    return cols


# --- commands ---------------------------------------------------------------


def cmd_star_eval(cfg: RunConfig, args) -> int:
    theta = ThetaMatrix.symbolic(cfg.dims) if args.symbolic else cfg.theta
    value = parse_star_expression(args.expr, cfg.dims, theta)
    records = []
    if isinstance(value, PolySymbol):
        records.append({"schema_version": SCHEMA_VERSION, "kind": "poly", "result": format_poly(value, cfg.precision)})
    else:
        for term in _merge_plane_waves(value):
            records.append(
                {
                    "schema_version": SCHEMA_VERSION,
                    "kind": "plane-wave",
                    "result": format_plane_wave(term, cfg.precision),
                    "momentum": [float(x) for x in term.momentum.components],
                    "coeff": term.coeff if not args.symbolic else format_complex(term.coeff, cfg.precision),
                    "phase_exponent": _phase_out(term.phase, args.symbolic),
                }
            )
    _emit(cfg, records)
    return EXIT_OK


def _phase_out(phase, symbolic):
    if symbolic:
        return format_complex(phase) if not isinstance(phase, (int, float)) else f"{phase:g}"
    return float(phase)


def _merge_plane_waves(value: PlaneWaveSum):
    # terms with equal momentum and phase are added; nothing else is merged
    acc: dict = {}
    for t in value.terms:
        key = (t.momentum, str(t.phase))
        acc[key] = PlaneWaveSymbol(acc[key].coeff + t.coeff, t.momentum, t.phase) if key in acc else t
    return [t for t in acc.values() if t.coeff != 0]


def cmd_fock_vev(cfg: RunConfig, args) -> int:
    word = parse_word(args.word, len(cfg.lattice))
    W = cfg.lattice.wedge_matrix(cfg.theta)
    canon = normal_order(word)
    record = {
        "schema_version": SCHEMA_VERSION,
        "word": format_word(word),
        "vev": vev(cfg.theta, cfg.lattice, word),
        "canonical_form": _format_fock_sum(canon),
        "canonical_terms": [
            {"word": format_word(letters), "coefficient": complex(c)} for letters, c in canon.collect(W).items()
        ],
    }
    if args.oracle:
        try:
            record["oracle_vev"] = matrix_oracle_vev(cfg.theta, cfg.lattice, args.oracle, word)
        except TruncationError as exc:
            raise UsageError(str(exc)) from exc
        record["oracle_deviation"] = abs(record["oracle_vev"] - record["vev"])
    if cfg.fmt == "csv":
        record.pop("canonical_terms")
    _emit(cfg, [record])
    if args.oracle and record["oracle_deviation"] > cfg.tolerance:
        return EXIT_FAIL
    return EXIT_OK


def _format_fock_sum(fsum) -> str:
    parts = []
    for w in fsum.words:
        ph = " ".join(f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}w({i},{j})" for (i, j), c in w.phase)
        factor = f" exp(i[{ph.lstrip('+')}])" if ph else ""
        body = f" {format_word(w.letters)}" if w.letters else ""
        parts.append(f"{format_complex(w.scalar)}{factor}{body}")
    return " + ".join(parts) or "0"


def cmd_corr_eval(cfg: RunConfig, args) -> int:
    spec_raw = _load_json(args.spec)
    try:
        pts = tuple(
            FieldPoint(int(p["label"]), int(p["mode"]), int(p["sign"]), p.get("rank")) for p in spec_raw["points"]
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{args.spec}: each point needs label, mode, sign (and rank for green): {exc}") from exc
    spec = WightmanSpec(pts, cfg.lattice, cfg.theta)
    kind = spec_raw.get("kind", "wightman")
    if kind == "wightman":
        value = wightman_star_momentum(spec)
    elif kind == "green":
        if any(p.rank is None for p in pts):
            raise ConfigError("green correlators need a rank for every point")
        value = green_star_momentum(spec)
    elif kind == "pairing":
        value = pairing_formula(spec)
    else:
        raise ConfigError(f"unknown correlator kind {kind!r}; use wightman, green or pairing")
    _emit(cfg, [{"schema_version": SCHEMA_VERSION, "kind": kind, "n_points": len(pts), "value": complex(value)}])
    return EXIT_OK


def _processes_from(raw, dims: SpacetimeDims, default_mass: float):
    items = raw.get("processes", [raw] if "in" in raw else []) if isinstance(raw, dict) else raw
    out = []
    for k, item in enumerate(items):
        try:
            mass = float(item.get("mass", default_mass))
            proc = ScatteringProcess.from_spatial(dims, item["in"], item["out"], mass)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"process {k}: needs 'in' and 'out' lists of spatial momenta ({exc})") from exc
        out.append((item.get("name", f"p{k}"), proc, item.get("core")))
    return out


def make_core(spec: str, theta: ThetaMatrix, process: ScatteringProcess) -> AmputatedGreenFn:
    """Core selector: ``free2pt``, ``free``, ``contact:LAMBDA``, ``twisted-contact:LAMBDA``."""
    name, _, arg = spec.partition(":")
    n = process.n_legs
    if name in ("free2pt", "free"):
        if name == "free2pt" and n != 2:
            raise ConfigError(f"free2pt core needs a 1->1 process, got {n} legs")
        return free_core(theta, lattice_for(process), n)
    if name in ("contact", "twisted-contact"):
        try:
            lam = complex(arg.replace("i", "j")) if arg else 1.0
        except ValueError:
            raise ConfigError(f"bad coupling in core {spec!r}") from None
        return contact_core(lam, n) if name == "contact" else twisted_contact_core(theta, lam, n)
    raise ConfigError(f"unknown core {spec!r}; use free2pt, free, contact:L or twisted-contact:L")


def _amplitude_record(cfg, theta, name, proc, core_spec):
    gfn = make_core(core_spec, theta, proc)
    amp = lsz_amplitude(theta, proc, gfn, cfg.normalization)
    return {
        "schema_version": SCHEMA_VERSION,
        "process": name,
        "n_in": len(proc.in_momenta),
        "n_out": len(proc.out_momenta),
        "core": core_spec,
        "normalization": cfg.normalization,
        "amplitude": amp,
        "modulus": abs(amp),
        "phase": cmath.phase(amp) if amp != 0 else 0.0,
        "nc_phase_exponent": float(nc_phase_exponent(theta, proc)),
        "nc_phase_factor": nc_phase_factor(theta, proc),
    }


AMPLITUDE_COLUMNS = [
    "schema_version", "process", "n_in", "n_out", "core", "normalization",
    *_complex_columns("amplitude"), "modulus", "phase", "nc_phase_exponent", *_complex_columns("nc_phase_factor"),
]


def cmd_lsz_amp(cfg: RunConfig, args) -> int:
    procs = _processes_from(_load_json(args.process), cfg.dims, cfg.mass)
    records = [_amplitude_record(cfg, cfg.theta, name, p, args.core or core or "free2pt") for name, p, core in procs]
    _emit(cfg, records, AMPLITUDE_COLUMNS)
    return EXIT_OK


def _complex_from(v):
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _pair_from(raw: dict, cfg: RunConfig, rng):
    bound = cfg.dims.commutative_bound
    if "theory_a" not in raw:
        max_legs = int(raw.get("max_legs", bound + 1))
        return random_theory_pair(cfg.dims, rng, max_legs, _complex_from(raw.get("offset", [0.5, 0.25])), mass=cfg.mass)
    theories = []
    for key in ("theory_a", "theory_b"):
        t = {}
        for s, coeffs in raw[key].items():
            t[int(s)] = polynomial_core([_complex_from(c) for c in coeffs], int(s), name=f"{key}:{s}")
        theories.append(t)
    grid = [tuple(random_process(cfg.dims, rng, m, 0, cfg.mass).in_momenta) for m in range(1, max(theories[0]) + 1)]
    return TheoryPair.for_dims(cfg.dims, *theories, grid=[g for g in grid if g], tol=cfg.tolerance)


HAAG_COLUMNS = ["schema_version", "n_in", "n_out", "n_legs", "bound", "predicted_equal", "equal", "deviation", "consistent"]


def cmd_haag_check(cfg: RunConfig, args) -> int:
    raw = _load_json(args.pairs) if args.pairs else {}
    rng = np.random.default_rng(int(raw.get("seed", cfg.seed)))
    pair = _pair_from(raw, cfg, rng)
    if "processes" in raw:
        splits = [tuple(int(x) for x in s) for s in raw["processes"]]
    else:
        splits = [s for n in sorted(pair.theory_a) for s in leg_splits(n) if s[0] > 0 and s[1] > 0]
    records = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for n_in, n_out in splits:
            proc = random_process(cfg.dims, rng, n_in, n_out, cfg.mass)
            rep = amplitude_coincidence_check(cfg.theta, pair, proc, cfg.tolerance, cfg.normalization)
            records.append(
                {
                    "schema_version": SCHEMA_VERSION,
                    "n_in": n_in,
                    "n_out": n_out,
                    "n_legs": rep.n_legs,
                    "bound": rep.bound,
                    "predicted_equal": rep.predicted_equal,
                    "equal": rep.equal,
                    "deviation": rep.deviation,
                    "consistent": rep.consistent,
                }
            )
    if cfg.fmt == "human":
        sys.stdout.write(_table(records, HAAG_COLUMNS[1:], cfg.precision))
    else:
        _emit(cfg, records, HAAG_COLUMNS)
    return EXIT_OK if all(r["consistent"] for r in records) else EXIT_FAIL


def _table(records, columns, precision) -> str:
    rows = [[f"{r[c]:.3e}" if isinstance(r[c], float) else str(r[c]) for c in columns] for r in records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(columns)]
    fmt = "  ".join(f"{{:>{w}}}" for w in widths)
    return "\n".join([fmt.format(*columns)] + [fmt.format(*row) for row in rows]) + "\n"


def cmd_verify(cfg: RunConfig, args) -> int:
    results = run_suite(args.suite, cfg.theta, cfg.lattice, cfg.tolerance, cfg.seed, quick=not args.full)
    ok = all(r.passed for r in results)
    if cfg.fmt == "human":
        for r in results:
            print(r.line())
        print(f"{'PASS' if ok else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} properties")
    else:
        records = [{"schema_version": SCHEMA_VERSION, **r.as_dict()} for r in results]
        _emit(cfg, records)
    return EXIT_OK if ok else EXIT_FAIL


PHASE_COLUMNS = ["schema_version", "process", "theta0", "nc_phase_exponent", *_complex_columns("nc_phase_factor")]


def cmd_export(cfg: RunConfig, args) -> int:
    raw = _load_json(args.inputs)
    procs = _processes_from(raw, cfg.dims, cfg.mass)
    records = []
    if args.kind == "phase-table":
        thetas = [float(x) for x in args.theta0.split(",")] if args.theta0 else [None]
        for name, proc, _ in procs:
            for t0 in thetas:
                theta = cfg.theta if t0 is None else ThetaMatrix.canonical(cfg.dims, t0)
                records.append(
                    {
                        "schema_version": SCHEMA_VERSION,
                        "process": name,
                        "theta0": t0 if t0 is not None else float(theta.block[0, 1]),
                        "nc_phase_exponent": float(nc_phase_exponent(theta, proc)),
                        "nc_phase_factor": nc_phase_factor(theta, proc),
                    }
                )
        columns = PHASE_COLUMNS
    else:
        records = [_amplitude_record(cfg, cfg.theta, n, p, args.core or c or "free2pt") for n, p, c in procs]
        columns = AMPLITUDE_COLUMNS
    fmt = "csv" if cfg.fmt == "human" else cfg.fmt
    text = render(records, fmt, cfg.precision, columns)
    if args.output:
        try:
            Path(args.output).write_text(text)
        except OSError as exc:
            raise ConfigError(f"{args.output}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- entry point ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ncqft", description="Noncommutative QFT toolkit: star products, twisted Fock algebra, LSZ.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="JSON config: d, l, theta_block|theta|theta0, mass, modes|n_modes, seed")
    p.add_argument("--format", choices=("human", "json", "csv"), default="human")
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="box")
    p.add_argument("--precision", type=int, default=12, help="significant digits in human output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    star = sub.add_parser("star").add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = star.add_parser("eval", help="evaluate a star expression")
    s.add_argument("expr")
    s.add_argument("--symbolic", action="store_true", help="keep theta entries as symbols")
    s.set_defaults(func=cmd_star_eval)

    fock = sub.add_parser("fock").add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = fock.add_parser("vev", help="vacuum expectation of a word like 'a-(k1) a+(k2)'")
    s.add_argument("word")
    s.add_argument("--oracle", type=int, metavar="N", help="also evaluate with truncated matrices (occupation <= N)")
    s.set_defaults(func=cmd_fock_vev)

    corr = sub.add_parser("corr").add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = corr.add_parser("eval", help="free star-correlator from a JSON spec")
    s.add_argument("spec", help='{"kind": "wightman|green|pairing", "points": [{"label", "mode", "sign", "rank"}]}')
    s.set_defaults(func=cmd_corr_eval)

    lsz = sub.add_parser("lsz").add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = lsz.add_parser("amp", help="LSZ amplitude for processes in a JSON file")
    s.add_argument("process", help='{"processes": [{"in": [[...]], "out": [[...]], "mass": 1, "core": "free2pt"}]}')
    s.add_argument("--core", help="free2pt | free | contact:L | twisted-contact:L (overrides the file)")
    s.set_defaults(func=cmd_lsz_amp)

    haag = sub.add_parser("haag").add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = haag.add_parser("check", help="amplitude coincidence report for a theory pair")
    s.add_argument("pairs", nargs="?", help="pair spec JSON (seed, max_legs, offset, processes, theory_a/theory_b)")
    s.set_defaults(func=cmd_haag_check)

    s = sub.add_parser("verify", help="run a property suite")
    s.add_argument("suite", choices=(*SUITES, "all"))
    s.add_argument("--full", action="store_true", help="full sample sizes")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("export", help="deterministic tables")
    s.add_argument("kind", choices=("phase-table", "amplitude-table"))
    s.add_argument("inputs", help="process list JSON")
    s.add_argument("--theta0", help="comma separated sweep for phase-table")
    s.add_argument("--core", help="core for amplitude-table")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        raw = _load_json(args.config) if args.config else {}
        cfg = build_config(
            raw,
            args.config or "<default>",
            normalization=args.normalization,
            fmt=args.format,
            tolerance=args.tolerance,
            precision=args.precision,
        )
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"ncqft: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ParseError, ValueError, KeyError) as exc:
        print(f"ncqft: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
