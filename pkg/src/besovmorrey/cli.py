"""Command line front end.

Five subcommands: ``check`` decides an embedding between two sequence
spaces, ``norm`` evaluates the quasi-norm of a coefficient CSV, ``witness``
emits a divergence certificate for a failing embedding, ``analyze`` runs the
wavelet cascade over a sample grid, and ``sweep`` batches embedding
decisions over a parameter grid from a config file.

Exit codes are part of the interface:

* 0  success (for ``check``/``witness``: the embedding holds resp. the
      certificate was produced),
* 1  the decided outcome is negative (``check``: embedding fails;
      ``witness``: the embedding holds, so there is nothing to certify),
* 2  the numeric classifier could not settle the question,
* 64 malformed command line or config (including profile grammar errors),
* 65 a data file could not be parsed (sequence CSV, sample CSV, profile
      table),
* 66 a sweep grid larger than the hard cap.

All output is deterministic: floats are printed via repr, JSON keys are
sorted, and no timestamps or machine identifiers appear.
"""

from __future__ import annotations

import argparse
import configparser
import itertools
import json
import math
import sys

import numpy as np

from . import __version__
from .dyadic import (
    format_space_params,
    load_csv,
    n_norm,
    parse_space_params,
)
from .embedding import DEFAULT_J_MAX, DEFAULT_NU_MIN, EmbeddingQuery, decide
from .errors import DomainError, TableFormatError
from .wavelet import (
    analyze as wavelet_analyze,
    daubechies_system,
    function_norm_estimate,
    load_samples,
    min_vanishing_moments,
)
from .witness import divergence_scan

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_UNDETERMINED = 2
EXIT_CONFIG = 64
EXIT_DATA = 65
EXIT_TOOBIG = 66

DEFAULT_TOL = 1e-9
DEFAULT_WITNESS_DEPTH = 12
MAX_SWEEP = 100_000

_OUTCOME_CODES = {
    "holds": EXIT_HOLDS,
    "fails": EXIT_FAILS,
    "undetermined": EXIT_UNDETERMINED,
}

_SPACE_KEYS = ("s", "p", "q", "phi", "d")


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(EXIT_CONFIG, "%s: %s" % (self.prog, message))


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
    return x


def _emit_json(handle, record):
    handle.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# config and space blocks


def _load_config(path):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh, source=path)
    except OSError as exc:
        raise _CliError(EXIT_CONFIG, "cannot read config %r: %s" % (path, exc))
    except configparser.Error as exc:
        raise _CliError(EXIT_CONFIG, "bad config %r: %s" % (path, exc))
    return parser


def _section_block(cfg, section):
    if cfg is None or not cfg.has_section(section):
        return None
    items = dict(cfg.items(section))
    unknown = sorted(set(items) - set(_SPACE_KEYS))
    if unknown:
        raise _CliError(
            EXIT_CONFIG,
            "unknown key(s) %s in [%s]" % (", ".join(unknown), section),
        )
    return ",".join("%s=%s" % (key, items[key]) for key in _SPACE_KEYS if key in items)


def _parse_space(block, label):
    try:
        return parse_space_params(block)
    except TableFormatError as exc:
        raise _CliError(EXIT_DATA, "%s space: %s" % (label, exc))
    except DomainError as exc:
        raise _CliError(EXIT_CONFIG, "%s space: %s" % (label, exc))


def _resolve_pair(args):
    cfg = _load_config(args.config) if args.config else None
    src_block = args.source or _section_block(cfg, "source")
    tgt_block = args.target or _section_block(cfg, "target")
    if not src_block:
        raise _CliError(
            EXIT_CONFIG, "no source space: pass --source or a config with [source]"
        )
    if not tgt_block:
        raise _CliError(
            EXIT_CONFIG, "no target space: pass --target or a config with [target]"
        )
    source = _parse_space(src_block, "source")
    target = _parse_space(tgt_block, "target")
    try:
        query = EmbeddingQuery(source=source, target=target)
    except DomainError as exc:
        raise _CliError(EXIT_CONFIG, str(exc))
    return query, cfg


def _run_int(args_value, cfg, key, fallback):
    if args_value is not None:
        return args_value
    if cfg is not None and cfg.has_section("run") and cfg.has_option("run", key):
        try:
            return cfg.getint("run", key)
        except ValueError:
            raise _CliError(EXIT_CONFIG, "[run] %s must be an integer" % key)
    return fallback


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", encoding="utf-8"), True
    except OSError as exc:
        raise _CliError(EXIT_CONFIG, "cannot write %r: %s" % (path, exc))


# ---------------------------------------------------------------------------
# check


def _verdict_record(verdict):
    return {
        "outcome": verdict.outcome,
        "method": verdict.method,
        "rho": _jsonable(verdict.rho),
        "q_star": _jsonable(verdict.q_star),
        "cond0_status": verdict.cond0.status,
        "cond0_value": _jsonable(verdict.cond0.value),
        "cond0_detail": verdict.cond0.detail,
        "cond2_status": verdict.cond2.status,
        "cond2_value": _jsonable(verdict.cond2.value),
        "cond2_detail": verdict.cond2.detail,
        "never_compact": verdict.never_compact,
        "constant": _jsonable(verdict.constant),
        "notes": list(verdict.notes),
    }


def _cmd_check(args):
    query, cfg = _resolve_pair(args)
    jmax = _run_int(args.jmax, cfg, "jmax", DEFAULT_J_MAX)
    numin = _run_int(args.numin, cfg, "numin", DEFAULT_NU_MIN)
    verdict = decide(query, j_max=jmax, nu_min=numin)
    if args.json:
        _emit_json(
            sys.stdout,
            {
                "command": "check",
                "version": __version__,
                "jmax": jmax,
                "numin": numin,
                "tol": DEFAULT_TOL,
            },
        )
        record = _verdict_record(verdict)
        record["source"] = format_space_params(query.source)
        record["target"] = format_space_params(query.target)
        _emit_json(sys.stdout, record)
    else:
        out = sys.stdout
        out.write("source=%s\n" % format_space_params(query.source))
        out.write("target=%s\n" % format_space_params(query.target))
        out.write("outcome=%s\n" % verdict.outcome)
        out.write("method=%s\n" % verdict.method)
        out.write("rho=%r\n" % verdict.rho)
        out.write("q_star=%r\n" % verdict.q_star)
        out.write(
            "cond0=%s value=%r%s\n"
            % (
                verdict.cond0.status,
                verdict.cond0.value,
                " (%s)" % verdict.cond0.detail if verdict.cond0.detail else "",
            )
        )
        out.write(
            "cond2=%s value=%r%s\n"
            % (
                verdict.cond2.status,
                verdict.cond2.value,
                " (%s)" % verdict.cond2.detail if verdict.cond2.detail else "",
            )
        )
        if verdict.constant is not None:
            out.write("constant=%r\n" % verdict.constant)
        for note in verdict.notes:
            out.write("note=%s\n" % note)
    return _OUTCOME_CODES[verdict.outcome]


# ---------------------------------------------------------------------------
# norm


def _cmd_norm(args):
    cfg = _load_config(args.config) if args.config else None
    block = args.space or _section_block(cfg, "source")
    if not block:
        raise _CliError(
            EXIT_CONFIG, "no space: pass --space or a config with [source]"
        )
    params = _parse_space(block, "norm")
    try:
        seq = load_csv(args.seq)
    except OSError as exc:
        raise _CliError(EXIT_DATA, "cannot read %r: %s" % (args.seq, exc))
    except DomainError as exc:
        raise _CliError(EXIT_DATA, str(exc))
    if seq.d != params.d:
        raise _CliError(
            EXIT_CONFIG,
            "sequence dimension %d does not match space dimension %d"
            % (seq.d, params.d),
        )
    value = n_norm(seq, params)
    sys.stdout.write("space=%s\n" % format_space_params(params))
    sys.stdout.write("entries=%d\n" % len(seq))
    sys.stdout.write("norm=%r\n" % value)
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# witness


def _cmd_witness(args):
    query, cfg = _resolve_pair(args)
    numin = _run_int(args.numin, cfg, "numin", DEFAULT_NU_MIN)
    depth = _run_int(args.depth, cfg, "depth", DEFAULT_WITNESS_DEPTH)
    if depth < 0:
        raise _CliError(EXIT_CONFIG, "depth must be >= 0")
    verdict = decide(query, nu_min=numin)
    if verdict.outcome != "fails":
        sys.stderr.write(
            "the embedding verdict is %r; divergence witnesses exist only "
            "for failing pairs\n" % verdict.outcome
        )
        # success here means "certificate produced", so a holding pair is a miss
        return EXIT_FAILS if verdict.outcome == "holds" else EXIT_UNDETERMINED
    scan = divergence_scan(query, depth=depth, nu_min=numin)
    handle, opened = _open_out(args.out)
    try:
        handle.write("# besovmorrey witness\n")
        handle.write("# source=%s\n" % format_space_params(query.source))
        handle.write("# target=%s\n" % format_space_params(query.target))
        handle.write("# family=%s outcome=%s\n" % (scan.family, scan.outcome))
        handle.write(
            "# depth=%d numin=%d tol=%r\n" % (depth, numin, DEFAULT_TOL)
        )
        handle.write("index,ratio\n")
        for i, ratio in zip(scan.indices, scan.ratios):
            handle.write("%d,%r\n" % (i, ratio))
    finally:
        if opened:
            handle.close()
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# analyze


def _cmd_analyze(args):
    cfg = _load_config(args.config) if args.config else None
    block = args.space or _section_block(cfg, "source")
    params = _parse_space(block, "analyze") if block else None
    if args.moments is None and params is None:
        raise _CliError(
            EXIT_CONFIG, "pass --moments or a space (--space / config [source])"
        )
    try:
        f = load_samples(args.samples)
    except OSError as exc:
        raise _CliError(EXIT_DATA, "cannot read %r: %s" % (args.samples, exc))
    except DomainError as exc:
        raise _CliError(EXIT_DATA, str(exc))
    if params is not None and f.d != params.d:
        raise _CliError(
            EXIT_CONFIG,
            "sample dimension %d does not match space dimension %d"
            % (f.d, params.d),
        )
    try:
        if args.moments is not None:
            system = daubechies_system(args.moments)
        else:
            system = daubechies_system(
                min_vanishing_moments(params.s, params.p, params.d)
            )
        depth = args.depth if args.depth is not None else f.js
        coeffs = wavelet_analyze(f, system, depth=depth, prune=args.prune)
    except DomainError as exc:
        raise _CliError(EXIT_CONFIG, str(exc))
    handle, opened = _open_out(args.out)
    try:
        handle.write("# besovmorrey analyze\n")
        handle.write(
            "# moments=%d depth=%d prune=%r\n" % (system.moments, depth, args.prune)
        )
        handle.write("# d=%d js=%d base_level=%d\n" % (f.d, f.js, coeffs.base_level))
        handle.write(
            "# detail rows carry the 2^(j d/2) rescaling; scaling rows are raw\n"
        )
        cols = ",".join("m_%d" % (r + 1) for r in range(f.d))
        handle.write("gender,j,%s,value\n" % cols)
        scale_off, scale_arr = coeffs.scaling
        lowpass_label = "F" * f.d
        for idx in np.ndindex(scale_arr.shape):
            val = float(scale_arr[idx])
            if val == 0.0:
                continue
            cell = [scale_off[r] + idx[r] for r in range(f.d)]
            handle.write(
                "%s,%d,%s,%r\n"
                % (lowpass_label, coeffs.base_level, ",".join(str(c) for c in cell), val)
            )
        for gender, seq in sorted(coeffs.detail_sequences().items()):
            for (j, m), val in seq.entries():
                handle.write(
                    "%s,%d,%s,%r\n"
                    % (gender, j, ",".join(str(c) for c in m), val)
                )
    finally:
        if opened:
            handle.close()
    if params is not None:
        try:
            estimate = function_norm_estimate(f, params, system=system)
        except DomainError as exc:
            raise _CliError(EXIT_CONFIG, str(exc))
        sys.stdout.write("norm_estimate=%r\n" % estimate)
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# sweep


def _apply_override(blocks, key, value):
    prefix, _, fieldname = key.partition(".")
    if prefix not in ("source", "target") or fieldname not in _SPACE_KEYS:
        raise _CliError(
            EXIT_CONFIG,
            "sweep key %r is not source.<s|p|q|phi|d> or target.<...>" % key,
        )
    blocks[prefix][fieldname] = value


def _cmd_sweep(args):
    cfg = _load_config(args.config)
    if not cfg.has_section("sweep"):
        raise _CliError(EXIT_CONFIG, "config has no [sweep] section")
    base = {}
    for section in ("source", "target"):
        if not cfg.has_section(section):
            raise _CliError(EXIT_CONFIG, "config is missing the [%s] section" % section)
        items = dict(cfg.items(section))
        unknown = sorted(set(items) - set(_SPACE_KEYS))
        if unknown:
            raise _CliError(
                EXIT_CONFIG,
                "unknown key(s) %s in [%s]" % (", ".join(unknown), section),
            )
        base[section] = items
    jmax = _run_int(args.jmax, cfg, "jmax", DEFAULT_J_MAX)
    numin = _run_int(args.numin, cfg, "numin", DEFAULT_NU_MIN)

    sweep_items = sorted(cfg.items("sweep"))
    names = [key for key, _ in sweep_items]
    choices = []
    for key, raw in sweep_items:
        values = [piece.strip() for piece in raw.split(";") if piece.strip()]
        if not values:
            raise _CliError(EXIT_CONFIG, "sweep key %r has no values" % key)
        _apply_override({"source": {}, "target": {}}, key, values[0])  # validates key
        choices.append(values)
    count = 1
    for values in choices:
        count *= len(values)
    if count > MAX_SWEEP:
        raise _CliError(
            EXIT_TOOBIG,
            "sweep grid has %d combinations; the cap is %d" % (count, MAX_SWEEP),
        )

    handle, opened = _open_out(args.out)
    try:
        _emit_json(
            handle,
            {
                "command": "sweep",
                "version": __version__,
                "count": count,
                "keys": names,
                "jmax": jmax,
                "numin": numin,
                "tol": DEFAULT_TOL,
            },
        )
        for index, combo in enumerate(itertools.product(*choices)):
            blocks = {
                "source": dict(base["source"]),
                "target": dict(base["target"]),
            }
            for key, value in zip(names, combo):
                _apply_override(blocks, key, value)
            record = {"index": index}
            record.update(dict(zip(names, combo)))
            try:
                source = _parse_space(_format_block(blocks["source"]), "source")
                target = _parse_space(_format_block(blocks["target"]), "target")
                query = EmbeddingQuery(source=source, target=target)
            except _CliError as err:
                if err.code == EXIT_DATA:
                    raise
                record["outcome"] = "error"
                record["error"] = err.message
                _emit_json(handle, record)
                continue
            except DomainError as exc:
                record["outcome"] = "error"
                record["error"] = str(exc)
                _emit_json(handle, record)
                continue
            verdict = decide(query, j_max=jmax, nu_min=numin)
            record["outcome"] = verdict.outcome
            record["method"] = verdict.method
            record["rho"] = _jsonable(verdict.rho)
            record["q_star"] = _jsonable(verdict.q_star)
            record["cond0_status"] = verdict.cond0.status
            record["cond0_value"] = _jsonable(verdict.cond0.value)
            record["cond2_status"] = verdict.cond2.status
            record["cond2_value"] = _jsonable(verdict.cond2.value)
            _emit_json(handle, record)
    finally:
        if opened:
            handle.close()
    return EXIT_HOLDS


def _format_block(mapping):
    return ",".join(
        "%s=%s" % (key, mapping[key]) for key in _SPACE_KEYS if key in mapping
    )


# ---------------------------------------------------------------------------
# parser


def _build_parser():
    parser = _Parser(
        prog="besovmorrey",
        description="quasi-norms, embedding decisions and witnesses for "
        "Besov-type spaces built on generalised Morrey spaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add_pair(p):
        p.add_argument(
            "--source", help="inline block s=...,p=...,q=...,phi=...,d=..."
        )
        p.add_argument("--target", help="inline block, same grammar as --source")
        p.add_argument("--config", help="INI file with [source]/[target]/[run]")

    check = sub.add_parser("check", help="decide whether source embeds into target")
    add_pair(check)
    check.add_argument("--jmax", type=int, help="levels probed by the classifier")
    check.add_argument("--numin", type=int, help="coarsest cube level probed")
    check.add_argument("--json", action="store_true", help="emit JSONL instead of text")
    check.set_defaults(handler=_cmd_check)

    norm = sub.add_parser("norm", help="quasi-norm of a coefficient CSV")
    norm.add_argument("--space", help="inline block s=...,p=...,q=...,phi=...,d=...")
    norm.add_argument("--config", help="INI file; [source] supplies the space")
    norm.add_argument("--seq", required=True, help="coefficient CSV file")
    norm.set_defaults(handler=_cmd_norm)

    witness = sub.add_parser(
        "witness", help="divergence certificate for a failing embedding"
    )
    add_pair(witness)
    witness.add_argument("--depth", type=int, help="largest witness index")
    witness.add_argument("--numin", type=int, help="coarsest cube level probed")
    witness.add_argument("--out", help="CSV output path (default: stdout)")
    witness.set_defaults(handler=_cmd_witness)

    analyze = sub.add_parser("analyze", help="wavelet cascade over a sample grid")
    analyze.add_argument("--samples", required=True, help="sample CSV file")
    analyze.add_argument(
        "--space", help="space block; enables the quasi-norm estimate"
    )
    analyze.add_argument("--config", help="INI file; [source] supplies the space")
    analyze.add_argument("--moments", type=int, help="filter order override")
    analyze.add_argument("--depth", type=int, help="cascade depth (default: full)")
    analyze.add_argument(
        "--prune", type=float, default=0.0, help="relative pruning threshold"
    )
    analyze.add_argument("--out", help="CSV output path (default: stdout)")
    analyze.set_defaults(handler=_cmd_analyze)

    sweep = sub.add_parser(
        "sweep", help="batch embedding decisions over a parameter grid"
    )
    sweep.add_argument("--config", required=True, help="INI file with [sweep]")
    sweep.add_argument("--jmax", type=int, help="levels probed by the classifier")
    sweep.add_argument("--numin", type=int, help="coarsest cube level probed")
    sweep.add_argument("--out", help="JSONL output path (default: stdout)")
    sweep.set_defaults(handler=_cmd_sweep)
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _CliError as err:
        sys.stderr.write(err.message + "\n")
        return err.code
    except BrokenPipeError:
        return EXIT_HOLDS


if __name__ == "__main__":
    sys.exit(main())
