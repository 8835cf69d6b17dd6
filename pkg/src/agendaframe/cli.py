"""Batch command-line front end.

Usage::

    agendaframe <command> --config run.ini [--key=value ...] [--section.key=value ...]

The config is an INI file. Keys in ``[general]`` apply to every command and
a section named after the command overrides them. ``--key=value`` flags
override the command's keys; ``--section.key=value`` targets another section.
Exit status: 0 success, 1 validation or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import logging
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .corpus import FRAMES, Document, EntityAliasSet, entity_focus, load_aliases, load_corpus, slice_corpus
from .embedding import ExpansionConfig, load_embeddings, train_cbow
from .evaluation import (
    baseline_logreg,
    cross_validate,
    eval_all_frames_f1,
    eval_primary_accuracy,
    intruder_generate,
    intruder_score,
    read_intruder_sets,
    read_responses,
    write_intruder_scores,
    write_intruder_sets,
    write_intruder_sheet,
)
from .framing import assign_all, npmi, write_assignments
from .lexicon import DocFrequencyTable, induce_lexicons, read_lexicons, write_lexicon, write_lexicons
from .projection import expand_and_filter, lexicon_overlap, load_dictionary, project_lexicon
from .salience import build_agendalex, frequency_prior, lexicon_frequency_series, partition_months
from .timeseries import (
    TimeSeries,
    align,
    article_coverage,
    granger_test,
    pearson,
    percent_change,
    read_series,
    word_coverage,
    write_granger_rows,
    write_series,
)

log = logging.getLogger("agendaframe")


class ConfigError(Exception):
    """A config key is missing or invalid."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


# -- typed config ------------------------------------------------------------------

def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _int_list(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def _str_list(raw: str) -> list[str]:
    return [x.strip() for x in raw.split(",") if x.strip()]


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: str | None = None
    check: Callable[[Any], bool] | None = None
    rule: str = ""
    path: str | None = None  # "file" or "dir": must exist


def _positive(v) -> bool:
    return v >= 1


COMMON = {
    "output_dir": Key(str, "out"),
    "seed": Key(int, "0", lambda v: v >= 0, "non-negative"),
    "log_level": Key(str, "WARNING"),
}
CORPUS = {"corpus": Key(str, None, path="file")}
ENTITY = {
    "aliases": Key(str, None, path="file"),
    "entity": Key(str, ""),
    "min_mentions": Key(int, "2", lambda v: v >= 0, "non-negative"),
}
ASSIGN = {
    "lexicons": Key(str, None, path="dir"),
    "frame_threshold": Key(int, "3", _positive, ">= 1"),
    "distinct": Key(_bool, "false"),
}
EMBED = {
    "embeddings": Key(str, "train"),
    "dimension": Key(int, "200", lambda v: v >= 2, ">= 2"),
    "window": Key(int, "5", _positive, ">= 1"),
    "epochs": Key(int, "5", _positive, ">= 1"),
    "min_count": Key(int, "5", _positive, ">= 1"),
    "save_embeddings": Key(_bool, "false"),
}


def _expansion(K: str, t: str, mode: str) -> dict[str, Key]:
    return {
        "K": Key(int, K, _positive, ">= 1"),
        "t": Key(float, t, lambda v: 0.0 <= v <= 2.0, "in [0, 2]"),
        "mode": Key(str, mode, lambda v: v in ("augment", "replace"), "augment or replace"),
        "vocab_cap": Key(int, "50000", _positive, ">= 1"),
    }


INDUCE_KEYS = {
    "frames": Key(_str_list, ",".join(FRAMES)),
    "size": Key(int, "250", _positive, ">= 1"),
    "expand": Key(_bool, "false"),
}

SCHEMAS: dict[str, dict[str, Key]] = {
    "induce": {**COMMON, **CORPUS, **INDUCE_KEYS, **EMBED, **_expansion("500", "0.4", "augment")},
    "project": {
        **COMMON, **CORPUS, **EMBED, **_expansion("1000", "0.3", "replace"),
        "lexicons": Key(str, None, path="dir"),
        "dictionary": Key(str, None, path="file"),
    },
    "assign": {**COMMON, **CORPUS, **ASSIGN},
    "coverage": {
        **COMMON, **CORPUS, **ENTITY,
        "granularity": Key(str, "month", lambda v: v in ("year", "quarter", "month"), "year, quarter or month"),
    },
    "correlate": {
        **COMMON, **CORPUS, **ENTITY,
        "indicator": Key(str, None, path="file"),
        "indicator_name": Key(str, "indicator"),
    },
    "granger": {
        **COMMON,
        "target": Key(str, ""),
        "predictor": Key(str, None, path="file"),
        "corpus": Key(str, ""),
        "aliases": Key(str, ""),
        "entity": Key(str, ""),
        "min_mentions": Key(int, "2", lambda v: v >= 0, "non-negative"),
        "metric": Key(str, "word", lambda v: v in ("word", "article"), "word or article"),
        "lags": Key(_int_list, "1,2", lambda v: bool(v) and all(x >= 1 for x in v), "positive integers"),
        "intercept": Key(_bool, "true"),
        "transform": Key(str, "pct_change", lambda v: v in ("pct_change", "none"), "pct_change or none"),
        "reverse": Key(_bool, "true"),
    },
    "npmi": {**COMMON, **CORPUS, **ENTITY, **ASSIGN},
    "agendalex": {
        **COMMON, **CORPUS, **ENTITY, **ASSIGN,
        "indicator": Key(str, None, path="file"),
        "frames": Key(_str_list, ""),
        "top_n": Key(int, "500", _positive, ">= 1"),
        "decile": Key(float, "0.1", lambda v: 0.0 < v <= 0.5, "in (0, 0.5]"),
        "prior_scale": Key(float, "500", lambda v: v > 0, "> 0"),
    },
    "eval-primary": {
        **COMMON, **CORPUS, **INDUCE_KEYS, **EMBED, **_expansion("500", "0.4", "augment"),
        "folds": Key(int, "10", lambda v: v >= 2, ">= 2"),
        "frame_threshold": Key(int, "3", _positive, ">= 1"),
        "lexicons": Key(str, ""),
    },
    "eval-frames": {
        **COMMON, **CORPUS, **INDUCE_KEYS, **EMBED, **_expansion("500", "0.4", "augment"),
        "folds": Key(int, "10", lambda v: v >= 2, ">= 2"),
        "frame_threshold": Key(int, "3", _positive, ">= 1"),
        "lexicons": Key(str, ""),
        "baseline": Key(_bool, "true"),
    },
    "intruder-gen": {
        **COMMON,
        "lexicons": Key(str, None, path="dir"),
        "sets_per_frame": Key(int, "15", _positive, ">= 1"),
    },
    "intruder-score": {
        **COMMON,
        "sets": Key(str, None, path="file"),
        "responses": Key(str, None, path="file"),
    },
}

COMMANDS = tuple(SCHEMAS)


def resolve_config(
    command: str,
    config_path: str | None,
    overrides: Sequence[str],
) -> dict[str, Any]:
    """Merge defaults, ``[general]``, ``[<command>]`` and flag overrides, then validate."""
    schema = SCHEMAS[command]
    raw: dict[str, str] = {k: v.default for k, v in schema.items() if v.default is not None}
    base_dir = Path(".")
    if config_path:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str  # keep "K" distinct from "k"
        if not cp.read(config_path, encoding="utf-8"):
            raise ConfigError("config", f"cannot read {config_path}")
        base_dir = Path(config_path).resolve().parent
        for section in ("general", command):
            if cp.has_section(section):
                for k, v in cp.items(section):
                    if k in schema:
                        raw[k] = v
    for item in overrides:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(item, "overrides must look like --key=value")
        key, value = item[2:].split("=", 1)
        if "." in key:
            section, key = key.split(".", 1)
            if section not in ("general", command):
                continue
        if key not in schema:
            raise ConfigError(key, f"unknown for command {command!r}")
        raw[key] = value

    cfg: dict[str, Any] = {}
    for key, spec in schema.items():
        if key not in raw:
            raise ConfigError(key, "required")
        try:
            value = spec.parse(raw[key])
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
        if spec.check is not None and not spec.check(value):
            raise ConfigError(key, f"must be {spec.rule}, got {raw[key]!r}")
        if spec.path and value:
            p = Path(value)
            if not p.is_absolute():
                p = base_dir / p
            ok = p.is_file() if spec.path == "file" else p.is_dir()
            if not ok:
                raise ConfigError(key, f"{spec.path} not found: {p}")
            value = str(p)
        cfg[key] = value
    for key in ("target", "corpus", "aliases", "lexicons"):
        if key in cfg and cfg[key] and not schema[key].path:
            p = Path(cfg[key])
            p = p if p.is_absolute() else base_dir / p
            if not p.exists():
                raise ConfigError(key, f"not found: {p}")
            cfg[key] = str(p)
    out = Path(cfg["output_dir"])
    cfg["output_dir"] = str(out if out.is_absolute() else base_dir / out)
    return cfg


# -- helpers ---------------------------------------------------------------------------

def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _pick_entity(cfg: dict) -> EntityAliasSet:
    table = load_aliases(cfg["aliases"])
    if not table:
        raise ConfigError("aliases", "no entities defined")
    name = cfg.get("entity") or sorted(table)[0]
    if name not in table:
        raise ConfigError("entity", f"{name!r} not in alias file (have {', '.join(sorted(table))})")
    return table[name]


def _space(cfg: dict, docs: Sequence[Document], out: Path, outputs: list[Path]):
    if cfg["embeddings"] == "train":
        space = train_cbow(docs, cfg["dimension"], cfg["window"], cfg["epochs"], cfg["seed"],
                           min_count=cfg["min_count"])
        if cfg["save_embeddings"]:
            p = out / "embeddings.txt"
            space.save(p)
            outputs.append(p)
        return space
    p = Path(cfg["embeddings"])
    if not p.is_file():
        raise ConfigError("embeddings", f"expected 'train' or an embedding file, got {p}")
    return load_embeddings(p)


def _expansion_cfg(cfg: dict) -> ExpansionConfig:
    return ExpansionConfig(cfg["K"], cfg["t"], cfg["mode"], cfg["vocab_cap"])


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


# -- commands --------------------------------------------------------------------------
# each returns (input files, output files)

def cmd_induce(cfg: dict, out: Path):
    docs = load_corpus(cfg["corpus"])
    annotated = {s.frame for d in docs for s in d.annotations}
    frames = [f for f in cfg["frames"] if f in annotated]
    if not frames:
        raise ConfigError("frames", "none of the configured frames is annotated in the corpus")
    df = DocFrequencyTable.from_documents(docs)
    lexicons = induce_lexicons(docs, frames, cfg["size"], df)
    outputs: list[Path] = []
    if cfg["expand"]:
        space = _space(cfg, docs, out, outputs)
        lexicons = {f: expand_and_filter(lex, space, df, _expansion_cfg(cfg)) for f, lex in lexicons.items()}
    outputs += write_lexicons(lexicons.values(), out / "lexicons")
    return [cfg["corpus"]], outputs


def cmd_project(cfg: dict, out: Path):
    base = read_lexicons(cfg["lexicons"])
    dictionary = load_dictionary(cfg["dictionary"])
    docs = load_corpus(cfg["corpus"])
    outputs: list[Path] = []
    space = _space(cfg, docs, out, outputs)
    df = DocFrequencyTable.from_documents(docs)
    exp = _expansion_cfg(cfg)
    final = {f: project_lexicon(lex, dictionary, space, df, exp) for f, lex in sorted(base.items())}
    outputs += write_lexicons(final.values(), out / "lexicons")
    p = out / "lexicon_overlap.csv"
    _write_csv(p, ["frame_a", "frame_b", "shared", "jaccard"],
               [(a, b, n, _fmt(j)) for a, b, n, j in lexicon_overlap(final)])
    outputs.append(p)
    inputs = [cfg["corpus"], cfg["dictionary"], *sorted(str(x) for x in Path(cfg["lexicons"]).glob("*.tsv"))]
    return inputs, outputs


def cmd_assign(cfg: dict, out: Path):
    docs = load_corpus(cfg["corpus"])
    lexicons = read_lexicons(cfg["lexicons"])
    assignments = assign_all(docs, lexicons, cfg["frame_threshold"], cfg["distinct"])
    p = out / "assignments.jsonl"
    write_assignments(assignments.values(), p)
    return [cfg["corpus"]], [p]


def _coverage(cfg: dict, granularity: str):
    docs = load_corpus(cfg["corpus"])
    aliases = _pick_entity(cfg)
    slices = slice_corpus(docs, granularity)
    art = article_coverage(slices, docs, aliases, cfg["min_mentions"])
    word = word_coverage(slices, docs, aliases)
    return art, word


def cmd_coverage(cfg: dict, out: Path):
    art, word = _coverage(cfg, cfg["granularity"])
    p = out / f"coverage_{cfg['granularity']}.csv"
    write_series({"article": art, "word": word}, p)
    return [cfg["corpus"], cfg["aliases"]], [p]


def cmd_correlate(cfg: dict, out: Path):
    indicator = read_series(cfg["indicator"])
    art, word = _coverage(cfg, indicator.granularity)
    rows = []
    for level, series in (("article", art), ("word", word)):
        a, b = align(series, indicator)
        try:
            r = _fmt(pearson(a, b))
        except ValueError as exc:
            log.warning("%s coverage: %s", level, exc)
            r = ""
        rows.append((cfg["indicator_name"], indicator.granularity, level, len(a), r))
    p = out / "correlations.csv"
    _write_csv(p, ["indicator", "granularity", "level", "n", "pearson_r"], rows)
    return [cfg["corpus"], cfg["aliases"], cfg["indicator"]], [p]


def cmd_granger(cfg: dict, out: Path):
    predictor = read_series(cfg["predictor"])
    inputs = [cfg["predictor"]]
    if cfg["target"]:
        target = read_series(cfg["target"])
        inputs.append(cfg["target"])
        target_name = Path(cfg["target"]).stem
    else:
        if not cfg["corpus"] or not cfg["aliases"]:
            raise ConfigError("target", "give a target series or a corpus with aliases")
        art, word = _coverage(cfg, predictor.granularity)
        target = word if cfg["metric"] == "word" else art
        inputs += [cfg["corpus"], cfg["aliases"]]
        target_name = f"{cfg['metric']}_coverage"
    if cfg["transform"] == "pct_change":
        target, predictor = percent_change(target), percent_change(predictor)
    target, predictor = align(target, predictor)
    predictor_name = Path(cfg["predictor"]).stem
    directions = [("forward", target, predictor, target_name, predictor_name)]
    if cfg["reverse"]:
        directions.append(("reverse", predictor, target, predictor_name, target_name))
    rows = []
    for name, y, x, yn, xn in directions:
        for lag in cfg["lags"]:
            res = granger_test(y, x, lag, lag, cfg["intercept"])
            for r in res.rows():
                rows.append({"direction": name, "target": yn, "predictor": xn, "m": lag, "n": lag,
                             **r, "n_obs": res.n_obs})
    p = out / "granger.csv"
    write_granger_rows(rows, p)
    return inputs, [p]


def cmd_npmi(cfg: dict, out: Path):
    docs = load_corpus(cfg["corpus"])
    lexicons = read_lexicons(cfg["lexicons"])
    focus = entity_focus(_pick_entity(cfg), cfg["min_mentions"])
    assignments = assign_all(docs, lexicons, cfg["frame_threshold"], cfg["distinct"])
    rows = []
    for frame in sorted(lexicons):
        try:
            value = _fmt(npmi(docs, focus, frame, assignments=assignments))
        except ValueError as exc:
            log.warning("%s", exc)
            value = ""
        rows.append((frame, value))
    p = out / "npmi.csv"
    _write_csv(p, ["frame", "npmi"], rows)
    return [cfg["corpus"], cfg["aliases"]], [p]


def cmd_agendalex(cfg: dict, out: Path):
    docs = load_corpus(cfg["corpus"])
    lexicons = read_lexicons(cfg["lexicons"])
    focus = entity_focus(_pick_entity(cfg), cfg["min_mentions"])
    indicator = read_series(cfg["indicator"])
    partition = partition_months(indicator, cfg["decile"])
    assignments = assign_all(docs, lexicons, cfg["frame_threshold"], cfg["distinct"])
    prior = frequency_prior(docs, cfg["prior_scale"])
    frames = cfg["frames"] or sorted(lexicons)
    slices = slice_corpus(docs, "month")
    outputs: list[Path] = []
    stats = []
    for frame in frames:
        if frame not in lexicons:
            raise ConfigError("frames", f"no lexicon for {frame!r}")
        lex = build_agendalex(frame, docs, assignments, partition, focus, prior, cfg["top_n"])
        outputs += write_lexicons([lex], out / "agendalex")
        freq = lexicon_frequency_series(lex.words, slices, docs, focus)
        a, b = align(freq, indicator)
        r = pearson(a, b) if len(lex) else float("nan")
        try:
            g = granger_test(*align(percent_change(a), percent_change(b)), 1, 1)
            p1 = g.p_value("beta_1")
            b1 = g.coefficient("beta_1")
        except ValueError as exc:
            log.warning("%s: lexicon-frequency granger test skipped: %s", frame, exc)
            p1 = b1 = float("nan")
        stats.append((frame, len(lex), _fmt(r), _fmt(b1), _fmt(p1)))
    p = out / "agendalex_stats.csv"
    _write_csv(p, ["frame", "size", "pearson_r", "granger_beta_1", "granger_p_1"], stats)
    outputs.append(p)
    return [cfg["corpus"], cfg["aliases"], cfg["indicator"]], outputs


def cmd_eval_primary(cfg: dict, out: Path):
    docs = load_corpus(cfg["corpus"])
    missing = [d.id for d in docs if d.primary_frame is None]
    if missing:
        raise ConfigError("corpus", f"{len(missing)} documents lack primary_frame (e.g. {missing[0]})")
    gold = {d.id: d.primary_frame for d in docs}
    rows = []
    if cfg["lexicons"]:
        assignments = assign_all(docs, read_lexicons(cfg["lexicons"]), cfg["frame_threshold"])
        acc = eval_primary_accuracy({d: a.primary for d, a in assignments.items()}, gold)
    else:
        space = _space(cfg, docs, out, []) if cfg["expand"] else None
        cv = cross_validate(docs, cfg["frames"], cfg["folds"], cfg["seed"], cfg["size"],
                            cfg["frame_threshold"], space, _expansion_cfg(cfg))
        rows = [(str(i), _fmt(a)) for i, a in enumerate(cv.fold_accuracy(gold))]
        acc = eval_primary_accuracy(cv.primary, gold)
    rows.append(("all", _fmt(acc)))
    p = out / "eval_primary.csv"
    _write_csv(p, ["fold", "accuracy"], rows)
    return [cfg["corpus"]], [p]


def cmd_eval_frames(cfg: dict, out: Path):
    docs = load_corpus(cfg["corpus"])
    gold = {d.id: d.annotated_frames for d in docs}
    frames = [f for f in cfg["frames"] if any(f in g for g in gold.values())]
    base_preds = None
    if cfg["lexicons"]:
        assignments = assign_all(docs, read_lexicons(cfg["lexicons"]), cfg["frame_threshold"])
        present = {d: set(a.present) for d, a in assignments.items()}
    else:
        space = _space(cfg, docs, out, []) if cfg["expand"] else None
        cv = cross_validate(docs, frames, cfg["folds"], cfg["seed"], cfg["size"],
                            cfg["frame_threshold"], space, _expansion_cfg(cfg), cfg["baseline"])
        present, base_preds = cv.present, cv.baseline
    ours = eval_all_frames_f1(present, gold, frames)
    base = eval_all_frames_f1(base_preds, gold, frames) if base_preds is not None else None
    header = ["frame", "precision", "recall", "f1"]
    if base:
        header += ["baseline_precision", "baseline_recall", "baseline_f1"]
    rows = []
    for f in frames:
        row = [f, _fmt(ours[f].precision), _fmt(ours[f].recall), _fmt(ours[f].f1)]
        if base:
            row += [_fmt(base[f].precision), _fmt(base[f].recall), _fmt(base[f].f1)]
        rows.append(row)
    p = out / "eval_frames.csv"
    _write_csv(p, header, rows)
    return [cfg["corpus"]], [p]


def cmd_intruder_gen(cfg: dict, out: Path):
    lexicons = read_lexicons(cfg["lexicons"])
    sets = intruder_generate(lexicons, cfg["sets_per_frame"], cfg["seed"])
    p1, p2 = out / "intruder_sets.jsonl", out / "intruder_sheet.tsv"
    write_intruder_sets(sets, p1)
    write_intruder_sheet(sets, p2)
    return sorted(str(x) for x in Path(cfg["lexicons"]).glob("*.tsv")), [p1, p2]


def cmd_intruder_score(cfg: dict, out: Path):
    sets = read_intruder_sets(cfg["sets"])
    scores = intruder_score(sets, read_responses(cfg["responses"]))
    p = out / "intruder_scores.csv"
    write_intruder_scores(scores, p)
    return [cfg["sets"], cfg["responses"]], [p]


HANDLERS = {
    "induce": cmd_induce,
    "project": cmd_project,
    "assign": cmd_assign,
    "coverage": cmd_coverage,
    "correlate": cmd_correlate,
    "granger": cmd_granger,
    "npmi": cmd_npmi,
    "agendalex": cmd_agendalex,
    "eval-primary": cmd_eval_primary,
    "eval-frames": cmd_eval_frames,
    "intruder-gen": cmd_intruder_gen,
    "intruder-score": cmd_intruder_score,
}


def write_manifest(command: str, cfg: dict, inputs, outputs, out: Path) -> Path:
    """Run manifest: parameters, seed and content hashes. Only ``created`` varies between runs."""
    def rel(p) -> str:
        p = Path(p)
        try:
            return str(p.resolve().relative_to(out.resolve()))
        except ValueError:
            return str(p)

    manifest = {
        "command": command,
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "parameters": {k: v for k, v in sorted(cfg.items())},
        "seed": cfg.get("seed"),
        "inputs": {str(p): _sha256(Path(p)) for p in inputs if p},
        "outputs": {rel(p): _sha256(Path(p)) for p in outputs},
    }
    path = out / f"{command}.manifest.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agendaframe",
        description="Agenda-setting and framing analysis for news corpora.",
        epilog="Any config key can be overridden with --key=value or --section.key=value.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=COMMANDS, help="pipeline stage to run")
    parser.add_argument("-c", "--config", help="INI config file")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        cfg = resolve_config(args.command, args.config, extra)
    except ConfigError as exc:
        print(f"agendaframe: error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=cfg["log_level"].upper(), format="%(levelname)s %(name)s: %(message)s")
    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    try:
        inputs, outputs = HANDLERS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"agendaframe: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, ArithmeticError) as exc:
        print(f"agendaframe: {args.command} failed: {exc}", file=sys.stderr)
        return 1
    write_manifest(args.command, cfg, inputs, outputs, out)
    for p in outputs:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
