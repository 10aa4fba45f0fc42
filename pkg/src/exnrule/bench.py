"""Repeated-split benchmark runner.

Random streams used by :func:`run_experiment`, for dataset number ``d`` (its
position in the config) and repetition ``r``:

* scenario data    ``RngStream(derive_seed(seed, DATA, d), r)``
* train/test split ``RngStream(derive_seed(seed, SPLIT, d), r)``
* model seeds      ``derive_seed(seed, MODEL, d, r)``; shared by every method and k
* tuning folds     ``RngStream(derive_seed(seed, TUNE, d), r)``

Each (dataset, repetition) task is self-contained, so the worker count only
changes wall time.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import __version__
from .baselines import KnnConfig, RknnConfig, fit_predict, tune_k
from .boxplot import render_svg
from .dataset import Dataset, ZScore, load_csv, train_test_split, write_csv
from .distance import DistanceMetric
from .ensemble import ExNRuleConfig
from .errors import ConfigInvalidError, ExNRuleError, UnknownMetricError
from .metrics import EvalRecord
from .rng import RngStream, derive_seed
from .synthgen import generate, get_spec

DATA, SPLIT, MODEL, TUNE = 1, 2, 3, 4
METHODS = ("exnrule", "knn", "wknn", "rknn")
TUNED = ("knn", "wknn", "rknn")
METRICS = ("accuracy", "kappa", "brier")
RESULT_COLUMNS = ("method", "dataset", "k", "repetition", "partition_hash", "accuracy", "kappa", "brier", "k_used")


class DatasetLoadError(ExNRuleError):
    pass


@dataclass(frozen=True)
class DatasetSource:
    """A built-in scenario id (``S1``..``S6``) or a named CSV file."""

    name: str
    path: str | None = None

    @classmethod
    def parse(cls, token: str) -> "DatasetSource":
        token = token.strip()
        if "=" in token:
            name, path = token.split("=", 1)
            return cls(name.strip(), path.strip())
        if token.upper() in {f"S{i}" for i in range(1, 7)}:
            return cls(token.upper())
        return cls(Path(token).stem, token)

    def __str__(self):
        return self.name if self.path is None else f"{self.name}={self.path}"


@dataclass
class ExperimentConfig:
    datasets: list[DatasetSource] = field(default_factory=lambda: [DatasetSource("S1")])
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    repetitions: int = 50
    train_fraction: float = 0.7
    B: int = 500
    k_values: list[int] = field(default_factory=lambda: [3])
    tune: bool = False
    tune_grid: list[int] = field(default_factory=lambda: list(range(1, 11)))
    tune_folds: int = 5
    master_seed: int = 0
    scaling: bool = False
    q: float = 2.0
    workers: int = 1
    output_dir: str | None = None

    def validate(self):
        if not self.datasets:
            raise ConfigInvalidError("no datasets configured")
        if not self.methods:
            raise ConfigInvalidError("no methods configured")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigInvalidError(f"unknown methods {bad}; expected a subset of {METHODS}")
        if self.repetitions < 1:
            raise ConfigInvalidError("repetitions must be >= 1")
        if not self.k_values or min(self.k_values) < 1:
            raise ConfigInvalidError("k values must be positive")
        if self.B < 1 or self.workers < 1:
            raise ConfigInvalidError("B and workers must be >= 1")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigInvalidError(f"duplicate dataset names in {names}")
        DistanceMetric(self.q)

    def digest(self) -> str:
        """Hash of every setting that can change a result (not workers, not output_dir)."""
        d = asdict(self)
        d.pop("workers")
        d.pop("output_dir")
        d["datasets"] = [str(s) for s in self.datasets]
        return hashlib.sha256(repr(sorted(d.items())).encode()).hexdigest()[:16]


# -- config files --------------------------------------------------------------

def _bool(v: str) -> bool:
    v = v.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigInvalidError(f"not a boolean: {v!r}")


def _list(v: str) -> list[str]:
    return [t for t in (s.strip() for s in v.replace(",", " ").split()) if t]


_KEYS = {
    "datasets": lambda v: [DatasetSource.parse(t) for t in _list(v)],
    "methods": lambda v: [m.lower() for m in _list(v)],
    "repetitions": int, "reps": int,
    "train_fraction": float,
    "b": int,
    "k": lambda v: [int(t) for t in _list(v)], "k_values": lambda v: [int(t) for t in _list(v)],
    "tune": _bool,
    "tune_grid": lambda v: [int(t) for t in _list(v)],
    "tune_folds": int,
    "seed": int, "master_seed": int,
    "scale": _bool, "scaling": _bool,
    "q": float,
    "workers": int,
    "out": str, "output_dir": str,
}
_ALIASES = {"reps": "repetitions", "b": "B", "k": "k_values", "seed": "master_seed",
            "scale": "scaling", "out": "output_dir"}


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Returns ExperimentConfig field overrides."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalidError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        norm = key.lower().replace("-", "_")
        if norm not in _KEYS:
            raise ConfigInvalidError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[_ALIASES.get(norm, norm)] = _KEYS[norm](value)
        except ValueError as e:
            raise ConfigInvalidError(f"config line {lineno}: {e}") from None
    return out


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """Defaults, then the file, then ``overrides`` (ignored when None)."""
    values = parse_config_text(Path(path).read_text()) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - names
    if unknown:
        raise ConfigInvalidError(f"unknown settings {sorted(unknown)}")
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


# -- results -------------------------------------------------------------------

@dataclass
class ResultsTable:
    records: list[EvalRecord]

    def groups(self) -> dict[tuple[str, str, int], list[EvalRecord]]:
        g: dict[tuple[str, str, int], list[EvalRecord]] = {}
        for r in self.records:
            g.setdefault((r.method, r.dataset, r.k), []).append(r)
        return g

    def aggregate(self) -> list[dict]:
        rows = []
        for (method, dataset, k), recs in self.groups().items():
            row = {"method": method, "dataset": dataset, "k": k, "n": len(recs)}
            for m in METRICS:
                vals = [getattr(r, m) for r in recs]
                mean = math.fsum(vals) / len(vals)
                sd = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)) if len(vals) > 1 else 0.0
                row[f"{m}_mean"], row[f"{m}_sd"] = mean, sd
            rows.append(row)
        return rows

    def mean(self, method: str, dataset: str, metric: str, k: int | None = None) -> float:
        vals = [getattr(r, metric) for r in self.records
                if r.method == method and r.dataset == dataset and (k is None or r.k == k)]
        if not vals:
            raise KeyError((method, dataset, k))
        return math.fsum(vals) / len(vals)

    def to_csv_text(self, meta: dict | None = None) -> str:
        buf = io.StringIO()
        _write_meta(buf, meta)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in self.records:
            w.writerow([r.method, r.dataset, r.k, r.repetition, r.partition_hash,
                        repr(r.accuracy), repr(r.kappa), repr(r.brier), r.k_used])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path: str | Path) -> "ResultsTable":
        with Path(path).open(newline="") as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        reader = csv.DictReader(lines)
        missing = set(RESULT_COLUMNS[:-1]) - set(reader.fieldnames or ())
        if missing:
            raise DatasetLoadError(f"{path}: missing columns {sorted(missing)}")
        recs = []
        for row in reader:
            k = int(row["k"])
            recs.append(EvalRecord(row["method"], row["dataset"], int(row["repetition"]), k,
                                   int(row.get("k_used") or k), row["partition_hash"],
                                   float(row["accuracy"]), float(row["kappa"]), float(row["brier"])))
        return cls(recs)


def _write_meta(buf, meta: dict | None):
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {value}\n")


def summary_csv_text(table: ResultsTable, meta: dict | None = None) -> str:
    buf = io.StringIO()
    _write_meta(buf, meta)
    cols = ["method", "dataset", "k", "n"] + [f"{m}_{s}" for m in METRICS for s in ("mean", "sd")]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in table.aggregate():
        w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
    return buf.getvalue()


def emit_boxplot_data(table: ResultsTable, metric: str, path: str | Path, svg: bool = True,
                      meta: dict | None = None) -> Path:
    """TSV with one column per (method, dataset[, k]) group and one row per repetition.

    With ``svg`` a box plot is written next to it (same stem, ``.svg``).
    """
    if metric not in METRICS:
        raise UnknownMetricError(f"unknown metric {metric!r}; expected one of {METRICS}")
    path = Path(path)
    groups = table.groups()
    multi_k = len({k for _, _, k in groups}) > 1
    names = {key: f"{key[0]}/{key[1]}" + (f"/k={key[2]}" if multi_k else "") for key in groups}
    reps = sorted({r.repetition for r in table.records})
    cells = {key: {r.repetition: getattr(r, metric) for r in recs} for key, recs in groups.items()}
    buf = io.StringIO()
    _write_meta(buf, meta)
    buf.write("\t".join(["repetition", *names.values()]) + "\n")
    for rep in reps:
        buf.write("\t".join([str(rep)] + [repr(cells[key][rep]) if rep in cells[key] else "" for key in groups]) + "\n")
    path.write_text(buf.getvalue())
    if svg:
        data = {names[key]: list(cells[key].values()) for key in groups}
        path.with_suffix(".svg").write_text(render_svg(data, title=metric))
    return path


# -- running -------------------------------------------------------------------

def _load_sources(cfg: ExperimentConfig) -> list[Dataset | None]:
    loaded = []
    for src in cfg.datasets:
        if src.path is None:
            get_spec(src.name)
            loaded.append(None)
            continue
        try:
            loaded.append(load_csv(src.path, name=src.name))
        except (ExNRuleError, OSError) as e:
            raise DatasetLoadError(f"dataset {src.name!r} ({src.path}): {type(e).__name__}: {e}") from e
    return loaded


def _run_task(cfg: ExperimentConfig, d: int, r: int, base: Dataset | None) -> list[EvalRecord]:
    src = cfg.datasets[d]
    seed = cfg.master_seed
    try:
        data = base if base is not None else generate(get_spec(src.name), RngStream(derive_seed(seed, DATA, d), r))
        split = train_test_split(data, cfg.train_fraction, RngStream(derive_seed(seed, SPLIT, d), r))
        train, test = split
        if cfg.scaling:
            z = ZScore.fit(train)
            train, test = z.apply(train), z.apply(test)
        model_seed = derive_seed(seed, MODEL, d, r)
        metric = DistanceMetric(cfg.q)
        templates = {
            "exnrule": ExNRuleConfig(B=cfg.B, metric=metric, master_seed=model_seed),
            "rknn": RknnConfig(B=cfg.B, metric=metric, master_seed=model_seed),
            "knn": KnnConfig(metric=metric),
            "wknn": KnnConfig(metric=metric),
        }
        out = []
        for method in cfg.methods:
            if cfg.tune and method in TUNED:
                k_used = tune_k(train, cfg.tune_grid, cfg.tune_folds, method,
                                RngStream(derive_seed(seed, TUNE, d), r), templates[method])
                plan = [(0, k_used)]
            else:
                plan = [(k, k) for k in cfg.k_values]
            for k, k_used in plan:
                labels, probs = fit_predict(method, train, test.features, k_used, templates[method])
                out.append(EvalRecord.score(method, src.name, r, k, k_used, split.partition_hash,
                                            labels, probs, test.labels))
        return out
    except ExNRuleError as e:
        raise DatasetLoadError(f"dataset {src.name!r}, repetition {r}: {type(e).__name__}: {e}") from e


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> ResultsTable:
    """Run every (dataset, repetition) task and, with ``write``, save the outputs to ``cfg.output_dir``.

    Records are ordered by dataset, method, k, repetition regardless of the
    order tasks finish in. Tuned methods report ``k = 0`` and the chosen
    neighbourhood size in ``k_used``.
    """
    cfg.validate()
    bases = _load_sources(cfg)
    tasks = [(d, r) for d in range(len(cfg.datasets)) for r in range(cfg.repetitions)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            chunks = list(ex.map(lambda t: _run_task(cfg, t[0], t[1], bases[t[0]]), tasks))
    else:
        chunks = [_run_task(cfg, d, r, bases[d]) for d, r in tasks]
    method_rank = {m: i for i, m in enumerate(cfg.methods)}
    recs = sorted((rec for chunk in chunks for rec in chunk),
                  key=lambda x: (_dataset_rank(cfg, x.dataset), method_rank[x.method], x.k, x.repetition))
    table = ResultsTable(recs)
    if write:
        if not cfg.output_dir:
            raise ConfigInvalidError("output_dir is required to write results")
        write_outputs(table, cfg)
    return table


def _dataset_rank(cfg: ExperimentConfig, name: str) -> int:
    return [d.name for d in cfg.datasets].index(name)


def metadata(cfg: ExperimentConfig) -> dict:
    return {
        "generator": f"exnrule {__version__}",
        "seed": cfg.master_seed,
        "config_hash": cfg.digest(),
        "repetitions": cfg.repetitions,
        "train_fraction": cfg.train_fraction,
        "B": cfg.B,
        "k_values": ",".join(map(str, cfg.k_values)),
        "tune": cfg.tune,
        "scaling": cfg.scaling,
        "q": cfg.q,
        "datasets": " ".join(str(d) for d in cfg.datasets),
        "methods": ",".join(cfg.methods),
    }


def write_outputs(table: ResultsTable, cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = metadata(cfg)
    (out / "results.csv").write_text(table.to_csv_text(meta))
    (out / "summary.csv").write_text(summary_csv_text(table, meta))
    for m in METRICS:
        emit_boxplot_data(table, m, out / f"boxplot_{m}.tsv", meta=meta)
    return out


def dump_scenario(scenario_id: str, seed: int, path: str | Path) -> Dataset:
    """Write scenario ``scenario_id`` drawn from ``RngStream(seed, 0)`` as CSV."""
    data = generate(get_spec(scenario_id), RngStream(seed, 0))
    write_csv(data, path)
    return data

