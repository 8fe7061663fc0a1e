"""Experiment grids for the trade-off and duplication studies, plus CSV I/O."""
from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .browsing import CascadeParams
from .errors import DomainError
from .policies import Greedy, PlackettLuce, PolicyConfig
from .scenario import RelevanceProfile, Scenario, build_catalog, settings_grid
from .simulation import (
    RunResult,
    duplication_gain,
    nearest_rank,
    pair_sum_attention,
    pl_runs,
    run,
    summarize,
)

log = logging.getLogger(__name__)

DEFAULT_DELTAS = (0.25, 0.125, 0.05)
DEFAULT_LAMBDAS = tuple(round(0.05 * i, 10) for i in range(11))
DEFAULT_COSTS = (1.0, 0.5)
DUPLICATION_LAMBDAS = (0.5, 0.2, 0.0)
NOT_APPLICABLE = "NA"
NO_DUPLICATE = "none"

TRADEOFF_COLUMNS = ("experiment", "delta", "impressions", "policy", "lambda", "metric", "value", "seed")
DUPLICATION_COLUMNS = (
    "experiment", "delta", "impressions", "policy", "lambda", "cost_k",
    "duplicated_item", "item", "metric", "value", "seed",
)


@dataclass
class ExperimentConfig:
    deltas: list[float] = field(default_factory=lambda: list(DEFAULT_DELTAS))
    impressions: list[int] = field(default_factory=lambda: [20, 100])
    lambdas: list[float] = field(default_factory=lambda: list(DEFAULT_LAMBDAS))
    costs: list[float] = field(default_factory=lambda: list(DEFAULT_COSTS))
    pl_repetitions: int = 1000
    base_seed: int = 0
    click_scale: float = 0.7
    persistence: float = 0.5
    out: str | None = None

    def __post_init__(self):
        for name in ("deltas", "impressions", "lambdas", "costs"):
            if not getattr(self, name):
                raise DomainError(f"config list '{name}' must be non-empty")
        for d in self.deltas:
            RelevanceProfile(d)
        for j in self.impressions:
            if int(j) != j or j < 1:
                raise DomainError(f"impressions must be positive integers, got {j}")
        for lam in self.lambdas:
            if not 0.0 <= lam <= 1.0:
                raise DomainError(f"lambda must lie in [0, 1], got {lam}")
        for k in self.costs:
            if not 0.0 < k <= 1.0:
                raise DomainError(f"cost k must lie in (0, 1], got {k}")
        if self.pl_repetitions < 1:
            raise DomainError(f"pl-reps must be positive, got {self.pl_repetitions}")
        if not 0 <= self.base_seed < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.base_seed}")
        CascadeParams(self.click_scale, self.persistence)

    @property
    def cascade(self) -> CascadeParams:
        return CascadeParams(self.click_scale, self.persistence)


# config-file key -> (ExperimentConfig attribute, element type, is list)
CONFIG_KEYS = {
    "delta": ("deltas", float, True),
    "impressions": ("impressions", int, True),
    "lambda": ("lambdas", float, True),
    "cost": ("costs", float, True),
    "pl-reps": ("pl_repetitions", int, False),
    "seed": ("base_seed", int, False),
    "c": ("click_scale", float, False),
    "gamma": ("persistence", float, False),
    "out": ("out", str, False),
}

EXPERIMENT_DEFAULTS = {
    "tradeoff": {},
    "duplication": {"impressions": [100], "lambdas": list(DUPLICATION_LAMBDAS)},
}


def _coerce(key: str, value):
    attr, kind, is_list = CONFIG_KEYS[key]
    try:
        if is_list:
            values = value if isinstance(value, list) else [value]
            if kind is int:
                out = []
                for v in values:
                    if isinstance(v, bool) or float(v) != int(float(v)):
                        raise ValueError(v)
                    out.append(int(float(v)))
                return attr, out
            return attr, [kind(v) for v in values]
        if isinstance(value, (list, dict)) or isinstance(value, bool):
            raise ValueError(value)
        return attr, kind(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"config key '{key}' has malformed value {value!r}") from exc


def parse_config(
    experiment: str = "tradeoff",
    config_file: str | os.PathLike | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Merge per-experiment defaults, an optional JSON file and flag overrides.

    ``overrides`` uses the same keys as the config file; ``None`` values are
    ignored so unset command-line flags do not clobber file values.
    """
    if experiment not in EXPERIMENT_DEFAULTS:
        raise DomainError(f"unknown experiment '{experiment}'")
    values: dict = dict(EXPERIMENT_DEFAULTS[experiment])
    layers = []
    if config_file is not None:
        try:
            raw = json.loads(Path(config_file).read_text())
        except OSError as exc:
            raise OSError(f"cannot read config file {config_file}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DomainError(f"config file {config_file} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise DomainError(f"config file {config_file} must hold a JSON object")
        layers.append(raw)
    if overrides:
        layers.append({k: v for k, v in overrides.items() if v is not None})
    for layer in layers:
        for key, value in layer.items():
            if key not in CONFIG_KEYS:
                raise DomainError(f"unknown config key '{key}'")
            attr, coerced = _coerce(key, value)
            values[attr] = coerced
    return ExperimentConfig(**values)


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    delta: float
    impressions: int
    policy: str
    lam: float | None
    metric: str
    value: float
    seed: int
    cost_k: float | None = None
    duplicated_item: int | None = None
    item: int | None = None

    def as_record(self) -> dict[str, str]:
        return {
            "experiment": self.experiment,
            "delta": _fmt(self.delta),
            "impressions": str(self.impressions),
            "policy": self.policy,
            "lambda": NOT_APPLICABLE if self.lam is None else _fmt(self.lam),
            "cost_k": NOT_APPLICABLE if self.cost_k is None else _fmt(self.cost_k),
            "duplicated_item": NO_DUPLICATE if self.duplicated_item is None else str(self.duplicated_item),
            "item": NOT_APPLICABLE if self.item is None else str(self.item),
            "metric": self.metric,
            "value": _fmt(self.value),
            "seed": str(self.seed),
        }

    @classmethod
    def from_record(cls, rec: dict[str, str]) -> ResultRow:
        def opt(text, kind):
            return None if text in (NOT_APPLICABLE, NO_DUPLICATE, None) else kind(text)

        return cls(
            experiment=rec["experiment"],
            delta=float(rec["delta"]),
            impressions=int(rec["impressions"]),
            policy=rec["policy"],
            lam=opt(rec["lambda"], float),
            metric=rec["metric"],
            value=float(rec["value"]),
            seed=int(rec["seed"]),
            cost_k=opt(rec.get("cost_k"), float),
            duplicated_item=opt(rec.get("duplicated_item"), int),
            item=opt(rec.get("item"), int),
        )


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _policy_fields(policy: PolicyConfig) -> tuple[str, float | None]:
    return policy.tag, getattr(policy, "lam", None)


def tradeoff_experiment(config: ExperimentConfig) -> list[ResultRow]:
    """Greedy lambda sweep plus a Plackett-Luce summary for every (delta, J)."""
    rows: list[ResultRow] = []
    params = config.cascade
    seed = config.base_seed
    for delta in config.deltas:
        catalog = build_catalog(RelevanceProfile(delta))
        for J in config.impressions:
            for lam in config.lambdas:
                res = run(Greedy(lam), catalog, J, params)
                for metric, value in (("unfairness", res.final_unfairness), ("mean_utility", res.mean_utility)):
                    rows.append(ResultRow("tradeoff", delta, J, "greedy", lam, metric, value, seed))
            summary = summarize(pl_runs(catalog, J, config.pl_repetitions, seed, params))
            for metric, value in (
                ("utility_p5", summary.utility_p5),
                ("utility_p50", summary.utility_median),
                ("utility_p95", summary.utility_p95),
                ("unfairness_p5", summary.unfairness_p5),
                ("unfairness_p50", summary.unfairness_median),
                ("unfairness_p95", summary.unfairness_p95),
            ):
                rows.append(ResultRow("tradeoff", delta, J, PlackettLuce.tag, None, metric, value, seed))
            log.info("tradeoff delta=%s J=%s done", delta, J)
    return rows


@dataclass(frozen=True)
class DuplicationStats:
    """Per-item attention of one setting, plus pair-sum and gain when duplicated."""

    attention: np.ndarray
    pair_sum: float | None = None
    gain: float | None = None


def _greedy_stats(runs: dict[Scenario, RunResult], scenario: Scenario, base: RunResult) -> DuplicationStats:
    res = runs[scenario]
    target = scenario.duplicated_item
    if target is None:
        return DuplicationStats(res.attention)
    return DuplicationStats(
        res.attention, pair_sum_attention(res, target), duplication_gain(res, base, target)
    )


def _pl_stats(ensemble: list[RunResult], target: int | None, base_ensemble: list[RunResult]) -> DuplicationStats:
    """Medians over repetitions; gain is median pair-sum minus median baseline attention."""
    attention = np.array(
        [nearest_rank([r.attention[i] for r in ensemble], 50) for i in range(len(ensemble[0].catalog))]
    )
    if target is None:
        return DuplicationStats(attention)
    pair = nearest_rank([pair_sum_attention(r, target) for r in ensemble], 50)
    base = nearest_rank([r.attention[target] for r in base_ensemble], 50)
    return DuplicationStats(attention, pair, pair - base)


def duplication_experiment(
    config: ExperimentConfig, policies: Sequence[PolicyConfig] | None = None
) -> list[ResultRow]:
    """Attention, pair-sum and gain for every policy and duplication setting."""
    if policies is None:
        policies = [*(Greedy(lam) for lam in config.lambdas), PlackettLuce()]
    params = config.cascade
    seed = config.base_seed
    rows: list[ResultRow] = []
    for policy in policies:
        tag, lam = _policy_fields(policy)
        for J in config.impressions:
            grid = settings_grid(config.deltas, config.costs, [J])
            # the no-duplicate catalog repeats once per cost; simulate each catalog once
            by_catalog: dict = {}
            ensembles = {}
            for s in grid:
                catalog = s.catalog()
                if catalog not in by_catalog:
                    if isinstance(policy, PlackettLuce):
                        by_catalog[catalog] = pl_runs(catalog, J, config.pl_repetitions, seed, params)
                    else:
                        by_catalog[catalog] = run(policy, catalog, J, params)
                ensembles[s] = by_catalog[catalog]
            for s in grid:
                base_scenario = replace(s, duplicated_item=None)
                if isinstance(policy, PlackettLuce):
                    stats = _pl_stats(ensembles[s], s.duplicated_item, ensembles[base_scenario])
                else:
                    stats = _greedy_stats(ensembles, s, ensembles[base_scenario])

                def row(metric, value, item):
                    return ResultRow(
                        "duplication", s.delta, J, tag, lam, metric, value, seed,
                        cost_k=s.cost, duplicated_item=s.duplicated_item, item=item,
                    )

                for item, value in enumerate(stats.attention):
                    rows.append(row("attention", value, item))
                if s.duplicated_item is not None:
                    rows.append(row("pair_sum_attention", stats.pair_sum, s.duplicated_item))
                    rows.append(row("duplication_gain", stats.gain, s.duplicated_item))
            log.info("duplication policy=%s J=%s done", tag, J)
    return rows


def columns_for(rows: Iterable[ResultRow], experiment: str | None = None) -> tuple[str, ...]:
    rows = list(rows)
    name = experiment or (rows[0].experiment if rows else "tradeoff")
    return DUPLICATION_COLUMNS if name == "duplication" else TRADEOFF_COLUMNS


def render_csv(rows: Sequence[ResultRow], experiment: str | None = None) -> str:
    buf = io.StringIO()
    header = columns_for(rows, experiment)
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.as_record())
    return buf.getvalue()


def emit_csv(rows: Sequence[ResultRow], path: str | os.PathLike, experiment: str | None = None) -> None:
    text = render_csv(rows, experiment)
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_csv(path: str | os.PathLike) -> list[ResultRow]:
    with open(path, newline="") as fh:
        return [ResultRow.from_record(rec) for rec in csv.DictReader(fh)]


def config_metadata(config: ExperimentConfig, experiment: str) -> dict:
    meta = asdict(config)
    meta["experiment"] = experiment
    default = EXPERIMENT_DEFAULTS[experiment].get("lambdas", list(DEFAULT_LAMBDAS))
    meta["lambda_grid"] = "default" if list(config.lambdas) == list(default) else "user supplied"
    meta["percentiles"] = "nearest-rank"
    return meta


RUNNERS = {"tradeoff": tradeoff_experiment, "duplication": duplication_experiment}
