"""CSV and JSON output for chains, experiments and tuning runs.

Every CSV starts with a small comment header (version, config hash, seed,
gradient-count convention) so an output file is a self-describing artifact;
the body stays plain CSV, readable by any tool that skips ``#`` lines.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

from .diagnostics import AutocorrSeries, DecayFit
from .hmc import HmcChain
from .jump import JumpChain
from .ladder import GapExperimentResult
from .tuner import TrialRecord

FORMAT_VERSION = "1"

GRADIENT_COUNT_CONVENTION = (
    "true gradient calls counted; one leapfrog application costs steps+1 "
    "evaluations, or steps when the gradient at its start position is cached"
)


def config_hash(config: Mapping) -> str:
    """Stable short hash of a JSON-serializable config mapping."""
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _header_lines(kind: str, config: Optional[Mapping], seed: Optional[int]) -> list[str]:
    lines = [f"# jumphmc {kind} format v{FORMAT_VERSION}"]
    if config is not None:
        lines.append(f"# config_hash: {config_hash(config)}")
    if seed is not None:
        lines.append(f"# seed: {seed}")
    lines.append(f"# gradient_count_convention: {GRADIENT_COUNT_CONVENTION}")
    return lines


def _write_csv(
    path: Union[str, Path],
    kind: str,
    columns: Sequence[str],
    rows: Iterable[Sequence],
    config: Optional[Mapping] = None,
    seed: Optional[int] = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        for line in _header_lines(kind, config, seed):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(row)


def _format_float(x: float) -> str:
    return repr(float(x))


def write_chain_csv(
    path: Union[str, Path],
    chain: Union[JumpChain, HmcChain],
    config: Optional[Mapping] = None,
    seed: Optional[int] = None,
) -> None:
    """Chain rows: step, positions, momenta, holding time, transition, cost.

    Control chains have no holding times or transition kinds; those columns
    are fixed at 1 and empty so the two samplers share one format.
    """
    dim = chain.positions.shape[1]
    columns = (
        ["step"]
        + [f"x{d}" for d in range(dim)]
        + [f"v{d}" for d in range(dim)]
        + ["holding_time", "transition", "gradient_evals"]
    )
    is_jump = isinstance(chain, JumpChain)

    def rows():
        for i in range(len(chain)):
            yield (
                [i]
                + [_format_float(v) for v in chain.positions[i]]
                + [_format_float(v) for v in chain.momenta[i]]
                + [
                    _format_float(chain.holding_times[i]) if is_jump else 1,
                    str(chain.transitions[i]) if is_jump else "",
                    int(chain.gradient_evals[i]),
                ]
            )

    _write_csv(path, "chain", columns, rows(), config=config, seed=seed)


def write_chain_metadata(
    path: Union[str, Path],
    chain: Union[JumpChain, HmcChain],
    config: Mapping,
    seed: int,
) -> None:
    """JSON sidecar with the config, seed, and summary counts of a chain run."""
    counts: dict = {
        "n_samples": len(chain),
        "gradient_evals": int(chain.gradient_evals[-1]) if len(chain) else 0,
        "energy_evals": int(chain.energy_evals),
    }
    if isinstance(chain, JumpChain):
        counts["transitions"] = chain.transition_counts()
        counts["total_system_time"] = float(chain.holding_times.sum())
    else:
        counts["acceptance_rate"] = chain.acceptance_rate
    meta = {
        "format": f"jumphmc chain metadata v{FORMAT_VERSION}",
        "config": dict(config),
        "config_hash": config_hash(config),
        "seed": seed,
        "counts": counts,
        "gradient_count_convention": GRADIENT_COUNT_CONVENTION,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(meta, indent=2) + "\n")


def write_gap_csv(
    path: Union[str, Path],
    result: GapExperimentResult,
    config: Optional[Mapping] = None,
    seed: Optional[int] = None,
) -> None:
    """Spectral-gap experiment in long format: one row per (size, sampler)."""
    rows = (
        [k, sampler, _format_float(mean), _format_float(err), draws]
        for k, sampler, mean, err, draws in result.rows()
    )
    _write_csv(
        path, "spectral-gap", ["k", "sampler", "mean_gap", "std_error", "draws"], rows,
        config=config, seed=seed,
    )


def write_autocorr_csv(
    path: Union[str, Path],
    series: AutocorrSeries,
    config: Optional[Mapping] = None,
    seed: Optional[int] = None,
) -> None:
    rows = (
        [_format_float(lag), _format_float(val)]
        for lag, val in zip(series.lags, series.values)
    )
    _write_csv(
        path, "autocorrelation", ["lag_gradient_evals", "autocorrelation"], rows,
        config=config, seed=seed,
    )


def write_trials_csv(
    path: Union[str, Path],
    trials: Sequence[TrialRecord],
    config: Optional[Mapping] = None,
    seed: Optional[int] = None,
) -> None:
    rows = (
        [
            t.sampler,
            _format_float(t.epsilon),
            _format_float(t.beta),
            t.steps,
            t.seed,
            t.status,
            "" if t.objective is None else _format_float(t.objective),
        ]
        for t in trials
    )
    _write_csv(
        path, "tuning-trials",
        ["sampler", "epsilon", "beta", "steps", "seed", "status", "objective"],
        rows, config=config, seed=seed,
    )


def fit_to_dict(fit: DecayFit) -> dict:
    return {"r_real": fit.r_real, "r_imag": fit.r_imag, "residual": fit.residual}


def read_csv_rows(path: Union[str, Path]) -> tuple[list[str], list[list[str]]]:
    """Read back a package CSV, skipping the comment header; returns (columns, rows)."""
    with Path(path).open() as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        rows = list(reader)
    return rows[0], rows[1:]
