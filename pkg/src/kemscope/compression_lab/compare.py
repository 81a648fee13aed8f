"""Side-by-side CER / MSE / DFR comparison of quantizer strategies."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import cer_analysis
from ..mlkem_core.params import KemParams
from .dfr import DfrEstimate, estimate_dfr
from .lloyd import harvest_coefficients, train_lloyd_max
from .quantizers import QuantizerKind, QuantizerSpec, reconstruction_mse

# held-out coefficients come from trial indices far from the training range
HELD_OUT_OFFSET = 1 << 40


@dataclass(frozen=True)
class ComparisonRow:
    quantizer: QuantizerSpec
    cer: str
    mse: float
    dfr: DfrEstimate

    def to_dict(self) -> dict:
        out = self.dfr.to_dict()
        out["cer"] = self.cer
        out["mse"] = self.mse
        order = ("params", "quantizer", "du", "dv", "cer", "mse", "trials", "failures", "rate",
                 "ci95_low", "ci95_high", "seed")
        return {key: out[key] for key in order}


@dataclass
class CoefficientSets:
    train_u: np.ndarray
    train_v: np.ndarray
    held_u: np.ndarray
    held_v: np.ndarray

    @classmethod
    def harvest(cls, params: KemParams, trials: int, seed: int) -> "CoefficientSets":
        return cls(
            harvest_coefficients(params, trials, seed, "u"),
            harvest_coefficients(params, trials, seed, "v"),
            harvest_coefficients(params, trials, seed, "u", start=HELD_OUT_OFFSET),
            harvest_coefficients(params, trials, seed, "v", start=HELD_OUT_OFFSET),
        )


def held_out_mse(spec: QuantizerSpec, sets: CoefficientSets) -> float:
    """Pooled MSE over every transmitted coefficient (k*256 of u, 256 of v)."""
    u_codec, v_codec = spec.codecs()
    mu = reconstruction_mse(sets.held_u, u_codec)
    mv = reconstruction_mse(sets.held_v, v_codec)
    nu, nv = sets.held_u.size, sets.held_v.size
    return (mu * nu + mv * nv) / (nu + nv)


def build_quantizers(du: int, dv: int, sets: CoefficientSets, iterations: int, seed: int) -> list[QuantizerSpec]:
    specs = [QuantizerSpec.uniform(du, dv)]
    if du < 12:
        u_book = train_lloyd_max(du, sets.train_u, iterations, seed)
        v_book = train_lloyd_max(dv, sets.train_v, iterations, seed) if dv < 12 else None
        specs.append(QuantizerSpec.lloyd_max(u_book, v_book, dv=dv))
    specs.append(QuantizerSpec.semi_compressed(du))
    return specs


def compare_quantizers(
    params: KemParams,
    d_pairs: Sequence[tuple[int, int]],
    trials: int,
    seed: int,
    training_trials: int = 500,
    iterations: int = 50,
    workers: int = 1,
) -> list[ComparisonRow]:
    """For each (du, dv): uniform, Lloyd-Max and semi-compressed rows, sorted by CER."""
    if not d_pairs:
        raise ValueError("need at least one (du, dv) pair")
    for du, dv in d_pairs:
        QuantizerSpec.uniform(du, dv)  # validate before the expensive harvest
    sets = CoefficientSets.harvest(params, training_trials, seed)
    rows = []
    for du, dv in d_pairs:
        for spec in build_quantizers(du, dv, sets, iterations, seed):
            ratio = cer_analysis.cer(params.k, spec.du, spec.dv)
            rows.append(ComparisonRow(
                spec,
                cer_analysis.format_ratio(ratio),
                held_out_mse(spec, sets),
                estimate_dfr(params, spec, trials, seed, workers=workers),
            ))
    kind_order = {k: i for i, k in enumerate(QuantizerKind)}
    rows.sort(key=lambda r: (cer_analysis.cer(params.k, r.quantizer.du, r.quantizer.dv),
                             r.quantizer.du, kind_order[r.quantizer.kind]))
    return rows


def report_json(rows: Sequence[ComparisonRow]) -> str:
    return json.dumps([r.to_dict() for r in rows], indent=2)
