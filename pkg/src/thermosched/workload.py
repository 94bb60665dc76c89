"""LLM inference request model, trace ingestion, and synthetic traces.

A request is characterized by its token counts and model. Each model has
a memory profile (parameter bytes plus KV-cache bytes per output token)
and a per-node prefill rate. Time-to-first-token decomposes into network
latency, queue wait, an optional model-load overhead (paid when the
model is not already resident on the serving site), and prefill time.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .environment import NodeSpec
from .errors import ContractError, IngestError

TRACE_COLUMNS = (
    "request_id",
    "arrival_epoch",
    "model_id",
    "input_tokens",
    "output_tokens",
    "origin_region",
)

LATENCY_COLUMNS = ("origin_region", "site_id", "latency_s")


@dataclass(frozen=True)
class ModelProfile:
    model_id: str
    param_bytes: float
    kv_bytes_per_token: float
    prefill_rate_tokens_per_s: float

    def __post_init__(self):
        if self.param_bytes <= 0:
            raise ContractError(f"model {self.model_id}: param_bytes must be > 0")
        if self.kv_bytes_per_token < 0:
            raise ContractError(f"model {self.model_id}: kv_bytes_per_token must be >= 0")
        if self.prefill_rate_tokens_per_s <= 0:
            raise ContractError(f"model {self.model_id}: prefill rate must be > 0")


@dataclass(frozen=True)
class InferenceRequest:
    request_id: str
    arrival_epoch: int
    model_id: str
    input_tokens: int
    output_tokens: int
    origin_region: str

    def __post_init__(self):
        if self.input_tokens < 1:
            raise ContractError(
                f"request {self.request_id}: input_tokens must be >= 1, got {self.input_tokens}"
            )
        if self.output_tokens < 0:
            raise ContractError(
                f"request {self.request_id}: output_tokens must be >= 0, got {self.output_tokens}"
            )


class LatencyMatrix:
    """One-way network latency per (origin region, site)."""

    def __init__(self, entries: dict[tuple[str, str], float]):
        for (origin, site), latency in entries.items():
            if latency < 0:
                raise ContractError(f"latency ({origin!r}, {site!r}) must be >= 0")
        self.entries = dict(entries)

    def get(self, origin_region: str, site_id: str) -> float:
        try:
            return self.entries[(origin_region, site_id)]
        except KeyError:
            raise ContractError(
                f"no latency entry for origin {origin_region!r} -> site {site_id!r}"
            ) from None

    def missing_pairs(
        self, origins: list[str], sites: list[str]
    ) -> list[tuple[str, str]]:
        return [
            (o, s) for o in sorted(set(origins)) for s in sorted(set(sites))
            if (o, s) not in self.entries
        ]


def request_memory(req: InferenceRequest, profile: ModelProfile) -> float:
    """Total memory footprint in bytes: parameters plus KV cache."""
    if req.model_id != profile.model_id:
        raise ContractError(
            f"request {req.request_id} wants model {req.model_id!r}, "
            f"profile is {profile.model_id!r}"
        )
    return profile.param_bytes + req.output_tokens * profile.kv_bytes_per_token


def load_overhead(profile: ModelProfile, node: NodeSpec) -> float:
    """Seconds to pull the model weights onto a node."""
    return profile.param_bytes / node.bandwidth_bytes_per_s


def prefill_seconds(req: InferenceRequest, profile: ModelProfile) -> float:
    return req.input_tokens / profile.prefill_rate_tokens_per_s


def ttft_estimate(
    req: InferenceRequest,
    profile: ModelProfile,
    node: NodeSpec,
    queue_wait: float,
    model_resident: bool,
    net_latency: float,
) -> float:
    """Time to first token: network + queue + optional load + prefill."""
    if queue_wait < 0 or net_latency < 0:
        raise ContractError("queue_wait and net_latency must be >= 0")
    load = 0.0 if model_resident else load_overhead(profile, node)
    return net_latency + queue_wait + load + prefill_seconds(req, profile)


def ingest_trace(path) -> list[InferenceRequest]:
    """Parse a trace CSV into requests sorted by (arrival_epoch, request_id)."""
    if not os.path.exists(path):
        raise IngestError(f"trace file not found: {path}")
    requests = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != TRACE_COLUMNS:
            raise IngestError(
                f"{path}: expected header {','.join(TRACE_COLUMNS)}, got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                req = InferenceRequest(
                    request_id=row["request_id"],
                    arrival_epoch=int(row["arrival_epoch"]),
                    model_id=row["model_id"],
                    input_tokens=int(row["input_tokens"]),
                    output_tokens=int(row["output_tokens"]),
                    origin_region=row["origin_region"],
                )
            except (ContractError, KeyError, TypeError, ValueError) as exc:
                raise IngestError(f"{path} row {lineno}: {exc}") from exc
            requests.append(req)
    requests.sort(key=lambda r: (r.arrival_epoch, r.request_id))
    return requests


def emit_trace(requests: list[InferenceRequest], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for r in requests:
            writer.writerow(
                [r.request_id, r.arrival_epoch, r.model_id, r.input_tokens,
                 r.output_tokens, r.origin_region]
            )


def load_latency_matrix(path) -> LatencyMatrix:
    if not os.path.exists(path):
        raise IngestError(f"latency file not found: {path}")
    entries: dict[tuple[str, str], float] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != LATENCY_COLUMNS:
            raise IngestError(
                f"{path}: expected header {','.join(LATENCY_COLUMNS)}, got {reader.fieldnames}"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                latency = float(row["latency_s"])
                if latency < 0:
                    raise ValueError(f"latency_s must be >= 0, got {latency}")
                entries[(row["origin_region"], row["site_id"])] = latency
            except (KeyError, TypeError, ValueError) as exc:
                raise IngestError(f"{path} row {lineno}: {exc}") from exc
    return LatencyMatrix(entries)


def synth_trace(
    seed: int,
    epochs: int,
    mean_rate,
    input_tokens_lognorm: tuple[float, float] = (6.2, 0.8),
    output_tokens_lognorm: tuple[float, float] = (5.3, 1.0),
    model_ids: list[str] = ("model-a",),
    model_weights: list[float] | None = None,
    origin_regions: list[str] = ("origin-a",),
    origin_weights: list[float] | None = None,
) -> list[InferenceRequest]:
    """Generate a synthetic trace: Poisson arrivals, log-normal token lengths.

    mean_rate is requests per epoch, either a scalar or a per-epoch
    sequence. Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    rates = np.broadcast_to(np.asarray(mean_rate, dtype=float), (epochs,))
    if np.any(rates < 0):
        raise ContractError("mean_rate must be >= 0")

    def normalized(weights, n):
        if weights is None:
            return np.full(n, 1.0 / n)
        w = np.asarray(weights, dtype=float)
        return w / w.sum()

    model_p = normalized(model_weights, len(model_ids))
    origin_p = normalized(origin_weights, len(origin_regions))

    requests = []
    counter = 0
    for epoch in range(epochs):
        count = int(rng.poisson(rates[epoch]))
        for _ in range(count):
            mu_in, sigma_in = input_tokens_lognorm
            mu_out, sigma_out = output_tokens_lognorm
            input_tokens = max(1, int(round(rng.lognormal(mu_in, sigma_in))))
            output_tokens = max(0, int(round(rng.lognormal(mu_out, sigma_out))))
            model_id = model_ids[int(rng.choice(len(model_ids), p=model_p))]
            origin = origin_regions[int(rng.choice(len(origin_regions), p=origin_p))]
            requests.append(
                InferenceRequest(
                    request_id=f"req-{counter:06d}",
                    arrival_epoch=epoch,
                    model_id=model_id,
                    input_tokens=input_tokens,
                    output_tokens=output_tokens,
                    origin_region=origin,
                )
            )
            counter += 1
    return requests
