"""Resumable incremental label walks with power-of-two checkpoints.

A walk steps a lattice distribution through successive self-convolutions,
recording the dominance label about 0 at every roll count.  Deep walks
(tens of thousands of exact convolutions) must survive interruption, so
whenever the roll count passes a power of two the full state is flushed to
disk: the current distribution (offset, length, weights as decimal
strings), the labels recorded so far, and a fingerprint of the base
distribution so a checkpoint can never silently resume someone else's run.

File format (JSON, format_version 1):

    {
      "format_version": 1,
      "kind": "antidice-walk",
      "fingerprint": "<sha256 hex of base distribution + start roll>",
      "k_first": 1,          first roll count this walk labels
      "k": 8,                last roll count completed
      "labels": "LWLLWLLW",  chars for rolls k_first..k
      "offset": -12,
      "length": 25,
      "weights": ["4", "0", ...]   decimal strings, length entries
    }

The walk recomputes nothing on resume; it reloads the distribution and
continues the convolution chain from k+1.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from typing import Callable

from . import core, dominance
from .core import CancelFlag, LatticeDistribution, _check_cancel
from .errors import CheckpointError

FORMAT_VERSION = 1


def distribution_fingerprint(d: LatticeDistribution, k_first: int = 1) -> str:
    h = hashlib.sha256()
    h.update(f"offset={d.offset};k_first={k_first};".encode())
    for v, c in d.items():
        h.update(f"{v}:{c};".encode())
    return h.hexdigest()


def dist_to_json(d: LatticeDistribution) -> dict:
    return {
        "offset": d.offset,
        "length": len(d.weights),
        "weights": [str(c) for c in d.weights],
    }


def dist_from_json(obj: dict) -> LatticeDistribution:
    try:
        offset = int(obj["offset"])
        weights = [int(s) for s in obj["weights"]]
        if len(weights) != int(obj["length"]):
            raise CheckpointError("weight vector length disagrees with header")
        return LatticeDistribution(offset, tuple(weights), sum(weights))
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(f"malformed distribution payload: {exc}") from None


@dataclass
class WalkState:
    k_first: int
    k: int
    labels: str
    dist: LatticeDistribution


class WalkCheckpoint:
    """One walk's on-disk state; save() is atomic (tmp file + rename)."""

    def __init__(self, path: str, fingerprint: str) -> None:
        self.path = path
        self.fingerprint = fingerprint

    def load(self) -> WalkState | None:
        if not os.path.exists(self.path):
            return None
        try:
            with open(self.path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CheckpointError(f"unreadable checkpoint {self.path}: {exc}") from None
        if obj.get("kind") != "antidice-walk":
            raise CheckpointError(f"{self.path} is not a walk checkpoint")
        if obj.get("format_version") != FORMAT_VERSION:
            raise CheckpointError(
                f"checkpoint format {obj.get('format_version')} unsupported"
            )
        if obj.get("fingerprint") != self.fingerprint:
            raise CheckpointError(
                f"{self.path} belongs to a different computation (fingerprint mismatch)"
            )
        state = WalkState(
            k_first=int(obj["k_first"]),
            k=int(obj["k"]),
            labels=str(obj["labels"]),
            dist=dist_from_json(obj),
        )
        if len(state.labels) != state.k - state.k_first + 1:
            raise CheckpointError("label run length disagrees with roll counter")
        return state

    def save(self, state: WalkState) -> None:
        payload = {
            "format_version": FORMAT_VERSION,
            "kind": "antidice-walk",
            "fingerprint": self.fingerprint,
            "k_first": state.k_first,
            "k": state.k,
            "labels": state.labels,
        }
        payload.update(dist_to_json(state.dist))
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, self.path)


def walk_labels(
    base: LatticeDistribution,
    k_first: int,
    k_last: int,
    kernel: str = "auto",
    cancel: CancelFlag | None = None,
    checkpoint: WalkCheckpoint | None = None,
    stop: Callable[[str], bool] | None = None,
) -> str:
    """Labels of base^[k] about 0 for k = k_first..k_last, resumably.

    Walks the convolution chain one step at a time, persisting state at
    every power-of-two roll count (and at the end) when a checkpoint is
    supplied.  `stop` sees the labels accumulated so far after every step
    and may end the walk early; the returned string then covers only the
    rolls actually walked.
    """
    if not 1 <= k_first <= k_last:
        raise ValueError("need 1 <= k_first <= k_last")
    state = checkpoint.load() if checkpoint is not None else None
    if state is not None and state.k_first != k_first:
        raise CheckpointError("checkpoint covers a different roll range")
    if state is None:
        cur = core.power(base, k_first, kernel, cancel)
        labels = dominance.tilt_counts(cur, 0).label.char
        state = WalkState(k_first, k_first, labels, cur)
        if checkpoint is not None and _is_pow2(k_first):
            checkpoint.save(state)
    if state.k >= k_last or (stop is not None and stop(state.labels)):
        return state.labels[: k_last - k_first + 1]
    while state.k < k_last:
        _check_cancel(cancel)
        nxt = core.convolve(state.dist, base, kernel)
        k = state.k + 1
        labels = state.labels + dominance.tilt_counts(nxt, 0).label.char
        state = WalkState(k_first, k, labels, nxt)
        if checkpoint is not None and _is_pow2(k):
            checkpoint.save(state)
        if stop is not None and stop(state.labels):
            break
    if checkpoint is not None:
        checkpoint.save(state)
    return state.labels


def _is_pow2(k: int) -> bool:
    return k & (k - 1) == 0
