"""Target-classifier abstraction: built-in oracles, subprocess bridge, caching.

Every oracle labels instances deterministically and is queried through a
cache keyed on the encoded value vector, so no instance ever reaches a
backend twice. ``total_queries`` counts backend invocations (cache
misses); ``cache_hits`` counts repeats.
"""
from __future__ import annotations

import select
import shlex
import subprocess

import numpy as np

from .errors import OracleError
from .rules import CompiledRules, DecisionSet
from .schema import Instance, InputSpace


class Oracle:
    """A deterministic binary labeling function with query accounting."""

    def __init__(self, space: InputSpace, backend, name: str = "oracle"):
        self.space = space
        self.name = name
        self._backend = backend  # callable: (n, m) encoded rows -> (n,) uint8
        self._cache: dict[tuple, int] = {}
        self.total_queries = 0
        self.cache_hits = 0

    # ---- public API --------------------------------------------------------

    def query(self, x: Instance) -> int:
        self.space.validate_instance(x)
        return self.query_encoded(self.space.encode(x))

    def query_batch(self, xs) -> list[int]:
        for x in xs:
            self.space.validate_instance(x)
        if not xs:
            return []
        return list(self.query_encoded_batch(self.space.encode_many(xs)))

    def query_encoded(self, row: np.ndarray) -> int:
        key = tuple(row.tolist())
        hit = self._cache.get(key)
        if hit is not None:
            self.cache_hits += 1
            return hit
        label = int(self._backend(row.reshape(1, -1))[0])
        self._remember(key, label)
        return label

    def query_encoded_batch(self, X: np.ndarray) -> np.ndarray:
        """Element-wise equal to query_encoded; misses go to the backend
        in one pipelined pass, in request order."""
        n = X.shape[0]
        out = np.empty(n, dtype=np.uint8)
        keys = [tuple(row.tolist()) for row in X]
        miss_idx = []
        seen_this_batch: dict[tuple, list] = {}
        for i, key in enumerate(keys):
            hit = self._cache.get(key)
            if hit is not None:
                self.cache_hits += 1
                out[i] = hit
            elif key in seen_this_batch:
                self.cache_hits += 1
                seen_this_batch[key].append(i)
            else:
                miss_idx.append(i)
                seen_this_batch[key] = [i]
        if miss_idx:
            labels = self._backend(X[miss_idx])
            for i, label in zip(miss_idx, labels):
                label = int(label)
                self._remember(keys[i], label)
                for dup in seen_this_batch[keys[i]]:
                    out[dup] = label
        return out

    def has_queried(self, row: np.ndarray) -> bool:
        return tuple(row.tolist()) in self._cache

    def queried_keys(self):
        """Read-only view of the encoded value vectors seen so far."""
        return self._cache.keys()

    def distinct_queried(self) -> int:
        return len(self._cache)

    def close(self) -> None:
        closer = getattr(self._backend, "close", None)
        if closer is not None:
            closer()

    def _remember(self, key: tuple, label: int) -> None:
        if label not in (0, 1):
            raise OracleError(f"backend returned {label!r}, expected 0 or 1")
        self._cache[key] = label
        self.total_queries += 1


# ---- built-in backends -------------------------------------------------------


def make_boxes_oracle(region: DecisionSet, space: InputSpace) -> Oracle:
    """Ground-truth oracle: positive exactly inside a decision-set region."""
    compiled = CompiledRules(space, region.rules)

    def backend(X):
        return compiled.any_cover(X).astype(np.uint8)

    return Oracle(space, backend, name="boxes")


def make_linear_oracle(
    weights, bias: float, space: InputSpace, value_weights=None
) -> Oracle:
    """Thresholded linear score over continuous values and category indicators.

    weights: per-attribute coefficient for continuous attributes (by index);
    value_weights: {attr_index: {value: weight}} for categorical attributes.
    Predicts 1 when the affine score is >= 0.
    """
    w = np.zeros(space.m, dtype=np.float64)
    for j, coef in (weights or {}).items():
        w[j] = float(coef)
    tables = np.zeros((space.m, space.max_domain), dtype=np.float64)
    for j, per_value in (value_weights or {}).items():
        for value, coef in per_value.items():
            tables[j, space.code_of(j, value)] = float(coef)
    cont = space.kinds == 0
    cat_idx = np.flatnonzero(~cont)

    def backend(X):
        score = np.full(X.shape[0], float(bias))
        score += X[:, cont] @ w[cont]
        for j in cat_idx:
            score += tables[j][X[:, j].astype(np.int64)]
        return (score >= 0.0).astype(np.uint8)

    return Oracle(space, backend, name="linear")


# ---- subprocess backend -------------------------------------------------------


def _quote_field(value: str) -> str:
    if "," in value or '"' in value or "\n" in value:
        return '"' + value.replace('"', '""') + '"'
    return value


def format_wire_row(row: np.ndarray, space: InputSpace) -> str:
    """One instance as a wire line: schema order, comma separated, continuous
    values as shortest round-trip decimals, categorical values quoted only
    when they contain a comma or quote."""
    fields = []
    for a, v in zip(space.attributes, row):
        if a.is_continuous:
            fields.append(repr(float(v)))
        else:
            fields.append(_quote_field(a.values[int(v)]))
    return ",".join(fields)


class SubprocessBackend:
    """Line-oriented bridge to an external model process.

    The parent writes one instance per line and a blank line at shutdown;
    the child answers one line per instance containing exactly ``0`` or
    ``1``, in request order.
    """

    def __init__(self, command, space: InputSpace, timeout: float = 30.0):
        if isinstance(command, str):
            command = shlex.split(command)
        self.command = list(command)
        self.space = space
        self.timeout = timeout
        self._proc = None
        self._buf = b""

    def _ensure_started(self):
        if self._proc is None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    bufsize=0,
                )
            except OSError as e:
                raise OracleError(f"cannot start oracle process {self.command}: {e}")

    def _read_line(self, context: str) -> str:
        while b"\n" not in self._buf:
            ready, _, _ = select.select([self._proc.stdout], [], [], self.timeout)
            if not ready:
                raise OracleError(f"oracle timed out after {self.timeout}s ({context})")
            chunk = self._proc.stdout.read(65536)
            if not chunk:
                raise OracleError(f"oracle process died ({context})")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line.decode("utf-8").strip()

    def __call__(self, X: np.ndarray) -> np.ndarray:
        self._ensure_started()
        lines = [format_wire_row(row, self.space) for row in X]
        out = np.empty(X.shape[0], dtype=np.uint8)
        # Pipeline in chunks: write a block of requests, then drain replies.
        CHUNK = 4096
        for start in range(0, len(lines), CHUNK):
            block = lines[start : start + CHUNK]
            try:
                self._proc.stdin.write(("\n".join(block) + "\n").encode("utf-8"))
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError):
                raise OracleError(f"oracle process died (writing: {block[0]!r})")
            for k in range(len(block)):
                reply = self._read_line(context=f"instance {block[k]!r}")
                if reply == "0":
                    out[start + k] = 0
                elif reply == "1":
                    out[start + k] = 1
                else:
                    raise OracleError(
                        f"malformed oracle reply {reply!r} for instance {block[k]!r}"
                    )
        return out

    def close(self):
        if self._proc is None:
            return
        try:
            self._proc.stdin.write(b"\n")
            self._proc.stdin.flush()
            self._proc.stdin.close()
            self._proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            self._proc.kill()
        self._proc = None


def make_subprocess_oracle(command, space: InputSpace, timeout: float = 30.0) -> Oracle:
    return Oracle(space, SubprocessBackend(command, space, timeout), name="subprocess")
