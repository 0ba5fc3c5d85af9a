"""Trace persistence: full-rate CSV plus the decimated companion.

The decimated stream block-averages each group of ``factor`` samples
(anti-aliasing before the diagnosis layer's slower rate) and stamps rows at
the block start time.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .engine import Trace
from .params import N_INPUTS, N_OUTPUTS, get_load_case

CSV_HEADER = "t,u1,u2," + ",".join(f"y{i}" for i in range(1, N_OUTPUTS + 1))
DECIMATION_FACTOR = 20  # 0.01 s -> 0.2 s


def decimate_trace(trace: Trace, factor: int = DECIMATION_FACTOR) -> Trace:
    n = (len(trace) // factor) * factor
    blocks = n // factor
    u = trace.u[:n].reshape(blocks, factor, N_INPUTS).mean(axis=1)
    y = trace.y[:n].reshape(blocks, factor, N_OUTPUTS).mean(axis=1)
    t = trace.t[:n:factor].copy()
    return Trace(t=t, u=u, y=y, lc=trace.lc, seed=trace.seed,
                 dt=trace.dt * factor, faults=trace.faults)


def atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trace_to_csv(trace: Trace) -> str:
    rows = [CSV_HEADER]
    data = np.column_stack([trace.t, trace.u, trace.y])
    for row in data:
        rows.append(",".join(repr(float(v)) for v in row))
    return "\n".join(rows) + "\n"


def write_trace_csv(trace: Trace, path: str) -> None:
    atomic_write_text(path, trace_to_csv(trace))


def read_trace_csv(path: str, lc_id: int = 1, seed: int = 0) -> Trace:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected trace header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    t = data[:, 0]
    dt = float(t[1] - t[0]) if len(t) > 1 else 0.01
    return Trace(t=t, u=data[:, 1:3], y=data[:, 3:], lc=get_load_case(lc_id),
                 seed=seed, dt=dt)
