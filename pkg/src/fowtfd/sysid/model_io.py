"""Plain-text persistence of identified models (matrix blocks with sizes)."""

from __future__ import annotations

import numpy as np

from .subspace import IdentifiedModel

_FMT = "%.17g"


def _matrix_block(name: str, mat: np.ndarray) -> list[str]:
    mat = np.atleast_2d(mat)
    lines = [f"{name} {mat.shape[0]} {mat.shape[1]}"]
    for row in mat:
        lines.append(" ".join(_FMT % v for v in row))
    return lines


def model_to_text(model: IdentifiedModel) -> str:
    lines = [
        "fowtfd-identified-model v1",
        f"order {model.order}",
        f"dt {_FMT % model.dt}",
        f"stabilized {int(model.stabilized)}",
        f"lc {model.lc_id}",
        "channels " + " ".join(model.channels) if model.channels else "channels -",
    ]
    lines += _matrix_block("A", model.a)
    lines += _matrix_block("B", model.b)
    lines += _matrix_block("C", model.c)
    lines += _matrix_block("D", model.d)
    lines += _matrix_block("VAF", model.fit.reshape(1, -1))
    for name, arr in (("U_OP", model.u_op), ("Y_OP", model.y_op),
                      ("U_SCALE", model.u_scale), ("Y_SCALE", model.y_scale),
                      ("X0", model.x0)):
        if arr is not None:
            lines += _matrix_block(name, np.asarray(arr).reshape(1, -1))
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> IdentifiedModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("fowtfd-identified-model"):
        raise ValueError("not an identified-model file")
    scalars: dict[str, str] = {}
    blocks: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        key = parts[0]
        if key in ("order", "dt", "stabilized", "lc"):
            scalars[key] = parts[1]
            i += 1
        elif key == "channels":
            scalars["channels"] = " ".join(parts[1:])
            i += 1
        else:
            rows, cols = int(parts[1]), int(parts[2])
            data = [list(map(float, lines[i + 1 + r].split())) for r in range(rows)]
            blocks[key] = np.array(data).reshape(rows, cols)
            i += 1 + rows
    channels = tuple(scalars.get("channels", "-").split())
    if channels == ("-",):
        channels = ()
    return IdentifiedModel(
        a=blocks["A"], b=blocks["B"], c=blocks["C"], d=blocks["D"],
        order=int(scalars["order"]), fit=blocks["VAF"].ravel(),
        dt=float(scalars["dt"]), stabilized=bool(int(scalars["stabilized"])),
        x0=blocks.get("X0", np.zeros((1, 1))).ravel() if "X0" in blocks else None,
        u_op=blocks["U_OP"].ravel() if "U_OP" in blocks else None,
        y_op=blocks["Y_OP"].ravel() if "Y_OP" in blocks else None,
        u_scale=blocks["U_SCALE"].ravel() if "U_SCALE" in blocks else None,
        y_scale=blocks["Y_SCALE"].ravel() if "Y_SCALE" in blocks else None,
        channels=channels, lc_id=int(scalars["lc"]),
    )


def save_model(model: IdentifiedModel, path: str) -> None:
    from ..plant.io import atomic_write_text

    atomic_write_text(path, model_to_text(model))


def load_model(path: str) -> IdentifiedModel:
    with open(path) as fh:
        return model_from_text(fh.read())
