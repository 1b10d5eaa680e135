"""Plain-text model files.

Layout::

    flowcast-model 1
    kind lstm
    <key> <value>          # hyperparameters and free-form metadata
    param U_g 64 12        # name rows cols, then one line per row
    0.123... 0.456...
    end

Values are written with 17 significant digits so a save/load cycle is exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import DataError
from .lstm import LstmParams, LstmRegressor
from .mlp import MlpParams, MlpRegressor
from .rnn import RnnParams, RnnRegressor
from .svr import SvrModel, SvrRegressor

MAGIC = "flowcast-model 1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _arrays_and_header(model) -> tuple[dict, dict]:
    if isinstance(model, SvrRegressor):
        m = model.model
        header = {"C": m.C, "gamma": m.gamma, "epsilon_tube": m.epsilon_tube, "bias": m.bias,
                  "n_features": m.n_features}
        return header, {"support_vectors": m.support_vectors, "dual_coeffs": m.dual_coeffs[:, None]}
    return model.hyperparameters(), model.parameters()


def save_model(model, path, metadata: dict | None = None) -> None:
    header, arrays = _arrays_and_header(model)
    lines = [MAGIC, f"kind {model.kind}"]
    for k, v in header.items():
        lines.append(f"{k} {_fmt(v) if isinstance(v, float) else json.dumps(v)}")
    for k, v in (metadata or {}).items():
        lines.append(f"meta.{k} {json.dumps(v)}")
    for name, arr in arrays.items():
        a = np.asarray(arr).reshape(arr.shape[0], -1) if arr.ndim > 1 else arr[None, :]
        lines.append(f"param {name} {arr.ndim} {' '.join(map(str, arr.shape))}")
        lines.extend(" ".join(_fmt(x) for x in row) for row in a)
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path):
    """Return ``(model, metadata)``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != MAGIC:
        raise DataError(f"{path}: not a flowcast model file")
    pos = 1
    header, meta, arrays = {}, {}, {}
    while pos < len(lines) and not lines[pos].startswith(("param ", "end")):
        key, raw = lines[pos].split(" ", 1)
        if key == "kind":
            header["kind"] = raw
        elif key.startswith("meta."):
            meta[key[5:]] = json.loads(raw)
        else:
            header[key] = json.loads(raw)
        pos += 1
    while pos < len(lines) and lines[pos].startswith("param "):
        parts = lines[pos].split()
        name, ndim = parts[1], int(parts[2])
        shape = tuple(int(s) for s in parts[3:3 + ndim])
        nrows = shape[0] if ndim > 1 else 1
        rows = [[float(v) for v in lines[pos + 1 + r].split()] for r in range(nrows)]
        arrays[name] = np.array(rows, dtype=np.float64).reshape(shape)
        pos += 1 + nrows
    if pos >= len(lines) or lines[pos] != "end":
        raise DataError(f"{path}: truncated model file")

    kind = header.get("kind")
    if kind == "lstm":
        model = LstmRegressor(LstmParams(**arrays), int(header["encoder_steps"]))
    elif kind == "rnn":
        params = RnnParams(arrays["W"], arrays["U"], arrays["V"], header["hidden_activation"],
                           header["output_activation"])
        model = RnnRegressor(params, int(header["encoder_steps"]))
    elif kind == "mlp":
        model = MlpRegressor(MlpParams(arrays["W1"], arrays["b1"], arrays["W2"], arrays["b2"],
                                       header["hidden_activation"]))
    elif kind == "svr":
        svm = SvrModel(arrays["support_vectors"], arrays["dual_coeffs"][:, 0], header["bias"],
                       header["C"], header["gamma"], header["epsilon_tube"])
        model = SvrRegressor(svm.C, svm.gamma, svm.epsilon_tube, model=svm)
    else:
        raise DataError(f"{path}: unknown model kind {kind!r}")
    return model, meta
