"""Model and dataset file formats.

Both are JSON manifests carrying a float32 little-endian payload blob either
embedded as base64 or referenced as a sibling binary file (relative path +
byte length). The manifest records a sha256 digest of the payload bytes,
verified at load. Ids are content digests over the canonical manifest plus
the payload, so they do not depend on the encoding variant.

Canonical serialization (what `save_*` and export produce) embeds the
payload as base64 with sorted keys and 2-space indentation; loading a
canonical file and re-exporting it reproduces the bytes exactly.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .net import (
    Conv2d,
    Dense,
    F32,
    Flatten,
    LabeledBatch,
    Maxpool2,
    Network,
    Relu,
    Sigmoid,
    Softmax,
    forward,
    validate_classifier,
)

MODEL_FORMAT = "advlab-model/1"
DATASET_FORMAT = "advlab-dataset/1"

_SIMPLE_LAYERS = {
    "relu": Relu,
    "sigmoid": Sigmoid,
    "maxpool2": Maxpool2,
    "flatten": Flatten,
    "softmax": Softmax,
}


class FileFormatError(ValueError):
    """A model/dataset file violated its format contract."""


def canon_dumps(obj):
    """Deterministic JSON used for every file this tool writes."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _sha256(blob):
    return hashlib.sha256(blob).hexdigest()


def _f32_bytes(arr):
    return np.ascontiguousarray(arr, dtype="<f4").tobytes()


def _require(manifest, key, kind, what):
    if key not in manifest:
        raise FileFormatError(f"{what} is missing required field '{key}'")
    value = manifest[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise FileFormatError(f"{what} field '{key}' must be {kind.__name__}")
    return value


def _read_blob(block, base_dir, what):
    encoding = _require(block, "encoding", str, what)
    byte_length = _require(block, "byte_length", int, what)
    digest = _require(block, "sha256", str, what)
    if encoding == "base64":
        try:
            blob = base64.b64decode(_require(block, "data", str, what), validate=True)
        except Exception:
            raise FileFormatError(f"{what} payload is not valid base64") from None
    elif encoding == "file":
        rel = _require(block, "path", str, what)
        if base_dir is None:
            raise FileFormatError(
                f"{what} references a sibling file but no base directory is "
                f"available; embed the payload as base64"
            )
        target = Path(base_dir) / rel
        if not target.is_file():
            raise FileFormatError(f"{what} sibling file {rel!r} not found")
        blob = target.read_bytes()
    else:
        raise FileFormatError(f"{what} payload encoding must be base64 or file, got {encoding!r}")
    if len(blob) != byte_length:
        raise FileFormatError(
            f"{what} payload is {len(blob)} bytes but manifest declares {byte_length}"
        )
    if _sha256(blob) != digest:
        raise FileFormatError(f"{what} payload digest mismatch")
    return blob


def _blob_block(blob, embed=True, path=None):
    block = {"byte_length": len(blob), "sha256": _sha256(blob)}
    if embed:
        block["encoding"] = "base64"
        block["data"] = base64.b64encode(blob).decode("ascii")
    else:
        block["encoding"] = "file"
        block["path"] = path
    return block


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadedModel:
    network: Network
    model_id: str
    manifest: dict  # canonical manifest without the payload data


def _layer_spec(layer):
    if layer.kind == "dense":
        return {"kind": "dense", "shape": list(layer.weights.shape)}
    if layer.kind == "conv2d":
        return {"kind": "conv2d", "shape": list(layer.weights.shape),
                "padding": layer.padding}
    return {"kind": layer.kind}


def _layer_from_spec(spec, index, weight_view):
    kind = spec.get("kind")
    if kind == "dense":
        shape = spec.get("shape")
        if not (isinstance(shape, list) and len(shape) == 2):
            raise FileFormatError(f"layer {index}: dense shape must be [out, in]")
        w = weight_view.take(int(np.prod(shape))).reshape(shape)
        b = weight_view.take(shape[0])
        return Dense(w, b)
    if kind == "conv2d":
        shape = spec.get("shape")
        if not (isinstance(shape, list) and len(shape) == 4):
            raise FileFormatError(
                f"layer {index}: conv2d shape must be [out_ch, in_ch, kh, kw]"
            )
        padding = spec.get("padding", "valid")
        w = weight_view.take(int(np.prod(shape))).reshape(shape)
        b = weight_view.take(shape[0])
        return Conv2d(w, b, padding)
    if kind in _SIMPLE_LAYERS:
        for key in spec:
            if key != "kind":
                raise FileFormatError(f"layer {index}: {kind} takes no field {key!r}")
        return _SIMPLE_LAYERS[kind]()
    raise FileFormatError(f"layer {index}: unknown layer kind {kind!r}")


class _WeightReader:
    def __init__(self, blob):
        self.values = np.frombuffer(blob, dtype="<f4")
        self.pos = 0

    def take(self, count):
        if self.pos + count > self.values.size:
            raise FileFormatError(
                f"weight payload exhausted: need {count} more values at "
                f"offset {self.pos}, have {self.values.size}"
            )
        out = self.values[self.pos : self.pos + count]
        self.pos += count
        return out.copy()


def model_manifest(net):
    """Canonical manifest dict (payload block excluded)."""
    return {
        "format": MODEL_FORMAT,
        "class_count": net.class_count,
        "embedding_index": net.embedding_index,
        "input_shape": list(net.input_shape),
        "layers": [_layer_spec(l) for l in net.layers],
    }


def model_weight_blob(net):
    """Weights and biases concatenated in layer order, float32 LE."""
    parts = []
    for layer in net.layers:
        if hasattr(layer, "weights"):
            parts.append(_f32_bytes(layer.weights))
            parts.append(_f32_bytes(layer.bias))
    return b"".join(parts)


def model_id_of(net):
    manifest = model_manifest(net)
    core = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode()
    return _sha256(core + b"\x00" + model_weight_blob(net))


def serialize_model(net, *, embed=True, blob_path=None):
    """Canonical model file bytes; with embed=False the payload block
    references `blob_path` and the blob is returned separately."""
    blob = model_weight_blob(net)
    manifest = model_manifest(net)
    manifest["weights"] = _blob_block(blob, embed=embed, path=blob_path)
    data = canon_dumps(manifest).encode()
    return (data, None) if embed else (data, blob)


def parse_model(manifest_bytes, base_dir=None):
    """Validate and instantiate a model file. Raises FileFormatError naming
    the first violated constraint."""
    try:
        manifest = json.loads(manifest_bytes)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"model manifest is not valid JSON: {exc}") from None
    if not isinstance(manifest, dict):
        raise FileFormatError("model manifest must be a JSON object")
    if manifest.get("format") != MODEL_FORMAT:
        raise FileFormatError(f"model format must be {MODEL_FORMAT!r}")
    class_count = _require(manifest, "class_count", int, "model manifest")
    embedding_index = _require(manifest, "embedding_index", int, "model manifest")
    input_shape = _require(manifest, "input_shape", list, "model manifest")
    specs = _require(manifest, "layers", list, "model manifest")
    weights_block = _require(manifest, "weights", dict, "model manifest")

    blob = _read_blob(weights_block, base_dir, "model weights")
    if len(blob) % 4:
        raise FileFormatError("model weight payload length is not a multiple of 4")
    reader = _WeightReader(blob)
    layers = []
    for i, spec in enumerate(specs):
        if not isinstance(spec, dict):
            raise FileFormatError(f"layer {i}: spec must be an object")
        layers.append(_layer_from_spec(spec, i, reader))
    if reader.pos != reader.values.size:
        raise FileFormatError(
            f"weight payload has {reader.values.size - reader.pos} values beyond "
            f"the {reader.pos} the layer specs consume"
        )

    net = Network(tuple(layers), tuple(input_shape), class_count, embedding_index)
    try:
        validate_classifier(net)
        forward(net, np.zeros((1, *net.input_shape), dtype=F32))
    except ValueError as exc:
        raise FileFormatError(str(exc)) from None

    return LoadedModel(net, model_id_of(net), model_manifest(net))


def load_model(path):
    path = Path(path)
    return parse_model(path.read_bytes(), base_dir=path.parent)


def save_model(net, path, *, embed=True):
    """Write the canonical model file; with embed=False a sibling
    `<stem>.bin` carries the weights."""
    path = Path(path)
    if embed:
        data, _ = serialize_model(net)
        path.write_bytes(data)
    else:
        blob_name = path.stem + ".bin"
        data, blob = serialize_model(net, embed=False, blob_path=blob_name)
        (path.parent / blob_name).write_bytes(blob)
        path.write_bytes(data)
    return path


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadedDataset:
    data: LabeledBatch
    class_names: tuple
    dataset_id: str
    header: dict


def dataset_header(batch, class_names):
    n, c, h, w = batch.inputs.shape
    return {
        "format": DATASET_FORMAT,
        "count": n,
        "channels": c,
        "height": h,
        "width": w,
        "class_names": list(class_names),
        "labels": [int(l) for l in batch.labels],
    }


def dataset_id_of(batch, class_names):
    header = dataset_header(batch, class_names)
    core = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return _sha256(core + b"\x00" + _f32_bytes(batch.inputs))


def serialize_dataset(batch, class_names, *, embed=True, blob_path=None):
    blob = _f32_bytes(batch.inputs)
    header = dataset_header(batch, class_names)
    header["pixels"] = _blob_block(blob, embed=embed, path=blob_path)
    data = canon_dumps(header).encode()
    return (data, None) if embed else (data, blob)


def parse_dataset(file_bytes, base_dir=None):
    try:
        header = json.loads(file_bytes)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"dataset file is not valid JSON: {exc}") from None
    if not isinstance(header, dict):
        raise FileFormatError("dataset file must be a JSON object")
    if header.get("format") != DATASET_FORMAT:
        raise FileFormatError(f"dataset format must be {DATASET_FORMAT!r}")
    count = _require(header, "count", int, "dataset header")
    channels = _require(header, "channels", int, "dataset header")
    height = _require(header, "height", int, "dataset header")
    width = _require(header, "width", int, "dataset header")
    class_names = _require(header, "class_names", list, "dataset header")
    labels = _require(header, "labels", list, "dataset header")
    pixels_block = _require(header, "pixels", dict, "dataset header")

    if count < 1:
        raise FileFormatError("dataset must contain at least one sample")
    if len(labels) != count:
        raise FileFormatError(f"{len(labels)} labels for {count} samples")
    if len(class_names) < 2:
        raise FileFormatError("dataset must name at least two classes")
    for i, label in enumerate(labels):
        if not isinstance(label, int) or isinstance(label, bool) or \
                not 0 <= label < len(class_names):
            raise FileFormatError(
                f"label at index {i} must be an integer in [0, {len(class_names)})"
            )

    blob = _read_blob(pixels_block, base_dir, "dataset pixels")
    expected = count * channels * height * width * 4
    if len(blob) != expected:
        raise FileFormatError(
            f"pixel payload is {len(blob)} bytes, header implies {expected}"
        )
    pixels = np.frombuffer(blob, dtype="<f4").reshape(count, channels, height, width)
    bad = np.flatnonzero((pixels < 0.0) | (pixels > 1.0))
    if bad.size:
        i = int(bad[0])
        raise FileFormatError(
            f"pixel value {pixels.reshape(-1)[i]} at flat index {i} outside [0, 1]"
        )

    batch = LabeledBatch(pixels.copy(), np.asarray(labels, dtype=np.int64))
    header_out = dataset_header(batch, class_names)
    return LoadedDataset(batch, tuple(class_names), dataset_id_of(batch, class_names),
                         header_out)


def load_dataset(path):
    path = Path(path)
    return parse_dataset(path.read_bytes(), base_dir=path.parent)


def save_dataset(batch, class_names, path, *, embed=True):
    path = Path(path)
    if embed:
        data, _ = serialize_dataset(batch, class_names)
        path.write_bytes(data)
    else:
        blob_name = path.stem + ".bin"
        data, blob = serialize_dataset(batch, class_names, embed=False, blob_path=blob_name)
        (path.parent / blob_name).write_bytes(blob)
        path.write_bytes(data)
    return path
