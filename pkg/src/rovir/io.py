"""On-disk formats.

Arrays are stored as a JSON manifest next to a raw little-endian payload:

* ``kind="image"``: ``nc, ny, nx``, dtype ``c64le`` (interleaved float32
  real/imag pairs), layout ``channel-major``, element
  ``(c * ny + y) * nx + x``.
* ``kind="mask"``: ``ny, nx``, dtype ``u8``, element ``y * nx + x``.
* ``kind="weights"``: ``nv, nc``, dtype ``c64le``, layout ``vector-major``,
  element ``j * nc + c``.

Computation is double precision throughout; only the payloads are single
precision. Weight sets and Gram matrices also have plain JSON forms
(:func:`write_weights`, :func:`read_gram`).
"""

import json
from pathlib import Path

import numpy as np

from .arraydata import MultichannelImage
from .errors import ValidationError
from .linalg import hermitian
from .solvers import WeightSet

__all__ = [
    "MANIFEST_VERSION",
    "write_manifest",
    "read_manifest",
    "write_image",
    "read_image",
    "write_mask",
    "read_mask",
    "write_weights",
    "read_weights",
    "write_gram",
    "read_gram",
]

MANIFEST_VERSION = 1
ORTHO_TOL = 1e-8

_DTYPES = {"c64le": np.dtype("<c8"), "u8": np.dtype("u1")}
_SHAPE_KEYS = {"image": ("nc", "ny", "nx"), "mask": ("ny", "nx"), "weights": ("nv", "nc")}
_LAYOUTS = {"image": "channel-major", "mask": "row-major", "weights": "vector-major"}
_KIND_DTYPE = {"image": "c64le", "mask": "u8", "weights": "c64le"}


def _manifest_path(path):
    path = Path(path)
    return path if path.suffix == ".json" else path.with_suffix(".json")


def write_manifest(path, kind, array):
    """Write ``array`` as ``<path>.json`` + ``<path>.bin``; returns the manifest path."""
    if kind not in _SHAPE_KEYS:
        raise ValidationError(f"unknown manifest kind {kind!r}")
    keys = _SHAPE_KEYS[kind]
    array = np.asarray(array)
    if array.ndim != len(keys):
        raise ValidationError(f"{kind} needs a {len(keys)}-D array, got shape {array.shape}")
    mpath = _manifest_path(path)
    bpath = mpath.with_suffix(".bin")
    dtype = _KIND_DTYPE[kind]
    if kind == "mask":
        array = array != 0
    payload = np.ascontiguousarray(array, dtype=_DTYPES[dtype])
    manifest = {"version": MANIFEST_VERSION, "kind": kind}
    manifest.update(dict(zip(keys, (int(d) for d in array.shape))))
    manifest.update({"dtype": dtype, "layout": _LAYOUTS[kind], "data": bpath.name})
    mpath.parent.mkdir(parents=True, exist_ok=True)
    bpath.write_bytes(payload.tobytes())
    mpath.write_text(json.dumps(manifest, indent=2) + "\n")
    return mpath


def read_manifest(path, kind=None):
    """Load a manifest and its payload; returns ``(manifest, array)``.

    Complex payloads come back as complex128, masks as bool.
    """
    mpath = _manifest_path(path)
    try:
        manifest = json.loads(mpath.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read manifest {mpath}: {exc}") from exc
    if not isinstance(manifest, dict) or manifest.get("version") != MANIFEST_VERSION:
        raise ValidationError(f"{mpath}: unsupported manifest version")
    mkind = manifest.get("kind")
    if mkind not in _SHAPE_KEYS or (kind is not None and mkind != kind):
        raise ValidationError(f"{mpath}: expected kind {kind!r}, found {mkind!r}")
    if manifest.get("dtype") != _KIND_DTYPE[mkind] or manifest.get("layout") != _LAYOUTS[mkind]:
        raise ValidationError(f"{mpath}: unsupported dtype/layout for {mkind}")
    try:
        shape = tuple(int(manifest[k]) for k in _SHAPE_KEYS[mkind])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{mpath}: missing or bad dimension field") from exc
    if any(d < 1 for d in shape):
        raise ValidationError(f"{mpath}: dimensions must be positive, got {shape}")
    dtype = _DTYPES[manifest["dtype"]]
    bpath = mpath.parent / manifest["data"]
    try:
        raw = bpath.read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read payload {bpath}: {exc}") from exc
    expected = int(np.prod(shape)) * dtype.itemsize
    if len(raw) != expected:
        raise ValidationError(f"{bpath}: payload is {len(raw)} bytes, layout needs {expected}")
    array = np.frombuffer(raw, dtype=dtype).reshape(shape)
    if mkind == "mask":
        return manifest, array != 0
    return manifest, array.astype(np.complex128)


def write_image(path, values):
    return write_manifest(path, "image", values)


def read_image(path):
    return MultichannelImage(read_manifest(path, "image")[1])


def write_mask(path, mask):
    return write_manifest(path, "mask", mask)


def read_mask(path):
    return read_manifest(path, "mask")[1]


def _pairs(z):
    return [[float(v.real), float(v.imag)] for v in z]


def _parse_complex(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ValidationError(f"{where}: expected a number or a [re, im] pair, got {x!r}")


def write_weights(path, W, sirs=None):
    """Weight-set JSON: method, nv, nc, ``vectors`` as nv lists of nc
    ``[re, im]`` pairs, and ``sir`` per prefix length."""
    doc = {
        "method": W.method,
        "nv": W.nv,
        "nc": W.nc,
        "vectors": [_pairs(W.vectors[:, j]) for j in range(W.nv)],
        "sir": [float(s) for s in sirs] if sirs is not None else None,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")
    return path


def read_weights(path):
    """Load a weight-set JSON document.

    Single-precision ``weights`` manifests are not accepted here: float32
    rounding alone exceeds the orthonormality tolerance.

    Raises
    ------
    ValidationError
        If the vectors are not orthonormal to ``1e-8``.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read weights {path}: {exc}") from exc
    try:
        vectors = doc["vectors"]
        nv, nc = int(doc["nv"]), int(doc["nc"])
        method = str(doc.get("method", "original"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: not a weights document") from exc
    if nv < 1 or len(vectors) != nv or any(len(v) != nc for v in vectors):
        raise ValidationError(f"{path}: vectors do not match nv={nv}, nc={nc}")
    V = np.array([[_parse_complex(x, str(path)) for x in v] for v in vectors],
                 dtype=np.complex128).reshape(nv, nc).T
    if V.shape[1] > V.shape[0]:
        raise ValidationError(f"{path}: nv={V.shape[1]} exceeds nc={V.shape[0]}")
    err = np.max(np.abs(V.conj().T @ V - np.eye(V.shape[1])))
    if not err <= ORTHO_TOL:
        raise ValidationError(f"{path}: weight vectors are not orthonormal (error {err:.2e})")
    return WeightSet(V, method)


def write_gram(path, M):
    M = np.asarray(M, dtype=np.complex128)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"n": M.shape[0], "entries": [_pairs(r) for r in M]}) + "\n")
    return path


def read_gram(path):
    """Read a Hermitian matrix from JSON.

    Accepted forms: ``{"n": n, "entries": rows}`` or a bare list of rows;
    each entry is a real number or a ``[re, im]`` pair.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read matrix {path}: {exc}") from exc
    rows = doc.get("entries") if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ValidationError(f"{path}: expected a list of rows")
    n = len(rows)
    if isinstance(doc, dict) and doc.get("n", n) != n:
        raise ValidationError(f"{path}: n={doc.get('n')} but {n} rows")
    if any(len(r) != n for r in rows):
        raise ValidationError(f"{path}: matrix is not square")
    M = np.array([[_parse_complex(x, str(path)) for x in r] for r in rows], dtype=np.complex128)
    if np.max(np.abs(M - M.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(M))):
        raise ValidationError(f"{path}: matrix is not Hermitian")
    return hermitian(M)
