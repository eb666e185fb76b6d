"""On-disk formats: k-space datasets, images, previews, logs, manifests.

The k-space container is a flat binary file: a 16-byte header (magic
``SWCSKSP1`` plus trajectory count M and samples-per-trajectory K as
little-endian int32), followed by M*K little-endian float64 (re, im)
pairs in trajectory-major order.  A sidecar CSV with columns
``m,theta,sample_index,kx,ky`` carries the trajectory geometry.

Images are raw little-endian float32 in C order (size recorded in the
run manifest); previews are 8-bit binary PGM with per-frame min-max
scaling.  Manifests are JSON with sorted keys and carry no timestamps,
so identical runs produce byte-identical output trees.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .operators import KSpaceData
from .trajectories import Trajectory

KSPACE_MAGIC = b"SWCSKSP1"


class DatasetFormatError(Exception):
    """Raised when an on-disk dataset fails header or shape checks."""


def write_kspace(path: Path, data: KSpaceData) -> None:
    m, k = data.samples.shape
    payload = np.empty((m, k, 2), dtype="<f8")
    payload[..., 0] = data.samples.real
    payload[..., 1] = data.samples.imag
    with open(path, "wb") as fh:
        fh.write(KSPACE_MAGIC)
        fh.write(struct.pack("<ii", m, k))
        fh.write(payload.tobytes())


def read_kspace_samples(path: Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:8] != KSPACE_MAGIC:
        raise DatasetFormatError(f"{path}: missing {KSPACE_MAGIC!r} header")
    m, k = struct.unpack("<ii", raw[8:16])
    if m < 1 or k < 1:
        raise DatasetFormatError(f"{path}: invalid dimensions M={m}, K={k}")
    expected = 16 + m * k * 16
    if len(raw) != expected:
        raise DatasetFormatError(
            f"{path}: size {len(raw)} does not match header ({expected} expected)"
        )
    flat = np.frombuffer(raw, dtype="<f8", offset=16).reshape(m, k, 2)
    return (flat[..., 0] + 1j * flat[..., 1]).astype(np.complex128)


def write_trajectory_csv(path: Path, trajectories) -> None:
    lines = ["m,theta,sample_index,kx,ky"]
    for t in trajectories:
        for j, (kx, ky) in enumerate(t.samples):
            lines.append(f"{t.index},{t.angle:.17g},{j},{kx:.17g},{ky:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path: Path, time_center: int | None = None) -> list[Trajectory]:
    """Rebuild trajectories; frame times centre on ``time_center``
    (default: m_total // 2 + 1, the convention used by the simulator)."""
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0].strip() != "m,theta,sample_index,kx,ky":
        raise DatasetFormatError(f"{path}: bad trajectory CSV header")
    rows: dict[int, list[tuple[int, float, float, float]]] = {}
    for line in text[1:]:
        m_s, theta_s, j_s, kx_s, ky_s = line.split(",")
        rows.setdefault(int(m_s), []).append(
            (int(j_s), float(theta_s), float(kx_s), float(ky_s))
        )
    m_total = max(rows)
    if sorted(rows) != list(range(1, m_total + 1)):
        raise DatasetFormatError(f"{path}: trajectory indices must cover 1..M")
    center = time_center if time_center is not None else m_total // 2 + 1
    out = []
    for m in range(1, m_total + 1):
        entries = sorted(rows[m])
        samples = np.array([(kx, ky) for _, _, kx, ky in entries])
        out.append(
            Trajectory(
                index=m,
                angle=entries[0][1],
                samples=samples,
                frame_time=m - center,
            )
        )
    return out


def load_dataset(directory: Path) -> KSpaceData:
    directory = Path(directory)
    samples = read_kspace_samples(directory / "kspace.bin")
    trajectories = read_trajectory_csv(directory / "trajectories.csv")
    if len(trajectories) != samples.shape[0]:
        raise DatasetFormatError(
            f"{directory}: trajectory CSV has {len(trajectories)} spokes, "
            f"binary has {samples.shape[0]}"
        )
    if trajectories[0].n_samples != samples.shape[1]:
        raise DatasetFormatError(f"{directory}: samples-per-spoke mismatch")
    return KSpaceData(trajectories=tuple(trajectories), samples=samples)


def write_image_f32(path: Path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if np.iscomplexobj(image):
        image = np.abs(image)
    Path(path).write_bytes(np.ascontiguousarray(image, dtype="<f4").tobytes())


def read_image_f32(path: Path, n: int) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) != n * n * 4:
        raise DatasetFormatError(f"{path}: expected {n}x{n} float32 image")
    return np.frombuffer(raw, dtype="<f4").reshape(n, n).astype(np.float64)


def write_pgm(path: Path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if np.iscomplexobj(image):
        image = np.abs(image)
    lo, hi = float(image.min()), float(image.max())
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    quantised = np.round((image - lo) * scale).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode())
        fh.write(quantised.tobytes())


def _jsonify(value):
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def write_manifest(path: Path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(_jsonify(payload), indent=2, sort_keys=True) + "\n"
    )


def read_manifest(path: Path) -> dict:
    return json.loads(Path(path).read_text())


def config_digest(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    def fmt(v) -> str:
        if v is None:
            return "unresolved"
        if isinstance(v, float):
            return f"{v:.12g}"
        return str(v)

    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n")
