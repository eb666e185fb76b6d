from __future__ import annotations

import numpy as np
import pytest

from swcs import dataio
from swcs.dataio import DatasetFormatError
from swcs.operators import KSpaceData
from swcs.phantoms import GaussianPhantomSpec, synthesize_kspace
from swcs.trajectories import golden_angle_stack


@pytest.fixture()
def small_data():
    trajs = golden_angle_stack(6, 12)
    spec = GaussianPhantomSpec(sigma=2.0, velocity=0.2, t_min=-3, t_max=2, image_size=12)
    return synthesize_kspace(trajs, spec)


def test_kspace_roundtrip_exact(tmp_path, small_data):
    path = tmp_path / "kspace.bin"
    dataio.write_kspace(path, small_data)
    header = path.read_bytes()[:16]
    assert header[:8] == b"SWCSKSP1"
    back = dataio.read_kspace_samples(path)
    assert np.array_equal(back, small_data.samples)


def test_kspace_header_checks(tmp_path, small_data):
    path = tmp_path / "kspace.bin"
    dataio.write_kspace(path, small_data)
    raw = bytearray(path.read_bytes())
    raw[:8] = b"NOTMAGIC"
    bad = tmp_path / "bad.bin"
    bad.write_bytes(bytes(raw))
    with pytest.raises(DatasetFormatError):
        dataio.read_kspace_samples(bad)
    truncated = tmp_path / "short.bin"
    truncated.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(DatasetFormatError):
        dataio.read_kspace_samples(truncated)


def test_trajectory_csv_roundtrip(tmp_path, small_data):
    path = tmp_path / "trajectories.csv"
    dataio.write_trajectory_csv(path, small_data.trajectories)
    assert path.read_text().splitlines()[0] == "m,theta,sample_index,kx,ky"
    back = dataio.read_trajectory_csv(path)
    assert len(back) == len(small_data.trajectories)
    for a, b in zip(back, small_data.trajectories):
        assert a.index == b.index
        assert a.frame_time == b.frame_time
        assert a.angle == pytest.approx(b.angle, abs=1e-15)
        assert np.allclose(a.samples, b.samples, atol=1e-15)


def test_load_dataset_consistency_check(tmp_path, small_data):
    dataio.write_kspace(tmp_path / "kspace.bin", small_data)
    dataio.write_trajectory_csv(
        tmp_path / "trajectories.csv", small_data.trajectories[:-1]
    )
    with pytest.raises(DatasetFormatError):
        dataio.load_dataset(tmp_path)


def test_image_f32_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.standard_normal((9, 9))
    path = tmp_path / "img.f32"
    dataio.write_image_f32(path, img)
    back = dataio.read_image_f32(path, 9)
    assert np.abs(back - img).max() < 1e-6
    with pytest.raises(DatasetFormatError):
        dataio.read_image_f32(path, 10)


def test_pgm_header_and_range(tmp_path):
    img = np.linspace(0.0, 3.0, 48).reshape(6, 8)
    path = tmp_path / "img.pgm"
    dataio.write_pgm(path, img)
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n8 6\n255\n")
    pixels = np.frombuffer(raw.split(b"255\n", 1)[1], dtype=np.uint8)
    assert pixels.min() == 0 and pixels.max() == 255


def test_pgm_constant_image(tmp_path):
    path = tmp_path / "flat.pgm"
    dataio.write_pgm(path, np.ones((4, 4)))
    pixels = np.frombuffer(path.read_bytes().split(b"255\n", 1)[1], dtype=np.uint8)
    assert (pixels == 0).all()


def test_manifest_deterministic_and_digest(tmp_path):
    payload = {"b": np.float64(1.5), "a": [np.int32(2), True], "c": {"x": np.bool_(False)}}
    p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
    dataio.write_manifest(p1, payload)
    dataio.write_manifest(p2, payload)
    assert p1.read_bytes() == p2.read_bytes()
    loaded = dataio.read_manifest(p1)
    assert loaded == {"b": 1.5, "a": [2, True], "c": {"x": False}}
    assert dataio.config_digest({"a": 1}) == dataio.config_digest({"a": 1})
    assert dataio.config_digest({"a": 1}) != dataio.config_digest({"a": 2})


def test_write_csv_formats_unresolved(tmp_path):
    path = tmp_path / "t.csv"
    dataio.write_csv(path, ["a", "b"], [[1, None], [2.5, "x"]])
    assert path.read_text() == "a,b\n1,unresolved\n2.5,x\n"
