"""Command-line front end for reproducible simulation/reconstruction runs.

Subcommands::

    swcs simulate    --config cfg.json --out DIR
    swcs reconstruct --config cfg.json --data DIR --out DIR
    swcs metrics     --recon DIR --truth DIR --out DIR
    swcs sweep       --config cfg.json --out DIR
    swcs report      --runs DIR [DIR ...] --out DIR

Configs are JSON mirroring the type tree (see ``default_config``);
unknown keys are rejected with their path so typos in experiment
recipes fail loudly.  Identical config + seed reproduce byte-identical
output trees.  Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import shutil
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import dataio, metrics, phantoms, pipeline, trajectories
from .dataio import DatasetFormatError
from .estimate import CgConfig
from .solvers import KompConfig, SplitBregmanConfig

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

KINDS = ("gaussians", "shepp-logan", "external-kspace")


class ConfigError(Exception):
    """Invalid experiment configuration; message names the field path."""


@dataclass(frozen=True)
class TrajectorySpec:
    image_size: int = 256
    samples_per_spoke: int | None = None  # default: 2 * image_size
    spoke_count: int = 1000
    k_max: float = math.pi

    def resolved_samples(self) -> int:
        return self.samples_per_spoke or 2 * self.image_size


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int
    trajectory: TrajectorySpec
    phantom: dict
    noise_sigma_rel: float
    recon: pipeline.SwcsConfig
    frames: tuple[int, ...] | None
    sweep: dict | None

    def phantom_spec(self):
        if self.kind == "gaussians":
            n = self.trajectory.spoke_count
            return phantoms.GaussianPhantomSpec(
                sigma=self.phantom["sigma"],
                velocity=self.phantom["velocity"],
                t_min=-(n // 2),
                t_max=n - 1 - n // 2,
                image_size=self.trajectory.image_size,
            )
        if self.kind == "shepp-logan":
            return phantoms.SheppLoganSpec(
                slice_thickness=self.phantom["slice_thickness"],
                speed=self.phantom["speed"],
                image_size=self.trajectory.image_size,
            )
        raise ConfigError(f"experiment kind {self.kind!r} has no phantom")

    def time_center(self) -> float:
        """Frame time at which the moving slice crosses z = 0."""
        if self.kind != "shepp-logan":
            return 0.0
        origin = self.phantom.get("time_origin", "mid")
        if origin == "start":
            return float(-(self.trajectory.spoke_count // 2))
        if origin == "mid":
            return 0.0
        return float(origin)


def _require_keys(section: dict, allowed: set[str], path: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        name = sorted(unknown)[0]
        raise ConfigError(f"unknown key {path}{name!r}")


def _get(section: dict, key: str, kind, default, path: str):
    if key not in section:
        if default is _REQUIRED:
            raise ConfigError(f"missing required key {path}{key!r}")
        return default
    value = section[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{path}{key!r} must be of type {kind.__name__}")
    return value


_REQUIRED = object()


def _parse_cg(section: dict, path: str) -> CgConfig:
    _require_keys(section, {"max_iterations", "tolerance"}, path)
    return CgConfig(
        max_iterations=_get(section, "max_iterations", int, 50, path),
        tolerance=_get(section, "tolerance", float, 1e-6, path),
    )


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config dict; raises ConfigError naming the bad field."""
    _require_keys(
        raw,
        {"kind", "seed", "trajectory", "phantom", "noise", "recon", "frames", "sweep"},
        "",
    )
    kind = _get(raw, "kind", str, _REQUIRED, "")
    if kind not in KINDS:
        raise ConfigError(f"'kind' must be one of {KINDS}")
    seed = _get(raw, "seed", int, 0, "")
    if seed < 0:
        raise ConfigError("'seed' must be >= 0")

    tsec = _get(raw, "trajectory", dict, {}, "")
    _require_keys(
        tsec, {"image_size", "samples_per_spoke", "spoke_count", "k_max"}, "trajectory."
    )
    traj = TrajectorySpec(
        image_size=_get(tsec, "image_size", int, 256, "trajectory."),
        samples_per_spoke=_get(tsec, "samples_per_spoke", int, None, "trajectory."),
        spoke_count=_get(tsec, "spoke_count", int, 1000, "trajectory."),
        k_max=_get(tsec, "k_max", float, math.pi, "trajectory."),
    )
    if traj.spoke_count < 1:
        raise ConfigError("'trajectory.spoke_count' must be >= 1")

    psec = _get(raw, "phantom", dict, {}, "")
    if kind == "gaussians":
        _require_keys(psec, {"sigma", "velocity"}, "phantom.")
        phantom = {
            "sigma": _get(psec, "sigma", float, _REQUIRED, "phantom."),
            "velocity": _get(psec, "velocity", float, _REQUIRED, "phantom."),
        }
    elif kind == "shepp-logan":
        _require_keys(psec, {"slice_thickness", "speed", "time_origin"}, "phantom.")
        origin = psec.get("time_origin", "mid")
        if origin not in ("start", "mid") and (
            isinstance(origin, bool) or not isinstance(origin, (int, float))
        ):
            raise ConfigError(
                "'phantom.time_origin' must be 'start', 'mid', or a frame time"
            )
        phantom = {
            "slice_thickness": _get(psec, "slice_thickness", float, _REQUIRED, "phantom."),
            "speed": _get(psec, "speed", float, _REQUIRED, "phantom."),
            "time_origin": origin,
        }
    else:
        _require_keys(psec, set(), "phantom.")
        phantom = {}

    nsec = _get(raw, "noise", dict, {}, "")
    _require_keys(nsec, {"sigma_rel"}, "noise.")
    noise_sigma_rel = _get(nsec, "sigma_rel", float, 0.0, "noise.")
    if noise_sigma_rel < 0:
        raise ConfigError("'noise.sigma_rel' must be >= 0")

    rsec = _get(raw, "recon", dict, {}, "")
    _require_keys(
        rsec,
        {
            "estimate_window",
            "residual_window",
            "solver",
            "cg",
            "komp",
            "bregman",
            "epsilon",
            "epsilon_factor",
        },
        "recon.",
    )
    ksec = _get(rsec, "komp", dict, {}, "recon.")
    _require_keys(
        ksec, {"k", "max_iterations", "residual_tolerance", "inner"}, "recon.komp."
    )
    bsec = _get(rsec, "bregman", dict, {}, "recon.")
    _require_keys(
        bsec,
        {"lambda1", "lambda2", "outer_iterations", "sweeps_per_outer", "inner"},
        "recon.bregman.",
    )
    try:
        komp = KompConfig(
            k=_get(ksec, "k", int, KompConfig.k, "recon.komp."),
            max_iterations=_get(
                ksec, "max_iterations", int, KompConfig.max_iterations, "recon.komp."
            ),
            residual_tolerance=_get(
                ksec,
                "residual_tolerance",
                float,
                KompConfig.residual_tolerance,
                "recon.komp.",
            ),
            inner=_parse_cg(
                _get(ksec, "inner", dict, {}, "recon.komp."), "recon.komp.inner."
            )
            if "inner" in ksec
            else KompConfig.inner,
        )
        bregman = SplitBregmanConfig(
            lambda1=_get(bsec, "lambda1", float, SplitBregmanConfig.lambda1, "recon.bregman."),
            lambda2=_get(bsec, "lambda2", float, SplitBregmanConfig.lambda2, "recon.bregman."),
            outer_iterations=_get(
                bsec,
                "outer_iterations",
                int,
                SplitBregmanConfig.outer_iterations,
                "recon.bregman.",
            ),
            sweeps_per_outer=_get(
                bsec,
                "sweeps_per_outer",
                int,
                SplitBregmanConfig.sweeps_per_outer,
                "recon.bregman.",
            ),
            inner=_parse_cg(
                _get(bsec, "inner", dict, {}, "recon.bregman."), "recon.bregman.inner."
            )
            if "inner" in bsec
            else SplitBregmanConfig.inner,
        )
        epsilon = rsec.get("epsilon")
        if epsilon is not None:
            epsilon = float(epsilon)
        recon = pipeline.SwcsConfig(
            image_size=traj.image_size,
            estimate_window=_get(rsec, "estimate_window", int, 305, "recon."),
            residual_window=_get(rsec, "residual_window", int, 72, "recon."),
            solver=_get(rsec, "solver", str, "bregman", "recon."),
            cg=_parse_cg(_get(rsec, "cg", dict, {}, "recon."), "recon.cg.")
            if "cg" in rsec
            else CgConfig(),
            komp=komp,
            bregman=bregman,
            epsilon=epsilon,
            epsilon_factor=_get(rsec, "epsilon_factor", float, 1.1, "recon."),
        )
    except ValueError as exc:
        raise ConfigError(f"recon: {exc}") from exc

    frames_raw = raw.get("frames")
    frames: tuple[int, ...] | None
    if frames_raw is None:
        frames = None
    elif isinstance(frames_raw, list):
        if not frames_raw or not all(
            isinstance(f, int) and not isinstance(f, bool) for f in frames_raw
        ):
            raise ConfigError("'frames' must be a non-empty list of integers")
        frames = tuple(frames_raw)
    elif isinstance(frames_raw, dict):
        _require_keys(frames_raw, {"start", "stop", "step"}, "frames.")
        start = _get(frames_raw, "start", int, _REQUIRED, "frames.")
        stop = _get(frames_raw, "stop", int, _REQUIRED, "frames.")
        step = _get(frames_raw, "step", int, 1, "frames.")
        if step < 1 or stop < start:
            raise ConfigError("'frames' range must be non-empty with step >= 1")
        frames = tuple(range(start, stop + 1, step))
    else:
        raise ConfigError("'frames' must be null, a list, or a start/stop/step object")
    if frames is not None:
        bad = [f for f in frames if not 1 <= f <= traj.spoke_count]
        if bad:
            raise ConfigError(f"'frames' contains out-of-range index {bad[0]}")

    sweep = raw.get("sweep")
    if sweep is not None:
        _require_keys(sweep, {"grid"}, "sweep.")
        grid = _get(sweep, "grid", dict, _REQUIRED, "sweep.")
        if not grid:
            raise ConfigError("'sweep.grid' must not be empty")
        allowed = {"komp.k", "bregman.lambda1", "bregman.lambda2"}
        for key, values in grid.items():
            if key not in allowed:
                raise ConfigError(f"unknown sweep parameter {key!r}")
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep values for {key!r} must be a non-empty list")

    return ExperimentConfig(
        kind=kind,
        seed=seed,
        trajectory=traj,
        phantom=phantom,
        noise_sigma_rel=noise_sigma_rel,
        recon=recon,
        frames=frames,
        sweep=sweep,
    )


def load_config(path: Path) -> tuple[ExperimentConfig, dict]:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DatasetFormatError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(raw), raw


def default_config(kind: str = "shepp-logan") -> dict:
    """A complete config skeleton with package defaults filled in."""
    phantom = {
        "gaussians": {"sigma": 4.0, "velocity": 0.064},
        # ~6 mm slice at a 300 mm / 256 px FOV; the plane crosses the
        # phantom centre at frame 320, before both reported frames
        "shepp-logan": {"slice_thickness": 5.0, "speed": 0.04, "time_origin": -181},
        "external-kspace": {},
    }[kind]
    return {
        "kind": kind,
        "seed": 0,
        "trajectory": {
            "image_size": 256,
            "samples_per_spoke": 512,
            "spoke_count": 1000,
            "k_max": math.pi,
        },
        "phantom": phantom,
        "noise": {"sigma_rel": 5e-4 if kind == "shepp-logan" else 0.0},
        "recon": {
            "estimate_window": 305,
            "residual_window": 72,
            "solver": "bregman",
            "cg": {"max_iterations": 50, "tolerance": 1e-6},
            "komp": {
                "k": KompConfig.k,
                "max_iterations": KompConfig.max_iterations,
                "residual_tolerance": KompConfig.residual_tolerance,
                "inner": {
                    "max_iterations": KompConfig.inner.max_iterations,
                    "tolerance": KompConfig.inner.tolerance,
                },
            },
            "bregman": {
                "lambda1": SplitBregmanConfig.lambda1,
                "lambda2": SplitBregmanConfig.lambda2,
                "outer_iterations": SplitBregmanConfig.outer_iterations,
                "sweeps_per_outer": SplitBregmanConfig.sweeps_per_outer,
                "inner": {
                    "max_iterations": SplitBregmanConfig.inner.max_iterations,
                    "tolerance": SplitBregmanConfig.inner.tolerance,
                },
            },
            "epsilon": None,
            "epsilon_factor": 1.1,
        },
        "frames": None,
        "sweep": None,
    }


def _frame_name(m: int) -> str:
    return f"{m:06d}"


def cmd_simulate(config_path: Path, out_dir: Path, overrides: dict) -> int:
    cfg, raw = load_config(config_path)
    cfg = _apply_overrides(cfg, overrides)
    if cfg.kind == "external-kspace":
        raise ConfigError("'external-kspace' experiments read data; nothing to simulate")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    created: list[Path] = []
    try:
        trajs = trajectories.golden_angle_stack(
            cfg.trajectory.spoke_count,
            cfg.trajectory.resolved_samples(),
            cfg.trajectory.k_max,
        )
        spec = cfg.phantom_spec()
        t_center = cfg.time_center()
        if cfg.kind == "shepp-logan":
            rows = np.empty(
                (len(trajs), cfg.trajectory.resolved_samples()), dtype=np.complex128
            )
            for i, tr in enumerate(trajs):
                z = phantoms.slice_position(tr.frame_time, spec, t_center)
                rows[i] = phantoms.shepp_logan_slice_kspace(spec, z, tr.samples)
            from .operators import KSpaceData

            data = KSpaceData(trajectories=tuple(trajs), samples=rows)
        else:
            data = phantoms.synthesize_kspace(trajs, spec)
        noise_abs = 0.0
        if cfg.noise_sigma_rel > 0:
            noise_abs = cfg.noise_sigma_rel * float(np.abs(data.samples).max())
            data = phantoms.add_noise(
                data, phantoms.NoiseSpec(sigma_rel=cfg.noise_sigma_rel, seed=cfg.seed)
            )

        kspace_path = out_dir / "kspace.bin"
        dataio.write_kspace(kspace_path, data)
        created.append(kspace_path)
        traj_path = out_dir / "trajectories.csv"
        dataio.write_trajectory_csv(traj_path, trajs)
        created.append(traj_path)

        truth_dir = out_dir / "truth"
        truth_dir.mkdir(exist_ok=True)
        created.append(truth_dir)
        frame_list = cfg.frames or tuple(t.index for t in trajs)
        for m in frame_list:
            t = trajs[m - 1].frame_time
            if cfg.kind == "shepp-logan":
                img = phantoms.shepp_logan_slice_image(
                    spec, phantoms.slice_position(t, spec, t_center)
                )
            else:
                img = phantoms.gaussian_frame(spec, t)
            dataio.write_image_f32(truth_dir / f"frame_{_frame_name(m)}.f32", img)
            dataio.write_pgm(truth_dir / f"frame_{_frame_name(m)}.pgm", img)

        manifest = {
            "config": _config_echo(cfg),
            "config_digest": dataio.config_digest(_config_echo(cfg)),
            "kind": cfg.kind,
            "seed": cfg.seed,
            "image_size": cfg.trajectory.image_size,
            "spoke_count": cfg.trajectory.spoke_count,
            "samples_per_spoke": cfg.trajectory.resolved_samples(),
            "time_center_index": cfg.trajectory.spoke_count // 2 + 1,
            "slice_time_center": t_center,
            "frame_time_convention": "frame_time = m - 1 - spoke_count // 2",
            "noise_sigma_abs": noise_abs,
            "truth_frames": list(frame_list),
        }
        dataio.write_manifest(out_dir / "manifest.json", manifest)
    except Exception:
        for path in created:
            if path.is_dir():
                shutil.rmtree(path, ignore_errors=True)
            else:
                path.unlink(missing_ok=True)
        raise
    print(f"simulated {cfg.kind} dataset: {out_dir}")
    return EXIT_OK


def _config_echo(cfg: ExperimentConfig) -> dict:
    recon = cfg.recon
    return {
        "kind": cfg.kind,
        "seed": cfg.seed,
        "trajectory": {
            "image_size": cfg.trajectory.image_size,
            "samples_per_spoke": cfg.trajectory.resolved_samples(),
            "spoke_count": cfg.trajectory.spoke_count,
            "k_max": cfg.trajectory.k_max,
        },
        "phantom": cfg.phantom,
        "noise": {"sigma_rel": cfg.noise_sigma_rel},
        "recon": {
            "estimate_window": recon.estimate_window,
            "residual_window": recon.residual_window,
            "solver": recon.solver,
            "cg": {
                "max_iterations": recon.cg.max_iterations,
                "tolerance": recon.cg.tolerance,
            },
            "komp": {
                "k": recon.komp.k,
                "max_iterations": recon.komp.max_iterations,
                "residual_tolerance": recon.komp.residual_tolerance,
                "inner": {
                    "max_iterations": recon.komp.inner.max_iterations,
                    "tolerance": recon.komp.inner.tolerance,
                },
            },
            "bregman": {
                "lambda1": recon.bregman.lambda1,
                "lambda2": recon.bregman.lambda2,
                "outer_iterations": recon.bregman.outer_iterations,
                "sweeps_per_outer": recon.bregman.sweeps_per_outer,
                "inner": {
                    "max_iterations": recon.bregman.inner.max_iterations,
                    "tolerance": recon.bregman.inner.tolerance,
                },
            },
            "epsilon": recon.epsilon,
            "epsilon_factor": recon.epsilon_factor,
        },
        "frames": list(cfg.frames) if cfg.frames else None,
    }


def cmd_reconstruct(
    config_path: Path, data_dir: Path, out_dir: Path, overrides: dict, workers: int
) -> int:
    cfg, _ = load_config(config_path)
    cfg = _apply_overrides(cfg, overrides)
    data_dir = Path(data_dir)
    data = dataio.load_dataset(data_dir)
    ds_manifest = {}
    manifest_path = data_dir / "manifest.json"
    if manifest_path.exists():
        ds_manifest = dataio.read_manifest(manifest_path)
    noise_sigma = float(ds_manifest.get("noise_sigma_abs", 0.0))
    n = int(ds_manifest.get("image_size", cfg.trajectory.image_size))
    recon_cfg = replace(cfg.recon, image_size=n)

    frames = list(cfg.frames) if cfg.frames else [t.index for t in data.trajectories]
    out_dir = Path(out_dir)
    (out_dir / "frames").mkdir(parents=True, exist_ok=True)
    (out_dir / "logs").mkdir(exist_ok=True)

    results = pipeline.reconstruct_sequence(
        data, recon_cfg, frames=frames, noise_sigma=noise_sigma, workers=workers
    )
    frame_records = []
    for res in results:
        name = _frame_name(res.frame_index)
        record: dict = {
            "frame_index": res.frame_index,
            "frame_time": res.frame_time,
        }
        if res.error is not None:
            record["error"] = res.error
            frame_records.append(record)
            continue
        for label, img in (
            ("estimate", res.estimate),
            ("residual", res.residual),
            ("recon", res.reconstruction),
        ):
            dataio.write_image_f32(out_dir / "frames" / f"frame_{name}_{label}.f32", img)
            dataio.write_pgm(out_dir / "frames" / f"frame_{name}_{label}.pgm", img)
        diag = res.diagnostics
        dataio.write_csv(
            out_dir / "logs" / f"estimate_{name}.csv",
            ["iteration", "residual"],
            [list(row) for row in diag["estimate_history"]],
        )
        if "solver_history" in diag:
            if recon_cfg.solver == "komp":
                header = ["iteration", "data_residual_norm", "support_size"]
            else:
                header = ["iteration", "data_residual_norm", "objective"]
            dataio.write_csv(
                out_dir / "logs" / f"solver_{name}.csv",
                header,
                [list(row) for row in diag["solver_history"]],
            )
        record.update(
            {k: v for k, v in diag.items() if not k.endswith("_history")}
        )
        frame_records.append(record)

    manifest = {
        "config": _config_echo(cfg),
        "config_digest": dataio.config_digest(_config_echo(cfg)),
        "dataset": {
            "kind": ds_manifest.get("kind", "external-kspace"),
            "digest": ds_manifest.get("config_digest"),
            "noise_sigma_abs": noise_sigma,
            "image_size": n,
        },
        "solver": recon_cfg.solver,
        "frames": frame_records,
    }
    dataio.write_manifest(out_dir / "manifest.json", manifest)
    n_err = sum(1 for r in frame_records if "error" in r)
    print(f"reconstructed {len(frame_records) - n_err}/{len(frame_records)} frames: {out_dir}")
    return EXIT_OK


def _phantom_from_manifest(manifest: dict):
    cfg = parse_config(manifest["config"])
    return cfg, cfg.phantom_spec(), cfg.time_center()


def cmd_metrics(recon_dir: Path, truth_dir: Path, out_dir: Path) -> int:
    recon_dir, truth_dir, out_dir = Path(recon_dir), Path(truth_dir), Path(out_dir)
    rman = dataio.read_manifest(recon_dir / "manifest.json")
    tman = dataio.read_manifest(truth_dir / "manifest.json")
    sim_cfg, spec, t_center = _phantom_from_manifest(tman)
    n = int(tman["image_size"])
    solver = rman.get("solver", "none")

    recon_frames = [f["frame_index"] for f in rman["frames"] if "error" not in f]
    truth_frames = set(tman.get("truth_frames", []))
    missing = [m for m in recon_frames if m not in truth_frames]
    if missing:
        raise DatasetFormatError(
            f"truth frames missing for reconstruction frames {missing[:5]}"
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    frame_times = {
        f["frame_index"]: f["frame_time"] for f in rman["frames"] if "error" not in f
    }

    rmse_rows = []
    profiles: dict[str, list[np.ndarray]] = {"estimate": [], "recon": []}
    times: list[int] = []
    for m in recon_frames:
        name = _frame_name(m)
        truth = dataio.read_image_f32(truth_dir / "truth" / f"frame_{name}.f32", n)
        t = frame_times[m]
        if sim_cfg.kind == "shepp-logan":
            z = phantoms.slice_position(t, spec, t_center)
            mask = phantoms.shepp_logan_mask(spec, z)
        else:
            mask = np.ones((n, n), dtype=bool)
        if not mask.any():
            continue
        for label, method in (("estimate", "estimate"), ("recon", solver)):
            img = dataio.read_image_f32(
                recon_dir / "frames" / f"frame_{name}_{label}.f32", n
            )
            rmse_rows.append([m, t, method, metrics.rmse(img, truth, mask)])
            profiles[label].append(metrics.profile_through_center(img))
        times.append(t)
    dataio.write_csv(
        out_dir / "rmse.csv", ["frame_index", "frame_time", "method", "rmse"], rmse_rows
    )

    if sim_cfg.kind == "gaussians":
        sigma = spec.sigma
        velocity = spec.velocity
        theory = metrics.theoretical_fwhm(sigma)
        fwhm_rows = []
        for label, method in (("estimate", "estimate"), ("recon", solver)):
            try:
                measured = metrics.fwhm(profiles[label][0])
                rel = 100.0 * abs(measured - theory) / theory
            except ValueError:
                measured, rel = None, None
            fwhm_rows.append([recon_frames[0], method, measured, theory, rel])
        dataio.write_csv(
            out_dir / "fwhm.csv",
            ["frame_index", "method", "fwhm", "theory", "rel_err_pct"],
            fwhm_rows,
        )

        order = np.argsort(times)
        tarr = np.asarray(times)[order]
        time_rows = []
        for label, method in (("estimate", "estimate"), ("recon", solver)):
            prof = np.asarray(profiles[label])[order]
            t0, t1 = metrics.midpoint_half_max_times(prof, tarr)
            t2, t3 = metrics.separability_times(prof, tarr)
            time_rows.append(
                [
                    method,
                    t0,
                    t1,
                    t2,
                    t3,
                    metrics.theoretical_t0(sigma, velocity),
                    metrics.theoretical_t2(sigma, velocity),
                ]
            )
        dataio.write_csv(
            out_dir / "times.csv",
            ["method", "t0", "t1", "t2", "t3", "theory_t0", "theory_t2"],
            time_rows,
        )
    print(f"metrics written: {out_dir}")
    return EXIT_OK


def _apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    if not overrides:
        return cfg
    recon = cfg.recon
    if "solver" in overrides:
        recon = replace(recon, solver=overrides["solver"])
    changes: dict = {"recon": recon}
    if "seed" in overrides:
        changes["seed"] = overrides["seed"]
    if "frames" in overrides:
        changes["frames"] = tuple(overrides["frames"])
    return replace(cfg, **changes)


def _set_grid_value(cfg: ExperimentConfig, key: str, value) -> ExperimentConfig:
    recon = cfg.recon
    if key == "komp.k":
        recon = replace(recon, komp=replace(recon.komp, k=int(value)))
    elif key == "bregman.lambda1":
        recon = replace(recon, bregman=replace(recon.bregman, lambda1=float(value)))
    elif key == "bregman.lambda2":
        recon = replace(recon, bregman=replace(recon.bregman, lambda2=float(value)))
    else:
        raise ConfigError(f"unknown sweep parameter {key!r}")
    return replace(cfg, recon=recon)


def cmd_sweep(config_path: Path, data_dir: Path, out_dir: Path, workers: int) -> int:
    cfg, _ = load_config(config_path)
    if not cfg.sweep:
        raise ConfigError("config has no 'sweep' section")
    grid = cfg.sweep["grid"]
    data_dir, out_dir = Path(data_dir), Path(out_dir)
    data = dataio.load_dataset(data_dir)
    tman = dataio.read_manifest(data_dir / "manifest.json")
    sim_cfg, spec, t_center = _phantom_from_manifest(tman)
    n = int(tman["image_size"])
    noise_sigma = float(tman.get("noise_sigma_abs", 0.0))
    frames = list(cfg.frames) if cfg.frames else [t.index for t in data.trajectories]

    keys = sorted(grid)
    combos: list[dict] = [{}]
    for key in keys:
        combos = [dict(c, **{key: v}) for c in combos for v in grid[key]]

    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for combo in combos:
        point_cfg = cfg
        for key, value in combo.items():
            point_cfg = _set_grid_value(point_cfg, key, value)
        recon_cfg = replace(point_cfg.recon, image_size=n)
        results = pipeline.reconstruct_sequence(
            data, recon_cfg, frames=frames, noise_sigma=noise_sigma, workers=workers
        )
        errs = []
        for res in results:
            if res.error is not None:
                continue
            t = res.frame_time
            if sim_cfg.kind == "shepp-logan":
                z = phantoms.slice_position(t, spec, t_center)
                mask = phantoms.shepp_logan_mask(spec, z)
                truth = phantoms.shepp_logan_slice_image(spec, z)
            else:
                mask = np.ones((n, n), dtype=bool)
                truth = phantoms.gaussian_frame(spec, t)
            if mask.any():
                errs.append(metrics.rmse(np.abs(res.reconstruction), truth, mask))
        mean_rmse = float(np.mean(errs)) if errs else float("nan")
        rows.append([*(combo[k] for k in keys), mean_rmse])
        print(f"sweep point {combo}: mean rmse {mean_rmse:.6g}")
    dataio.write_csv(out_dir / "sweep.csv", [*keys, "mean_rmse"], rows)
    finite = [r for r in rows if np.isfinite(r[-1])]
    if not finite:
        raise ConfigError("sweep produced no finite scores")
    best = min(finite, key=lambda r: r[-1])
    dataio.write_manifest(
        out_dir / "best.json",
        {"parameters": dict(zip(keys, best[:-1])), "mean_rmse": best[-1]},
    )
    print(f"best: {dict(zip(keys, best[:-1]))} mean rmse {best[-1]:.6g}")
    return EXIT_OK


def cmd_report(run_dirs: list[Path], out_dir: Path) -> int:
    """Cross-run summary: RMSE table (methods x runs) plus run configs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    columns: dict[str, dict[tuple[int, str], float]] = {}
    frame_set: set[tuple[int, str]] = set()
    for run in run_dirs:
        run = Path(run)
        label = run.name
        table: dict[tuple[int, str], float] = {}
        csv_path = run / "rmse.csv"
        if not csv_path.exists():
            raise DatasetFormatError(f"{run}: rmse.csv not found (run metrics first)")
        lines = csv_path.read_text().strip().splitlines()[1:]
        for line in lines:
            m, _t, method, value = line.split(",")
            table[(int(m), method)] = float(value)
            frame_set.add((int(m), method))
        columns[label] = table
    labels = sorted(columns)
    keys = sorted(frame_set)
    rows = []
    for m, method in keys:
        rows.append([m, method, *(columns[lab].get((m, method)) for lab in labels)])
    dataio.write_csv(out_dir / "rmse_table.csv", ["frame_index", "method", *labels], rows)

    lines = ["reconstruction error summary", ""]
    width = max(8, *(len(lab) for lab in labels)) + 2
    header = f"{'frame':>7} {'method':>10}" + "".join(f"{lab:>{width}}" for lab in labels)
    lines.append(header)
    for row in rows:
        m, method, *vals = row
        cells = "".join(
            f"{v:>{width}.3g}" if v is not None else " " * (width - 4) + "  --"
            for v in vals
        )
        lines.append(f"{m:>7} {method:>10}" + cells)
    (out_dir / "report.txt").write_text("\n".join(lines) + "\n")
    print(f"report written: {out_dir / 'report.txt'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swcs",
        description="Dynamic radial MRI simulation and sliding-window + CS reconstruction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="synthesize a k-space dataset")
    sim.add_argument("--config", required=True, type=Path)
    sim.add_argument("--out", required=True, type=Path)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--frames", type=str, help="comma-separated frame indices")

    rec = sub.add_parser("reconstruct", help="run the reconstruction pipeline")
    rec.add_argument("--config", required=True, type=Path)
    rec.add_argument("--data", required=True, type=Path)
    rec.add_argument("--out", required=True, type=Path)
    rec.add_argument("--frames", type=str)
    rec.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    rec.add_argument("--solver", choices=["komp", "bregman", "none"])
    rec.add_argument("--seed", type=int)

    met = sub.add_parser("metrics", help="compare reconstructions with ground truth")
    met.add_argument("--recon", required=True, type=Path)
    met.add_argument("--truth", required=True, type=Path)
    met.add_argument("--out", required=True, type=Path)

    swp = sub.add_parser("sweep", help="grid-search solver parameters")
    swp.add_argument("--config", required=True, type=Path)
    swp.add_argument("--data", required=True, type=Path)
    swp.add_argument("--out", required=True, type=Path)
    swp.add_argument("--workers", type=int, default=os.cpu_count() or 1)

    rep = sub.add_parser("report", help="summarize metric outputs across runs")
    rep.add_argument("--runs", required=True, nargs="+", type=Path)
    rep.add_argument("--out", required=True, type=Path)
    return parser


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "solver", None) is not None:
        overrides["solver"] = args.solver
    frames = getattr(args, "frames", None)
    if frames:
        try:
            overrides["frames"] = [int(f) for f in frames.split(",") if f]
        except ValueError as exc:
            raise ConfigError("--frames must be comma-separated integers") from exc
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out, _collect_overrides(args))
        if args.command == "reconstruct":
            return cmd_reconstruct(
                args.config, args.data, args.out, _collect_overrides(args), args.workers
            )
        if args.command == "metrics":
            return cmd_metrics(args.recon, args.truth, args.out)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.data, args.out, args.workers)
        if args.command == "report":
            return cmd_report(args.runs, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DatasetFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
