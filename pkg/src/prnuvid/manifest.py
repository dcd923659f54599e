"""Dataset manifest: JSON description of enrolled cameras, test videos,
enrollment resolution, and sampling defaults.

Schema (paths are resolved relative to the manifest file)::

    {
      "seed": 7,                                   // optional
      "enrollment": {"rows": 128, "cols": 128},
      "sampling": {                                // optional, defaults below
        "rate": 10,
        "average": {"train": false, "run": false}
      },
      "cameras": [
        {"id": "cam01", "training_dirs": ["cam01/train"]}
      ],
      "tests": [
        {"dir": "cam01/test_00", "true_id": "cam01"}   // true_id optional
      ]
    }
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from . import imaging
from .errors import InputDataError

CAMERA_ID_RE = re.compile(r"^[A-Za-z0-9._-]+$")


@dataclass
class SamplingDefaults:
    rate: int = 10
    average_train: bool = False
    average_run: bool = False


@dataclass
class CameraEntry:
    camera_id: str
    training_dirs: list[Path]


@dataclass
class TestEntry:
    directory: Path
    true_id: str | None = None


@dataclass
class DatasetManifest:
    path: Path
    rows: int
    cols: int
    cameras: list[CameraEntry]
    tests: list[TestEntry]
    sampling: SamplingDefaults = field(default_factory=SamplingDefaults)
    seed: int | None = None

    @property
    def camera_ids(self) -> list[str]:
        return [c.camera_id for c in self.cameras]


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise InputDataError(f"manifest field missing: {where}.{key}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise InputDataError(f"manifest field {where}.{key}: expected {kind.__name__}, got bool")
    if not isinstance(value, kind):
        raise InputDataError(
            f"manifest field {where}.{key}: expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _check_dir(base: Path, raw: str, where: str) -> Path:
    directory = (base / raw).resolve() if not os.path.isabs(raw) else Path(raw)
    if not directory.is_dir():
        raise InputDataError(f"manifest field {where}: missing directory {directory}")
    imaging.list_frames(directory)  # raises if the directory holds no frames
    return directory


def parse_manifest(path: str | os.PathLike) -> DatasetManifest:
    """Load and fully validate a dataset manifest."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise InputDataError(f"unreadable manifest: {path} ({exc})") from None
    except json.JSONDecodeError as exc:
        raise InputDataError(f"manifest is not valid JSON: {path} ({exc})") from None
    if not isinstance(raw, dict):
        raise InputDataError("manifest root must be a JSON object")
    base = path.resolve().parent

    enrollment = _require(raw, "enrollment", dict, "manifest")
    rows = _require(enrollment, "rows", int, "enrollment")
    cols = _require(enrollment, "cols", int, "enrollment")
    if rows < 16 or cols < 16:
        raise InputDataError("enrollment.rows/cols must be at least 16")

    sampling = SamplingDefaults()
    if "sampling" in raw:
        s = _require(raw, "sampling", dict, "manifest")
        if "rate" in s:
            rate = _require(s, "rate", int, "sampling")
            if rate < 1:
                raise InputDataError("sampling.rate must be >= 1")
            sampling.rate = rate
        if "average" in s:
            avg = _require(s, "average", dict, "sampling")
            if "train" in avg:
                sampling.average_train = _require(avg, "train", bool, "sampling.average")
            if "run" in avg:
                sampling.average_run = _require(avg, "run", bool, "sampling.average")

    seed = None
    if raw.get("seed") is not None:
        seed = _require(raw, "seed", int, "manifest")

    cameras_raw = _require(raw, "cameras", list, "manifest")
    if not cameras_raw:
        raise InputDataError("manifest field cameras: must list at least one camera")
    cameras: list[CameraEntry] = []
    seen_ids: set[str] = set()
    for i, cam in enumerate(cameras_raw):
        where = f"cameras[{i}]"
        if not isinstance(cam, dict):
            raise InputDataError(f"manifest field {where}: expected object")
        cam_id = _require(cam, "id", str, where)
        if not CAMERA_ID_RE.match(cam_id):
            raise InputDataError(
                f"manifest field {where}.id: invalid camera id {cam_id!r}"
                " (letters, digits, dot, dash, underscore only)"
            )
        if cam_id in seen_ids:
            raise InputDataError(f"manifest field {where}.id: duplicate camera id {cam_id!r}")
        seen_ids.add(cam_id)
        dirs_raw = _require(cam, "training_dirs", list, where)
        if not dirs_raw:
            raise InputDataError(f"manifest field {where}.training_dirs: must not be empty")
        dirs = []
        for j, d in enumerate(dirs_raw):
            if not isinstance(d, str):
                raise InputDataError(f"manifest field {where}.training_dirs[{j}]: expected string")
            dirs.append(_check_dir(base, d, f"{where}.training_dirs[{j}]"))
        cameras.append(CameraEntry(camera_id=cam_id, training_dirs=dirs))

    tests_raw = _require(raw, "tests", list, "manifest")
    tests: list[TestEntry] = []
    for i, t in enumerate(tests_raw):
        where = f"tests[{i}]"
        if not isinstance(t, dict):
            raise InputDataError(f"manifest field {where}: expected object")
        d = _require(t, "dir", str, where)
        directory = _check_dir(base, d, f"{where}.dir")
        true_id = t.get("true_id")
        if true_id is not None:
            if not isinstance(true_id, str):
                raise InputDataError(f"manifest field {where}.true_id: expected string")
            if true_id not in seen_ids:
                raise InputDataError(
                    f"manifest field {where}.true_id: unknown camera id {true_id!r}"
                )
        tests.append(TestEntry(directory=directory, true_id=true_id))

    return DatasetManifest(
        path=path,
        rows=rows,
        cols=cols,
        cameras=cameras,
        tests=tests,
        sampling=sampling,
        seed=seed,
    )
