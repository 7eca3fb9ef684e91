"""File formats: seed/config/manifest JSON, family CSV and embedded point series.

Floats in CSV files are written with 17 significant digits so that every
double round-trips exactly.
"""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .continuation import DEFAULT_STEP, DEFAULT_TOL, ContinuationFamily
from .seeds import SeedReport

FAMILY_FIXED_COLUMNS = ["kappa", "alpha", "residual", "newton_iters", "min_abs_eig"]
EMBEDDED_COLUMNS = ["kappa", "body_index", "x", "y", "z"]
DEFAULT_KAPPA_LIMIT = 70.0


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


@dataclass
class RunConfig:
    masses: list[float]
    seed_kind: str  # "polygon", "lagrange3" or "custom"
    polygon_n: int | None = None
    seed_u: list[float] | None = None
    direction: str = "pos"
    delta_kappa: float = DEFAULT_STEP
    kappa_limit: float = DEFAULT_KAPPA_LIMIT
    tol: float = DEFAULT_TOL
    adaptive: bool = True
    reflect_z: bool = False
    out: str = "family.csv"
    manifest: str | None = None

    def __post_init__(self):
        self.masses = [float(m) for m in self.masses]
        if not self.masses or any(not np.isfinite(m) or m <= 0 for m in self.masses):
            raise ValueError(f"masses must be positive, got {self.masses}")
        if self.seed_kind not in ("polygon", "lagrange3", "custom"):
            raise ValueError(f"unknown seed kind {self.seed_kind!r}")
        if self.direction not in ("pos", "neg", "both"):
            raise ValueError(f"direction must be pos, neg or both, got {self.direction!r}")
        if not self.delta_kappa > 0:
            raise ValueError("delta_kappa must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.kappa_limit != 0:
            raise ValueError("kappa_limit must be nonzero")
        if self.seed_kind == "custom" and self.seed_u is None:
            raise ValueError("custom seed needs seed_u")
        if self.seed_kind == "lagrange3" and len(self.masses) != 3:
            raise ValueError("lagrange3 seed needs exactly three masses")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        return cls(**known)


def seed_to_dict(report: SeedReport) -> dict:
    d = {
        "format": "curved-nbody/seed",
        "kind": report.kind,
        "masses": [float(m) for m in report.masses],
        "u": [float(x) for x in report.configuration],
        "circumradius": report.circumradius,
        "residual": report.residual,
        "kernel_dimension": report.kernel_dimension,
        "degenerate": report.degenerate,
        "kernel_alignment": None if np.isnan(report.kernel_alignment) else report.kernel_alignment,
        "hessian_spectrum": [float(v) for v in report.hessian_spectrum],
    }
    if report.routh_beta is not None:
        d["routh_beta"] = report.routh_beta
    if report.kind == "lagrange3":
        p = report.configuration.reshape(-1, 2)
        d["side"] = float(np.linalg.norm(p[0] - p[1]))
    return d


def family_to_csv(family: ContinuationFamily) -> str:
    n = len(family.masses)
    header = FAMILY_FIXED_COLUMNS + [f"{c}_{j}" for j in range(1, n + 1) for c in ("x", "y")]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in family.records:
        w.writerow(
            [fmt(r.kappa), fmt(r.alpha), fmt(r.residual), str(int(r.newton_iters)), fmt(r.min_abs_eig)]
            + [fmt(x) for x in r.u]
        )
    return buf.getvalue()


@dataclass
class FamilyTable:
    kappa: np.ndarray
    alpha: np.ndarray
    residual: np.ndarray
    newton_iters: np.ndarray
    min_abs_eig: np.ndarray
    u: np.ndarray  # (rows, 2n)
    header: list[str] = field(default_factory=list)

    def __len__(self):
        return len(self.kappa)


def read_family_csv(path) -> FamilyTable:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty family file")
    header, body = rows[0], rows[1:]
    if header[: len(FAMILY_FIXED_COLUMNS)] != FAMILY_FIXED_COLUMNS or (len(header) - 5) % 2:
        raise ValueError(f"{path}: not a family CSV (header {header[:6]}...)")
    data = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(-1, len(header))
    return FamilyTable(
        kappa=data[:, 0],
        alpha=data[:, 1],
        residual=data[:, 2],
        newton_iters=data[:, 3].astype(int),
        min_abs_eig=data[:, 4],
        u=data[:, 5:],
        header=header,
    )


def embedded_to_csv(rows) -> str:
    """``rows`` is an iterable of ``(kappa, EmbeddedConfiguration)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EMBEDDED_COLUMNS)
    for kappa, ec in rows:
        for j, (x, y, z) in enumerate(ec.points, start=1):
            w.writerow([fmt(kappa), str(j), fmt(x), fmt(y), fmt(z)])
    return buf.getvalue()


def read_embedded_csv(path) -> np.ndarray:
    """Return an array with columns ``kappa, body_index, x, y, z``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0] != EMBEDDED_COLUMNS:
        raise ValueError(f"{path}: not an embedded-series CSV")
    return np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, 5)


def branch_paths(out: str, direction: str) -> dict[str, Path]:
    """Output file per branch; ``both`` inserts ``_pos``/``_neg`` before the suffix."""
    out = Path(out)
    if direction != "both":
        return {direction: out}
    return {d: out.with_name(f"{out.stem}_{d}{out.suffix or '.csv'}") for d in ("pos", "neg")}


def default_manifest_path(out: str) -> Path:
    out = Path(out)
    return out.with_name(f"{out.stem}.manifest.json")
