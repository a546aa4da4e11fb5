"""Deterministic CSV/JSON/SVG writers and the run manifest."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import __version__


def fmt(x) -> str:
    """Shortest round-tripping text for a number (repr of the float)."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_csv(path: Path, columns, rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def read_csv(path: Path) -> tuple[list[str], np.ndarray]:
    head, *body = Path(path).read_text().splitlines()
    return head.split(","), np.array([[float(x) for x in line.split(",")] for line in body])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return obj


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    experiment: str
    config: dict
    files: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_clock_s: float = 0.0
    code_version: str = __version__

    def add_file(self, path: Path) -> None:
        self.files[Path(path).name] = sha256(path)

    def add_check(self, name: str, passed: bool, **measured) -> None:
        self.checks.append({"name": name, "passed": bool(passed), "measured": measured})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "code_version": self.code_version,
            "config": self.config,
            "files": dict(sorted(self.files.items())),
            "checks": self.checks,
            "passed": self.passed,
            "wall_clock_s": self.wall_clock_s,
        }

    def write(self, out_dir: Path) -> Path:
        path = Path(out_dir) / "manifest.json"
        write_json(path, self.to_dict())
        return path


def verify_manifest(out_dir) -> list[str]:
    """Names of files whose digest no longer matches (or that are missing)."""
    out_dir = Path(out_dir)
    data = json.loads((out_dir / "manifest.json").read_text())
    bad = []
    for name, digest in data["files"].items():
        p = out_dir / name
        if not p.exists() or sha256(p) != digest:
            bad.append(name)
    return bad


def svg_plot(path: Path, t, series: dict, title: str, ylabel: str, width: int = 640, height: int = 400) -> None:
    """Line plot of several series against t, written as plain SVG."""
    t = np.asarray(t, dtype=float)
    pad_l, pad_r, pad_t, pad_b = 70, 20, 40, 50
    ys = np.concatenate([np.asarray(y, dtype=float) for y in series.values()])
    y0, y1 = float(np.min(ys, initial=0.0)), float(np.max(ys, initial=1.0))
    if y1 <= y0:
        y1 = y0 + 1.0
    t0, t1 = float(t[0]), float(t[-1]) if t[-1] > t[0] else float(t[0]) + 1.0

    def X(v):
        return pad_l + (v - t0) / (t1 - t0) * (width - pad_l - pad_r)

    def Y(v):
        return height - pad_b - (v - y0) / (y1 - y0) * (height - pad_t - pad_b)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{pad_l}" y1="{height - pad_b}" x2="{width - pad_r}" y2="{height - pad_b}" stroke="black"/>',
        f'<line x1="{pad_l}" y1="{pad_t}" x2="{pad_l}" y2="{height - pad_b}" stroke="black"/>',
    ]
    for i in range(5):
        tv = t0 + i * (t1 - t0) / 4
        yv = y0 + i * (y1 - y0) / 4
        out.append(f'<text x="{X(tv):.1f}" y="{height - pad_b + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{tv:.4g}</text>')
        out.append(f'<text x="{pad_l - 6}" y="{Y(yv) + 4:.1f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{yv:.4g}</text>')
    out.append(f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12">t</text>')
    out.append(f'<text x="16" y="{height / 2:.1f}" transform="rotate(-90 16 {height / 2:.1f})" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{ylabel}</text>')
    for j, (label, y) in enumerate(series.items()):
        c = colors[j % len(colors)]
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in zip(t, y))
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{pad_l + 10}" y="{pad_t + 16 * (j + 1)}" fill="{c}" font-family="sans-serif" '
                   f'font-size="12">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
