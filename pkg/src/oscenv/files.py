"""Readers and writers for the on-disk run artifacts.

Formats (all plain text, \n line endings):
  * grid snapshot: header `# t=<t> M=<M> L=<L> u1=[lo,hi] u2=[lo,hi]`,
    then L lines of M comma-separated values, one line per u2 row;
  * complex snapshot: the same, a `# component=qi` line, then L more lines;
  * region map: the same header, then L lines of M label characters,
    `R` retained / `X` excised;
  * CSV series with fixed headers (see the individual writers).

Floats are rendered with repr, the shortest digit string that round-trips,
so write -> read -> write reproduces files byte for byte and rereading
loses nothing.
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .errors import FileFormatError
from .fields import ComplexField, Field2D, Grid2D
from .topology import RegionMap, region_from_mask

__all__ = [
    "write_snapshot",
    "read_snapshot",
    "write_complex_snapshot",
    "read_complex_snapshot",
    "write_series_csv",
    "read_series_csv",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_fk_csv",
    "read_fk_csv",
    "write_entropy_csv",
    "read_entropy_csv",
    "write_region_map",
    "read_region_map",
    "write_components_csv",
    "read_components_csv",
]

_HEADER_RE = re.compile(
    r"^# t=(?P<t>\S+) M=(?P<M>\d+) L=(?P<L>\d+)"
    r" u1=\[(?P<u1lo>[^,\]]+),(?P<u1hi>[^,\]]+)\]"
    r" u2=\[(?P<u2lo>[^,\]]+),(?P<u2hi>[^,\]]+)\]$"
)


def _fmt(x: float) -> str:
    return repr(float(x))


def _header_line(grid: Grid2D, t: float) -> str:
    return (
        f"# t={_fmt(t)} M={grid.M} L={grid.L}"
        f" u1=[{_fmt(grid.u1_min)},{_fmt(grid.u1_max)}]"
        f" u2=[{_fmt(grid.u2_min)},{_fmt(grid.u2_max)}]"
    )


def _parse_header(line: str, path: Path) -> tuple[Grid2D, float]:
    m = _HEADER_RE.match(line.rstrip("\n"))
    if m is None:
        raise FileFormatError(f"{path}:1: malformed snapshot header: {line.strip()!r}")
    M, L = int(m["M"]), int(m["L"])
    u1lo, u1hi = float(m["u1lo"]), float(m["u1hi"])
    u2lo, u2hi = float(m["u2lo"]), float(m["u2hi"])
    # spacing is implied; round away the division noise so exact-multiple
    # grids (the usual case) reconstruct with their original spacing
    du1 = round((u1hi - u1lo) / (M - 1), 12)
    du2 = round((u2hi - u2lo) / (L - 1), 12)
    grid = Grid2D(u1_min=u1lo, u1_max=u1hi, u2_min=u2lo, u2_max=u2hi,
                  M=M, L=L, du1=du1, du2=du2)
    return grid, float(m["t"])


def _value_lines(values: np.ndarray) -> list[str]:
    return [",".join(map(_fmt, row)) for row in values]


def _parse_block(lines: list[str], start: int, grid: Grid2D, path: Path) -> np.ndarray:
    rows = []
    for k in range(grid.L):
        ln = start + k
        if ln >= len(lines):
            raise FileFormatError(f"{path}: truncated at line {ln + 1}, expected {grid.L} data rows")
        parts = lines[ln].split(",")
        if len(parts) != grid.M:
            raise FileFormatError(
                f"{path}:{ln + 1}: expected {grid.M} values, found {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FileFormatError(f"{path}:{ln + 1}: {exc}") from None
    return np.array(rows, dtype=float)


def write_snapshot(path: str | Path, field: Field2D) -> Path:
    path = Path(path)
    lines = [_header_line(field.grid, field.t)]
    lines += _value_lines(field.values)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_snapshot(path: str | Path) -> Field2D:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    grid, t = _parse_header(lines[0], path)
    values = _parse_block(lines, 1, grid, path)
    return Field2D(grid, values, t)


def write_complex_snapshot(path: str | Path, field: ComplexField) -> Path:
    path = Path(path)
    lines = [_header_line(field.grid, field.t)]
    lines += _value_lines(field.qr)
    lines.append("# component=qi")
    lines += _value_lines(field.qi)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_complex_snapshot(path: str | Path) -> ComplexField:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    grid, t = _parse_header(lines[0], path)
    qr = _parse_block(lines, 1, grid, path)
    sep = 1 + grid.L
    if sep >= len(lines) or lines[sep].strip() != "# component=qi":
        raise FileFormatError(f"{path}:{sep + 1}: expected '# component=qi' separator")
    qi = _parse_block(lines, sep + 1, grid, path)
    return ComplexField(grid, qr, qi, t)


def _write_csv(path: Path, header: str, rows: list[list[float]]) -> Path:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _read_csv(path: str | Path, header: str) -> np.ndarray:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0] != header:
        got = lines[0] if lines else "<empty>"
        raise FileFormatError(f"{path}:1: expected header {header!r}, got {got!r}")
    ncol = len(header.split(","))
    out = []
    for ln, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != ncol:
            raise FileFormatError(f"{path}:{ln}: expected {ncol} columns, found {len(parts)}")
        try:
            out.append([float(p) for p in parts])
        except ValueError as exc:
            raise FileFormatError(f"{path}:{ln}: {exc}") from None
    return np.array(out, dtype=float).reshape(-1, ncol)


def write_series_csv(path: str | Path, times, alphas) -> Path:
    rows = [[t, a] for t, a in zip(times, alphas, strict=True)]
    return _write_csv(Path(path), "t,alpha", rows)


def read_series_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    data = _read_csv(path, "t,alpha")
    return data[:, 0], data[:, 1]


def write_trajectory_csv(path: str | Path, times, lambdas, xis) -> Path:
    rows = [
        [t, l.real, l.imag, x.real, x.imag]
        for t, l, x in zip(times, np.asarray(lambdas, dtype=complex),
                           np.asarray(xis, dtype=complex), strict=True)
    ]
    return _write_csv(Path(path), "t,re_lambda,im_lambda,re_xi,im_xi", rows)


def read_trajectory_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    data = _read_csv(path, "t,re_lambda,im_lambda,re_xi,im_xi")
    return data[:, 0], data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4]


def write_fk_csv(path: str | Path, times, means, stderr_re, stderr_im, n_effective) -> Path:
    rows = [
        [t, m.real, m.imag, sr, si, n]
        for t, m, sr, si, n in zip(times, np.asarray(means, dtype=complex),
                                   stderr_re, stderr_im, n_effective, strict=True)
    ]
    return _write_csv(Path(path), "t,re_mean,im_mean,re_stderr,im_stderr,n_effective", rows)


def read_fk_csv(path: str | Path):
    data = _read_csv(path, "t,re_mean,im_mean,re_stderr,im_stderr,n_effective")
    return (data[:, 0], data[:, 1] + 1j * data[:, 2],
            data[:, 3], data[:, 4], data[:, 5])


def write_entropy_csv(path: str | Path, series) -> Path:
    rows = [
        [t, sp, sr, si, sg]
        for t, sp, sr, si, sg in zip(series.times, series.s_plain, series.s_partial_r,
                                     series.s_partial_i, series.s_gen, strict=True)
    ]
    return _write_csv(Path(path), "t,s_plain,s_partial_r,s_partial_i,s_gen", rows)


def read_entropy_csv(path: str | Path) -> np.ndarray:
    return _read_csv(path, "t,s_plain,s_partial_r,s_partial_i,s_gen")


def write_region_map(path: str | Path, region: RegionMap) -> Path:
    path = Path(path)
    lines = [_header_line(region.grid, region.t)]
    body = np.where(region.retained, "R", "X")
    lines += ["".join(row) for row in body]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_region_map(path: str | Path) -> RegionMap:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise FileFormatError(f"{path}: empty file")
    grid, t = _parse_header(lines[0], path)
    retained = np.zeros(grid.shape, dtype=bool)
    for k in range(grid.L):
        ln = 1 + k
        if ln >= len(lines):
            raise FileFormatError(f"{path}: truncated at line {ln + 1}, expected {grid.L} rows")
        row = lines[ln]
        if len(row) != grid.M:
            raise FileFormatError(f"{path}:{ln + 1}: expected {grid.M} labels, found {len(row)}")
        bad = set(row) - {"R", "X"}
        if bad:
            raise FileFormatError(f"{path}:{ln + 1}: unknown labels {sorted(bad)}")
        retained[k] = np.frombuffer(row.encode(), dtype="S1") == b"R"
    return region_from_mask(grid, t, retained)


def write_components_csv(path: str | Path, rows) -> Path:
    """rows: iterable of (t, n_total, n_upper, n_lower)."""
    return _write_csv(Path(path), "t,n_total,n_upper,n_lower",
                      [list(map(float, r)) for r in rows])


def read_components_csv(path: str | Path) -> np.ndarray:
    return _read_csv(path, "t,n_total,n_upper,n_lower")
