"""Grid CSV layout: header i,j,x,y,z, rows ordered by i then j."""

from pathlib import Path

import numpy as np
import pandas as pd

from willmore_tori.exceptions import GridError
from willmore_tori.surface_kernel.grid import FourierAxis, SurfaceGrid


def grid_to_frame(grid: SurfaceGrid) -> pd.DataFrame:
    i, j = np.meshgrid(np.arange(grid.n_phi), np.arange(grid.n_theta), indexing="ij")
    pos = grid.positions.reshape(-1, 3)
    return pd.DataFrame(
        {"i": i.ravel(), "j": j.ravel(), "x": pos[:, 0], "y": pos[:, 1], "z": pos[:, 2]}
    )


def write_grid_csv(grid: SurfaceGrid, path: Path) -> Path:
    path = Path(path)
    grid_to_frame(grid).to_csv(path, index=False, float_format="%.17g")
    return path


def read_grid_csv(path: Path) -> SurfaceGrid:
    """Read a periodic grid written by write_grid_csv."""
    frame = pd.read_csv(path)
    if list(frame.columns) != ["i", "j", "x", "y", "z"]:
        raise GridError(f"Unexpected grid CSV header: {list(frame.columns)}")
    frame = frame.sort_values(["i", "j"])
    n_phi = int(frame["i"].max()) + 1
    n_theta = int(frame["j"].max()) + 1
    if len(frame) != n_phi * n_theta:
        raise GridError(f"Grid CSV has {len(frame)} rows, expected {n_phi * n_theta}")
    positions = frame[["x", "y", "z"]].to_numpy().reshape(n_phi, n_theta, 3)
    return SurfaceGrid(positions, (FourierAxis(n_phi), FourierAxis(n_theta)))
