"""Write the example integrand on S, D and S minus D as three CSV files.

Usage: python scripts/reference_panels.py [OUTDIR] [--plot]

Uses the CLI's ``grid`` command with (A, B, C, D) = (1, 0.5, -0.8, 0.2) and
the variables (u, v) written as (x, y). ``--plot`` also renders a PNG with
matplotlib, masking points outside each region.
"""
import argparse
import csv
import pathlib
import sys

from diamondquad.cli import main as cli

EXPR = "exp(1*cos(x+y)+0.5*sin(x+y)-0.8*cos(x-y)+0.2*sin(x-y))"
REGIONS = ("S", "SminusD", "D")


def plot(paths, out_png):
    import matplotlib.pyplot as plt
    import numpy as np

    fig, axes = plt.subplots(1, 3, figsize=(12, 4), constrained_layout=True)
    for ax, (region, path) in zip(axes, paths.items()):
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        n = int(round(len(rows) ** 0.5))
        x = np.array([float(r["x"]) for r in rows]).reshape(n, n)
        y = np.array([float(r["y"]) for r in rows]).reshape(n, n)
        v = np.array([float(r["value"]) for r in rows]).reshape(n, n)
        m = np.array([r["in_region"] == "1" for r in rows]).reshape(n, n)
        im = ax.pcolormesh(x, y, np.ma.masked_where(~m, v), shading="auto")
        ax.plot([np.pi, 0, -np.pi, 0, np.pi], [0, np.pi, 0, -np.pi, 0], "k--", lw=0.8)
        ax.plot([-np.pi, np.pi], [0, 0], "k--", lw=0.5)
        ax.plot([0, 0], [-np.pi, np.pi], "k--", lw=0.5)
        ax.set_title(region)
        ax.set_aspect("equal")
    fig.colorbar(im, ax=axes, shrink=0.8)
    fig.savefig(out_png, dpi=150)


def run(outdir: pathlib.Path, grid: int, make_plot: bool) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for region in REGIONS:
        path = outdir / f"integrand_{region}.csv"
        code = cli(["grid", "--expr", EXPR, "--L", "pi", "--grid", str(grid),
                    "--region", region, "--out", str(path)])
        if code:
            return code
        paths[region] = path
    if make_plot:
        plot(paths, outdir / "integrand_panels.png")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default="panels")
    ap.add_argument("--grid", type=int, default=201)
    ap.add_argument("--plot", action="store_true")
    a = ap.parse_args()
    sys.exit(run(pathlib.Path(a.outdir), a.grid, a.plot))
