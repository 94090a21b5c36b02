"""CSV and PNG rendering for the (n, value) series some tasks produce."""

import csv
from pathlib import Path
from typing import Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")  # headless; must precede the pyplot import

import matplotlib.pyplot as plt

Row = Sequence[Union[int, float]]


def write_series(directory: Union[str, Path], stem: str,
                 header: Sequence[str], rows: Sequence[Row]) -> Tuple[Path, Path]:
    """Write `rows` to <stem>.csv and plot every column against the
    first one into <stem>.png; returns the two paths.
    """
    if not rows or any(len(r) != len(header) for r in rows):
        raise ValueError("rows must be nonempty and match the header")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{stem}.csv"
    png_path = directory / f"{stem}.png"
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [r[0] for r in rows]
    for i, name in enumerate(header[1:], start=1):
        ax.plot(xs, [r[i] for r in rows], marker="o", label=name)
    ax.set_xlabel(header[0])
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path)
    plt.close(fig)
    return csv_path, png_path
