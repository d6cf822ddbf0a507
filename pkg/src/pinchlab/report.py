"""Delimited output and figure rendering for boundary sweeps.

CSV columns are ``theta,support,re,im`` with shortest round-trip float
formatting; figures are rendered headlessly with matplotlib to whatever
format the output suffix selects (svg, png, pdf).
"""

from __future__ import annotations

from pathlib import Path

from .numrange import NumericalRangeBoundary

BOUNDARY_HEADER = "theta,support,re,im"


def boundary_csv_text(boundary: NumericalRangeBoundary) -> str:
    lines = [BOUNDARY_HEADER]
    for theta, support, point in zip(
        boundary.thetas, boundary.supports, boundary.points
    ):
        lines.append(
            f"{float(theta)!r},{float(support)!r},"
            f"{float(point.real)!r},{float(point.imag)!r}"
        )
    return "\n".join(lines) + "\n"


def write_boundary_csv(path, boundary: NumericalRangeBoundary) -> None:
    Path(path).write_text(boundary_csv_text(boundary), encoding="utf-8")


def render_boundary(path, boundary: NumericalRangeBoundary, title: str = "") -> None:
    """Draw the closed boundary polyline and save it to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    points = boundary.points
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    ax.plot(
        list(points.real) + [points.real[0]],
        list(points.imag) + [points.imag[0]],
        lw=1.2,
    )
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.grid(True, lw=0.3, alpha=0.5)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
