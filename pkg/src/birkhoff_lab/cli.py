"""Command-line front end.

Exit codes for ``check`` and ``witness``: 0 unistochastic, 1 not
unistochastic, 2 unknown, 3 unreadable or invalid input.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .bracelet import is_bracelet
from .errors import BirkhoffError
from .matrix_io import read_matrix, write_complex_matrix
from .unistochastic import Verdict, certify

EXIT_CODES = {Verdict.UNISTOCHASTIC: 0, Verdict.NOT_UNISTOCHASTIC: 1, Verdict.UNKNOWN: 2}
EXIT_BAD_INPUT = 3


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, default=float))


def _load(path: str):
    try:
        return read_matrix(path)
    except (OSError, ValueError, BirkhoffError) as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_BAD_INPUT)


def _heuristic_options(f):
    f = click.option("--seed", default=0, show_default=True, help="Seed for the heuristic search.")(f)
    f = click.option("--restarts", default=100, show_default=True, help="Heuristic restart budget.")(f)
    f = click.option("--no-heuristic", is_flag=True, help="Only use exact constructions.")(f)
    return f


def _certify(b, no_heuristic: bool, restarts: int, seed: int):
    return certify(b, heuristic=not no_heuristic, restarts=restarts, seed=seed)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Bracelet checks, unistochastic witnesses and Birkhoff polytope figures."""


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True, dir_okay=False))
@_heuristic_options
def check(matrix_file, no_heuristic, restarts, seed):
    """Print the bracelet report and certificate for MATRIX_FILE."""
    b = _load(matrix_file)
    report = is_bracelet(b)
    cert = _certify(b, no_heuristic, restarts, seed)
    payload = {"bracelet": report.to_dict()}
    if cert is None:
        payload["certificate"] = {"verdict": Verdict.UNKNOWN.value, "method": "exact paths only"}
        _emit(payload)
        sys.exit(EXIT_CODES[Verdict.UNKNOWN])
    payload["certificate"] = cert.to_json()
    _emit(payload)
    sys.exit(EXIT_CODES[cert.verdict])


@main.command()
@click.argument("matrix_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False), help="Witness file to write.")
@_heuristic_options
def witness(matrix_file, output, no_heuristic, restarts, seed):
    """Write a unitary witness for MATRIX_FILE when one is found."""
    b = _load(matrix_file)
    cert = _certify(b, no_heuristic, restarts, seed)
    if cert is None:
        _emit({"verdict": Verdict.UNKNOWN.value, "method": "exact paths only"})
        sys.exit(EXIT_CODES[Verdict.UNKNOWN])
    if cert.verdict is Verdict.UNISTOCHASTIC:
        write_complex_matrix(output, cert.witness.matrix)
        _emit(cert.to_json(witness_file=output))
    else:
        _emit(cert.to_json())
    sys.exit(EXIT_CODES[cert.verdict])


@main.command()
@click.option("-d", "dim", required=True, type=int, help="Matrix size.")
@click.option("--step", required=True, type=float, help="Simplex grid step; must divide 1.")
@click.option("-o", "--output", "prefix", required=True, help="Prefix for the two CSV files.")
@click.option("--tolerance", default=1e-9, show_default=True)
def spectra(dim, step, prefix, tolerance):
    """Eigenvalues of bracelet circulants on a simplex grid, plus the hypocycloid."""
    from .explorer.scatter import eigenvalue_scatter, write_scatter

    try:
        result = eigenvalue_scatter(dim, step, tolerance)
    except BirkhoffError as exc:
        raise click.BadParameter(str(exc), param_hint="--step") from exc
    points, boundary = write_scatter(prefix, result)
    _emit(
        {
            "d": dim,
            "matrices": int(len(result.alphas)),
            "eigenvalues": int(result.eigenvalues.size),
            "failures": result.failures,
            "worst_excess": result.worst_excess,
            "experimental": result.experimental,
            "points": str(points),
            "boundary": str(boundary),
        }
    )
    sys.exit(1 if result.failures else 0)


@main.command("cross-section")
@click.option("--anchors", nargs=3, required=True, type=click.Path(exists=True, dir_okay=False), help="Three matrix files.")
@click.option("--res", "resolution", default=256, show_default=True)
@click.option("--extent", default=None, type=float, help="Half-width of the chart (default fits the anchors).")
@click.option("-o", "--output", "prefix", required=True, help="Prefix for the PPM and CSV files.")
@click.option("--heuristic", is_flag=True, help="Also try the heuristic search per pixel.")
def cross_section(anchors, resolution, extent, prefix, heuristic):
    """Classified planar slice through three bistochastic matrices."""
    from .explorer.raster import (
        CrossSectionSpec,
        default_extent,
        raster_cross_section,
        star_shape_check,
        write_raster,
    )
    from .core import flat_matrix

    mats = tuple(_load(a) for a in anchors)
    spec = CrossSectionSpec(mats, resolution, extent or default_extent(mats), heuristic)
    try:
        raster = raster_cross_section(spec)
    except BirkhoffError as exc:
        raise click.BadParameter(str(exc), param_hint="--anchors") from exc
    ppm, csv_path = write_raster(prefix, raster)
    payload = {"counts": raster.counts(), "ppm": str(ppm), "csv": str(csv_path)}
    w = flat_matrix(mats[0].dim).entries
    if raster.coordinates_of(w)[2] <= 1e-10:
        star = star_shape_check(raster, raster.pixel_of(w))
        payload["star_shape"] = {"checked": star.checked, "failures": len(star.failures), "artifacts": len(star.artifacts)}
    _emit(payload)


def _weights(text: str) -> list[float]:
    return [float(x) for x in text.split(",")]


@main.command()
@click.option("--plane", nargs=3, required=True, help="Three comma-separated weight vectors on (1, Pi, Pi^2, Pi^3).")
@click.option("--res", "resolution", default=256, show_default=True)
@click.option("--extent", default=1.0, show_default=True)
@click.option("-o", "--output", "prefix", required=True)
def tetra(plane, resolution, extent, prefix):
    """Slice of the circulant 4x4 tetrahedron, decided exactly."""
    from .explorer.raster import TetraPlaneSpec, raster_tetrahedron_slice, write_raster

    try:
        spec = TetraPlaneSpec(tuple(_weights(p) for p in plane), resolution, extent)
        raster = raster_tetrahedron_slice(spec)
    except (ValueError, BirkhoffError) as exc:
        raise click.BadParameter(str(exc), param_hint="--plane") from exc
    ppm, csv_path = write_raster(prefix, raster)
    _emit({"counts": raster.counts(), "edge_pixels": int(raster.edges.sum()), "ppm": str(ppm), "csv": str(csv_path)})


@main.command()
@click.option("--d", "dim", required=True, type=int)
@click.option("--trials", required=True, type=int)
@click.option("--seed", default=7, show_default=True)
@click.option("-o", "--output", "out_dir", required=True, type=click.Path(file_okay=False))
def fuzz(dim, trials, seed, out_dir):
    """Search for bracelet pairs whose product is not bracelet."""
    from .explorer.fuzz import fuzz_monoid_conjecture

    Path(out_dir).mkdir(parents=True, exist_ok=True)
    try:
        report = fuzz_monoid_conjecture(dim, trials, seed, out_dir)
    except BirkhoffError as exc:
        raise click.BadParameter(str(exc)) from exc
    (Path(out_dir) / "report.json").write_text(json.dumps(report.to_dict(), indent=2))
    _emit(report.to_dict())


@main.command()
@click.option("--restarts", default=100, show_default=True)
def fixtures(restarts):
    """Run the canonical regression fixtures."""
    from .explorer.fixtures import regression_fixtures

    results = regression_fixtures(restarts)
    for r in results:
        click.echo(r.line())
    sys.exit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":  # pragma: no cover
    main()
