"""Separable 2-D upsampling guided by high-resolution probability maps.

A low-resolution scalar image is upsampled one axis at a time; along
every interpolation line a 1-D subdomain description is extracted from
the probability atlas by bilinear interpolation, so each line gets its
own domain-informed basis.  Pixel values sit at pixel centers.
"""

import json
import os

import numpy as np

from dibsi.basis import DomainInformedBasis, StandardBasis
from dibsi.domains import GridFunction, SubdomainSet
from dibsi.interpolation import SampleSequence, interpolate

ATLAS_POU_TOL = 1e-6


class ScalarImage:
    """Dense 2-D scalar field with square pixels of size ``pixel_size``."""

    def __init__(self, values, pixel_size=1.0):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2 or values.size == 0:
            raise ValueError("image values must be a nonempty 2-D array")
        if not np.all(np.isfinite(values)):
            raise ValueError("image values must be finite")
        if pixel_size <= 0:
            raise ValueError(f"pixel size must be positive, got {pixel_size}")
        self.values = values
        self.pixel_size = float(pixel_size)

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]


class ProbabilityAtlas:
    """Subdomain probability maps at ``ratio`` times the image resolution.

    Maps are nonnegative and sum to one pointwise after normalization;
    any deficit below one (regions no map claims) is folded into the
    last map before renormalizing.  Pointwise sums exceeding one by more
    than ``ATLAS_POU_TOL`` are rejected.
    """

    def __init__(self, maps, ratio):
        if not maps:
            raise ValueError("atlas needs at least one probability map")
        if not isinstance(ratio, (int, np.integer)) or ratio < 1:
            raise ValueError(f"ratio must be a positive integer, got {ratio!r}")
        shape = maps[0].values.shape
        pixel = maps[0].pixel_size
        for m in maps[1:]:
            if m.values.shape != shape or m.pixel_size != pixel:
                raise ValueError("probability maps must share one grid")
        stack = np.stack([m.values for m in maps])
        if np.any(stack < -1e-12):
            raise ValueError("probability maps must be nonnegative")
        stack = np.clip(stack, 0.0, None)
        total = stack.sum(axis=0)
        if np.any(total > 1.0 + ATLAS_POU_TOL):
            raise ValueError(
                "pointwise map sum exceeds 1 by more than "
                f"{ATLAS_POU_TOL:.0e} (max {np.max(total):.6f})"
            )
        stack[-1] += np.clip(1.0 - total, 0.0, None)
        stack /= stack.sum(axis=0)
        self.maps = stack
        self.ratio = int(ratio)
        self.pixel_size = pixel

    @property
    def J(self):
        return self.maps.shape[0]

    @property
    def shape(self):
        return self.maps.shape[1:]

    def line_profile(self, j, axis, coord):
        """Map ``j`` along a line of constant transverse coordinate.

        ``axis`` is the direction the line runs along: ``"x"`` walks the
        columns at height ``coord``, ``"y"`` walks the rows at abscissa
        ``coord``.  The transverse position is resolved by linear
        interpolation between the two bracketing atlas lines (clamped at
        the edges), which together with the atlas-pitch sampling along
        the line realizes exact bilinear interpolation of the map.
        """
        rows, cols = self.shape
        values = self.maps[j]
        n_across = rows if axis == "x" else cols
        f = np.clip(coord / self.pixel_size, 0.0, n_across - 1.0)
        i0 = min(int(np.floor(f)), n_across - 2) if n_across > 1 else 0
        w = f - i0
        if axis == "x":
            line = (1.0 - w) * values[i0, :] + w * values[min(i0 + 1, rows - 1), :]
        elif axis == "y":
            line = (1.0 - w) * values[:, i0] + w * values[:, min(i0 + 1, cols - 1)]
        else:
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        return line


def extract_line_domain(atlas, axis, line_index, target_step):
    """1-D subdomain description along a pixel-center line of the image.

    ``line_index`` counts lines of the image being interpolated, whose
    pixel pitch is ``target_step``; the returned domain is sampled at
    the atlas pitch along the line and renormalized.
    """
    coord = line_index * target_step
    return _line_domain(atlas, axis, coord)


def _line_domain(atlas, axis, coord):
    rows, cols = atlas.shape
    n_across = rows if axis == "x" else cols
    # subdomain values clamp beyond the outermost centers; tolerate up to
    # one image pixel (ratio atlas pixels) of overhang before rejecting
    margin = atlas.ratio
    if not -margin - 1e-9 <= coord / atlas.pixel_size <= n_across - 1 + margin + 1e-9:
        raise ValueError(
            f"line at coordinate {coord} falls outside the atlas extent"
        )
    n_along = cols if axis == "x" else rows
    hi = (n_along - 1) * atlas.pixel_size
    functions = [
        GridFunction(0.0, hi, atlas.pixel_size,
                     atlas.line_profile(j, axis, coord))
        for j in range(atlas.J)
    ]
    return SubdomainSet(functions, renormalize=True)


def _check_alignment(image, atlas):
    rows, cols = atlas.shape
    if rows != atlas.ratio * image.rows or cols != atlas.ratio * image.cols:
        raise ValueError(
            f"atlas {rows}x{cols} does not cover the {image.rows}x"
            f"{image.cols} image at ratio {atlas.ratio}"
        )
    expected = image.pixel_size / atlas.ratio
    if abs(atlas.pixel_size - expected) > 1e-9 * image.pixel_size:
        raise ValueError(
            f"atlas pixel size {atlas.pixel_size} does not match "
            f"image pixel size {image.pixel_size} at ratio {atlas.ratio}"
        )


def _interp_lines(values, axis, line_coords, sample_step, factor, order,
                  atlas, gamma, method):
    """Interpolate every line of a 2-D array along one axis.

    ``axis`` is the direction of interpolation; lines are indexed by
    their transverse coordinates ``line_coords``.  Returns the array
    refined by ``factor`` along ``axis``.
    """
    work = values if axis == "x" else values.T
    n_lines, n_samples = work.shape
    fine = np.arange(n_samples * factor) * (sample_step / factor)
    out = np.empty((n_lines, n_samples * factor))
    for i in range(n_lines):
        samples = SampleSequence(work[i], sample_step, k_offset=0)
        if method == "dibsi":
            dom = _line_domain(atlas, axis, line_coords[i])
            basis = DomainInformedBasis(
                dom, order, step=sample_step, gamma=gamma,
                k_min=0, k_max=n_samples - 1,
            )
        else:
            basis = StandardBasis(order, step=sample_step,
                                  k_min=0, k_max=n_samples - 1)
        out[i] = interpolate(samples, basis).evaluate(fine)
    return out if axis == "x" else out.T


def upsample_separable(image, atlas, factor, order=3, gamma=10.0,
                       pass_order="rows", method="dibsi"):
    """Upsample an image by an integer factor, one axis after the other.

    The output grid starts at the first input pixel center with pitch
    ``pixel_size / factor``, so every original center is an output grid
    point.  With ``method="dibsi"`` each line uses the subdomain
    functions extracted from the atlas at that line's position; pass two
    extracts its domains at the refined line positions of the
    intermediate image.
    """
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ValueError(f"factor must be a positive integer, got {factor!r}")
    if method not in ("dibsi", "bsi"):
        raise ValueError(f"method must be 'dibsi' or 'bsi', got {method!r}")
    if pass_order not in ("rows", "cols"):
        raise ValueError(f"pass_order must be 'rows' or 'cols', got {pass_order!r}")
    if method == "dibsi":
        if atlas is None:
            raise ValueError("domain-informed upsampling needs an atlas")
        _check_alignment(image, atlas)

    h = image.pixel_size
    coarse_rows = h * np.arange(image.rows)
    coarse_cols = h * np.arange(image.cols)
    fine_rows = (h / factor) * np.arange(image.rows * factor)
    fine_cols = (h / factor) * np.arange(image.cols * factor)

    values = image.values
    if pass_order == "rows":
        values = _interp_lines(values, "x", coarse_rows, h, factor, order,
                               atlas, gamma, method)
        values = _interp_lines(values, "y", fine_cols, h, factor, order,
                               atlas, gamma, method)
    else:
        values = _interp_lines(values, "y", coarse_cols, h, factor, order,
                               atlas, gamma, method)
        values = _interp_lines(values, "x", fine_rows, h, factor, order,
                               atlas, gamma, method)
    return ScalarImage(values, pixel_size=h / factor)


# -- file formats --------------------------------------------------------


def save_image(image, path):
    """Write an image as a CSV matrix or a raw float64 grid with header.

    ``.csv`` paths hold the values only; any other path is treated as a
    JSON header naming a little-endian float64 file next to it.
    """
    path = os.fspath(path)
    if path.endswith(".csv"):
        np.savetxt(path, image.values, delimiter=",", fmt="%.17g")
        return path
    root, _ = os.path.splitext(path)
    data_path = root + ".f64"
    image.values.astype("<f8").tofile(data_path)
    header = {
        "rows": image.rows,
        "cols": image.cols,
        "pixel_size": image.pixel_size,
        "data": os.path.basename(data_path),
    }
    with open(path, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_image(path, pixel_size=1.0):
    """Read an image written by :func:`save_image`.

    CSV files carry no pixel size; the ``pixel_size`` argument applies
    to them and is ignored for header-described binary grids.
    """
    path = os.fspath(path)
    if path.endswith(".csv"):
        values = np.loadtxt(path, delimiter=",", ndmin=2)
        return ScalarImage(values, pixel_size=pixel_size)
    with open(path) as fh:
        header = json.load(fh)
    for key in ("rows", "cols", "pixel_size", "data"):
        if key not in header:
            raise ValueError(f"image header missing key {key!r}")
    data_path = os.path.join(os.path.dirname(path), header["data"])
    values = np.fromfile(data_path, dtype="<f8")
    if values.size != header["rows"] * header["cols"]:
        raise ValueError(
            f"expected {header['rows'] * header['cols']} values, "
            f"got {values.size}"
        )
    values = values.reshape(header["rows"], header["cols"])
    return ScalarImage(values, pixel_size=header["pixel_size"])


def save_atlas(atlas, manifest_path):
    """Write an atlas as a manifest plus one binary grid per map."""
    manifest_path = os.fspath(manifest_path)
    root, _ = os.path.splitext(manifest_path)
    names = []
    for j in range(atlas.J):
        map_path = f"{root}_map{j + 1}.json"
        save_image(ScalarImage(atlas.maps[j], atlas.pixel_size), map_path)
        names.append(os.path.basename(map_path))
    manifest = {"ratio": atlas.ratio, "maps": names}
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def load_atlas(manifest_path):
    manifest_path = os.fspath(manifest_path)
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    for key in ("ratio", "maps"):
        if key not in manifest:
            raise ValueError(f"atlas manifest missing key {key!r}")
    base = os.path.dirname(manifest_path)
    maps = [load_image(os.path.join(base, name)) for name in manifest["maps"]]
    return ProbabilityAtlas(maps, manifest["ratio"])
