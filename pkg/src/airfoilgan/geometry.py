"""Airfoil coordinate handling.

A canonical airfoil is a length-38 float array of y values at fixed
cosine-spaced chord stations, arranged as a closed loop::

    index 0        trailing edge (x = 1)
    index 1..18    upper surface, x decreasing
    index 19       leading edge (x = 0)
    index 20..37   lower surface, x increasing

Everything in this module works on plain numpy arrays; batches of
canonical airfoils are ``(B, 38)`` arrays.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError, InsufficientDataError, ParseError

N_STATIONS = 20
N_COORDS = 2 * (N_STATIONS - 2) + 2  # 38
MIN_POINTS = 20
MIN_SURFACE_POINTS = 10
NORMALIZE_TOL = 1e-3

_INTERIOR = np.arange(1, N_STATIONS - 1)
UPPER_INDEX = (N_STATIONS - 1) - _INTERIOR  # loop index of upper point at station j
LOWER_INDEX = (N_STATIONS - 1) + _INTERIOR
TE_INDEX = 0
LE_INDEX = N_STATIONS - 1


@dataclass(frozen=True, eq=False)
class RawAirfoil:
    """Ordered outline, trailing edge -> upper -> leading edge -> lower -> trailing edge.

    ``points`` is an ``(N, 2)`` array of chord-fraction coordinates.
    """

    name: str
    points: np.ndarray

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    def __len__(self):
        return len(self.points)


def cosine_stations():
    """The 20 chordwise stations, clustered toward both edges."""
    j = np.arange(N_STATIONS)
    x = (1.0 - np.cos(np.pi * j / (N_STATIONS - 1))) / 2.0
    x[0], x[-1] = 0.0, 1.0
    return x


STATIONS = cosine_stations()


def station_x():
    """Chord position of each of the 38 loop points."""
    x = np.empty(N_COORDS)
    x[TE_INDEX] = 1.0
    x[LE_INDEX] = 0.0
    x[UPPER_INDEX] = STATIONS[_INTERIOR]
    x[LOWER_INDEX] = STATIONS[_INTERIOR]
    return x


def parse_selig(text, name=None):
    """Parse a Selig-format coordinate file.

    The first meaningful line is the airfoil name; every later line holds
    one ``x y`` pair. Blank lines and lines starting with ``#`` are skipped.
    When the x extent is not already [0, 1] (within 1e-3) the outline is
    shifted so the leading edge sits at x = 0 and both coordinates are
    divided by the chord.
    """
    header = None
    pts = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if header is None:
            header = s
            continue
        fields = s.split()
        if len(fields) != 2:
            raise ParseError(f"expected 2 numbers, got {len(fields)} fields: {s!r}", lineno)
        try:
            pts.append((float(fields[0]), float(fields[1])))
        except ValueError:
            raise ParseError(f"malformed number in {s!r}", lineno) from None
    if len(pts) < MIN_POINTS:
        raise InsufficientDataError(
            f"{len(pts)} coordinate pairs found, at least {MIN_POINTS} required"
        )
    points = np.array(pts, dtype=np.float64)
    if not np.all(np.isfinite(points)):
        raise ParseError("non-finite coordinate")

    xmin, xmax = points[:, 0].min(), points[:, 0].max()
    if abs(xmin) > NORMALIZE_TOL or abs(xmax - 1.0) > NORMALIZE_TOL:
        chord = xmax - xmin
        if chord <= 0:
            raise GeometryError("zero chord")
        points[:, 0] = (points[:, 0] - xmin) / chord
        points[:, 1] = points[:, 1] / chord

    if points[0, 0] < 0.99 or points[-1, 0] < 0.99:
        raise GeometryError(
            "outline must start and end at the trailing edge (x >= 0.99), "
            f"got x={points[0, 0]:.4g} and x={points[-1, 0]:.4g}"
        )
    return RawAirfoil(name if name is not None else (header or ""), points)


def _surface(points, label):
    # drop exact repeats (some files duplicate the leading-edge point)
    keep = np.ones(len(points), dtype=bool)
    keep[1:] = np.any(np.diff(points, axis=0) != 0, axis=1)
    points = points[keep]
    if len(points) < MIN_SURFACE_POINTS:
        raise InsufficientDataError(
            f"{label} surface has {len(points)} points, at least {MIN_SURFACE_POINTS} required"
        )
    if np.any(np.diff(points[:, 0]) <= 0):
        raise GeometryError(f"x is not monotonic along the {label} surface")
    return points


def resample(raw):
    """Interpolate a raw outline onto the 38-point canonical loop."""
    pts = np.asarray(raw.points, dtype=np.float64)
    ile = int(np.argmin(pts[:, 0]))
    upper = _surface(pts[: ile + 1][::-1], "upper")
    lower = _surface(pts[ile:], "lower")

    x = STATIONS[_INTERIOR]
    yu = np.interp(x, upper[:, 0], upper[:, 1])
    yl = np.interp(x, lower[:, 0], lower[:, 1])
    if yu.mean() < yl.mean():
        # outline traversed lower surface first
        upper, lower, yu, yl = lower, upper, yl, yu

    out = np.empty(N_COORDS)
    out[TE_INDEX] = 0.5 * (
        np.interp(1.0, upper[:, 0], upper[:, 1]) + np.interp(1.0, lower[:, 0], lower[:, 1])
    )
    out[LE_INDEX] = pts[ile, 1]
    out[UPPER_INDEX] = yu
    out[LOWER_INDEX] = yl
    return out


def loop_to_raw(y, name="canonical"):
    """Expand a canonical airfoil back into a closed Selig-order outline."""
    y = check_canonical(y)
    x = station_x()
    order = np.r_[np.arange(N_COORDS), 0]
    return RawAirfoil(name, np.column_stack([x[order], y[order]]))


def check_canonical(y):
    y = np.asarray(y, dtype=np.float64)
    if y.shape[-1] != N_COORDS:
        raise GeometryError(f"expected {N_COORDS} y-values, got {y.shape[-1]}")
    return y


def surfaces(y):
    """Upper and lower y at the 18 interior stations (x increasing)."""
    y = check_canonical(y)
    return y[..., UPPER_INDEX], y[..., LOWER_INDEX]


def thickness(y):
    """Maximum vertical upper-minus-lower gap over the interior stations.

    Accepts a single airfoil or a ``(B, 38)`` batch. A negative value
    means the surfaces cross everywhere.
    """
    upper, lower = surfaces(y)
    return np.max(upper - lower, axis=-1)


def _half_thickness(x, t):
    return 5.0 * t * (
        0.2969 * np.sqrt(x) - 0.1260 * x - 0.3516 * x**2 + 0.2843 * x**3 - 0.1036 * x**4
    )


def _camber(x, m, p):
    x = np.asarray(x, dtype=np.float64)
    if m == 0:
        return np.zeros_like(x), np.zeros_like(x)
    fore = x < p
    yc = np.where(fore, m / p**2 * (2 * p * x - x**2), m / (1 - p) ** 2 * ((1 - 2 * p) + 2 * p * x - x**2))
    dyc = np.where(fore, 2 * m / p**2 * (p - x), 2 * m / (1 - p) ** 2 * (p - x))
    return yc, dyc


def _check_naca(m, p, t):
    if not 0.0 <= m <= 0.1:
        raise DomainError(f"camber m={m} outside [0, 0.1]")
    if m > 0 and not 0.1 <= p <= 0.9:
        raise DomainError(f"camber position p={p} outside [0.1, 0.9]")
    if not 0.01 <= t <= 0.4:
        raise DomainError(f"thickness t={t} outside [0.01, 0.4]")


def naca4(m, p, t):
    """Closed-trailing-edge NACA 4-digit airfoil on the canonical loop.

    Thickness is added vertically to the camber line at each station, so
    for ``m = 0`` the result is exactly symmetric and linear in ``t``.
    """
    _check_naca(m, p, t)
    x = STATIONS[_INTERIOR]
    yt = _half_thickness(x, t)
    yc, _ = _camber(x, m, p)
    out = np.zeros(N_COORDS)
    out[UPPER_INDEX] = yc + yt
    out[LOWER_INDEX] = yc - yt
    return out


def naca4_points(m, p, t, n=100, name=None):
    """Dense Selig-order outline with thickness applied normal to the camber line.

    ``n`` points per surface, cosine-clustered; the leading-edge point is
    shared so the outline has ``2n - 1`` points.
    """
    _check_naca(m, p, t)
    x = (1.0 - np.cos(np.linspace(0.0, np.pi, n))) / 2.0
    yt = _half_thickness(x, t)
    yc, dyc = _camber(x, m, p)
    theta = np.arctan(dyc)
    xu, yu = x - yt * np.sin(theta), yc + yt * np.cos(theta)
    xl, yl = x + yt * np.sin(theta), yc - yt * np.cos(theta)
    pts = np.vstack([np.column_stack([xu, yu])[::-1], np.column_stack([xl, yl])[1:]])
    if name is None:
        name = f"NACA {round(m * 100):d}{round(p * 10) if m else 0:d}{round(t * 100):02d}"
    return RawAirfoil(name, pts)


def to_selig(raw, precision=8):
    """Render an outline as Selig-format text."""
    lines = [raw.name]
    lines += [f"{x:.{precision}f} {y:.{precision}f}" for x, y in raw.points]
    return "\n".join(lines) + "\n"
