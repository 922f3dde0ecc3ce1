"""Deterministic synthetic multichannel data with disjoint signal and
interference regions."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .arraydata import MultichannelImage
from .errors import InvalidSpec

__all__ = ["PhantomSpec", "make_phantom", "rect_mask"]

# coil centres sit this fraction of the larger grid side away from the middle
RING_RADIUS = 0.7
# default rectangles as grid fractions (y0, y1, x0, x1); at 64x64 they land on
# (16, 48, 6, 26) and (16, 48, 38, 58)
SIGNAL_FRACTIONS = (0.25, 0.75, 6 / 64, 26 / 64)
INTERFERENCE_FRACTIONS = (0.25, 0.75, 38 / 64, 58 / 64)


@dataclass(frozen=True)
class PhantomSpec:
    """Phantom geometry and generation parameters.

    Rectangles are ``(y0, y1, x0, x1)`` half-open pixel ranges. Left as
    ``None`` they are placed side by side at fixed fractions of the grid.
    """

    nc: int = 8
    ny: int = 64
    nx: int = 64
    seed: int = 0
    signal_rect: tuple = None
    interference_rect: tuple = None
    coil_decay: float = 4.0
    noise_sigma: float = 0.01
    signal_amplitude: float = 1.0
    interference_amplitude: float = 1.0

    def __post_init__(self):
        if self.nc < 2:
            raise InvalidSpec(f"need at least 2 channels, got nc={self.nc}")
        if self.ny < 1 or self.nx < 1:
            raise InvalidSpec(f"grid must be non-empty, got {self.ny}x{self.nx}")
        for name, frac in (("signal_rect", SIGNAL_FRACTIONS),
                           ("interference_rect", INTERFERENCE_FRACTIONS)):
            if getattr(self, name) is None:
                dims = (self.ny, self.ny, self.nx, self.nx)
                object.__setattr__(self, name, tuple(round(f * d) for f, d in zip(frac, dims)))
            else:
                object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        for name in ("signal_rect", "interference_rect"):
            y0, y1, x0, x1 = getattr(self, name)
            if not (0 <= y0 < y1 <= self.ny and 0 <= x0 < x1 <= self.nx):
                raise InvalidSpec(f"{name} {getattr(self, name)} is empty or outside the grid")
        if np.any(rect_mask(self.signal_rect, self.ny, self.nx)
                  & rect_mask(self.interference_rect, self.ny, self.nx)):
            raise InvalidSpec("signal and interference rectangles overlap")
        if not self.noise_sigma >= 0:
            raise InvalidSpec("noise_sigma must be >= 0")
        if not self.coil_decay > 0:
            raise InvalidSpec("coil_decay must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must be a 64-bit unsigned integer")


def rect_mask(rect, ny, nx):
    y0, y1, x0, x1 = rect
    m = np.zeros((ny, nx), dtype=bool)
    m[y0:y1, x0:x1] = True
    return m


def _coil_profiles(rng, nc, ny, nx, scale):
    """Localized coils on a ring around the grid.

    Magnitude decays as ``exp(-distance / scale)`` from the coil centre; the
    phase is a seeded Gaussian field smoothed at the same scale. Each profile
    is normalized to unit RMS over the grid.
    """
    raw = rng.standard_normal((nc, ny, nx))
    jitter = rng.uniform(-0.5, 0.5, nc)
    yy, xx = np.mgrid[0:ny, 0:nx]
    cy, cx = (ny - 1) / 2, (nx - 1) / 2
    radius = RING_RADIUS * max(ny, nx)
    prof = np.empty((nc, ny, nx), dtype=np.complex128)
    for c in range(nc):
        theta = 2 * np.pi * (c + jitter[c]) / nc
        dist = np.hypot(yy - (cy + radius * np.sin(theta)), xx - (cx + radius * np.cos(theta)))
        phase = gaussian_filter(raw[c], scale, mode="reflect")
        phase /= phase.std()
        prof[c] = np.exp(-dist / scale) * np.exp(1j * phase)
        prof[c] /= np.sqrt(np.mean(np.abs(prof[c]) ** 2))
    return prof


def make_phantom(spec=None):
    """Generate ``(image, signal_mask, interference_mask)``.

    Each channel is a localized, smoothly varying complex coil profile times
    an object made of two bright rectangles, plus complex Gaussian noise of
    standard deviation ``noise_sigma``. Output depends only on ``spec``.
    """
    spec = spec or PhantomSpec()
    rng = np.random.default_rng(spec.seed)
    sig = rect_mask(spec.signal_rect, spec.ny, spec.nx)
    itf = rect_mask(spec.interference_rect, spec.ny, spec.nx)
    obj = spec.signal_amplitude * sig + spec.interference_amplitude * itf
    prof = _coil_profiles(rng, spec.nc, spec.ny, spec.nx, spec.coil_decay)
    # noise is always drawn so the stream layout does not depend on noise_sigma
    noise = rng.standard_normal((2, spec.nc, spec.ny, spec.nx))
    values = prof * obj[None] + spec.noise_sigma * (noise[0] + 1j * noise[1]) / np.sqrt(2.0)
    return MultichannelImage(values), sig, itf
