"""Domain-coloring rasters and vector overlays of traced curves and domains.

A pixel is coloured by the modulus band and argument sector of f at its centre:
the band fixes the hue, the position of |f| inside its band the brightness and
the position of arg f inside its sector the saturation. Pixels whose box
contains a pole of f belong to the outermost band; a pixel centred exactly on a
pole gets the reserved pole colour and a pixel whose value cannot be computed
gets the reserved error colour. All outputs are deterministic: fixed palette,
fixed rounding and no timestamps in PNG, SVG or the JSON sidecar.
"""
from __future__ import annotations

import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw
from scipy import ndimage

from .funcval import FunctionId, values
from .geometry import Window
from .tracer.curves import ABOVE_ONE, BELOW_ONE, BLACK, MIXED, RED, WHOLE

DEFAULT_BANDS = (0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0, 1e2, 1e3, 1e6, 1e9, math.inf)
DEFAULT_PALETTE = (
    (40, 60, 200), (30, 120, 230), (20, 180, 220), (20, 190, 140), (80, 200, 40), (170, 210, 20),
    (240, 200, 20), (250, 150, 20), (240, 90, 30), (220, 40, 50), (180, 30, 110), (110, 20, 160),
)
POLE_COLOR = (255, 255, 255)
ERROR_COLOR = (0, 0, 0)
MAX_PIXELS = 8192 * 8192
ROW_BLOCK = 64


def _hsv_to_rgb(h, s, v):
    """Vectorised HSV -> RGB, all channels in [0, 1]."""
    i = np.floor(h * 6.0).astype(np.int64) % 6
    f = h * 6.0 - np.floor(h * 6.0)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def _rgb_to_hsv(rgb):
    r, g, b = (c / 255.0 for c in rgb)
    mx, mn = max(r, g, b), min(r, g, b)
    d = mx - mn
    if d == 0:
        h = 0.0
    elif mx == r:
        h = ((g - b) / d) % 6.0
    elif mx == g:
        h = (b - r) / d + 2.0
    else:
        h = (r - g) / d + 4.0
    return h / 6.0, (d / mx if mx else 0.0), mx


@dataclass(frozen=True)
class ColorScheme:
    """Annulus/sector colouring: band upper radii, sector count, palette and shading ranges."""

    modulus_bands: tuple = DEFAULT_BANDS
    sector_count: int = 6
    band_palette: tuple = DEFAULT_PALETTE
    brightness: tuple = (0.6, 1.0)    # value range over the position of |f| inside its band
    saturation: tuple = (1.0, 0.45)   # saturation range over the position of arg f inside its sector
    pole_color: tuple = POLE_COLOR
    error_color: tuple = ERROR_COLOR

    def __post_init__(self):
        b = self.modulus_bands
        if not all(x > 0 for x in b) or any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ValueError("band radii must be positive and strictly increasing")
        if b[-1] != math.inf:
            raise ValueError("the last band radius must be infinite so every modulus has a band")
        if len(self.band_palette) != len(b):
            raise ValueError("palette length must equal the band count")
        if self.sector_count < 1:
            raise ValueError("sector_count must be positive")

    @property
    def n_bands(self) -> int:
        return len(self.modulus_bands)

    @property
    def outermost(self) -> int:
        return self.n_bands - 1

    def band_of(self, modulus):
        """(band index, position inside the band in [0, 1]) for an array of moduli."""
        m = np.asarray(modulus, dtype=float)
        edges = np.asarray(self.modulus_bands[:-1])
        band = np.searchsorted(edges, m, side="right")
        lo = np.concatenate([[edges[0] / 10.0], edges])[band]
        hi = np.concatenate([edges, [edges[-1] * 1e9]])[band]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            frac = np.log(np.maximum(m, 1e-300) / lo) / np.log(hi / lo)
            frac = np.where(band == 0, m / edges[0], frac)
        return band.astype(np.int16), np.clip(np.nan_to_num(frac, nan=1.0), 0.0, 1.0)

    def sector_of(self, argument):
        """(sector index, position inside the sector in [0, 1)) for arguments in radians."""
        a = np.mod(np.asarray(argument, dtype=float), 2 * math.pi)
        x = a * (self.sector_count / (2 * math.pi))
        x = np.where(x >= self.sector_count, 0.0, x)  # tiny negative angles round up to a full turn
        sector = np.floor(x)
        return sector.astype(np.int16), x - sector

    def mirror(self, sector, pos):
        """The sector/position of the conjugate value."""
        sector = np.asarray(sector)
        pos = np.asarray(pos)
        flip = pos > 0
        return (np.where(flip, self.sector_count - 1 - sector, (-sector) % self.sector_count).astype(np.int16),
                np.where(flip, 1.0 - pos, 0.0))

    def colorize(self, band, frac, sector, pos) -> np.ndarray:
        band = np.asarray(band)
        hues = np.array([_rgb_to_hsv(c)[0] for c in self.band_palette])
        v0, v1 = self.brightness
        s0, s1 = self.saturation
        v = v0 + (v1 - v0) * np.asarray(frac)
        s = s0 + (s1 - s0) * np.asarray(pos)
        rgb = _hsv_to_rgb(hues[band], s, v)
        return np.round(rgb * 255.0).astype(np.uint8)

    def to_dict(self) -> dict:
        return {"modulus_bands": [b if math.isfinite(b) else "inf" for b in self.modulus_bands],
                "sector_count": self.sector_count, "band_palette": [list(c) for c in self.band_palette],
                "brightness": list(self.brightness), "saturation": list(self.saturation),
                "pole_color": list(self.pole_color), "error_color": list(self.error_color)}

    @classmethod
    def from_dict(cls, d: dict) -> "ColorScheme":
        return cls(tuple(math.inf if b == "inf" else float(b) for b in d["modulus_bands"]), int(d["sector_count"]),
                   tuple(tuple(c) for c in d["band_palette"]), tuple(d["brightness"]), tuple(d["saturation"]),
                   tuple(d["pole_color"]), tuple(d["error_color"]))


# ---------------------------------------------------------------- sampling grid

def pixel_centers(window: Window, width: int, height: int):
    """Pixel-centre coordinates; row 0 is the top. Centres are placed symmetrically about the
    window centre, so a window symmetric about t = 0 gives rows that are exact conjugates."""
    dx = window.width / width
    dy = window.height / height
    cx = 0.5 * (window.sigma_min + window.sigma_max)
    cy = 0.5 * (window.t_min + window.t_max)
    xs = cx + (np.arange(width) - (width - 1) / 2.0) * dx
    ys = cy - (np.arange(height) - (height - 1) / 2.0) * dy
    return xs, ys


def square_pixel_shape(window: Window, budget: int):
    """(width, height) with square pixels and width * height <= budget."""
    r = window.width / window.height
    h = int(math.floor(math.sqrt(budget / r)))
    w = int(math.floor(budget / h))
    w = max(1, min(w, int(round(h * r))))
    return w, h


def _pole_pixels(fid: FunctionId, window: Window, width: int, height: int):
    """Pixel indices whose box contains a pole of fid, with a flag for exact centres."""
    out = []
    try:
        poles = fid.poles_in(window.sigma_min, window.sigma_max, window.t_min, window.t_max)
    except (AttributeError, NotImplementedError):
        poles = []
    xs, ys = pixel_centers(window, width, height)
    for p in poles:
        p = complex(p)
        i = int(math.floor((p.real - window.sigma_min) / window.width * width))
        j = int(math.floor((window.t_max - p.imag) / window.height * height))
        if 0 <= i < width and 0 <= j < height:
            out.append((j, i, complex(xs[i], ys[j]) == p))
    return out


@dataclass
class DomainColoring:
    rgb: np.ndarray
    band: np.ndarray
    sector: np.ndarray
    frac: np.ndarray
    pos: np.ndarray
    pole_mask: np.ndarray
    error_mask: np.ndarray
    meta: dict = field(default_factory=dict)

    def png_bytes(self) -> bytes:
        return png_bytes(self.rgb)

    def save(self, path) -> Path:
        return save_png(path, self.rgb, self.meta)


def _evaluate(fid: FunctionId, xs, ys, threads: int):
    Z = xs[None, :] + 1j * ys[:, None]
    F = np.empty(Z.shape, dtype=complex)
    blocks = [(r, min(r + ROW_BLOCK, Z.shape[0])) for r in range(0, Z.shape[0], ROW_BLOCK)]

    def run(b):
        F[b[0]:b[1]] = values(fid, Z[b[0]:b[1]])[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(run, blocks))
    else:
        for b in blocks:
            run(b)
    return F


def domain_color(fid: FunctionId, window: Window, width: int, height: int, scheme: ColorScheme = None,
                 threads: int = 1) -> DomainColoring:
    """Colour each pixel by the band and sector of f at its centre."""
    scheme = scheme or ColorScheme()
    if width < 1 or height < 1 or width * height > MAX_PIXELS:
        raise ValueError(f"resolution {width}x{height} outside 1..8192^2 pixels")
    xs, ys = pixel_centers(window, width, height)
    with np.errstate(all="ignore"):
        F = _evaluate(fid, xs, ys, threads)
        mod = np.abs(F)
        arg = np.angle(F)
    error = np.isnan(mod)
    overflow = np.isinf(mod)
    band, frac = scheme.band_of(np.where(error, 1.0, mod))
    sector, pos = scheme.sector_of(np.where(np.isfinite(arg), arg, 0.0))
    band[overflow] = scheme.outermost
    frac[overflow] = 1.0
    pole = np.zeros(band.shape, bool)
    for j, i, exact in _pole_pixels(fid, window, width, height):
        band[j, i] = scheme.outermost
        frac[j, i] = 1.0
        error[j, i] = False
        pole[j, i] = exact
    rgb = scheme.colorize(band, frac, sector, pos)
    rgb[pole] = scheme.pole_color
    rgb[error] = scheme.error_color
    meta = {"function": fid.tag, "window": list(window.as_tuple()), "width": width, "height": height,
            "scheme": scheme.to_dict(), "error_pixels": int(error.sum()), "pole_pixels": int(pole.sum()),
            "overflow_pixels": int(overflow.sum())}
    return DomainColoring(rgb, band, sector, frac, pos, pole, error, meta)


# ---------------------------------------------------------------- raster checks

def mirror_agreement(dc: DomainColoring, scheme: ColorScheme = None) -> dict:
    """Compare the lower half with the arg-mirrored colouring of the upper half.

    Requires a window symmetric about t = 0 (rows are then exact conjugates).
    Boundary pixels (band or sector differs from a 4-neighbour, or pole/error
    pixels) are excluded from the strict fraction.
    """
    scheme = scheme or ColorScheme()
    h = dc.rgb.shape[0]
    top = slice(0, h // 2)
    bottom = slice(h - 1, h - 1 - h // 2, -1)
    ms, mp = scheme.mirror(dc.sector[top], dc.pos[top])
    expect = scheme.colorize(dc.band[top], dc.frac[top], ms, mp)
    special = dc.pole_mask | dc.error_mask
    expect = np.where(special[top][..., None], dc.rgb[top], expect)
    got = dc.rgb[bottom]
    same = np.all(expect == got, axis=-1)
    edge = _edge_mask(dc.band) | _edge_mask(dc.sector) | special
    interior = ~(edge[top] | edge[bottom])
    return {"fraction_all": float(same.mean()),
            "fraction_interior": float(same[interior].mean()) if interior.any() else 1.0,
            "excluded": int((~interior).sum()), "compared": int(interior.sum())}


def _edge_mask(a) -> np.ndarray:
    e = np.zeros(a.shape, bool)
    e[1:, :] |= a[1:, :] != a[:-1, :]
    e[:-1, :] |= a[1:, :] != a[:-1, :]
    e[:, 1:] |= a[:, 1:] != a[:, :-1]
    e[:, :-1] |= a[:, 1:] != a[:, :-1]
    return e


def band_islands(band: np.ndarray, which: int, bounded_only: bool = False) -> int:
    """Number of connected components (4-connectivity) of the pixels in one band."""
    labels, n = ndimage.label(band == which)
    if not bounded_only or n == 0:
        return int(n)
    edge = np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))
    return int(n - np.count_nonzero(edge))


def island_centers(band: np.ndarray, which: int, window: Window):
    """Centroids of the components of one band, in window coordinates."""
    labels, n = ndimage.label(band == which)
    if n == 0:
        return []
    cs = ndimage.center_of_mass(np.ones_like(labels), labels, range(1, n + 1))
    h, w = band.shape
    return [complex(window.sigma_min + (c[1] + 0.5) / w * window.width,
                    window.t_max - (c[0] + 0.5) / h * window.height) for c in cs]


def sector_frames(fid: FunctionId, window: Window, width: int, height: int, alphas=(math.pi / 30, math.pi / 100,
                  math.pi / 1000), scheme: ColorScheme = None, threads: int = 1):
    """One frame per alpha: pixels with arg f in (alpha, 2 pi - alpha) keep the domain colouring,
    the thin sector |arg f| <= alpha around the positive half axis is drawn dark."""
    scheme = scheme or ColorScheme()
    dc = domain_color(fid, window, width, height, scheme, threads)
    xs, ys = pixel_centers(window, width, height)
    with np.errstate(all="ignore"):
        F = _evaluate(fid, xs, ys, threads)
        a = np.abs(np.angle(F))
    frames = []
    for alpha in alphas:
        rgb = dc.rgb.copy()
        wedge = (a <= alpha) & np.isfinite(a)
        rgb[wedge] = (30, 30, 30)
        frames.append((float(alpha), rgb, int(wedge.sum())))
    return dc, frames


# ---------------------------------------------------------------- files

def png_bytes(rgb: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), "RGB").save(buf, format="PNG", optimize=False)
    return buf.getvalue()


def save_png(path, rgb: np.ndarray, meta: dict = None) -> Path:
    """Write the PNG and a JSON sidecar (path + '.json') with metadata and the sha256 of the PNG."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = png_bytes(rgb)
    path.write_bytes(data)
    write_sidecar(path, data, meta or {})
    return path


def write_sidecar(path: Path, data: bytes, meta: dict) -> Path:
    side = Path(str(path) + ".json")
    doc = dict(meta)
    doc["file"] = path.name
    doc["sha256"] = hashlib.sha256(data).hexdigest()
    side.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return side


# ---------------------------------------------------------------- vector overlay

CURVE_COLORS = {RED: "#d01010", BLACK: "#101010", MIXED: "#7a2a9a"}
DEFAULT_CURVE_COLOR = "#1060c0"
DASHES = {BELOW_ONE: (6, 3), ABOVE_ONE: (2, 2), WHOLE: None}
DOMAIN_COLOR = "#10a040"
MARKER_COLORS = {"ZeroOfF": "#0050ff", "ZeroOfFPrime": "#ff8000", "OnePoint": "#00a0a0"}


def _hex(c: str):
    return tuple(int(c[k:k + 2], 16) for k in (1, 3, 5))


class _Canvas:
    def __init__(self, window: Window, width: int, height: int):
        self.window, self.width, self.height = window, width, height

    def xy(self, z):
        z = np.asarray(z, dtype=complex)
        x = (z.real - self.window.sigma_min) / self.window.width * self.width
        y = (self.window.t_max - z.imag) / self.window.height * self.height
        return x, y


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _dash_segments(x, y, dash):
    """Split a polyline into drawn pieces following an on/off dash pattern (pixel lengths)."""
    if dash is None:
        return [list(zip(x, y))]
    on, off = dash
    out, cur, phase, drawing = [], [(x[0], y[0])], 0.0, True
    for k in range(1, len(x)):
        x0, y0 = x[k - 1], y[k - 1]
        seg = math.hypot(x[k] - x0, y[k] - y0)
        t = 0.0
        while seg - t > 1e-12:
            left = (on if drawing else off) - phase
            step = min(left, seg - t)
            t += step
            phase += step
            px, py = x0 + (x[k] - x0) * t / seg, y0 + (y[k] - y0) * t / seg
            if drawing:
                cur.append((px, py))
            if phase >= (on if drawing else off) - 1e-12:
                if drawing and len(cur) > 1:
                    out.append(cur)
                drawing = not drawing
                phase = 0.0
                cur = [(px, py)]
    if drawing and len(cur) > 1:
        out.append(cur)
    return out


def _ticks(lo: float, hi: float, n: int = 5):
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for m in (1, 2, 5, 10):
        if span / (m * step) <= n:
            step *= m
            break
    first = math.ceil(lo / step) * step
    return [first + k * step for k in range(int(math.floor((hi - first) / step + 1e-9)) + 1)]


@dataclass
class Overlay:
    svg: str
    rgb: np.ndarray
    meta: dict

    def save(self, stem) -> tuple:
        stem = Path(stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        svg_path = stem.with_suffix(".svg")
        svg_path.write_text(self.svg)
        png_path = save_png(stem.with_suffix(".png"), self.rgb,
                            dict(self.meta, svg_sha256=hashlib.sha256(self.svg.encode()).hexdigest()))
        return svg_path, png_path


def curve_overlay(components, window: Window, width: int = 800, height: int = 800, domains=None, markers=None,
                  background: np.ndarray = None, title: str = "") -> Overlay:
    """Draw components (colour by Red/Black tag, dash by image interval), markers and domain outlines.

    markers: iterable of CritPoint or (location, kind) pairs. Emits one SVG path per
    component and a matching PNG raster.
    """
    cv = _Canvas(window, width, height)
    if background is not None:
        img = Image.fromarray(np.ascontiguousarray(background, dtype=np.uint8), "RGB").resize((width, height),
                                                                                                  Image.NEAREST)
    else:
        img = Image.new("RGB", (width, height), (255, 255, 255))
    draw = ImageDraw.Draw(img)
    svg = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="{"none" if background is not None else "#ffffff"}"/>']
    if title:
        svg.append(f"<title>{title}</title>")
    # axes
    svg.append('<g id="axes" stroke="#909090" stroke-width="0.5" fill="#606060" font-size="10">')
    for v in _ticks(window.sigma_min, window.sigma_max):
        x, _ = cv.xy(complex(v, window.t_max))
        svg.append(f'<line x1="{_fmt(float(x))}" y1="{height}" x2="{_fmt(float(x))}" y2="{height - 6}"/>'
                   f'<text x="{_fmt(float(x) + 2)}" y="{height - 8}">{v:g}</text>')
        draw.line([(float(x), height - 1), (float(x), height - 6)], fill=(144, 144, 144))
        draw.text((float(x) + 2, height - 18), f"{v:g}", fill=(96, 96, 96))
    for v in _ticks(window.t_min, window.t_max):
        _, y = cv.xy(complex(window.sigma_min, v))
        svg.append(f'<line x1="0" y1="{_fmt(float(y))}" x2="6" y2="{_fmt(float(y))}"/>'
                   f'<text x="8" y="{_fmt(float(y) + 3)}">{v:g}</text>')
        draw.line([(0, float(y)), (6, float(y))], fill=(144, 144, 144))
        draw.text((8, float(y) - 6), f"{v:g}", fill=(96, 96, 96))
    if window.t_min < 0 < window.t_max:
        _, y = cv.xy(0j)
        svg.append(f'<line x1="0" y1="{_fmt(float(y))}" x2="{width}" y2="{_fmt(float(y))}" stroke-dasharray="1 3"/>')
    svg.append(f'<rect x="0.5" y="0.5" width="{width - 1}" height="{height - 1}" fill="none"/>')
    svg.append("</g>")
    draw.rectangle([0, 0, width - 1, height - 1], outline=(144, 144, 144))
    # domains
    if domains:
        svg.append('<g id="domains" fill="none" stroke="%s" stroke-width="1" stroke-dasharray="4 2">' % DOMAIN_COLOR)
        for d in domains:
            x, y = cv.xy(np.append(d.path, d.path[:1]))
            pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x.tolist(), y.tolist()))
            svg.append(f'<polygon points="{pts}"><title>{d.label}</title></polygon>')
            for seg in _dash_segments(x.tolist(), y.tolist(), (4, 2)):
                draw.line(seg, fill=_hex(DOMAIN_COLOR), width=1)
            rp = d.polygon.representative_point()
            lx, ly = cv.xy(complex(rp.x, rp.y))
            label = d.alias or d.label
            svg.append(f'<text x="{_fmt(float(lx))}" y="{_fmt(float(ly))}" fill="{DOMAIN_COLOR}" stroke="none" '
                       f'font-size="10">{label}</text>')
            draw.text((float(lx), float(ly)), label, fill=_hex(DOMAIN_COLOR))
        svg.append("</g>")
    # curves
    svg.append('<g id="curves" fill="none" stroke-width="1.2">')
    for n, c in enumerate(components):
        color = CURVE_COLORS.get(c.color, DEFAULT_CURVE_COLOR)
        dash = DASHES.get(c.image_interval)
        x, y = cv.xy(c.points)
        d = "M" + " L".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(x.tolist(), y.tolist()))
        dash_attr = f' stroke-dasharray="{dash[0]} {dash[1]}"' if dash else ""
        svg.append(f'<path id="c{n}" d="{d}" stroke="{color}"{dash_attr}>'
                   f'<title>{c.kind.variant} {c.color} {c.image_interval}</title></path>')
        for seg in _dash_segments(x.tolist(), y.tolist(), dash):
            draw.line(seg, fill=_hex(color), width=1)
    svg.append("</g>")
    # markers
    if markers:
        svg.append('<g id="markers" stroke="none">')
        for m in markers:
            loc, kind = (m.location, m.kind) if hasattr(m, "location") else (complex(m[0]), m[1])
            if not window.contains(loc):
                continue
            x, y = (float(v) for v in cv.xy(loc))
            col = MARKER_COLORS.get(kind, "#000000")
            if kind == "ZeroOfFPrime":
                svg.append(f'<rect x="{_fmt(x - 3)}" y="{_fmt(y - 3)}" width="6" height="6" fill="{col}"/>')
                draw.rectangle([x - 3, y - 3, x + 3, y + 3], fill=_hex(col))
            else:
                svg.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{col}"/>')
                draw.ellipse([x - 3, y - 3, x + 3, y + 3], fill=_hex(col))
        svg.append("</g>")
    svg.append("</svg>")
    meta = {"window": list(window.as_tuple()), "width": width, "height": height,
            "components": len(components), "domains": len(domains or []), "markers": len(markers or [])}
    return Overlay("\n".join(svg) + "\n", np.asarray(img, dtype=np.uint8), meta)
