"""Minimal static SVG rendering for curves and action profiles."""
import math

import numpy as np

VIEW = np.array([1.0, 0.6, 0.5])


def _fmt(x):
    return f"{x:.3f}"


def _polyline(points, style):
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polyline points="{pts}" fill="none" {style}/>'


def _view_frame():
    d = VIEW / np.linalg.norm(VIEW)
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(up, d)
    right /= np.linalg.norm(right)
    up = np.cross(d, right)
    return d, right, up


def curve_panel(surface, X, x0, y0, size):
    """Orthographic view of the surface outline and the closed curve."""
    d, right, up = _view_frame()
    R = max(surface.axes)
    scale = 0.45 * size / R
    cx, cy = x0 + 0.5 * size, y0 + 0.5 * size
    out = []
    # silhouette of the surface: points whose normal is orthogonal to the view
    th = np.linspace(0.0, 2.0 * math.pi, 361)
    a = np.asarray(surface.axes)
    e1 = np.cross(d, [0.0, 0.0, 1.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    rim = []
    for t in th:
        n = math.cos(t) * e1 + math.sin(t) * e2
        p = a * a * n / np.sqrt(np.sum(a * a * n * n))
        rim.append((cx + scale * p @ right, cy - scale * p @ up))
    out.append(_polyline(rim, 'stroke="#999" stroke-width="1"'))
    P = np.vstack([X, X[:1]])
    front = surface.normal(P) @ d >= 0.0
    seg = []
    for k in range(len(P)):
        pt = (cx + scale * P[k] @ right, cy - scale * P[k] @ up)
        if seg and front[k] != front[k - 1]:
            out.append(_polyline(seg, _curve_style(front[k - 1])))
            seg = [seg[-1]]
        seg.append(pt)
    if len(seg) > 1:
        out.append(_polyline(seg, _curve_style(front[-1])))
    return out


def _curve_style(front):
    if front:
        return 'stroke="#c0392b" stroke-width="2"'
    return 'stroke="#c0392b" stroke-width="1" stroke-dasharray="4,3"'


def profile_panel(profiles, x0, y0, w, hgt, title="action profile"):
    """Overlay of action profiles over t in [0, 1]; the last one is drawn darkest."""
    out = [f'<rect x="{x0}" y="{y0}" width="{w}" height="{hgt}" fill="none" stroke="#ccc"/>',
           f'<text x="{x0 + 4}" y="{y0 + 14}" font-size="12" font-family="sans-serif">{title}</text>']
    if not profiles:
        return out
    allv = np.concatenate([np.asarray(p, dtype=float) for p in profiles])
    lo, hi = float(allv.min()), float(allv.max())
    if hi - lo < 1e-12:
        hi = lo + 1.0
    n = len(profiles)
    for k, prof in enumerate(profiles):
        prof = np.asarray(prof, dtype=float)
        t = np.linspace(0.0, 1.0, len(prof))
        pts = [(x0 + 10 + (w - 20) * ti, y0 + hgt - 10 - (hgt - 30) * (v - lo) / (hi - lo))
               for ti, v in zip(t, prof)]
        shade = int(200 - 170 * (k + 1) / n)
        out.append(_polyline(pts, f'stroke="rgb({shade},{shade},{shade})" stroke-width="1.5"'))
    out.append(f'<text x="{x0 + 4}" y="{y0 + hgt - 2}" font-size="10" font-family="sans-serif">'
               f'min {lo:.4g}  max {hi:.4g}</text>')
    return out


def write_svg(path, parts, width, height):
    body = "\n".join(parts)
    with open(path, "w") as fh:
        fh.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
                 f'viewBox="0 0 {width} {height}">\n{body}\n</svg>\n')


def solve_figure(path, surface, X, profiles):
    parts = curve_panel(surface, np.asarray(X), 0, 0, 360)
    parts += profile_panel(profiles, 380, 20, 400, 320)
    write_svg(path, parts, 800, 360)


def profile_figure(path, profiles, title="action profile"):
    write_svg(path, profile_panel(profiles, 10, 10, 480, 300, title), 500, 320)
