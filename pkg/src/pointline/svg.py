"""SVG rendering: the square [-1,1]^2, one marker and one clipped line per element."""
from __future__ import annotations

from pointline.geometry import Configuration

SIZE = 800
PAD = 20


def _tx(x: float) -> float:
    return PAD + (x + 1) / 2 * (SIZE - 2 * PAD)


def _ty(y: float) -> float:
    return SIZE - PAD - (y + 1) / 2 * (SIZE - 2 * PAD)


def clip_line(x0: float, y0: float, theta: float):
    """Segment of ``y = y0 + theta (x - x0)`` inside ``[-1,1]^2``, or None."""
    xa, xb = -1.0, 1.0
    if theta != 0:
        # x where the line meets y = -1 and y = 1
        x_lo = x0 + (-1 - y0) / theta
        x_hi = x0 + (1 - y0) / theta
        if x_lo > x_hi:
            x_lo, x_hi = x_hi, x_lo
        xa, xb = max(xa, x_lo), min(xb, x_hi)
    elif abs(y0) > 1:
        return None
    if xa > xb:
        return None
    return (xa, y0 + theta * (xa - x0)), (xb, y0 + theta * (xb - x0))


def render(X: Configuration, strip_width: float = 0.0, marker_radius: float = 2.5) -> str:
    """SVG text; ``strip_width`` > 0 adds translucent bands of that vertical half-width."""
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        '<defs><clipPath id="omega">'
        f'<rect x="{PAD}" y="{PAD}" width="{SIZE - 2 * PAD}" height="{SIZE - 2 * PAD}"/>'
        '</clipPath></defs>',
        f'<rect class="frame" x="{PAD}" y="{PAD}" width="{SIZE - 2 * PAD}" '
        f'height="{SIZE - 2 * PAD}" fill="white" stroke="black"/>',
    ]
    rows = X.coords.tolist()
    if strip_width > 0:
        out.append('<g clip-path="url(#omega)" fill="#4a90d9" fill-opacity="0.12" stroke="none">')
        for x0, y0, t in rows:
            pts = []
            for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
                px = float(sx)
                py = y0 + t * (px - x0) + sy * strip_width
                pts.append(f"{_tx(px):.3f},{_ty(py):.3f}")
            out.append(f'<polygon class="strip" points="{" ".join(pts)}"/>')
        out.append("</g>")
    out.append('<g stroke="#333" stroke-width="0.6">')
    for x0, y0, t in rows:
        seg = clip_line(x0, y0, t)
        if seg is None:  # pragma: no cover - a line through a point of the square always meets it
            continue
        (ax, ay), (bx, by) = seg
        out.append(f'<line x1="{_tx(ax):.3f}" y1="{_ty(ay):.3f}" x2="{_tx(bx):.3f}" '
                   f'y2="{_ty(by):.3f}"/>')
    out.append("</g>")
    out.append('<g fill="#c0392b">')
    for x0, y0, _ in rows:
        out.append(f'<circle cx="{_tx(x0):.3f}" cy="{_ty(y0):.3f}" r="{marker_radius}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
