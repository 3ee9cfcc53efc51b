"""Minimal SVG rendering of a run: area, denied zones, targets, tracks.

Plain text output, no plotting toolchain required.  The y axis is flipped
so world (0, 0) sits at the bottom-left of the image.
"""

from __future__ import annotations

from pathlib import Path

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2"]


def _pt(x: float, y: float, height: float, scale: float) -> str:
    return f"{x * scale:.1f},{(height - y) * scale:.1f}"


def render_run(scenario, result, path: str | Path, scale: float = 0.5) -> Path:
    """Write one SVG with denied areas, target truth/prior marks, and the
    per-vehicle trajectories from a finished run."""
    w = scenario.grid.width
    h = scenario.grid.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * scale:.0f}" '
        f'height="{h * scale:.0f}" viewBox="0 0 {w * scale:.0f} {h * scale:.0f}">',
        f'<rect x="0" y="0" width="{w * scale:.0f}" height="{h * scale:.0f}" '
        'fill="#fcfcf7" stroke="#333" stroke-width="1"/>',
    ]
    for d in scenario.denied:
        cx, cy = d["center"]
        if d.get("vertices"):
            pts = " ".join(_pt(vx, vy, h, scale) for vx, vy in d["vertices"])
            parts.append(f'<polygon points="{pts}" fill="#bbb" stroke="#777"/>')
        else:
            parts.append(
                f'<circle cx="{cx * scale:.1f}" cy="{(h - cy) * scale:.1f}" '
                f'r="{d["radius"] * scale:.1f}" fill="#bbb" stroke="#777"/>'
            )
    for t in scenario.targets:
        px, py = t["prior"]
        tx, ty = t["position"]
        parts.append(
            f'<g stroke="#444"><line x1="{(px - 8) * scale:.1f}" y1="{(h - py - 8) * scale:.1f}" '
            f'x2="{(px + 8) * scale:.1f}" y2="{(h - py + 8) * scale:.1f}"/>'
            f'<line x1="{(px - 8) * scale:.1f}" y1="{(h - py + 8) * scale:.1f}" '
            f'x2="{(px + 8) * scale:.1f}" y2="{(h - py - 8) * scale:.1f}"/></g>'
        )
        parts.append(
            f'<circle cx="{tx * scale:.1f}" cy="{(h - ty) * scale:.1f}" r="{4 * scale:.1f}" fill="#c00"/>'
        )
    tracks: dict[int, list[tuple[float, float]]] = {}
    for row in result.trajectory:
        tracks.setdefault(int(row[0]), []).append((float(row[2]), float(row[3])))
    for k, (uid, pts) in enumerate(sorted(tracks.items())):
        color = PALETTE[k % len(PALETTE)]
        poly = " ".join(_pt(x, y, h, scale) for x, y in pts)
        parts.append(f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        x0, y0 = pts[0]
        parts.append(
            f'<circle cx="{x0 * scale:.1f}" cy="{(h - y0) * scale:.1f}" r="3" fill="{color}"/>'
            f'<text x="{x0 * scale + 4:.1f}" y="{(h - y0) * scale - 4:.1f}" '
            f'font-size="10" fill="{color}">{uid}</text>'
        )
    parts.append("</svg>")
    out = Path(path)
    out.write_text("\n".join(parts) + "\n")
    return out
