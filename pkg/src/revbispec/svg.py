"""Static SVG heatmaps of bifrequency fields.

Colours come from a fixed blue-white-red ramp over ``[-vmax, vmax]``, so
layers rendered with the same ``vmax`` are directly comparable. Adjacent
cells of identical colour are merged into one rectangle per row.
"""

import numpy as np

_NEG = np.array([33, 102, 172])
_POS = np.array([178, 24, 43])
_MID = np.array([247, 247, 247])


def _colours(values, vmax):
    if vmax <= 0:
        t = np.zeros_like(values)
    else:
        t = np.clip(values / vmax, -1.0, 1.0)
    a = np.abs(t)[..., None]
    end = np.where((t < 0)[..., None], _NEG, _POS)
    rgb = np.rint((1.0 - a) * _MID + a * end).astype(int)
    return rgb


def heatmap_svg(values, vmax, title="", cell=4):
    """Render a real 2-D array; row ``j`` (first frequency) runs top to bottom."""
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    rgb = _colours(values, float(vmax))
    width, height = cols * cell, rows * cell + 20
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" shape-rendering="crispEdges">',
        f'<text x="2" y="14" font-family="sans-serif" font-size="12">{title} '
        f"[limits +/-{float(vmax):.6g}]</text>",
        '<g transform="translate(0,20)">',
    ]
    code = (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]
    for j in range(rows):
        starts = np.concatenate([[0], np.flatnonzero(np.diff(code[j])) + 1])
        ends = np.concatenate([starts[1:], [cols]])
        for k, stop in zip(starts.tolist(), ends.tolist()):
            out.append(
                f'<rect x="{k * cell}" y="{j * cell}" width="{(stop - k) * cell}" '
                f'height="{cell}" fill="#{int(code[j, k]):06x}"/>'
            )
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def field_layers_svg(field):
    """SVG documents for Re B, Im B and |Im B| / |B|.

    Re and Im share limits ``+/- max |B|``; the ratio layer uses ``+/- 1``.
    """
    vals = field.values
    mag = np.abs(vals)
    vmax = float(mag.max())
    ratio = np.divide(np.abs(vals.imag), mag, out=np.zeros_like(mag), where=mag > 0)
    return {
        "re": heatmap_svg(vals.real, vmax, "Re B"),
        "im": heatmap_svg(vals.imag, vmax, "Im B"),
        "imratio": heatmap_svg(ratio, 1.0, "|Im B| / |B|"),
    }
