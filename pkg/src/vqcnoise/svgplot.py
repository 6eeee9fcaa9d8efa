"""Minimal standalone SVG plotting: loss-curve panels and accuracy bars.

Documents are built with xml.etree so every emitted file is well-formed XML.
Loss panels draw one <polyline> per series; accuracy charts draw two <rect>
bars (train, test) per group.  Both carry a title, axis labels, tick labels,
a legend, and a <desc> provenance element.
"""

from __future__ import annotations

import colorsys
import math
import xml.etree.ElementTree as ET

SVG_NS = "http://www.w3.org/2000/svg"

WIDTH, HEIGHT = 860, 520
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 190, 50, 55
FONT = "font-family:Helvetica,Arial,sans-serif"


def series_color(index: int, total: int) -> str:
    """Evenly spaced hue wheel; stable for a fixed series count."""
    hue = (index / max(total, 1)) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.75, 0.82)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _root(title: str, desc: str) -> ET.Element:
    svg = ET.Element("svg", {
        "xmlns": SVG_NS,
        "width": str(WIDTH),
        "height": str(HEIGHT),
        "viewBox": f"0 0 {WIDTH} {HEIGHT}",
    })
    d = ET.SubElement(svg, "desc")
    d.text = desc
    ET.SubElement(svg, "rect", {"x": "0", "y": "0", "width": str(WIDTH),
                                "height": str(HEIGHT), "fill": "white"})
    t = ET.SubElement(svg, "text", {
        "x": str(WIDTH / 2), "y": "28", "text-anchor": "middle",
        "style": f"{FONT};font-size:17px;font-weight:bold"})
    t.text = title
    return svg


def _text(svg, x, y, content, size=12, anchor="middle", rotate=None):
    attrs = {"x": f"{x:.1f}", "y": f"{y:.1f}", "text-anchor": anchor,
             "style": f"{FONT};font-size:{size}px"}
    if rotate is not None:
        attrs["transform"] = f"rotate({rotate} {x:.1f} {y:.1f})"
    el = ET.SubElement(svg, "text", attrs)
    el.text = content


def _axes(svg, x_label: str, y_label: str):
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    for (xa, ya, xb, yb) in ((x0, y0, x1, y0), (x0, y0, x0, y1)):
        ET.SubElement(svg, "line", {
            "x1": str(xa), "y1": str(ya), "x2": str(xb), "y2": str(yb),
            "stroke": "black", "stroke-width": "1"})
    _text(svg, (x0 + x1) / 2, HEIGHT - 14, x_label, size=13)
    _text(svg, 20, (y0 + y1) / 2, y_label, size=13, rotate=-90)


def _ticks(svg, lo: float, hi: float, vertical: bool, fmt: str = "{:.2f}"):
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    for i in range(5):
        frac = i / 4
        value = lo + frac * (hi - lo)
        if vertical:
            y = y0 - frac * (y0 - y1)
            ET.SubElement(svg, "line", {"x1": str(x0 - 4), "y1": f"{y:.1f}",
                                        "x2": str(x0), "y2": f"{y:.1f}",
                                        "stroke": "black"})
            _text(svg, x0 - 8, y + 4, fmt.format(value), size=11, anchor="end")
        else:
            x = x0 + frac * (x1 - x0)
            ET.SubElement(svg, "line", {"x1": f"{x:.1f}", "y1": str(y0),
                                        "x2": f"{x:.1f}", "y2": str(y0 + 4),
                                        "stroke": "black"})
            _text(svg, x, y0 + 17, fmt.format(value), size=11)


def _legend(svg, entries):
    x = WIDTH - MARGIN_R + 14
    y = MARGIN_T + 6
    for label, color in entries:
        ET.SubElement(svg, "rect", {"x": str(x), "y": f"{y - 9:.1f}",
                                    "width": "14", "height": "9",
                                    "fill": color})
        _text(svg, x + 19, y, label, size=11, anchor="start")
        y += 16


def loss_curves_svg(series: list[tuple[str, list[float]]], title: str,
                    path: str, desc: str = "") -> None:
    """One polyline per (label, losses) series on shared axes."""
    svg = _root(title, desc)
    _axes(svg, "iteration", "loss")
    max_len = max((len(tr) for _, tr in series), default=1)
    values = [v for _, tr in series for v in tr]
    lo = min(values, default=0.0)
    hi = max(values, default=1.0)
    if hi - lo < 1e-12:
        hi = lo + 1.0
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    _ticks(svg, 1, max_len, vertical=False, fmt="{:.0f}")
    _ticks(svg, lo, hi, vertical=True, fmt="{:.3f}")
    legend = []
    for idx, (label, trace) in enumerate(series):
        color = series_color(idx, len(series))
        points = []
        for k, value in enumerate(trace):
            frac_x = 0.0 if max_len == 1 else k / (max_len - 1)
            px = x0 + frac_x * (x1 - x0)
            py = y0 - (value - lo) / (hi - lo) * (y0 - y1)
            points.append(f"{px:.2f},{py:.2f}")
        ET.SubElement(svg, "polyline", {
            "points": " ".join(points), "fill": "none",
            "stroke": color, "stroke-width": "1.4"})
        legend.append((label, color))
    _legend(svg, legend)
    ET.ElementTree(svg).write(path, encoding="unicode", xml_declaration=True)


def accuracy_bars_svg(groups: list[tuple[str, float, float]], title: str,
                      path: str, desc: str = "") -> None:
    """Grouped train/test bars: one (label, train_acc, test_acc) per group."""
    svg = _root(title, desc)
    _axes(svg, "configuration", "accuracy")
    _ticks(svg, 0.0, 1.0, vertical=True)
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    span = x1 - x0
    slot = span / max(len(groups), 1)
    bar = min(slot * 0.32, 26.0)
    train_color, test_color = "#3465a4", "#cc4b37"
    for idx, (label, train_acc, test_acc) in enumerate(groups):
        cx = x0 + (idx + 0.5) * slot
        for offset, acc, color in ((-bar, train_acc, train_color),
                                   (0.0, test_acc, test_color)):
            h = max(acc, 0.0) * (y0 - y1)
            ET.SubElement(svg, "rect", {
                "x": f"{cx + offset:.2f}", "y": f"{y0 - h:.2f}",
                "width": f"{bar:.2f}", "height": f"{h:.2f}", "fill": color})
        _text(svg, cx, y0 + 16, label, size=10)
    _legend(svg, [("train", train_color), ("test", test_color)])
    ET.ElementTree(svg).write(path, encoding="unicode", xml_declaration=True)
