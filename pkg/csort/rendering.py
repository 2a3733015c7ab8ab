"""
Module to draw the wage dispersion chart for a dispersion report.
"""
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
#
# Copyright (C) 2025 The csort authors
#
import io
import math

import PIL.Image
import PIL.ImageDraw
import PIL.ImageFont

from csort.quant import DispersionReport

BACKGROUND = (255, 255, 255, 255)
AXIS = (40, 40, 40, 255)
GRID = (220, 220, 220, 255)
CIRCLE = (200, 40, 40, 160)
BAR = (60, 90, 200, 90)


def render_dispersion_plot(report: DispersionReport, width: int = 800, height: int = 480) -> io.BytesIO:
    """
    Occupations ranked by mean wage along the horizontal axis against the
    variance of log wages within each occupation. Circle area follows the
    employment share; bars show the segment averages.

    ┌──────────────────────────┐
    │ var                 o    │
    │     o   ▄▄▄▄▄▄  o   O    │
    │ ▄▄▄▄O▄▄ █    █▄▄▄▄▄▄▄▄   │
    └──────────────────────────┘
                rank
    """
    canvas = PIL.Image.new("RGBA", (width, height), BACKGROUND)
    overlay = PIL.Image.new("RGBA", (width, height), (0, 0, 0, 0))
    draw = PIL.ImageDraw.Draw(canvas)
    shapes = PIL.ImageDraw.Draw(overlay)
    font = PIL.ImageFont.load_default()

    margin_left, margin_right, margin_top, margin_bottom = 60, 20, 20, 40
    plot_w = width - margin_left - margin_right
    plot_h = height - margin_top - margin_bottom

    top = max([o.var_log_wage for o in report.per_job] + [s.model_sq for s in report.segments] + [0.0])
    top = top * 1.1 if top > 0 else 1.0

    def to_px(rank: float, value: float) -> tuple[float, float]:
        return margin_left + rank * plot_w, margin_top + plot_h - value / top * plot_h

    # Horizontal grid lines with labels
    for step in range(5):
        value = top * step / 4
        _, y = to_px(0, value)
        draw.line((margin_left, y, margin_left + plot_w, y), fill=GRID)
        draw.text((4, y - 6), f"{value:.3f}", fill=AXIS, font=font)

    # Segment averages, skipping the whole-sample segment
    for segment in report.segments:
        if segment.lo == 0 and segment.hi == 1:
            continue
        x0, y0 = to_px(segment.lo, segment.model_sq)
        x1, y1 = to_px(segment.hi, 0)
        shapes.rectangle((x0, y0, x1, y1), fill=BAR)

    for occupation in report.per_job:
        x, y = to_px(occupation.rank, occupation.var_log_wage)
        radius = max(2.0, math.sqrt(occupation.employment_share) * plot_h / 8)
        shapes.ellipse((x - radius, y - radius, x + radius, y + radius), fill=CIRCLE)

    canvas = PIL.Image.alpha_composite(canvas, overlay)
    draw = PIL.ImageDraw.Draw(canvas)
    draw.line((margin_left, margin_top, margin_left, margin_top + plot_h), fill=AXIS, width=2)
    draw.line((margin_left, margin_top + plot_h, margin_left + plot_w, margin_top + plot_h), fill=AXIS, width=2)
    for step in range(6):
        x, _ = to_px(step / 5, 0)
        draw.text((x - 8, margin_top + plot_h + 6), f"{step / 5:.1f}", fill=AXIS, font=font)
    draw.text((margin_left + plot_w // 2 - 60, height - 16), "occupation rank by mean wage", fill=AXIS, font=font)

    output = io.BytesIO()
    canvas.convert("RGB").save(output, format="PNG")
    output.seek(0)
    return output
