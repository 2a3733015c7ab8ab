"""
Dispersion chart rendering.
"""
import PIL.Image

from csort.dual import dual_from_assignment
from csort.quant import DispersionReport, dispersion_report, regions_fixture
from csort.rendering import render_dispersion_plot
from csort.solver import solve


def test_render_regions_report():
    economy = regions_fixture(atoms=20)
    assignment = solve(economy.F, economy.G, economy.spec.cost)
    report = dispersion_report(economy, assignment, dual_from_assignment(assignment, economy.spec))

    output = render_dispersion_plot(report)
    assert output.getvalue().startswith(b"\x89PNG\r\n\x1a\n")
    image = PIL.Image.open(output)
    assert image.size == (800, 480)
    assert image.mode == "RGB"


def test_render_empty_report():
    image = PIL.Image.open(render_dispersion_plot(DispersionReport(), width=320, height=200))
    assert image.size == (320, 200)
