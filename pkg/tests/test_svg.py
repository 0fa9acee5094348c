from pathlib import Path

import pytest

from torifan.cones import ConeError, Fan, cone
from torifan.deltafan import delta_fan
from torifan.svg import render_svg

GOLDEN = Path(__file__).parent / "golden"


def test_a1_delta_fan_golden(tmp_path):
    text = render_svg(delta_fan(cone((1, 0), (1, 2))), tmp_path / "a1.svg")
    assert text == (GOLDEN / "a1_delta.svg").read_text()
    assert text.count("<polygon") == 2
    assert (tmp_path / "a1.svg").read_text() == text


def test_example_trivial_fan_golden(tmp_path):
    sigma = cone((1, 0, 0), (0, 1, 0), (1, 2, 4))
    text = render_svg(Fan.from_cones([sigma], sigma), tmp_path / "p.svg")
    assert text == (GOLDEN / "example_trivial.svg").read_text()
    assert text.count("<polygon") == 1 and text.count("<circle") == 3


def test_output_is_byte_stable(tmp_path):
    fan = delta_fan(cone((0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)))
    assert render_svg(fan, tmp_path / "a.svg") == render_svg(fan, tmp_path / "b.svg")


def test_rank_four_is_unsupported(tmp_path):
    sigma = cone((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    with pytest.raises(ConeError, match="unsupported rank"):
        render_svg(Fan.from_cones([sigma], sigma), tmp_path / "x.svg")
