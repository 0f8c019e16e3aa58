"""LP-format export of the full model."""

from sdsp_brm.core.model import SegmentationMode
from sdsp_brm.scenarios.generator import generate_scenario
from sdsp_brm.solvers.lp_export import export_lp
from sdsp_brm.utils.config import GenParams


def test_instance_a_model(instance_a):
    text = export_lp(instance_a)
    lines = text.splitlines()
    assert lines[0] == "\\ SDSP-BRM model: N=2 M=3 ld=10 mode=sg"
    assert lines[1:3] == ["Maximize", " obj: 6 x_1 + 4 x_2"]
    assert " c6lo_1_1: 10 g_1_1 - y_1_1 <= 0" in lines
    assert " c6hi_1_1: y_1_1 - 90 g_1_1 <= 0" in lines
    assert " c7_1: y_1_1 + y_1_2 + y_1_3 - 90 x_1 = 0" in lines
    assert " c8_3: y_1_3 + y_2_3 <= 30" in lines
    assert " c10_2_3: g_2_3 - x_2 <= 0" in lines
    assert not any(line.startswith(" nsg_") for line in lines)
    assert text.endswith("End\n")


def test_section_order(instance_a):
    lines = export_lp(instance_a).splitlines()
    sections = [ln for ln in lines if ln in ("Maximize", "Subject To", "Bounds", "Binaries", "End")]
    assert sections == ["Maximize", "Subject To", "Bounds", "Binaries", "End"]
    binaries = lines[lines.index("Binaries") + 1:lines.index("End")]
    assert binaries[:2] == [" x_1", " x_2"]
    assert len(binaries) == 2 + 6


def test_unserviceable_pairs_have_no_variables(service_example):
    text = export_lp(service_example)
    assert "g_2_1" not in text
    assert "g_3_" not in text
    assert " c7_3: - 270 x_3 = 0" in text.splitlines()
    assert " c8_1: y_1_1 <= 50" in text.splitlines()


def test_nonsg_rows(instance_a):
    lines = export_lp(instance_a, mode=SegmentationMode.NONSG).splitlines()
    assert lines[0].endswith("mode=nonsg")
    assert " nsg_1: g_1_1 + g_1_2 + g_1_3 <= 1" in lines


def test_ld_override(instance_a):
    lines = export_lp(instance_a, ld=12.5).splitlines()
    assert "ld=12.5" in lines[0]
    assert " c6lo_1_1: 12.5 g_1_1 - y_1_1 <= 0" in lines


def test_export_is_deterministic():
    scenario = generate_scenario(GenParams(m=6, seed=5))
    assert export_lp(scenario) == export_lp(scenario)
