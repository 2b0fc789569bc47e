import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oimshil import CapacityError, ContractError, build_shil, plan, utilization_threshold
from oimshil.shil import (DEFAULTS, IDEAL, NODE_AREA_UM2, ROA, ROSC, ShilSource, ShilSystem,
                          plan_table, quadrant_assignment, with_amplitude)


def test_ideal_is_single_source_at_twice_f1():
    s = build_shil(IDEAL, 1.13e9, 324)
    assert len(s.sources) == 1
    assert s.sources[0].freq == pytest.approx(2.26e9) and s.sources[0].phase_offset == 0
    assert s.drive_limit is None and s.reference_freq == s.sources[0].freq


def test_rosc_uses_five_units_for_324_nodes():
    s = build_shil(ROSC, 1.13e9, 324)
    assert len(s.sources) == 5
    assert {src.freq for src in s.sources} == {2.18e9}
    assert s.load.max() <= 65 and s.load.sum() == 324
    # contiguous blocks in index order
    assert np.all(np.diff(s.assignment) >= 0)


def test_roa_has_four_coherent_taps_at_231ghz():
    s = build_shil(ROA, 1.13e9, 324)
    assert len(s.sources) == 4
    assert {(src.freq, src.phase_offset) for src in s.sources} == {(20.82e9 / 9, 0.0)}
    assert round(s.sources[0].freq / 1e7) == 231
    assert s.load.tolist() == [81, 81, 81, 81]


def test_roa_quadrants_on_lattice():
    q = quadrant_assignment(16, (4, 4)).reshape(4, 4)
    assert q.tolist() == [[0, 0, 1, 1], [0, 0, 1, 1], [2, 2, 3, 3], [2, 2, 3, 3]]


def test_design_frequencies_scale_with_f1():
    s = build_shil(ROSC, 2.0e9, 10)
    assert s.sources[0].freq == pytest.approx(2.18e9 * 4.0e9 / 2.26e9)
    assert s.reference_freq == 4.0e9


def test_roa_capacity_error_names_limit():
    with pytest.raises(CapacityError, match="2792"):
        build_shil(ROA, 1.13e9, 2793)
    assert len(build_shil(ROA, 1.13e9, 2792).sources) == 4


@pytest.mark.parametrize("kind", [IDEAL, ROSC, ROA])
def test_bad_arguments(kind):
    with pytest.raises(ContractError):
        build_shil(kind, 0.0, 10)
    with pytest.raises(ContractError):
        build_shil(kind, 1e9, 0)


def test_system_invariants_enforced():
    src = (ShilSource(2e9), ShilSource(2e9, 0.5))
    with pytest.raises(ContractError):
        ShilSystem(ROA, src, [0, 1], 10, 2e9)
    with pytest.raises(CapacityError):
        ShilSystem(ROSC, src, [0, 0, 0, 1], 2, 2e9)
    with pytest.raises(ContractError):
        ShilSystem(IDEAL, (ShilSource(2.1e9),), [0], None, 2e9)
    with pytest.raises(ContractError):
        ShilSource(-1.0)
    with pytest.raises(ContractError):
        ShilSource(1.0, amplitude_scale=-0.1)


@given(st.integers(1, 2792), st.sampled_from([IDEAL, ROSC, ROA]))
def test_assignment_partitions_nodes(n, kind):
    s = build_shil(kind, 1.13e9, n)
    assert s.load.sum() == n
    if s.drive_limit is not None:
        assert s.load.max() <= s.drive_limit
    if kind == ROA:
        assert np.ptp(s.freqs) == 0 and np.ptp(s.phase_offsets) == 0


@given(st.integers(1, 5000))
def test_rosc_plan_is_ceil_and_monotone(n):
    assert plan(ROSC, n).sources_needed == math.ceil(n / 65)
    assert plan(ROSC, n + 1).sources_needed >= plan(ROSC, n).sources_needed


def test_plan_records():
    r = plan(ROSC, 324)
    assert r.sources_needed == 5 and r.footprint_estimate == 5 * 113
    a = plan(ROA, 324)
    assert a.drive_limit == 698 and a.footprint_estimate == 425812
    assert json.loads(a.to_json()) == {"kind": "roa", "n_nodes": 324, "sources": 4,
                                        "nodes_per_source": 81, "footprint_um2": 425812}
    assert plan(ROSC, 1).to_json() == ('{"kind": "rosc", "n_nodes": 1, "sources": 1, '
                                        '"nodes_per_source": 1, "footprint_um2": 113}')
    with pytest.raises(CapacityError):
        plan(ROA, 3000)


def test_plan_table_alignment():
    lines = plan_table([plan(k, 324) for k in (IDEAL, ROSC, ROA)]).splitlines()
    assert lines[0].split() == ["kind", "n_nodes", "sources", "nodes_per_source", "footprint_um2"]
    assert len({len(l) for l in lines}) == 1


def test_utilization_threshold():
    assert utilization_threshold() == 625
    assert utilization_threshold(target_util=1e-9) == 1
    a = utilization_threshold(NODE_AREA_UM2)
    b = utilization_threshold(2 * NODE_AREA_UM2)
    assert abs(b - a / 2) <= 1
    with pytest.raises(ContractError):
        utilization_threshold(target_util=1.0)


def test_derived_constants():
    assert DEFAULTS.roa_tap_limit == 698
    assert DEFAULTS.roa_freq == pytest.approx(2.3133e9, rel=1e-4)


def test_with_amplitude_scales_every_source():
    s = with_amplitude(build_shil(ROA, 1.13e9, 20), 0.5)
    assert s.amplitudes.tolist() == [0.5] * 4
