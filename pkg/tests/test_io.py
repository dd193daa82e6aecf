from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localdist.io import (
    FormatError,
    dumps,
    load_povm,
    load_state,
    load_stats,
    povm_from_dict,
    povm_to_dict,
    save_povm,
    save_stats,
)
from localdist.povm import Povm, qutrit_case_ii, random_povm, sic_qubit


@given(st.integers(1, 4), st.integers(1, 8), st.integers(0, 10**6))
def test_round_trip_is_byte_identical(tmp_path_factory, d, n, seed):
    path = tmp_path_factory.mktemp("rt")
    povm = random_povm(d, n, seed)
    save_povm(povm, path / "a.json")
    again = load_povm(path / "a.json")
    np.testing.assert_array_equal(again.effects, povm.effects)
    save_povm(again, path / "b.json")
    assert (path / "a.json").read_bytes() == (path / "b.json").read_bytes()


def test_layout(tmp_path):
    povm = Povm(sic_qubit().effects, metadata={"kind": "sic2"})
    save_povm(povm, tmp_path / "p.json")
    doc = json.loads((tmp_path / "p.json").read_text())
    assert doc["dim"] == 2 and len(doc["effects"]) == 4
    assert doc["labels"] == ["0", "1", "2", "3"]
    assert doc["metadata"] == {"kind": "sic2"}
    # row-major [re, im] pairs
    assert doc["effects"][0][0][0] == [0.5, 0]
    assert np.isclose(doc["effects"][2][0][1][1], -np.sqrt(6) / 12)


def test_seventeen_digits():
    assert dumps({"x": 0.1}) == '{\n  "x": 0.10000000000000001\n}\n'
    assert dumps([-0.0]) == "[0]\n"


def test_format_errors(tmp_path):
    with pytest.raises(FormatError):
        povm_from_dict({"dim": 2})
    with pytest.raises(FormatError):
        povm_from_dict({"dim": 3, "effects": povm_to_dict(sic_qubit())["effects"]})
    with pytest.raises(FormatError):
        povm_from_dict({"dim": 2, "effects": [[[1, 2]]]})
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(FormatError):
        load_povm(tmp_path / "bad.json")
    with pytest.raises(FormatError):
        load_povm(tmp_path / "missing.json")
    (tmp_path / "list.json").write_text("[1, 2]")
    with pytest.raises(FormatError):
        load_povm(tmp_path / "list.json")


def test_stats_and_states(tmp_path):
    save_stats([0.25, 0.75], tmp_path / "s.json", povm_ref="p.json")
    p, ref = load_stats(tmp_path / "s.json")
    np.testing.assert_array_equal(p, [0.25, 0.75])
    assert ref == "p.json"
    (tmp_path / "v.json").write_text(json.dumps({"vector": [[0, 0], [2, 0]]}))
    np.testing.assert_allclose(load_state(tmp_path / "v.json"), np.diag([0.0, 1.0]))
    (tmp_path / "e.json").write_text(json.dumps({"dim": 1}))
    with pytest.raises(FormatError):
        load_state(tmp_path / "e.json")


def test_qutrit_round_trip_preserves_labels(tmp_path):
    povm = Povm(qutrit_case_ii().effects, labels=[f"o{i}" for i in range(8)])
    save_povm(povm, tmp_path / "q.json")
    assert load_povm(tmp_path / "q.json").labels == tuple(f"o{i}" for i in range(8))
