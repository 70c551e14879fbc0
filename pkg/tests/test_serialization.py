import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grasswigner import grassmann as g
from grasswigner import serialization as ser
from grasswigner.errors import MalformedInput
from grasswigner.graph import build_graph, orthogonal_apartment
from grasswigner.operators import random_antiunitary
from grasswigner.wigner import TransformationOracle, reconstruct_operator


def roundtrip(obj):
    return json.loads(json.dumps(obj))


def test_cmatrix_layout():
    d = ser.cmatrix_to_json(np.array([[1, 2j], [3, 4 - 1j]]))
    assert d == {"rows": 2, "cols": 2, "re": [1, 0, 3, 4], "im": [0, 2, 0, -1]}
    np.testing.assert_array_equal(ser.cmatrix_from_json(d), [[1, 2j], [3, 4 - 1j]])
    assert ser.cmatrix_from_json({"rows": 1, "cols": 2, "re": [1, 2]}).dtype == complex


@pytest.mark.parametrize(
    "bad",
    [
        {"rows": 2, "cols": 2, "re": [1, 2, 3]},
        {"cols": 1, "re": [1]},
        {"rows": 1, "cols": 1, "re": ["x"]},
        {"rows": 1, "cols": 1, "re": [float("nan")]},
    ],
)
def test_cmatrix_rejects_malformed(bad):
    with pytest.raises(MalformedInput):
        ser.cmatrix_from_json(bad)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8), data=st.data())
def test_subspace_roundtrip(seed, n, data):
    k = data.draw(st.integers(1, n))
    X = g.random_subspace(n, k, seed)
    Y = ser.subspace_from_json(roundtrip(ser.subspace_to_json(X)))
    assert (Y.n, Y.k) == (n, k)
    assert g.same_subspace(X, Y)


def test_subspace_loader_canonicalises_and_rejects():
    d = {"n": 3, "k": 2, "frame": ser.cmatrix_to_json(np.array([[2, 0], [0, 5j], [0, 0]]))}
    X = ser.subspace_from_json(d)
    np.testing.assert_allclose(X.frame.conj().T @ X.frame, np.eye(2), atol=1e-14)
    d["frame"] = ser.cmatrix_to_json(np.array([[1, 2], [1, 2], [0, 0]]))
    with pytest.raises(MalformedInput):
        ser.subspace_from_json(d)
    d["k"] = 3
    with pytest.raises(MalformedInput):
        ser.subspace_from_json(d)
    with pytest.raises(MalformedInput):
        ser.subspace_from_json({"n": 3})


def test_operator_roundtrip_and_errors():
    L = random_antiunitary(4, 0)
    M = ser.operator_from_json(roundtrip(ser.operator_to_json(L)))
    assert M.endo is L.endo
    np.testing.assert_array_equal(M.matrix, L.matrix)
    with pytest.raises(MalformedInput):
        ser.operator_from_json({"endo": "frobenius", "matrix": ser.cmatrix_to_json(np.eye(2))})


def test_graph_and_apartment_layouts():
    apt = orthogonal_apartment(np.eye(4), 2)
    G = build_graph(apt.members)
    d = roundtrip(ser.graph_to_json(G))
    assert (d["n"], d["k"], len(d["vertices"]), len(d["edges"])) == (4, 2, 6, 12)
    a = roundtrip(ser.apartment_to_json(apt))
    assert a["subsets"][0] == [0, 1] and a["k"] == 2


def test_table_and_reconstruction_roundtrip():
    L = random_antiunitary(5, 1)
    live = TransformationOracle.from_operator(L, 2, record=True)
    result = reconstruct_operator(live, 5, 2)
    entries = ser.table_from_json(roundtrip(ser.table_to_json(live.log)))
    assert len(entries) == live.queries
    assert all(g.same_subspace(a, c) and g.same_subspace(b, d) for (a, b), (c, d) in zip(live.log, entries))
    d = roundtrip(ser.reconstruction_to_json(result))
    assert d["certified"] is True and d["endo"] == "conjugation"
    with pytest.raises(MalformedInput):
        ser.table_from_json({"in": 1})
    with pytest.raises(MalformedInput):
        ser.table_from_json([{"in": ser.subspace_to_json(entries[0][0])}])


def test_relation_report_json():
    X = g.Subspace(np.eye(4)[:, :2])
    d = roundtrip(ser.relation_report_to_json(g.relation_report(X, g.Subspace(np.eye(4)[:, 2:]))))
    assert d["orthogonal"] is True and d["distance"] == 2 and d["intersection_dim"] == 0
