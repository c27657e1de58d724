import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from passivecones import jsonio
from passivecones.incsim import SwitchedSystem, Trajectory
from passivecones.ratfun import ratio
from passivecones.realize import R_h

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(finite)
def test_float_round_trip(x):
    assert float(jsonio.loads(jsonio.dumps(x))) == x


def test_seventeen_digits():
    assert jsonio.dumps(0.1) == "0.10000000000000001"
    assert jsonio.dumps(2.0) == "2.0"


def test_non_finite():
    assert jsonio.dumps([float("nan"), float("inf"), -float("inf")]) == "[NaN, Infinity, -Infinity]"


def test_dumps_matches_json_structure():
    obj = {"a": [1, 2.5, True, None], "b": {"c": "x"}}
    assert json.loads(jsonio.dumps(obj, indent=2)) == obj


def test_unknown_type():
    with pytest.raises(TypeError):
        jsonio.dumps(object())


def test_malformed():
    with pytest.raises(jsonio.FormatError):
        jsonio.loads("{not json")


@given(hnp.arrays(complex, hnp.array_shapes(min_dims=2, max_dims=2, max_side=4),
                  elements=st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e6)))
def test_matrix_round_trip(a):
    back = jsonio.matrix_from_json(jsonio.loads(jsonio.dumps(jsonio.matrix_to_json(a))))
    npt.assert_array_equal(back, a)


def test_matrix_real_when_imag_zero():
    a = jsonio.matrix_from_json({"rows": 1, "cols": 2, "data": [1, [2.0, 0.0]]})
    assert not np.iscomplexobj(a)
    npt.assert_array_equal(a, [[1.0, 2.0]])


@pytest.mark.parametrize("obj", [
    {"rows": 2, "cols": 2, "data": [1, 2, 3]},
    {"rows": -1, "cols": 1, "data": []},
    {"rows": 1, "cols": 1, "data": ["x"]},
    {"rows": 1, "cols": 1},
    [1, 2],
])
def test_matrix_errors(obj):
    with pytest.raises(jsonio.FormatError):
        jsonio.matrix_from_json(obj)


def test_rational_round_trip():
    F = ratio([1.0, 2.0], [3.0, 1.0, 0.5])
    back = jsonio.rational_from_json(jsonio.loads(jsonio.dumps(jsonio.rational_to_json(F))))
    assert back.m == 1
    for s in (1.0, 2j):
        assert back(s)[0, 0] == pytest.approx(F(s))


def test_rational_errors():
    with pytest.raises(jsonio.FormatError):
        jsonio.rational_from_json({"m": 2, "entries": [[{"num": [1], "den": [1]}]]})
    with pytest.raises(jsonio.FormatError):
        jsonio.rational_from_json({"m": 1, "entries": [[{"num": [1]}]]})


def test_realization_round_trip():
    R = R_h(1.0, 4.0, 2.0)
    back = jsonio.realization_from_json(jsonio.loads(jsonio.dumps(jsonio.realization_to_json(R))))
    npt.assert_array_equal(back.matrix, R.matrix)


def test_realization_shape_check():
    obj = jsonio.realization_to_json(R_h(1.0, 4.0, 2.0))
    obj["n"] = 2
    with pytest.raises(jsonio.FormatError):
        jsonio.realization_from_json(obj)


def test_system_round_trip():
    sys = SwitchedSystem((-np.eye(2), np.array([[-1.0, 1j], [1j, -1.0]])), H=-np.eye(2))
    back = jsonio.system_from_json(jsonio.loads(jsonio.dumps(jsonio.system_to_json(sys))))
    assert back.is_complex and back.H is not None
    npt.assert_array_equal(back.matrices[1], sys.matrices[1])


def test_vector_forms():
    npt.assert_array_equal(jsonio.vector_from_json([1, 2]), [1.0, 2.0])
    npt.assert_array_equal(jsonio.vector_from_json([[0, 1]]), [1j])
    with pytest.raises(jsonio.FormatError):
        jsonio.vector_from_json("abc")


def test_trajectory_csv():
    traj = Trajectory(np.array([0.0, 0.5]), np.array([[1.0, 1j], [0.5, 0.0]]))
    lines = jsonio.trajectory_to_csv(traj).splitlines()
    assert lines[0] == "t,x_1_re,x_1_im,x_2_re,x_2_im,norm"
    row = [float(v) for v in lines[1].split(",")]
    assert row == [0.0, 1.0, 0.0, 0.0, 1.0, pytest.approx(np.sqrt(2))]
