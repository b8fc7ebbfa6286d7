import math
from dataclasses import dataclass

import numpy as np
from pytest import raises as assert_raises

from formfactor.result import FormFactorKind
from utils.json_utils import decode_complex, encode_complex, getattr_complex, to_json


@dataclass(frozen=True)
class Sample:
    value: complex
    kind: FormFactorKind


class TestComplexCodec:
    def test_encode(self):
        assert encode_complex(1 - 2j) == [1.0, -2.0]

    def test_decode(self):
        assert decode_complex(3) == 3
        assert decode_complex([0.5, -1]) == 0.5 - 1j

    def test_decode_rejects(self):
        for value in (True, "1", [1, 2, 3], [1, "x"], None, [True, 0]):
            with assert_raises(ValueError):
                decode_complex(value)

    def test_getattr_complex(self):
        assert getattr_complex({"c": [1, 1]}, "c", 0) == 1 + 1j
        assert getattr_complex({}, "c", 2.5) == 2.5


class TestToJson:
    def test_nested(self):
        encoded = to_json({"z": 1j, "values": np.array([1, 2.5]), "kind": FormFactorKind.LOCAL, "ok": True})
        assert encoded == {"z": [0.0, 1.0], "values": [1.0, 2.5], "kind": "local", "ok": True}

    def test_numpy_scalars(self):
        assert to_json(np.int64(3)) == 3
        assert to_json(np.complex128(2 + 1j)) == [2.0, 1.0]

    def test_non_finite(self):
        assert to_json(math.inf) == "inf"
        assert to_json(float("nan")) == "nan"

    def test_dataclass(self):
        assert to_json(Sample(1 + 0j, FormFactorKind.DIAGONAL)) == {"value": [1.0, 0.0], "kind": "diagonal"}

    def test_unknown_type(self):
        with assert_raises(TypeError):
            to_json(object())
