import math

import pytest
from hypothesis import given, strategies as st

from vsi_ssa.errors import ConfigError
from vsi_ssa.params import (
    CONFIG_KEYS,
    REFERENCE,
    ConverterParams,
    dumps_params,
    load_params,
    loads_params,
    validate,
)

REFERENCE_DOC = """\
# reference converter
f_sw_hz = 100000
f_grid_hz = 50
u_in_v = 30
i_in_a = 2
u_od_v = 8.6
u_oq_v = 0
l_h = 73e-6
r_l_ohm = 0.015
r_on_ohm = 0.1   # switch
r_s_ohm = 0.05
"""


def _doc(**overrides):
    lines = []
    for line in REFERENCE_DOC.splitlines():
        key = line.split("=")[0].strip()
        if key in overrides:
            line = f"{key} = {overrides[key]}"
        lines.append(line)
    return "\n".join(lines)


def test_reference_document():
    p = loads_params(REFERENCE_DOC)
    assert p == REFERENCE
    assert p.r_eq == pytest.approx(0.165, abs=1e-15)
    assert p.omega_s == pytest.approx(314.159265, rel=1e-8)


def test_shipped_config_matches_reference():
    from pathlib import Path

    cfg = Path(__file__).resolve().parents[1] / "configs" / "reference.cfg"
    assert load_params(cfg) == REFERENCE


def test_zero_inductance_rejected():
    with pytest.raises(ConfigError, match="l_h"):
        loads_params(_doc(l_h=0))


def test_lossless_accepted():
    p = loads_params(_doc(r_l_ohm=0, r_on_ohm=0, r_s_ohm=0))
    assert p.r_eq == 0.0


def test_missing_key_named():
    doc = "\n".join(l for l in REFERENCE_DOC.splitlines() if not l.startswith("u_in_v"))
    with pytest.raises(ConfigError) as exc:
        loads_params(doc)
    assert exc.value.key == "u_in_v"


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown key 'c_f'"):
        loads_params(REFERENCE_DOC + "c_f = 1e-6\n")


def test_non_numeric_value():
    with pytest.raises(ConfigError, match="r_s_ohm") as exc:
        loads_params(_doc(r_s_ohm="fifty"))
    assert exc.value.key == "r_s_ohm"


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_params(tmp_path / "nope.cfg")


def test_validate_reference_clean():
    assert validate(REFERENCE) == []


def test_validate_carrier_ratio():
    report = validate(REFERENCE.replace(f_sw=200.0))
    assert len(report) == 1 and "carrier ratio" in report[0]


def test_validate_negative_input_voltage():
    report = validate(REFERENCE.replace(u_in=-30.0))
    assert len(report) == 1 and report[0].startswith("u_in_v")


def test_validate_reports_every_violation():
    report = validate(REFERENCE.replace(u_in=-1.0, inductance=0.0, r_on=-0.1))
    assert len(report) == 3


def test_params_immutable():
    with pytest.raises(Exception):
        REFERENCE.u_in = 10.0


def test_load_idempotent():
    assert loads_params(REFERENCE_DOC) == loads_params(REFERENCE_DOC)


finite = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False)


@given(
    f_grid=st.floats(1.0, 400.0),
    ratio=st.floats(100.0, 1e4),
    u_in=finite,
    i_in=st.floats(-10.0, 10.0),
    u_od=st.floats(-1e3, 1e3),
    u_oq=st.floats(-1e3, 1e3),
    inductance=st.floats(1e-7, 1.0),
    r_l=st.floats(0.0, 10.0),
    r_on=st.floats(0.0, 10.0),
    r_s=st.floats(0.0, 10.0),
)
def test_roundtrip_bit_identical(f_grid, ratio, u_in, i_in, u_od, u_oq, inductance, r_l, r_on, r_s):
    p = ConverterParams(f_sw=f_grid * ratio, f_grid=f_grid, u_in=u_in, i_in=i_in, u_od=u_od,
                        u_oq=u_oq, inductance=inductance, r_l=r_l, r_on=r_on, r_s=r_s)
    if validate(p):
        return
    again = loads_params(dumps_params(p))
    assert again == p
    assert again.r_eq == r_l + r_on + r_s
    assert set(dumps_params(p).split()) >= set(CONFIG_KEYS)
    assert math.isfinite(again.omega_s)
