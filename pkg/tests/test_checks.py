import time

import numpy as np
import pytest

from sidebandcat.checks import run_identity_checks, run_validation
from sidebandcat.noise import DecoherenceModel
from sidebandcat.sideband import PulseSpec, RabiModel, BEYOND_LD, BSB


def test_validation_suite_all_pass():
    results = run_validation(quick=True, seed=3)
    assert all(r.passed for r in results), "\n".join(r.line() for r in results)


def test_validation_quick_under_budget():
    start = time.perf_counter()
    run_validation(quick=True, seed=1)
    assert time.perf_counter() - start < 10.0


def test_injected_e2_sign_bug_is_named():
    results = run_identity_checks(n_max=30, draws=3, seed=2,
                                  sign_table={"E2_rsb_Theta": +1})
    failed = [r for r in results if not r.passed]
    assert len(failed) == 1
    assert "E2" in failed[0].name


def test_pulse_spec_json_roundtrip():
    p = PulseSpec(BSB, 1.2, 0.7, RabiModel(BEYOND_LD, 0.0629))
    back = PulseSpec.from_json_obj(p.to_json_obj())
    assert back == p
    obj = p.to_json_obj()
    assert obj["rabi_model"] == {"type": "beyond_ld", "eta": 0.0629}


def test_decoherence_model_json_roundtrip():
    m = DecoherenceModel("w_mixture", 0.85)
    back = DecoherenceModel.from_json_obj(m.to_json_obj())
    assert back == m
    assert DecoherenceModel.from_json_obj({"kind": "full_dephase"}).kind == "full_dephase"
