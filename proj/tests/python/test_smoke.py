# Copyright 2026 The sgdrm Authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import math

import numpy as np
import pytest

import sgdrm


def physics():
    p = sgdrm.PhysicsParams()
    p.noise_power = 10 ** -11.5
    return p


def operator(t_db=10.0, target=0.8):
    return sgdrm.OperatorSpec("op", 1 / (math.pi * 200.0**2), 30e-6, 10 ** (t_db / 10), target)


def test_interference_factor_matches_arctan_form():
    t = 3.0
    expected = math.sqrt(t) * (math.pi / 2 - math.atan(1 / math.sqrt(t)))
    assert sgdrm.interference_factor(t, 4.0) == pytest.approx(expected, abs=1e-10)


def test_transmit_power_round_trip():
    op, phys = operator(), physics()
    p = sgdrm.solve_transmit_power(op, phys)
    assert sgdrm.coverage_probability(op, phys, p) == pytest.approx(0.8, abs=1e-6)


def test_unreachable_target_raises():
    with pytest.raises(sgdrm.InfeasibleQoS):
        sgdrm.solve_transmit_power(operator(target=0.999), physics())


def test_ppp_is_reproducible():
    a = sgdrm.sample_ppp(1e-4, 500.0, 7)
    b = sgdrm.sample_ppp(1e-4, 500.0, 7)
    assert a.shape[1] == 2
    assert np.array_equal(a, b)
    assert np.all(np.abs(a) <= 500.0)


def test_subgradient_meets_constraints():
    ops = [sgdrm.OperatorDemand("a", 5e4), sgdrm.OperatorDemand("b", 7e4)]
    sups = [
        sgdrm.SupplierSpec("s1", 1.0, 0.1, 1e5, 0.004, 0.001),
        sgdrm.SupplierSpec("s2", 2.0, 0.5, 1e5, 0.002, 0.0005),
    ]
    inst = sgdrm.ProblemInstance(ops, sups, fairness=0.5)
    sol = sgdrm.solve_dual_subgradient(inst)
    q = sol.allocation
    assert q.shape == (2, 2)
    assert np.all(q >= 0)
    assert np.allclose(q.sum(axis=0), [5e4, 7e4], rtol=1e-4)
    assert sol.kkt_residual < 1e-4


def test_oracle_does_not_beat_solver():
    ops = [sgdrm.OperatorDemand("a", 5e4), sgdrm.OperatorDemand("b", 7e4)]
    sups = [
        sgdrm.SupplierSpec("s1", 2.0, 0.5, 1e7, 0.002, 0.0005),
        sgdrm.SupplierSpec("s2", 3.0, 2.5, 1e7, 0.0, 0.0001),
    ]
    inst = sgdrm.ProblemInstance(ops, sups, emissions_cap=1e7)
    sol = sgdrm.solve_dual_subgradient(inst)
    oracle = sgdrm.brute_force_oracle(inst, 60)
    assert oracle.utility <= sol.utility + oracle.resolution_bound


def test_config_error_names_field():
    cfg = sgdrm.profile("paper-baseline")
    cfg["operators"][0]["coverage_target"] = 1.5
    with pytest.raises(sgdrm.ConfigError, match="operators.0.coverage_target"):
        sgdrm.run(cfg)


def test_pipeline_outputs(tmp_path):
    cfg = sgdrm.profile("fig1")
    cfg["sweep"]["values"] = [5, 8]
    code, paths = sgdrm.run_to(cfg, tmp_path)
    assert code == 0
    assert (tmp_path / "results.csv").exists()
    rows = (tmp_path / "results.csv").read_text().splitlines()
    assert len(rows) == 3
    results = sgdrm.run(cfg)
    assert [r["status"] for r in results] == ["ok", "ok"]
    assert results[0]["operators"][0]["energy"] < results[1]["operators"][0]["energy"]
