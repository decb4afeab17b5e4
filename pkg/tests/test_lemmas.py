from fractions import Fraction as F

import pytest

from nidgames import lemmas


def test_small_scale_checks_pass():
    for rep in lemmas.run_all(["oscillations-help", "main-help", "high-ratio", "upperbound"], seed=1, scale=0.05):
        assert rep.ok, (rep.name, rep.counterexamples)
        assert rep.trials > 0


def test_oscillation_oracle_small():
    rep = lemmas.check_oscillation_oracle(max_len=5, random_trials=50, random_len=8)
    assert rep.ok and rep.trials == sum(3**k for k in range(6)) + 50


def test_interleaved_doubling_tv():
    # variation 10 at m = 2^16, against a bound of 2 ln m
    f = lemmas.interleaved_doubling(1 << 16)
    assert f


def test_claim_worst_case_reports_the_gap():
    rep = lemmas.check_claim_worst_case()
    assert not rep.ok
    assert rep.info["f_prev_upper"] == "16/23" and rep.info["f_mid_lower"] == "10/17"


def test_h_levels_lower_bound():
    rep = lemmas.check_h_levels(ns=(2**16,), eps_values=(F(0),))
    assert rep.ok
    info = rep.info[(2**16, "0")]
    assert info["levels"] >= int(info["r"])


def test_unknown_check():
    with pytest.raises(KeyError):
        lemmas.run_all(["nope"])
