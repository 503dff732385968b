import math

import pytest
import sympy as sp

from qclone.task1 import (
    Example1Params,
    advantage_gaps,
    best_no_cloning,
    run_example1,
    run_example1_mc,
    score_cloning,
    score_strategy1,
    score_strategy2,
)


def P(M=2, d=2, N=1, **kw):
    return Example1Params(M=M, d=d, N=N, **kw)


def test_params_validation():
    with pytest.raises(ValueError):
        P(M=2, N=2)
    with pytest.raises(ValueError):
        P(d=1)
    with pytest.raises(ValueError):
        P(samples=0)


def test_strategy1_examples():
    assert score_strategy1(P()) == pytest.approx(0.75)
    assert score_strategy1(P(M=3, d=4)) == pytest.approx(0.5)
    assert abs(score_strategy1(P(d=10**6)) - 0.5) < 1e-5


def test_strategy2_examples():
    assert score_strategy2(P()) == pytest.approx(2 / 3)
    assert score_strategy2(P(d=4)) == pytest.approx(0.4)
    assert score_strategy2(P(M=4, d=2, N=3)) == pytest.approx(0.8)


def test_cloning_examples():
    assert score_cloning(P()) == pytest.approx(5 / 6)
    assert score_cloning(P(M=3, d=4)) == pytest.approx(0.6)
    assert score_cloning(P()) > score_strategy1(P()) and score_cloning(P()) > score_strategy2(P())


def test_single_run_cloning_score_formula():
    for M in range(2, 7):
        for d in range(2, 9):
            assert abs(score_cloning(P(M, d)) - (2 * M + d - 1) / (M * (d + 1))) < 1e-15


def test_cloning_dominates_everywhere():
    for M in range(2, 7):
        for d in range(2, 9):
            for N in range(1, M):
                p = P(M, d, N)
                assert score_cloning(p) > score_strategy1(p)
                assert score_cloning(p) > score_strategy2(p)
                assert best_no_cloning(p) == max(score_strategy1(p), score_strategy2(p))


def test_gap_closed_forms_symbolically():
    M, d = sp.symbols("M d", positive=True)
    f_clone = (2 * M + d - 1) / (M * (d + 1))
    f1 = (1 + (M - 1) / d) / M
    f2 = 2 / (d + 1)
    assert sp.simplify(f_clone - f1 - (M - 1) * (d - 1) / (M * d * (d + 1))) == 0
    assert sp.simplify(f_clone - f2 - (d - 1) / (M * (d + 1))) == 0


def test_gap_examples():
    g1, g2 = advantage_gaps(2, 2)
    assert g1 == pytest.approx(1 / 12) and g2 == pytest.approx(1 / 6)
    assert advantage_gaps(10**9, 3)[1] < 1e-9
    assert advantage_gaps(2, 1) == (0, 0)
    for M in range(2, 7):
        for d in range(2, 9):
            g1, g2 = advantage_gaps(M, d)
            p = P(M, d)
            assert abs(g1 - (score_cloning(p) - score_strategy1(p))) < 1e-12
            assert abs(g2 - (score_cloning(p) - score_strategy2(p))) < 1e-12


def test_mc_cloning_score_is_exact_per_sample():
    emp = run_example1_mc(P(samples=100, seed=3))
    assert abs(emp["mc_estimate"] - 5 / 6) < 1e-10
    assert emp["mc_max_deviation"] < 1e-10


def test_mc_random_guess_baseline():
    emp = run_example1_mc(P(samples=10**4, seed=0))
    assert abs(emp["random_guess"] - 0.5) < 0.02
    assert abs(emp["random_guess"] - 0.5) < 5 * emp["random_guess_stderr"]
    assert abs(emp["mc_f1_estimate"] - 0.75) < 0.02


def test_mc_qutrit_three_branches():
    emp = run_example1_mc(P(M=3, d=3, samples=200, seed=1))
    assert abs(emp["mc_estimate"] - score_cloning(P(M=3, d=3))) < 1e-10
    # |<chi|phi>|^2 ~ Beta(1, 2): variance 1/18; 200 samples x 2 guessed branches
    assert abs(emp["random_guess"] - 1 / 3) < 5 * math.sqrt(1 / 18 / 400)


def test_mc_reproducible_per_shard_count():
    a = run_example1_mc(P(samples=300, seed=5), jobs=1)
    assert a == run_example1_mc(P(samples=300, seed=5), jobs=1)
    b = run_example1_mc(P(samples=300, seed=5), jobs=3)
    assert b == run_example1_mc(P(samples=300, seed=5), jobs=3)
    assert a["random_guess"] != b["random_guess"]


def test_mc_size_limit():
    with pytest.raises(ValueError):
        run_example1_mc(P(M=5, d=6, samples=1))


def test_report_for_multi_run():
    rep = run_example1(P(M=4, d=3, N=2), monte_carlo=True)
    assert rep.empirical == {}
    assert rep.gap1 == pytest.approx(score_cloning(P(4, 3, 2)) - score_strategy1(P(4, 3, 2)))
    for v in (rep.f1_bar, rep.f2_bar, rep.f_cloning):
        assert 1 / 3 <= v <= 1
