import math

import pytest

import bdloss


def test_symmetric_lovasz_value():
    f = bdloss.SetFunction.symmetric([0.0, 1.0, 1.0])
    r = bdloss.lovasz_hinge(f, [1, 1], [-1.0, -2.0])
    assert r["value"] == pytest.approx(3.0)


def test_slack_exact_hamming():
    g = bdloss.SetFunction.symmetric([0.0, 1.0, 2.0])
    r = bdloss.slack_rescale_exact(g, [1, 1], [0.0, 0.0])
    assert r["value"] == pytest.approx(2.0)


def test_dice_neither_sub_nor_supermodular():
    y = [1, 1, 1, -1, -1, -1]
    rep = bdloss.check_structure(bdloss.dice_as_setfn(y))
    assert not rep["submodular"] and not rep["supermodular"]
    assert rep["submodular_witnesses"] and rep["supermodular_witnesses"]
    assert bdloss.dice_loss([1, 1, -1], [-1, 1, 1]) == pytest.approx(0.5)


def test_decompose_supermodular():
    l = bdloss.SetFunction.dense([0.0, 1.0, 1.0, 3.0])
    d = bdloss.decompose(l)
    assert d.g_star([0, 1]) == pytest.approx(1.0)
    assert d.f_star([0, 1]) == pytest.approx(2.0)
    assert bdloss.verify_decomposition(d, l)["ok"]


def test_train_and_evaluate():
    train, test = bdloss.synth_generate(seed=3, bags_train=30, bags_test=30, p=6)
    assert len(train) == 30 and len(train[0]["y"]) == 6
    out = bdloss.train(train, loss="dice", surrogate="bd", C=1.0)
    assert out["converged"]
    mean, se = bdloss.evaluate(out["model"], test, "dice")
    assert 0.0 <= mean <= 1.0 and se >= 0.0
    assert all(row["gap"] >= -1e-8 for row in out["trace"])


def test_validation_errors():
    with pytest.raises(ValueError):
        bdloss.SetFunction.dense([1.0, 2.0])
    with pytest.raises(ValueError):
        bdloss.dice_loss([-1, -1], [1, -1])
    assert math.isfinite(bdloss.dice_gain_curves(10, 8, 5)[1][0])
