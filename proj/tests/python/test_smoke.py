from fractions import Fraction

import pytest

import reluexact as rx


def test_sawtooth_pieces_and_values():
    net = rx.sawtooth_net(2, 2)
    f = rx.extract_pwl(net)
    assert len(f["slopes"]) == 4 + 2  # four teeth in [0, 1] plus two flat ends
    assert rx.forward(net, ["1/4"]) == [Fraction(1)]
    assert rx.pwl_eval(f, Fraction(3, 8)) == Fraction(1, 2)


def test_flap_builder_round_trip():
    f = rx.sawtooth_pwl(3, 1)
    net = rx.from_pwl_2layer(f)
    for x in (Fraction(-1), Fraction(1, 7), Fraction(1, 2), Fraction(5, 3)):
        assert rx.forward(net, [x])[0] == rx.pwl_eval(f, x)


def test_l1_net_regions():
    z = {"format": "zonotope-v1", "n": 2, "generators": [["1/1", "0/1"], ["0/1", "1/1"]]}
    net = rx.support_net(z)
    assert rx.count_regions(net) == (4, 4)
    assert rx.forward(net, [1, 1]) == [2]
    assert rx.zonotope_support(z, [3, -4]) == 7
    assert len(rx.zonotope_vertices(z)) == 4


def test_zonotope_family_shape():
    z = rx.random_zonotope(3, 2, 2)
    net = rx.zonotope_family_net(z, 2, 1)
    assert len(net["layers"]) == 2
    assert sum(len(layer["bias"]) for layer in net["layers"]) == 6


def test_training_examples():
    x, y = [0, 1, 2, 3], [0, 1, 2, 2]
    r = rx.train_global(x, y, width=2)
    assert r["loss"] <= 1e-10
    assert rx.empirical_loss(r["network"], x, y) <= 1e-10
    r1 = rx.train_global_1d(x, y, width=2)
    assert abs(r1["loss"] - r["loss"]) <= 2e-8
    fit = rx.fit_pwl_1d(x, y, width=2)
    assert fit["loss"] <= 1e-10
    assert r["certificate"]["subproblems_solved"] + r["certificate"]["pruned"] == r["certificate"]["tuples_total"]


def test_dichotomies_square():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1)]
    d = rx.enumerate_dichotomies(pts)
    assert len(d) == 14
    assert [0, 2] not in d


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        rx.sawtooth_net(1, 2)
    with pytest.raises(ValueError):
        rx.train_global([], [], width=1)
    with pytest.raises(RuntimeError):
        rx.count_regions(rx.random_network(1, 2, [6, 6]), max_cells=3)
