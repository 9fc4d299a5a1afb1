import cmath
import math

import numpy as np
import pytest

import fatou_atlas as fa


def test_family_identities():
    f = fa.family_fc(1.0)
    assert f.coeffs == [0, -2, 0]
    assert abs(fa.fc_free_critical(1.0) + 1) < 1e-12
    a = 0.3 + 0.4j
    g = fa.family_fa(a)
    assert abs(g(a) - a) < 1e-10
    assert abs(g.derivative(a) - 1) < 1e-10
    assert abs(fa.fa_resit_closed_form(0.5) - 97 / 49) < 1e-12


def test_singular_parameter_raises():
    with pytest.raises(fa.FatouError):
        fa.family_fa(0.0)


def test_critical_points_of_fc():
    c = 0.7 + 0.2j
    pts = sorted(fa.critical_points(fa.family_fc(c)), key=lambda p: abs(p[0]))
    expected = sorted([0, c, fa.fc_free_critical(c)], key=abs)
    for (z, m), w in zip(pts, expected):
        assert abs(z - w) < 1e-9 and m == 1


def test_angles():
    assert fa.map_angle("1/3", 2) == "2/3"
    cycles = fa.periodic_angles(2, 2)
    assert sorted(cycles) == [["1/3", "2/3"]]


def test_green_and_rays_for_z3():
    f = fa.Polynomial.power(3)
    assert abs(fa.green_function(f, 2.0) - math.log(2.0)) < 1e-9
    ray = fa.trace_external_ray(f, "0")
    assert ray["landing"] is not None
    assert abs(complex(*ray["landing"]) - 1) < 1e-5


def test_raster_and_tree():
    f = fa.Polynomial.power(3)
    r = fa.classify_grid(f, (0, 0, 4, 4), 128, 128)
    kinds = r.kinds()
    assert kinds.shape == (128, 128) and kinds.dtype == np.uint8
    disk = np.count_nonzero(kinds == 2) * r.cell_size ** 2
    assert abs(disk - math.pi) / math.pi < 0.05
    rep = fa.tree_report(f, r)
    assert rep["k_of_f"] == 0 and rep["maximality"] == "equal"


def test_parameter_classes():
    assert fa.classify_parameter("fc", 1.0) == "other-attracting"
    assert fa.classify_parameter("fc", 3.0 + 3.0j) == "escaping"


def test_shape_of_disk():
    n = 201
    y, x = np.mgrid[0:n, 0:n]
    h = 4.0 / n
    re = -2 + (x + 0.5) * h
    im = 2 - (y + 0.5) * h
    mask = (re ** 2 + im ** 2 < 1.0).astype(np.uint8)
    assert abs(fa.shape_of(mask, (0, 0, 4, 4), 0j) - 1) < 0.05
    assert abs(fa.shape_of(mask, (0, 0, 4, 4), 0.5 + 0j) - 3) < 0.15


def test_puzzle_pieces_triple():
    f = fa.Polynomial(3, [0.5, 0])
    p = fa.Puzzle(f, resolution=256, depth=2)
    tails = p.external_tails
    assert len(tails) == 2
    assert {fa.map_angle(t, 3) for t in tails} == set(tails)
    assert p.piece_counts() == [2, 6, 18]
    z = fa.julia_samples(f, 1)[0]
    nest = p.nest(z, 2)
    assert all(d == 1 for d in nest["degree_sequence"])
