import itertools
import math

import numpy as np
import pytest

from peria.cayley import (
    FULL,
    S_MODE,
    ParabolicCoset,
    contraction_profile,
    element_order,
    explore_ball,
    generators,
    hyperplane_type_and_label,
    parabolic_gate,
    parabolic_projection,
    skewer_witness,
    skewer_witnesses,
)
from peria.errors import PeriaError, RadiusError, ResourceBoundError
from peria.words import engine, format_word, parse_word

from conftest import pres


def test_sphere_sizes():
    assert explore_ball(pres("dinf"), (), 5).sphere_sizes() == [1, 2, 2, 2, 2, 2]
    assert explore_ball(pres("i2_5"), (), 6).sphere_sizes() == [1, 2, 2, 2, 2, 1, 0]
    assert explore_ball(pres("z2"), (), 4, S_MODE).sphere_sizes() == [1, 4, 8, 12, 16]
    assert explore_ball(pres("f2"), (), 4, S_MODE).sphere_sizes() == [1, 4, 12, 36, 108]
    # full mode: every nonidentity element of a vertex group is a generator
    assert explore_ball(pres("z6"), (), 1).sphere_sizes() == [1, 5]
    assert explore_ball(pres("z6"), (), 3, S_MODE).sphere_sizes() == [1, 2, 2, 1]


def test_generators_need_a_cap_for_infinite_vertex_groups():
    with pytest.raises(PeriaError, match="exponent cap"):
        generators(pres("z"), FULL)
    assert generators(pres("z"), FULL, exponent_cap=2) == [(0, 1), (0, -1), (0, 2), (0, -2)]
    with pytest.raises(PeriaError, match="opaque"):
        generators(pres("ex-periagroup"), S_MODE)


def test_ball_bound():
    with pytest.raises(ResourceBoundError):
        explore_ball(pres("f2"), (), 6, S_MODE, bound=100)


@pytest.mark.parametrize("name, mode", [("c4_racg", FULL), ("pentagon_racg", FULL), ("raag_path", S_MODE),
                                         ("z2_free_z3", FULL), ("z2_x_z3", FULL), ("f2", S_MODE)])
def test_graph_product_balls_are_isometric(name, mode):
    p = pres(name)
    b = explore_ball(p, (), 3, mode)
    assert np.array_equal(b.graph.dist, b.ambient_dist)
    assert b.metric_graph is b.graph


@pytest.mark.parametrize("name, mode", [("i2_5", FULL), ("ex-periagroup-z6", FULL), ("affine_a2", FULL),
                                         ("c4_racg", FULL), ("mixed_s3_z3", S_MODE)])
def test_ambient_metric_is_relative_word_length(name, mode):
    p = pres(name)
    b = explore_ball(p, (), 2, mode)
    d = b.ambient_dist
    rng = np.random.default_rng(3)
    for i, j in rng.integers(0, len(b), size=(150, 2)):
        assert d[i, j] == b.word_length(b.relative(int(i), int(j)))
        assert d[i, j] == d[j, i]


def test_ball_about_another_centre_is_a_translate():
    p = pres("pentagon_racg")
    g = parse_word(p, "a c")
    b0 = explore_ball(p, (), 2)
    b1 = explore_ball(p, g, 2)
    assert len(b0) == len(b1)
    eng = engine(p)
    assert {eng.canonical(g + w) for w in b0.words} == set(b1.words)


def test_hyperplane_types():
    b = explore_ball(pres("i2_5"), (), 5)
    hs = b.hyperplanes()
    assert hs.count == 5
    assert not any(hyperplane_type_and_label(b, j).right for j in range(hs.count))
    b = explore_ball(pres("c4_racg"), (), 3)
    hs = b.hyperplanes()
    for j in range(hs.count):
        t = hyperplane_type_and_label(b, j)
        assert len(t.labels) == 1 and t.right and t.carrier_in_star_coset
    b = explore_ball(pres("ex-periagroup-z6"), (), 2)
    hs = b.hyperplanes()
    types = [hyperplane_type_and_label(b, j) for j in range(hs.count)]
    assert any(t.right for t in types) and any(not t.right for t in types)
    # edges of v3 and v4 give right-angled hyperplanes
    assert all(t.right for t in types if t.labels in (("v3",), ("v4",)))


def test_hyperplane_errors():
    with pytest.raises(PeriaError):
        explore_ball(pres("z6"), (), 3, S_MODE).hyperplanes()
    with pytest.raises(PeriaError):
        explore_ball(pres("z"), (), 2, FULL, exponent_cap=2).hyperplanes()
    b = explore_ball(pres("dinf"), (), 2)
    with pytest.raises(PeriaError):
        hyperplane_type_and_label(b, 99)


def test_parabolic_projection():
    p = pres("pentagon_racg")
    eng = engine(p)
    for text in ["a c b d", "c e a", "b d b e a c", "a"]:
        h = parse_word(p, text)
        a, rest = parabolic_projection(p, h, {0, 2})
        assert {v for v, _ in a} <= {0, 2}
        assert eng.canonical(a + rest) == eng.canonical(h)
        assert len(eng.canonical(h)) == len(a) + len(rest)
        # nothing of Lambda can be pulled off the front of the remainder
        assert parabolic_projection(p, rest, {0, 2})[0] == ()


def test_parabolic_gates():
    p = pres("dinf")
    b = explore_ball(p, (), 4)
    x = b.index[parse_word(p, "x1 x2 x1")]
    res = parabolic_gate(b, x, ParabolicCoset((), frozenset({1})))
    assert b.words[res.gate] == ()
    p = pres("c4_racg")
    b = explore_ball(p, (), 3)
    x = b.index[engine(p).canonical(parse_word(p, "a b"))]
    res = parabolic_gate(b, x, ParabolicCoset((), frozenset({1})))
    assert format_word(p, b.words[res.gate]) == "b"
    b = explore_ball(p, (), 1)
    with pytest.raises(RadiusError):
        parabolic_gate(b, 1, ParabolicCoset(parse_word(p, "b d"), frozenset({0})))


def test_element_order():
    assert element_order(pres("i2_5"), parse_word(pres("i2_5"), "s t")) == 5
    assert element_order(pres("i2_3"), parse_word(pres("i2_3"), "s")) == 2
    assert math.isinf(element_order(pres("dinf"), parse_word(pres("dinf"), "x1 x2")))
    assert element_order(pres("z6"), ()) == 1


def test_contraction_profile_small():
    p = pres("f2")
    prof = contraction_profile(p, parse_word(p, "a b"), 4)
    assert not prof.bounded_orbit
    assert all(r.max_projection_diameter <= 2 for r in prof.rows)
    p = pres("z2")
    prof = contraction_profile(p, parse_word(p, "a b"), 4)
    assert prof.rows[-1].max_projection_diameter >= 3
    p = pres("i2_5")
    assert contraction_profile(p, parse_word(p, "s t"), 2).bounded_orbit


def test_skewer_witnesses_small():
    p = pres("f2")
    rep = skewer_witness(p, parse_word(p, "a b"), 3)
    assert rep.witness is not None and rep.witness.L == 0 and rep.witness.stable
    p = pres("z2")
    ws = skewer_witnesses(p, parse_word(p, "a b"), 3)
    assert not any(w.stable for w in ws)
    p = pres("dinf")
    rep = skewer_witness(p, parse_word(p, "x1 x2"), 3)
    assert rep.witness is not None
