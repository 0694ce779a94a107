import cmath
import json
import math

import pytest

import trapwave as tw


def test_special_functions():
    h0 = tw.cyl_hankel1(0, 5.0)
    assert abs(h0 - complex(-0.1775967713143383, -0.3085176252490338)) < 1e-14
    assert tw.airy_neg_zeros(2)[0] == pytest.approx(2.33810741045977, abs=1e-12)
    with pytest.raises(ValueError):
        tw.cyl_bessel_j(0.3, 1.0)


def test_dirichlet_root():
    d = tw.ScattererSpec.dirichlet(1.0)
    assert tw.count_in_box(d, 1, -0.5, 0.5, -1.5, -0.5) == 1
    assert abs(tw.refine_resonance(d, 1, -0.1 - 0.9j) + 1j) < 1e-10


def test_catalog_and_exclusion():
    ball = tw.ScattererSpec.penetrable(1.0, 0.5)
    assert tw.is_trapping(ball)
    cat = tw.find_resonances(ball, 12.0, 2.0)
    assert len(cat) > 0
    assert all(r.multiplicity == 2 * r.ell + 1 for r in cat.entries)
    first = json.loads(cat.to_jsonl().splitlines()[0])
    assert set(first) == {"re", "im", "ell", "multiplicity", "residual"}
    ex = tw.exclusion_set(cat, delta=0.5)
    assert ex["measure"] + ex["tail_bound"] <= 0.5


def test_resolvent_bounds():
    norm, _ = tw.resolvent_norm(tw.ScattererSpec.free_space(), 8.0)
    assert 0 < norm < 1
    z = 1.2 + 0.5j
    assert tw.semiclassical_resolvent_norm(tw.ScattererSpec.dirichlet(1.0), z, 0.2) * z.imag <= 1.01
    with pytest.raises(ValueError):
        tw.resolvent_norm(tw.ScattererSpec.free_space(), 2.0 - 0.1j)


def test_layer_norms_agree():
    a, ap = tw.layer_inverse_norms("circle", 1.0, 0.0, 5.0, 256)
    assert a == pytest.approx(ap, rel=1e-3)


def test_run_command(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scatterer": {"kind": "free"}, "bogus": 1}))
    assert tw.run_command("sweep", str(cfg), str(tmp_path / "out")) == 2
