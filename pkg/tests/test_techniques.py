import math

import numpy as np
import pytest

from evoart.canvas import Canvas
from evoart.genome import Genome, TechniqueGene, default_registry, parse, random_genome
from evoart.noise import NoiseField, angle_at, angle_from_noise, noise_value
from evoart.techniques import (draw_basic_trig, draw_circle_packing, draw_flow_field,
                               draw_flow_field_2, express, gene_rngs, pack_circles,
                               time_techniques, write_timing_csv)


def fresh(w=64, h=64):
    return Canvas(w, h)


def drawn(canvas):
    return (canvas.pixels != np.array(canvas.background, dtype=np.uint8)).any(axis=2)


def test_fresh_canvas_is_background():
    c = Canvas(10, 7, (1, 2, 3))
    assert c.pixels.shape == (7, 10, 3)
    assert (c.pixels == [1, 2, 3]).all()


def test_plot_clips():
    c = fresh(5, 5)
    c.plot([-1, 2, 5, 100], [0, 2, 2, -7], (255, 0, 0))
    assert drawn(c).sum() == 1


@pytest.mark.parametrize("seed", [0, 1, 42])
def test_noise_zero_on_lattice(seed):
    f = NoiseField(seed=seed, octaves=1, scale=1.0)
    for x, y in [(0, 0), (3, 5), (-2, 7), (255, 1), (1000, -3)]:
        assert noise_value(f, x, y) == 0.0


def test_noise_deterministic():
    f = NoiseField(seed=3, octaves=4, falloff=0.6, scale=0.05)
    assert noise_value(f, 12.3, 4.5) == noise_value(NoiseField(3, 4, 0.6, 0.05), 12.3, 4.5)


def test_noise_range_sampled():
    rng = np.random.default_rng(0)
    f = NoiseField(seed=9, octaves=1, scale=0.05)
    xs, ys = rng.uniform(-500, 500, 10_000), rng.uniform(-500, 500, 10_000)
    v = f.value(xs, ys)
    assert np.all((v >= -1) & (v <= 1))
    assert v.min() < -0.2 and v.max() > 0.2


@pytest.mark.parametrize("octaves,falloff", [(1, 1.0), (3, 0.5), (6, 0.2), (6, 1.0)])
def test_noise_range_over_domain(octaves, falloff):
    rng = np.random.default_rng(octaves)
    f = NoiseField(seed=1, octaves=octaves, falloff=falloff, scale=0.03)
    v = f.value(rng.uniform(0, 1000, 5000), rng.uniform(0, 1000, 5000))
    assert np.abs(v).max() <= 1.0


@pytest.mark.parametrize("n,angle", [(0.0, 0.0), (1.0, 2 * math.pi), (-1.0, -2 * math.pi),
                                     (0.5, math.pi)])
def test_angle_map(n, angle):
    assert angle_from_noise(n) == pytest.approx(angle)


def test_angle_at_uses_noise():
    f = NoiseField(seed=2, octaves=2, scale=0.02)
    assert angle_at(f, 7.5, 3.25) == pytest.approx(noise_value(f, 7.5, 3.25) * 2 * math.pi)


def test_flow_field_zero_particles():
    c = fresh()
    draw_flow_field(c, dict(particles=0), np.random.default_rng(0))
    assert not drawn(c).any()


def test_flow_field_constant_angle_is_horizontal():
    c = fresh(80, 80)
    draw_flow_field(c, dict(particles=1, steps=30, step_size=1.0, scale=1e-12),
                    np.random.default_rng(3))
    rows = np.nonzero(drawn(c).any(axis=1))[0]
    assert len(rows) == 1
    cols = np.nonzero(drawn(c)[rows[0]])[0]
    assert np.all(np.diff(cols) == 1)


@pytest.mark.parametrize("draw,params", [
    (draw_flow_field, dict(particles=300, steps=50)),
    (draw_flow_field_2, dict(spacing=8, length=40, thickness=3)),
    (draw_circle_packing, dict(attempts=300)),
    (draw_basic_trig, dict(curves=4, thickness=3)),
])
def test_techniques_deterministic(draw, params):
    a, b = fresh(), fresh()
    draw(a, params, np.random.default_rng(17))
    draw(b, params, np.random.default_rng(17))
    assert a == b
    assert drawn(a).any()


def test_flow_field_2_grid_larger_than_canvas():
    c = fresh(20, 20)
    draw_flow_field_2(c, dict(spacing=30, length=20, scale=1e-12), np.random.default_rng(0))
    # one seed at most: one horizontal streamline, a single drawn row
    assert len(np.nonzero(drawn(c).any(axis=1))[0]) <= 1


def test_flow_field_2_default_renders():
    c = fresh(256, 256)
    draw_flow_field_2(c, None, np.random.default_rng(0))
    assert drawn(c).sum() > 0


def test_circle_packing_zero_attempts():
    c = fresh()
    circles = draw_circle_packing(c, dict(attempts=0), np.random.default_rng(0))
    assert len(circles) == 0 and not drawn(c).any()


def test_circle_packing_huge_radius():
    circles = pack_circles(40, 40, 500, 60, 100, np.random.default_rng(0))
    assert len(circles) <= 1


def _overlapping_pairs(circles):
    bad = 0
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            xi, yi, ri = circles[i]
            xj, yj, rj = circles[j]
            if math.hypot(xi - xj, yi - yj) < ri + rj:
                bad += 1
    return bad


def test_circle_packing_no_overlap_seeded():
    for seed in range(20):
        circles = pack_circles(120, 90, 800, 2, 30, np.random.default_rng(seed))
        assert len(circles) > 5
        assert _overlapping_pairs(circles) == 0
        assert np.all(circles[:, 2] <= 30) and np.all(circles[:, 2] >= 2)


def test_basic_trig_zero_amplitude_is_line():
    c = fresh(100, 60)
    draw_basic_trig(c, dict(curves=3, amplitude=0.0, offset=0.5, thickness=1),
                    np.random.default_rng(0))
    rows = np.nonzero(drawn(c).any(axis=1))[0]
    assert rows.tolist() == [30]
    assert drawn(c)[30].all()


def test_basic_trig_zero_curves():
    c = fresh()
    draw_basic_trig(c, dict(curves=0), np.random.default_rng(0))
    assert not drawn(c).any()


def test_extreme_parameters_stay_clipped():
    rng = np.random.default_rng(0)
    for w, h in [(1, 1), (3, 200), (200, 3)]:
        c = fresh(w, h)
        draw_flow_field(c, dict(particles=200, steps=100, step_size=3.0), rng)
        draw_flow_field_2(c, dict(spacing=8, length=100, thickness=4), rng)
        draw_circle_packing(c, dict(attempts=200, min_radius=0, max_radius=100), rng)
        draw_basic_trig(c, dict(curves=12, amplitude=0.5, offset=1.0, thickness=6), rng)
        assert c.pixels.shape == (h, w, 3)


def test_express_unbounded_budget():
    reg = default_registry()
    g = random_genome(reg, np.random.default_rng(1), 4, 4)
    _, rep = express(g, (64, 64), math.inf, registry=reg)
    assert rep.genes_expressed == 4 and not rep.truncated
    assert len(rep.per_gene_time) == 4


def test_express_tiny_budget_expresses_one_gene():
    reg = default_registry()
    g = random_genome(reg, np.random.default_rng(2), 3, 3)
    _, rep = express(g, (64, 64), 1e-9, registry=reg)
    assert rep.genes_expressed == 1 and rep.truncated


def test_express_deterministic():
    reg = default_registry(exclude=["flow-field"])
    g = random_genome(reg, np.random.default_rng(3), 5, 5)
    a, ra = express(g, (96, 96), seed=7, registry=reg)
    b, rb = express(g, (96, 96), seed=7, registry=reg)
    assert a == b and ra.genes_expressed == rb.genes_expressed


def test_express_seed_changes_render():
    reg = default_registry()
    g = parse("circle-packing:1,400,3,30", reg)
    a, _ = express(g, (64, 64), seed=1, registry=reg)
    b, _ = express(g, (64, 64), seed=2, registry=reg)
    assert a != b


class SteppedClock:
    def __init__(self, times):
        self.times = list(times)

    def __call__(self):
        return self.times.pop(0)


def test_express_synthetic_clock_contract():
    reg = default_registry()
    g = random_genome(reg, np.random.default_rng(4), 5, 5)
    canvas, rep = express(g, (64, 64), 2.0, clock=SteppedClock([0.0, 1.0, 2.5, 99, 99, 99]),
                          registry=reg)
    assert rep.genes_expressed == 2 and rep.truncated
    assert rep.per_gene_time == [1.0, 1.5]


def test_gene_streams_independent_of_truncation():
    reg = default_registry()
    g = random_genome(reg, np.random.default_rng(5), 4, 4)
    a = [r.random() for r in gene_rngs(g, 3)]
    b = [r.random() for r in gene_rngs(g, 3)]
    assert a == b and len(set(a)) == 4


def test_timing_single_invocation(tmp_path):
    reg = default_registry()
    rows = time_techniques(reg, 1, (64, 64), seed=0)
    assert [r.technique for r in rows] == reg.names
    for r in rows:
        assert r.total_ms == r.mean_ms
    write_timing_csv(rows, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "technique,invocations,total_ms,mean_ms"


def test_timing_parameter_sequence_deterministic():
    reg = default_registry()
    a = time_techniques(reg, 3, (48, 48), seed=5)
    b = time_techniques(reg, 3, (48, 48), seed=5)
    assert [r.genes for r in a] == [r.genes for r in b]


def test_timing_rejects_zero():
    with pytest.raises(ValueError):
        time_techniques(default_registry(), 0)


def test_expression_unknown_technique():
    from evoart.genome import Registry, TechniqueDescriptor
    from evoart.techniques import ExpressionError
    reg = Registry([TechniqueDescriptor("mystery")])
    with pytest.raises(ExpressionError):
        express(Genome((TechniqueGene("mystery"),)), (8, 8), registry=reg)
