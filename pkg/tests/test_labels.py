import numpy as np
import pytest

from rankprop import (Placement2D, Ranking, ValidationError, group_values,
                      placement_to_labels, ranking_to_labels)


def test_two_groups_hit_endpoints():
    lab = ranking_to_labels(Ranking([[0], [1]]), 4)
    assert lab.y[0] == -1.0 and lab.y[1] == 1.0
    assert lab.indicator[0] and lab.indicator[1]
    assert not lab.indicator[2] and not lab.indicator[3]
    assert lab.y[2] == 0.0 and lab.y[3] == 0.0
    assert lab.labeled_count == 2


def test_single_group_maps_to_zero():
    lab = ranking_to_labels(Ranking([[0, 1]]), 3)
    assert lab.y[0] == 0.0 and lab.y[1] == 0.0
    assert lab.indicator[0] and lab.indicator[1]
    assert lab.labeled_count == 2


def test_three_groups_with_tie():
    lab = ranking_to_labels(Ranking([[0], [1, 2], [3]]), 5)
    assert np.allclose(lab.y[:4], [-1.0, 0.0, 0.0, 1.0])
    assert lab.labeled_count == 4


def test_group_values_uniform_spacing():
    for G in range(2, 12):
        vals = group_values(G)
        assert vals[0] == -1.0 and vals[-1] == 1.0
        diffs = np.diff(vals)
        assert np.allclose(diffs, diffs[0])


def test_group_values_symmetric_about_zero():
    for G in range(1, 12):
        vals = np.asarray(group_values(G))
        assert np.allclose(vals, -vals[::-1])
        assert np.all(np.abs(vals) <= 1.0 + 1e-15)


def test_order_preserving_random_rankings():
    rng = np.random.default_rng(42)
    for _ in range(50):
        u = int(rng.integers(4, 40))
        n_ranked = int(rng.integers(2, u + 1))
        picked = rng.choice(u, n_ranked, replace=False)
        cuts = np.sort(rng.choice(
            np.arange(1, n_ranked), min(3, n_ranked - 1), replace=False))
        groups = [list(map(int, part))
                  for part in np.split(picked, cuts) if len(part)]
        lab = ranking_to_labels(Ranking(groups), u)
        prev = -np.inf
        for grp in groups:
            val = lab.y[grp[0]]
            assert np.allclose(lab.y[grp], val)
            assert val > prev
            prev = val


def test_duplicate_across_groups_rejected():
    with pytest.raises(ValidationError):
        ranking_to_labels(Ranking([[0], [1, 0]]), 3)


def test_duplicate_within_group_rejected():
    with pytest.raises(ValidationError):
        ranking_to_labels(Ranking([[1, 1], [2]]), 3)


def test_index_out_of_range_rejected():
    with pytest.raises(ValidationError):
        ranking_to_labels(Ranking([[0], [4]]), 3)


def test_empty_ranking_rejected():
    with pytest.raises(ValidationError):
        ranking_to_labels(Ranking([]), 3)


def test_placement_center_is_zero():
    lx, ly = placement_to_labels(Placement2D([(1, 0.5, 0.5)]), 3)
    assert lx.y[1] == 0.0 and ly.y[1] == 0.0
    assert lx.indicator[1] and ly.indicator[1]


def test_placement_corner_maps_to_scale_ends():
    lx, ly = placement_to_labels(Placement2D([(0, 0.0, 1.0)]), 2)
    assert lx.y[0] == -1.0 and ly.y[0] == 1.0


def test_placement_counts_both_dimensions():
    rng = np.random.default_rng(9)
    picked = rng.choice(2000, 25, replace=False)
    pts = [(int(i), float(x), float(y))
           for i, x, y in zip(picked, rng.uniform(size=25), rng.uniform(size=25))]
    lx, ly = placement_to_labels(Placement2D(pts), 2000)
    assert lx.labeled_count == 25 and ly.labeled_count == 25
    assert (~lx.indicator).sum() == 1975
    assert np.all(lx.y[~lx.indicator] == 0.0)


def test_placement_affine_map():
    for c in (0.0, 0.25, 0.5, 0.75, 1.0):
        lx, _ = placement_to_labels(Placement2D([(0, c, 0.0)]), 2)
        assert lx.y[0] == pytest.approx(2.0 * c - 1.0)


def test_placement_out_of_range_rejected():
    with pytest.raises(ValidationError):
        placement_to_labels(Placement2D([(0, 1.5, 0.5)]), 2)
    with pytest.raises(ValidationError):
        placement_to_labels(Placement2D([(0, 0.5, -0.1)]), 2)


def test_placement_duplicate_index_rejected():
    with pytest.raises(ValidationError):
        placement_to_labels(Placement2D([(0, 0.1, 0.1), (0, 0.9, 0.9)]), 2)


def test_assignment_bounds_enforced():
    rng = np.random.default_rng(1)
    for _ in range(30):
        u = int(rng.integers(3, 30))
        G = int(rng.integers(1, 6))
        picked = list(map(int, rng.choice(u, min(u, G), replace=False)))
        groups = [[i] for i in picked]
        lab = ranking_to_labels(Ranking(groups), u)
        assert np.all(np.abs(lab.y) <= 1.0)
        assert np.all(lab.y[~lab.indicator] == 0.0)
        assert lab.labeled_count == lab.indicator.sum()
