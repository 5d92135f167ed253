import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bipvkit.dataset import BuildingCategory
from bipvkit.errors import CorruptMaskError, InvalidParameterError, ValidationError
from bipvkit.masks import (
    ALL_BUILDINGS,
    GroundTruthMap,
    InstanceMask,
    RleMask,
    TilePrediction,
    empty_mask,
    filter_by_threshold,
    intersect_mask,
    load_ground_truth,
    load_prediction,
    pixel_count,
    rle_decode,
    rle_encode,
    save_ground_truth,
    save_prediction,
    union_mask,
)

grids = arrays(
    dtype=bool,
    shape=st.tuples(st.integers(1, 64), st.integers(1, 64)),
    elements=st.booleans(),
)


def test_encode_all_background():
    mask = rle_encode(np.zeros((3, 3), dtype=bool))
    assert mask.runs == (9,)


def test_encode_all_foreground():
    mask = rle_encode(np.ones((2, 2), dtype=bool))
    assert mask.runs == (0, 4)


def test_encode_single_center_pixel():
    grid = np.zeros((3, 3), dtype=bool)
    grid[1, 1] = True  # row-major index 4
    mask = rle_encode(grid)
    assert mask.runs == (4, 1, 4)


def test_decode_examples():
    assert not rle_decode(RleMask(3, 3, (9,))).any()
    assert rle_decode(RleMask(2, 2, (0, 4))).all()
    decoded = rle_decode(RleMask(3, 3, (4, 1, 4)))
    assert decoded[1, 1] and decoded.sum() == 1


def test_decode_rejects_bad_run_sum():
    with pytest.raises(CorruptMaskError):
        rle_decode(RleMask(3, 3, (4, 1)))


def test_decode_rejects_interior_zero_runs():
    with pytest.raises(CorruptMaskError):
        rle_decode(RleMask(3, 3, (4, 0, 5)))


def test_encode_rejects_empty():
    with pytest.raises(InvalidParameterError):
        rle_encode(np.zeros((0, 3), dtype=bool))


@given(grids)
@settings(max_examples=200)
def test_roundtrip(grid):
    assert np.array_equal(rle_decode(rle_encode(grid)), grid)


def test_pixel_count_examples():
    assert pixel_count(RleMask(3, 3, (9,))) == 0
    assert pixel_count(RleMask(2, 2, (0, 4))) == 4
    assert pixel_count(RleMask(3, 3, (4, 1, 4))) == 1


@given(grids)
def test_pixel_count_matches_dense(grid):
    assert pixel_count(rle_encode(grid)) == int(grid.sum())


def test_union_idempotent_and_disjoint():
    grid = np.zeros((4, 4), dtype=bool)
    grid[0, 0] = True
    a = rle_encode(grid)
    assert union_mask([a, a]) == a
    other = np.zeros((4, 4), dtype=bool)
    other[3, 3] = True
    b = rle_encode(other)
    assert pixel_count(union_mask([a, b])) == 2


def test_union_matches_dense_or():
    rng = np.random.default_rng(7)
    for _ in range(25):
        g1 = rng.random((8, 8)) < 0.4
        g2 = rng.random((8, 8)) < 0.4
        got = rle_decode(union_mask([rle_encode(g1), rle_encode(g2)]))
        assert np.array_equal(got, g1 | g2)


def test_union_dimension_mismatch_names_offender():
    a = rle_encode(np.zeros((4, 4), dtype=bool))
    b = rle_encode(np.zeros((4, 5), dtype=bool))
    with pytest.raises(ValidationError, match="mask 1"):
        union_mask([a, b])


@given(grids, st.data())
def test_inclusion_exclusion(g1, data):
    g2 = data.draw(arrays(dtype=bool, shape=g1.shape, elements=st.booleans()))
    a, b = rle_encode(g1), rle_encode(g2)
    lhs = pixel_count(union_mask([a, b])) + pixel_count(intersect_mask(a, b))
    assert lhs == pixel_count(a) + pixel_count(b)


def _prediction(scores):
    mask = rle_encode(np.ones((2, 2), dtype=bool))
    instances = tuple(
        InstanceMask(BuildingCategory.APARTMENT, s, mask, prompt_id="TP4") for s in scores
    )
    return TilePrediction("t", instances)


def test_filter_threshold_zero_keeps_all():
    pred = _prediction([0.0, 0.4, 1.0])
    assert len(filter_by_threshold(pred, 0.0).instances) == 3


def test_filter_threshold_one_keeps_only_perfect():
    pred = _prediction([0.99, 1.0])
    kept = filter_by_threshold(pred, 1.0).instances
    assert [i.score for i in kept] == [1.0]


def test_filter_threshold_closed_bound():
    pred = _prediction([0.2, 0.25, 0.3])
    kept = filter_by_threshold(pred, 0.25).instances
    assert [i.score for i in kept] == [0.25, 0.3]


def test_filter_threshold_monotone_count():
    pred = _prediction([0.1, 0.3, 0.5, 0.7, 0.9])
    counts = [len(filter_by_threshold(pred, t).instances) for t in np.linspace(0, 1, 21)]
    assert counts == sorted(counts, reverse=True)


def test_filter_threshold_out_of_range():
    with pytest.raises(InvalidParameterError):
        filter_by_threshold(_prediction([0.5]), 1.5)


def _label_grid():
    grid = np.zeros((8, 8), dtype=np.int8)
    grid[0:2, 0:4] = 1
    grid[3:5, 2:6] = 4
    grid[6:8, 6:8] = 6
    return grid


def test_ground_truth_partition():
    gt = GroundTruthMap.from_labels("t", _label_grid())
    total = sum(pixel_count(m) for m in gt.labels.values())
    assert total == 64
    gt.validate()


def test_ground_truth_overlap_rejected():
    gt = GroundTruthMap.from_labels("t", _label_grid())
    full = rle_encode(np.ones((8, 8), dtype=bool))
    broken = GroundTruthMap("t", 8, 8, {**gt.labels, 5: full})
    with pytest.raises(ValidationError, match="overlap"):
        broken.validate()


def test_ground_truth_buildings_mask():
    gt = GroundTruthMap.from_labels("t", _label_grid())
    assert pixel_count(gt.buildings_mask()) == int((_label_grid() > 0).sum())


def test_prediction_file_roundtrip(tmp_path):
    pred = TilePrediction(
        "t9",
        (
            InstanceMask(BuildingCategory.FACTORY, 0.8, RleMask(4, 4, (4, 2, 10)), "TP6"),
            InstanceMask(ALL_BUILDINGS, 0.5, RleMask(4, 4, (0, 16))),
        ),
    )
    path = tmp_path / "t9.json"
    save_prediction(pred, path)
    assert load_prediction(path) == pred


def test_ground_truth_file_roundtrip(tmp_path):
    gt = GroundTruthMap.from_labels("t", _label_grid())
    path = tmp_path / "t.json"
    save_ground_truth(gt, path)
    assert load_ground_truth(path) == gt


def test_prediction_score_out_of_range(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(
        '{"tile_id": "x", "instances": [{"category": 1, "score": 1.5,'
        ' "rle": {"width_px": 2, "height_px": 2, "runs": [4]}}]}'
    )
    with pytest.raises(ValidationError, match="score"):
        load_prediction(path)


def test_empty_mask_helper():
    m = empty_mask(5, 3)
    assert pixel_count(m) == 0 and m.total_px == 15
