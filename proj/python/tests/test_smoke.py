import math
import pathlib

import numpy as np
import pytest

import s2i

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures"


def test_formats_and_partitions():
    assert set(s2i.formats()) >= {"ntu25", "ucla20", "toyota13"}
    assert s2i.part_sizes("ntu25") == [5, 6, 6, 4, 4]
    assert s2i.part_sizes("toyota13") == [1, 3, 3, 3, 3]
    assert sorted(s2i.joint_order("ucla20")) == list(range(20))


def test_encode_decode_corners():
    rng = np.random.default_rng(0)
    seq = rng.uniform(-1, 1, size=(30, 25, 3))
    img = s2i.encode(seq, "ntu25")
    assert img.shape == (224, 224, 3)
    assert img.dtype == np.float32
    back = s2i.decode(img, 30, "ntu25")
    order = s2i.joint_order("ntu25")
    for t in (0, 29):
        for j in (order[0], order[-1]):
            np.testing.assert_allclose(back[t, j], seq[t, j], atol=1e-6)


def test_encode_rejects_wrong_joint_count():
    with pytest.raises(s2i.S2IError):
        s2i.encode(np.zeros((4, 13, 3)), "ntu25")


def test_load_sequence_fixture():
    seq = s2i.load_sequence(str(FIXTURES / "walk.skeleton"))
    assert seq.shape == (12, 25, 3)
    np.testing.assert_array_equal(seq[0, 0], [0.0, 0.0, 0.0])
    with pytest.raises(s2i.ParseError):
        s2i.load_sequence(str(FIXTURES / "truncated.skeleton"))


def test_masks():
    m = s2i.make_mask("random", 0.75, seed=3)
    assert m.shape == (14, 14) and m.sum() == 147
    j = s2i.make_mask("joint", 0.5, seed=3)
    assert (j == j[0:1, :]).all()


def test_losses_and_schedule():
    target = np.zeros((196, 768))
    pred = target.copy()
    pred[0] = 1.0
    mask = np.zeros((14, 14), dtype=bool)
    mask[0, 0] = True
    assert s2i.mae_loss(pred, target, mask) == pytest.approx(768.0)
    assert s2i.mae_loss(pred, target, mask, normalized=True) == pytest.approx(1.0)
    sched = s2i.schedule(1000)
    assert sched["beta"][0] == pytest.approx(1e-4)
    assert sched["alpha_bar"][0] == pytest.approx(0.9999, abs=1e-12)
    assert sched["alpha_bar"][-1] < 0.01
    assert s2i.cross_entropy(np.full(60, 1 / 60), 5) == pytest.approx(math.log(60), abs=1e-9)


def test_patchify_round_trip():
    img = np.random.default_rng(1).random((224, 224, 3), dtype=np.float32)
    p = s2i.patchify(img)
    assert p.shape == (196, 768)
    np.testing.assert_array_equal(p[0, :3], img[0, 0])
    np.testing.assert_array_equal(s2i.unpatchify(p), img)


def test_stats_and_normalize():
    a = np.zeros((4, 4, 3), dtype=np.float32)
    b = np.full((4, 4, 3), 2.0, dtype=np.float32)
    st = s2i.channel_stats([a, b])
    assert st["count"] == 32
    np.testing.assert_allclose(st["mean"], [1, 1, 1])
    np.testing.assert_allclose(st["std"], [1, 1, 1])
    n = s2i.normalize(b, st["mean"], st["std"])
    np.testing.assert_allclose(n, 1.0)
    np.testing.assert_allclose(s2i.denormalize(n, st["mean"], st["std"]), b)
