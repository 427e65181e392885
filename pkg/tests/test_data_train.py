import json
import math

import numpy as np
import pytest
import torch

from mycloth.errors import LoadError, ParseError, ValidationError
from mycloth.traineval import (
    TrainConfig,
    evaluate,
    load_checkpoint,
    load_viton,
    lr_at_epoch,
    make_toy_dataset,
    model_inference,
    train,
)
from mycloth.tryon import ModelConfig

TINY_TRAIN_MODEL = ModelConfig(
    num_scales=2,
    pose_channels=3,
    encoder_channels=(8, 16),
    pyramid_channels=16,
    afe_hidden_dims=(16, 16, 8, 8),
    gen_hidden_dims=(8, 8, 8),
)


# -- toy dataset ------------------------------------------------------------

def test_toy_dataset_deterministic():
    a = make_toy_dataset(4, seed=7)
    b = make_toy_dataset(4, seed=7)
    for i in range(4):
        sa, sb = a.get(i), b.get(i)
        assert torch.equal(sa.cloth_image, sb.cloth_image)
        assert torch.equal(sa.person_image, sb.person_image)
        assert torch.equal(sa.pose_map, sb.pose_map)
        assert torch.equal(sa.agnostic_image, sb.agnostic_image)
        assert torch.equal(sa.ground_truth, sb.ground_truth)


def test_toy_dataset_seed_sensitivity():
    a = make_toy_dataset(2, seed=1)
    b = make_toy_dataset(2, seed=2)
    assert not torch.equal(a.get(0).cloth_image, b.get(0).cloth_image)


def test_toy_samples_satisfy_invariants():
    ds = make_toy_dataset(4, seed=3)
    for i in range(len(ds)):
        s = ds.get(i)  # constructor validates ranges and divisibility
        assert s.cloth_image.shape == (3, 64, 64)
        assert s.ground_truth is not None


def test_toy_ground_truth_is_cloth_on_person():
    ds = make_toy_dataset(1, seed=5)
    s = ds.get(0)
    mask = s.garment_mask().bool().squeeze(0)
    # inside the torso box the ground truth differs from the person (new cloth)
    assert mask.any()
    # outside the torso box the ground truth is exactly the person
    outside = ~mask
    assert torch.equal(s.ground_truth[:, outside], s.person_image[:, outside])


def test_sample_range_validation():
    from mycloth.traineval.data import TryOnSample

    good = torch.zeros(3, 64, 64)
    with pytest.raises(ValidationError):
        TryOnSample(cloth_image=good * 0 + 2, person_image=good,
                    pose_map=good, agnostic_image=good)
    with pytest.raises(ValidationError):
        TryOnSample(cloth_image=torch.zeros(3, 60, 60), person_image=torch.zeros(3, 60, 60),
                    pose_map=torch.zeros(3, 60, 60), agnostic_image=torch.zeros(3, 60, 60))


# -- viton layout -----------------------------------------------------------

def write_viton_fixture(root, n=3):
    from PIL import Image

    (root / "train" / "image").mkdir(parents=True)
    (root / "train" / "cloth").mkdir(parents=True)
    (root / "train" / "agnostic").mkdir(parents=True)
    (root / "train" / "pose").mkdir(parents=True)
    lines = []
    rng = np.random.default_rng(0)
    for i in range(n):
        pid, cid = f"p{i}.png", f"c{i}.png"
        for sub, name in (("image", pid), ("cloth", cid), ("agnostic", f"p{i}.png")):
            arr = rng.integers(0, 256, size=(32, 24, 3), dtype=np.uint8)
            Image.fromarray(arr).save(root / "train" / sub / name)
        (root / "train" / "pose" / f"p{i}.json").write_text(
            json.dumps({"keypoints": [[12, 16, 1]] * 18}))
        lines.append(f"{pid} {cid}")
    (root / "train_pairs.txt").write_text("\n".join(lines))


def test_load_viton_fixture(tmp_path):
    write_viton_fixture(tmp_path, n=3)
    ds = load_viton(tmp_path, "train", resolution=(64, 64))
    assert len(ds) == 3
    s = ds.get(0)
    assert s.cloth_image.shape == (3, 64, 64)
    assert s.pose_map.shape == (18, 64, 64)


def test_load_viton_missing_file(tmp_path):
    write_viton_fixture(tmp_path, n=2)
    missing = tmp_path / "train" / "image" / "p1.png"
    missing.unlink()
    with pytest.raises(LoadError) as err:
        load_viton(tmp_path, "train")
    assert "p1.png" in str(err.value)


def test_load_viton_malformed_pair_line(tmp_path):
    write_viton_fixture(tmp_path, n=1)
    (tmp_path / "train_pairs.txt").write_text("p0.png c0.png\nonly-one-column\n")
    with pytest.raises(ParseError) as err:
        load_viton(tmp_path, "train")
    assert ":2" in str(err.value)


# -- lr schedule ------------------------------------------------------------

def test_lr_schedule_paper_values():
    config = TrainConfig()
    assert lr_at_epoch(config, 49) == 5e-5
    assert lr_at_epoch(config, 50) == pytest.approx(5e-6)
    assert lr_at_epoch(config, 100) == pytest.approx(5e-7)


def test_lr_schedule_exact_formula():
    config = TrainConfig()
    for epoch in range(201):
        assert lr_at_epoch(config, epoch) == 5e-5 * 0.1 ** (epoch // 50)


# -- training ---------------------------------------------------------------

def small_train_config(**kw):
    defaults = dict(batch_size=2, epochs=1, initial_lr=1e-3, seed=0, max_steps=10)
    defaults.update(kw)
    return TrainConfig(**defaults)


def test_training_is_seeded_deterministic(tmp_path):
    ds = make_toy_dataset(4, seed=1)
    _, h1 = train(TINY_TRAIN_MODEL, small_train_config(), ds, tmp_path / "a")
    _, h2 = train(TINY_TRAIN_MODEL, small_train_config(), ds, tmp_path / "b")
    assert h1[0]["loss"] == h2[0]["loss"]
    assert h1[-1]["loss"] == h2[-1]["loss"]


def test_training_writes_metrics_and_checkpoint(tmp_path):
    ds = make_toy_dataset(2, seed=2)
    out = tmp_path / "run"
    model, history = train(TINY_TRAIN_MODEL, small_train_config(max_steps=4), ds, out)
    lines = (out / "metrics.jsonl").read_text().splitlines()
    assert len(lines) == len(history) == 4
    record = json.loads(lines[0])
    assert {"step", "epoch", "lr", "loss", "loss_similarity", "loss_perceptual"} <= record.keys()
    ckpts = sorted(out.glob("epoch_*"))
    assert ckpts
    loaded, state = load_checkpoint(ckpts[-1])
    assert state["step"] == 4
    for p, q in zip(model.parameters(), loaded.parameters()):
        assert torch.equal(p, q)


def test_training_empty_dataset_rejected(tmp_path):
    ds = make_toy_dataset(1, seed=0)
    ds.pairs.clear()
    with pytest.raises(ValidationError):
        train(TINY_TRAIN_MODEL, small_train_config(), ds, tmp_path)


# -- evaluation -------------------------------------------------------------

def test_evaluate_oracle_checkpoint_fixed_points(tmp_path):
    ds = make_toy_dataset(3, seed=4)

    def oracle_infer(sample):
        return sample.ground_truth

    report = evaluate(oracle_infer, ds, checkpoint_id="oracle",
                      report_path=tmp_path / "report.json")
    assert report.ssim == pytest.approx(1.0, abs=1e-12)
    assert math.isinf(report.psnr)
    assert report.fid < 1e-6
    assert report.n_samples == 3
    from mycloth.traineval import MetricsReport

    back = MetricsReport.from_json((tmp_path / "report.json").read_text())
    assert back == report


def test_evaluate_real_model_report_schema():
    ds = make_toy_dataset(2, seed=6)
    from mycloth.tryon import TryOnModel

    model = TryOnModel(TINY_TRAIN_MODEL)
    report = evaluate(model_inference(model), ds, checkpoint_id="fresh")
    assert -1 <= report.ssim <= 1
    assert report.psnr >= 0
    assert report.fid >= 0
    assert report.inception_score >= 1 - 1e-9


def test_evaluate_deterministic():
    ds = make_toy_dataset(2, seed=8)
    from mycloth.tryon import TryOnModel

    torch.manual_seed(0)
    model = TryOnModel(TINY_TRAIN_MODEL)
    a = evaluate(model_inference(model), ds)
    b = evaluate(model_inference(model), ds)
    assert a == b
