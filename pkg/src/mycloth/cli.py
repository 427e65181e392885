"""Command-line entry points: serve, train, eval, ablate, render, seed."""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Optional

import click

from .clothedit.edges import DEFAULT_EDGE_THRESHOLD
from .errors import ConfigurationError
from .tryon.config import ModelConfig


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc


def _model_config(sections: dict) -> ModelConfig:
    data = dict(sections.get("model", {}))
    for key in ("encoder_channels", "afe_hidden_dims", "gen_hidden_dims"):
        if key in data:
            data[key] = tuple(data[key])
    return ModelConfig(**data)


def _train_config(sections: dict, toy: bool):
    from .traineval.train import AblationFlags, TrainConfig

    data = dict(sections.get("train", {}))
    if "ablation_flags" in data:
        data["ablation_flags"] = AblationFlags(**data["ablation_flags"])
    config = TrainConfig(**data)
    if toy and "batch_size" not in data:
        config = dataclasses.replace(config, batch_size=4)
    return config


def _dataset(data_root: Optional[str], toy: bool, split: str = "train"):
    from .traineval.data import load_viton, make_toy_dataset

    if toy:
        return make_toy_dataset(16, seed=0)
    if data_root is None:
        raise ConfigurationError("--data is required unless --toy is given")
    return load_viton(data_root, split=split)


@click.group()
def main():
    """T-shirt customization studio: service, training, and evaluation."""


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", type=click.Path(), default="data", show_default=True)
@click.option("--checkpoint", type=str, default=None,
              help="Checkpoint directory, or 'identity' for the debug backend.")
@click.option("--paint-backend", type=click.Choice(["mock", "remote"]), default="mock",
              show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file with service.* and cloth_edit.* sections.")
def serve(port, host, data_dir, checkpoint, paint_backend, config_path):
    """Run the HTTP service."""
    import uvicorn

    from .service import StudioService, create_app

    sections = _load_config_file(config_path)
    service_cfg = sections.get("service", {})
    cloth_cfg = sections.get("cloth_edit", {})
    service = StudioService(
        data_dir,
        paint_backend=paint_backend,
        checkpoint=checkpoint,
        edge_threshold=cloth_cfg.get("edge_threshold", DEFAULT_EDGE_THRESHOLD),
        tryon_workers=service_cfg.get("workers", 1),
    )
    service.render_cache.max_entries = service_cfg.get("cache_size",
                                                       service.render_cache.max_entries)
    app = create_app(service)
    uvicorn.run(app, host=host, port=service_cfg.get("port", port))


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data", "data_root", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default="runs/train", show_default=True)
@click.option("--toy", is_flag=True, help="Use the procedural dataset.")
def train(config_path, data_root, out, toy):
    """Train the try-on model."""
    from .traineval.train import train as run_train

    sections = _load_config_file(config_path)
    dataset = _dataset(data_root, toy)
    model_config = _model_config(sections)
    train_config = _train_config(sections, toy)
    _, history = run_train(model_config, train_config, dataset, out)
    click.echo(f"trained {len(history)} steps; final loss {history[-1]['loss']:.4f}")
    click.echo(f"checkpoints and metrics.jsonl in {out}")


@main.command("eval")
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--data", "data_root", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default=None,
              help="Where to write the metrics report JSON.")
@click.option("--toy", is_flag=True, help="Use the procedural dataset.")
def eval_cmd(checkpoint, data_root, out, toy):
    """Evaluate a checkpoint in the paired setting."""
    from .traineval.evaluate import evaluate, model_inference
    from .traineval.train import load_checkpoint

    model, _ = load_checkpoint(checkpoint)
    model.eval()
    dataset = _dataset(data_root, toy, split="test")
    report = evaluate(model_inference(model), dataset,
                      checkpoint_id=str(checkpoint), report_path=out)
    click.echo(f"ssim={report.ssim:.4f} psnr={report.psnr:.2f} "
               f"fid={report.fid:.2f} is={report.inception_score:.3f} "
               f"n={report.n_samples}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data", "data_root", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), default="runs/ablation", show_default=True)
@click.option("--seeds", default="0", show_default=True,
              help="Comma-separated training seeds; the median is reported.")
@click.option("--toy", is_flag=True, help="Use the procedural dataset.")
def ablate(config_path, data_root, out, seeds, toy):
    """Run the module-ablation matrix and write ablation.csv."""
    from .traineval.ablation import run_ablation

    sections = _load_config_file(config_path)
    dataset = _dataset(data_root, toy)
    rows = run_ablation(_model_config(sections), _train_config(sections, toy),
                        dataset, out, seeds=tuple(int(s) for s in seeds.split(",")))
    for row in rows:
        flags = row.flags
        click.echo(f"afew={flags.afew} frw_warp={flags.frw_warp} "
                   f"frw_gen={flags.frw_gen} params={row.parameter_count} "
                   f"loss={row.final_loss:.4f} ssim={row.ssim:.4f} psnr={row.psnr:.2f}")
    click.echo(f"wrote {Path(out) / 'ablation.csv'}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--data-dir", type=click.Path(exists=True), default="data", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def render(session_id, out, data_dir, config_path):
    """Render a session's current design to a PNG file."""
    from .service import StudioService

    sections = _load_config_file(config_path)
    threshold = sections.get("cloth_edit", {}).get("edge_threshold", DEFAULT_EDGE_THRESHOLD)
    service = StudioService(data_dir, edge_threshold=threshold)
    Path(out).write_bytes(service.render_png(session_id))
    click.echo(f"wrote {out}")


@main.command()
@click.option("--data-dir", type=click.Path(), default="data", show_default=True)
def seed(data_dir):
    """Write the bundled pattern catalog and avatar gallery into a data dir."""
    from .core.catalog import write_seed_catalog
    from .service.avatars import write_seed_avatars

    data_dir = Path(data_dir)
    write_seed_catalog(data_dir / "patterns")
    write_seed_avatars(data_dir / "avatars")
    click.echo(f"seeded patterns and avatars under {data_dir}")


if __name__ == "__main__":
    main()
