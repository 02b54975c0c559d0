"""Command-line front end: curate, retarget, stats, train, eval, replay."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from .canonical import load_canonical, save_canonical, save_curation_report
from .curation import EXCLUDE_KEYWORDS, INCLUDE_KEYWORDS, MotionLibrary, curate
from .mocap import ClipMeta, RawMotionClip, parse_motion, parse_skeleton
from .retarget import RetargetedClip, default_mapping, load_mapping, retarget_clip
from .robot import default_robot_model, load_robot_model


def _load_clip_dir(path: Path) -> MotionLibrary:
    lib = MotionLibrary()
    files = sorted(path.glob("*.json"))
    if not files:
        raise click.ClickException(f"no canonical clip files (*.json) in {path}")
    for f in files:
        clip = load_canonical(f.read_bytes())
        lib.clips[clip.meta.id] = clip
    return lib


def _keywords_from_file(path: str | None, default: list[str]) -> list[str]:
    if path is None:
        return default
    lines = Path(path).read_text().splitlines()
    return [ln.strip().lower() for ln in lines if ln.strip()]


def _library_from_options(clips: str | None, demo: bool, seed: int, roster: str = "training") -> MotionLibrary:
    if demo and clips:
        raise click.ClickException("pass either --clips or --demo, not both")
    if demo:
        from .demo import build_demo_library

        return build_demo_library(seed=seed, roster=roster)
    if not clips:
        raise click.ClickException("pass --clips DIR or --demo")
    return _load_clip_dir(Path(clips))


@click.group()
def cli():
    """Motion curation, retargeting, training and evaluation pipeline."""


@cli.command()
@click.option("--in", "in_dir", type=click.Path(exists=True, file_okay=False), required=True,
              help="Directory of canonical clip files.")
@click.option("--include-file", type=click.Path(exists=True), default=None,
              help="Include keywords, one per line (default: built-in list).")
@click.option("--exclude-file", type=click.Path(exists=True), default=None,
              help="Exclude keywords, one per line (default: built-in list).")
@click.option("--report", "report_path", type=click.Path(), required=True,
              help="Where to write the curation report (JSON).")
@click.option("--out", type=click.Path(), default=None,
              help="Optional directory to copy retained clips into.")
@click.option("--config", type=click.Path(exists=True), default=None, help="Unused; accepted for symmetry.")
@click.option("--seed", type=int, default=0, show_default=True)
def curate_cmd(in_dir, include_file, exclude_file, report_path, out, config, seed):
    """Filter a clip library by description keywords."""
    lib = _load_clip_dir(Path(in_dir))
    include = _keywords_from_file(include_file, INCLUDE_KEYWORDS)
    exclude = _keywords_from_file(exclude_file, EXCLUDE_KEYWORDS)
    result = curate(lib, include, exclude)
    Path(report_path).write_bytes(save_curation_report(result))
    if out:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for clip_id, clip in result.clips.items():
            (out_dir / f"{clip_id}.json").write_bytes(save_canonical(clip))
    click.echo(f"retained {len(result.clips)}/{len(lib.clips)} clips; report at {report_path}")


cli.add_command(curate_cmd, "curate")


@cli.command()
@click.option("--in", "in_dir", type=click.Path(exists=True, file_okay=False), required=True,
              help="Directory of canonical raw clips (*.json) and/or motion files (*.amc).")
@click.option("--skeleton", type=click.Path(exists=True), default=None,
              help="Skeleton file used to parse *.amc motion files.")
@click.option("--mapping", "mapping_path", type=click.Path(exists=True), default=None,
              help="Joint mapping file (default: shipped CMU mapping).")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None,
              help="Robot model file (default: shipped model).")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
@click.option("--frame-rate", type=float, default=120.0, show_default=True,
              help="Frame rate assumed for *.amc files.")
@click.option("--config", type=click.Path(exists=True), default=None, help="Unused; accepted for symmetry.")
@click.option("--seed", type=int, default=0, show_default=True)
def retarget_cmd(in_dir, skeleton, mapping_path, model_path, out, frame_rate, config, seed):
    """Retarget human clips onto the robot skeleton."""
    model = load_robot_model(model_path) if model_path else default_robot_model()
    mapping = load_mapping(mapping_path, model) if mapping_path else default_mapping(model)
    in_path = Path(in_dir)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    raws: list[RawMotionClip] = []
    for f in sorted(in_path.glob("*.json")):
        clip = load_canonical(f.read_bytes())
        if isinstance(clip, RawMotionClip):
            raws.append(clip)
    amc_files = sorted(in_path.glob("*.amc"))
    if amc_files:
        if not skeleton:
            raise click.ClickException("*.amc inputs need --skeleton")
        sk = parse_skeleton(Path(skeleton).read_text())
        for f in amc_files:
            raws.append(
                parse_motion(f.read_text(), sk, frame_rate=frame_rate, meta=ClipMeta(id=f.stem))
            )
    if not raws:
        raise click.ClickException(f"no raw clips found in {in_dir}")

    violations = {}
    for raw in raws:
        clip = retarget_clip(raw, mapping, model)
        (out_dir / f"{clip.meta.id}.json").write_bytes(save_canonical(clip))
        violations[clip.meta.id] = clip.limit_report.to_dict()
    with open(out_dir / "violation_report.json", "w") as f:
        json.dump(violations, f, indent=2)
    click.echo(f"retargeted {len(raws)} clips into {out_dir}")


cli.add_command(retarget_cmd, "retarget")


@cli.command()
@click.option("--source", type=click.Choice(["clips", "rollouts"]), default="clips", show_default=True)
@click.option("--clips", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of canonical retargeted clips.")
@click.option("--demo", is_flag=True, help="Use the built-in demo dataset.")
@click.option("--checkpoint", type=click.Path(exists=True), default=None,
              help="Policy checkpoint (required for --source rollouts).")
@click.option("--episodes", type=int, default=20, show_default=True)
@click.option("--hand-samples", type=int, default=10000, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Report output directory.")
@click.option("--config", type=click.Path(exists=True), default=None, help="Unused; accepted for symmetry.")
@click.option("--seed", type=int, default=0, show_default=True)
def stats_cmd(source, clips, demo, checkpoint, episodes, hand_samples, out, config, seed):
    """Distribution and hand-position reports for clips or policy rollouts."""
    from .reports import (
        distribution_report,
        hand_position_report,
        hand_positions_from_clips,
        hand_positions_from_records,
        rollout_states,
        sample_clip_states,
    )

    library = _library_from_options(clips, demo, seed, roster="full")
    rng = np.random.default_rng(seed)
    out_dir = Path(out)
    if source == "clips":
        states = sample_clip_states(library)
        summary = distribution_report(states, out_dir, label="dataset")
        hands = hand_positions_from_clips(library, hand_samples, rng)
        hand_position_report(hands, out_dir, label="dataset")
    else:
        if not checkpoint:
            raise click.ClickException("--source rollouts needs --checkpoint")
        from .env import HumanoidEnv
        from .metrics import run_episodes
        from .rl.train import load_checkpoint, rebuild_env_config
        from .rewards import RewardWeights

        policy, doc = load_checkpoint(checkpoint)
        env = HumanoidEnv(
            default_robot_model(), library, rebuild_env_config(doc),
            RewardWeights.from_dict(doc["config"]["weights"]),
        )
        records = run_episodes(env, policy, episodes, seed=seed, keep_traces=True)
        summary = distribution_report(rollout_states(records), out_dir, label="policy")
        hands = hand_positions_from_records(records, hand_samples, rng)
        hand_position_report(hands, out_dir, label="policy")
    click.echo(f"wrote reports to {out_dir} ({summary['samples']} state samples)")


cli.add_command(stats_cmd, "stats")


def _load_train_config(path: str | None):
    from .goals import CommandRanges
    from .rewards import RewardWeights
    from .rl.amp import AMPConfig
    from .rl.ppo import PPOConfig
    from .rl.train import TrainConfig
    from .env import EnvConfig

    cfg = TrainConfig()
    if path is None:
        return cfg
    doc = yaml.safe_load(Path(path).read_text()) or {}
    if "ppo" in doc:
        cfg.ppo = PPOConfig.from_dict({**cfg.ppo.to_dict(), **doc["ppo"]})
    if "amp" in doc:
        cfg.amp = AMPConfig.from_dict({**cfg.amp.to_dict(), **doc["amp"]})
    if "env" in doc:
        env_doc = dict(doc["env"])
        ranges = env_doc.pop("command_ranges", None)
        base = {k: v for k, v in EnvConfig().__dict__.items() if k != "command_ranges"}
        cfg.env = EnvConfig(**{**base, **env_doc})
        if ranges:
            cfg.env.command_ranges = CommandRanges(**{k: tuple(v) for k, v in ranges.items()})
    if "weights" in doc:
        cfg.weights = RewardWeights.from_dict({**cfg.weights.to_dict(), **doc["weights"]})
    if "iterations" in doc:
        cfg.iterations = int(doc["iterations"])
    return cfg


@cli.command()
@click.option("--variant", default="exbody", show_default=True,
              help="One of: exbody, exbody+amp, exbody+amp-noreg, no-rsi, random-sample, full-body-tracking.")
@click.option("--clips", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of canonical retargeted clips.")
@click.option("--demo", is_flag=True, help="Train on the built-in demo dataset.")
@click.option("--iterations", type=int, default=None, help="Override training iterations.")
@click.option("--config", type=click.Path(exists=True), default=None, help="Training config YAML.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Checkpoint/curves output directory.")
@click.option("--log-every", type=int, default=10, show_default=True)
def train_cmd(variant, clips, demo, iterations, config, seed, out, log_every):
    """Train a policy variant."""
    from .rl.train import train

    cfg = _load_train_config(config)
    if iterations is not None:
        cfg.iterations = iterations
    library = _library_from_options(clips, demo, seed)
    result = train(variant, library, cfg, seed=seed, out_dir=out, log_every=log_every)
    click.echo(f"checkpoint: {result.checkpoint_path}")
    click.echo(f"final metrics: {result.final_metrics}")


cli.add_command(train_cmd, "train")


@cli.command()
@click.option("--checkpoint", type=click.Path(exists=True), required=True)
@click.option("--episodes", type=int, default=50, show_default=True)
@click.option("--clips", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--demo", is_flag=True, help="Evaluate on the built-in demo dataset.")
@click.option("--report", "report_path", type=click.Path(), required=True,
              help="Metrics report output file (JSON).")
@click.option("--config", type=click.Path(exists=True), default=None, help="Unused; accepted for symmetry.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Alias for --report's parent; unused.")
def eval_cmd(checkpoint, episodes, clips, demo, report_path, config, seed, out):
    """Run evaluation episodes and write a metrics report."""
    from .env import HumanoidEnv
    from .metrics import compute_metrics, run_episodes
    from .rewards import RewardWeights
    from .rl.train import load_checkpoint, rebuild_env_config

    policy, doc = load_checkpoint(checkpoint)
    library = _library_from_options(clips, demo, seed)
    env = HumanoidEnv(
        default_robot_model(), library, rebuild_env_config(doc),
        RewardWeights.from_dict(doc["config"]["weights"]),
    )
    records = run_episodes(env, policy, episodes, seed=seed)
    report = compute_metrics(records, variant=doc["variant"])
    Path(report_path).write_text(json.dumps(report.to_dict(), indent=2))
    click.echo(json.dumps(report.to_dict(), indent=2))


cli.add_command(eval_cmd, "eval")


@cli.command()
@click.option("--clip", "clip_path", type=click.Path(exists=True), required=True,
              help="Canonical retargeted clip file.")
@click.option("--out", type=click.Path(), required=True, help="Step log output file (JSON lines).")
@click.option("--config", type=click.Path(exists=True), default=None, help="Unused; accepted for symmetry.")
@click.option("--seed", type=int, default=0, show_default=True)
def replay_cmd(clip_path, out, config, seed):
    """Replay a clip through the kinematic backend with oracle actions."""
    from .env import EnvConfig, HumanoidEnv, make_oracle_policy
    from .goals import clip_initial_state

    clip = load_canonical(Path(clip_path).read_bytes())
    if not isinstance(clip, RetargetedClip):
        raise click.ClickException("replay needs a retargeted clip")
    lib = MotionLibrary.from_clips([clip])
    env = HumanoidEnv(default_robot_model(), lib, EnvConfig())
    env.reset(np.random.default_rng(seed), start=clip_initial_state(clip, 0.0))
    oracle = make_oracle_policy(env)
    lines = []
    done = False
    while not done:
        obs, breakdown, done, info = env.step(oracle())
        lines.append(
            {
                "time": info["time"],
                "clip_time": info["clip_time"],
                "total": breakdown.total,
                "expression_total": breakdown.expression_total,
                "movement_total": breakdown.movement_total,
                "terms": {k: v[1] for k, v in breakdown.terms.items()},
                "done_reason": info["done_reason"],
            }
        )
    with open(out, "w") as f:
        for ln in lines:
            f.write(json.dumps(ln) + "\n")
    click.echo(f"replayed {len(lines)} steps; log at {out}")


cli.add_command(replay_cmd, "replay")


def main() -> int:
    try:
        return cli.main(sys.argv[1:], standalone_mode=True)
    except SystemExit as e:
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
