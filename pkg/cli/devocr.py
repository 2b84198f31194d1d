#!/usr/bin/env python3
"""
devocr CLI - handwritten Devanagari character recognition
Train, evaluate and run the thinning / chain-code / CG-trained MLP pipeline
"""
import sys
from functools import wraps
from pathlib import Path
sys.path.append(str(Path(__file__).parent.parent))

import click
import pandas as pd
from pydantic import ValidationError
from rich import box
from rich.console import Console
from rich.markup import escape
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn
from rich.table import Table

from classifier.conjugate_gradient import TrainConfig
from classifier.mlp import evaluate, forward, predict
from classifier.model_io import load_labels, load_model, report_path, save_labels, save_model
from dataset.loader import export_manifest, load_dataset, write_dataset
from dataset.splitter import SplitSpec, split
from dataset.synthetic import generate_synthetic
from features.chain_code import SUPPORTED_GRIDS
from features.extractor import FeatureConfig, extract_features
from imaging.netpbm import read_raster, write_pbm
from imaging.raster import DEFAULT_THRESHOLD, crop_to_content, scale_to_canonical
from imaging.thinning import thin_passes
from pipeline import config
from pipeline.settings import PipelineConfig
from pipeline.stages import featurize, featurize_samples, prepare_samples, run_stages
from pipeline.training import fit, run_sweep, training_report, write_report

console = Console(stderr=True)

STAGE_FILES = (
    ('01_binarized.pbm', 'binarized'),
    ('02_cropped.pbm', 'cropped'),
    ('03_scaled.pbm', 'canonical'),
    ('04_thinned.pbm', 'thinned'),
    ('05_pruned.pbm', 'pruned'),
)


# ============ Option groups ============
def _check_grid(ctx, param, value):
    if value not in SUPPORTED_GRIDS:
        raise click.BadParameter('unsupported grid')
    return value


def _grid_list(ctx, param, value):
    try:
        grids = [int(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter('expected comma-separated integers')
    if not grids or any(g not in SUPPORTED_GRIDS for g in grids):
        raise click.BadParameter('unsupported grid')
    return grids


def _norm_list(ctx, param, value):
    try:
        norms = [float(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter('expected comma-separated numbers')
    if not norms or any(n <= 0 for n in norms):
        raise click.BadParameter('normalization factors must be positive')
    return norms


def _apply(func, options):
    for option in reversed(options):
        func = option(func)
    return func


def grid_options(func):
    return _apply(func, [
        click.option('--grid', 'grid_n', type=int, default=4, show_default=True, callback=_check_grid,
                     help='Segments per side of the feature grid (2-5)'),
        click.option('--norm-factor', type=float, default=40.0, show_default=True,
                     help='Divisor for per-segment gradient change'),
    ])


def stage_options(func):
    return _apply(func, [
        click.option('--threshold', type=click.IntRange(0, 255), default=DEFAULT_THRESHOLD, show_default=True,
                     help='Gray levels below this are stroke'),
        click.option('--shirorekha-full', type=float, default=0.80, show_default=True),
        click.option('--shirorekha-partial', type=float, default=0.35, show_default=True),
        click.option('--spine-run', type=float, default=0.60, show_default=True),
        click.option('--spine-end-zone', type=float, default=0.75, show_default=True),
        click.option('--workers', type=click.IntRange(1), default=config.MAX_WORKERS, show_default=True,
                     help='Threads for loading and feature extraction'),
    ])


def feature_options(func):
    return grid_options(stage_options(func))


def data_options(func):
    return _apply(func, [
        click.option('--data', type=click.Path(exists=True, file_okay=False, path_type=Path),
                     help='Dataset root with one directory per class'),
        click.option('--synthetic', is_flag=True, help='Use generated glyphs instead of --data'),
        click.option('--classes', type=int, default=25, show_default=True, help='Synthetic class count'),
        click.option('--per-class', type=int, default=40, show_default=True, help='Synthetic samples per class'),
        click.option('--train-per-class', type=int, default=30, show_default=True),
        click.option('--test-per-class', type=int, default=10, show_default=True),
        click.option('--seed', type=int, default=1, show_default=True,
                     help='Seed for generation, splitting and weight init'),
    ])


def training_options(func):
    return _apply(func, [
        click.option('--hidden', type=int, help='Hidden units (default 2 x input length)'),
        click.option('--max-iters', type=int, default=500, show_default=True),
        click.option('--grad-tol', type=float, default=1e-6, show_default=True),
        click.option('--restart-every', type=int, help='Force a steepest-descent restart every N iterations'),
        click.option('--line-search-tol', type=float, default=1e-4, show_default=True),
        click.option('--line-search-evals', type=int, default=40, show_default=True),
    ])


def handle_errors(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ValueError, FloatingPointError, OSError) as e:
            console.print(f'[red]Error:[/red] {escape(str(e))}')
            sys.exit(1)
    return wrapper


# ============ Helpers ============
def _pipeline_config(opts: dict) -> PipelineConfig:
    try:
        return PipelineConfig(
            binarize_threshold=opts.get('threshold', DEFAULT_THRESHOLD),
            features=FeatureConfig(
                grid_n=opts.get('grid_n', 4),
                norm_factor=opts.get('norm_factor', 40.0),
                shirorekha_full=opts['shirorekha_full'],
                shirorekha_partial=opts['shirorekha_partial'],
                spine_run=opts['spine_run'],
                spine_end_zone=opts['spine_end_zone'],
            ),
            n_hidden=opts.get('hidden'),
            train=TrainConfig(
                max_iters=opts.get('max_iters', 500),
                grad_tol=opts.get('grad_tol', 1e-6),
                restart_every=opts.get('restart_every'),
                line_search_tol=opts.get('line_search_tol', 1e-4),
                line_search_max_evals=opts.get('line_search_evals', 40),
                seed=opts.get('seed', 1),
            ),
            split=SplitSpec(
                train_per_class=opts.get('train_per_class', 30),
                test_per_class=opts.get('test_per_class', 10),
                seed=opts.get('seed', 1),
            ),
        )
    except ValidationError as e:
        raise click.UsageError(str(e))


def _load_samples(opts: dict, settings: PipelineConfig):
    if opts['data'] and opts['synthetic']:
        raise click.UsageError('use either --data or --synthetic, not both')
    if opts['data']:
        return load_dataset(opts['data'], settings.binarize_threshold, opts['workers'])
    if opts['synthetic']:
        console.print(f"[*] Generating {opts['classes']} x {opts['per_class']} synthetic glyphs (seed {opts['seed']})")
        return generate_synthetic(opts['classes'], opts['per_class'], opts['seed'])
    raise click.UsageError('one of --data or --synthetic is required')


def _progress() -> Progress:
    return Progress(
        TextColumn('[progress.description]{task.description}'),
        BarColumn(),
        MofNCompleteColumn(),
        console=console,
        transient=True,
    )


def _featurize(samples, feature_config: FeatureConfig, workers: int, description: str):
    with _progress() as progress:
        task = progress.add_task(description, total=len(samples))
        return featurize_samples(samples, feature_config, workers, lambda n: progress.advance(task, n))


def _check_input_size(model, feature_config: FeatureConfig):
    if model.n_in != feature_config.vector_length:
        raise ValueError(
            f'dimension mismatch: model expects {model.n_in} features, '
            f'grid {feature_config.grid_n} produces {feature_config.vector_length}'
        )


# ============ Commands ============
@click.group()
def cli():
    """devocr - Handwritten Devanagari character recognition

    Thinning, chain-code curvature features and a conjugate-gradient trained
    perceptron, with stage inspection and a synthetic glyph generator.
    """


@cli.command()
@data_options
@feature_options
@training_options
@click.option('--out', '-o', required=True, type=click.Path(dir_okay=False, path_type=Path),
              help='Model file to write')
@handle_errors
def train(out, **opts):
    """Train a classifier and write the model, labels and report"""
    settings = _pipeline_config(opts)
    samples, class_names = _load_samples(opts, settings)
    train_set, _ = split(samples, settings.split, class_names)
    features, labels = _featurize(train_set, settings.features, opts['workers'], 'Extracting features')

    console.print(f'[*] Training on {len(train_set)} samples, {features.shape[1]} features, {len(class_names)} classes')
    outcome = fit(features, labels, len(class_names), settings)

    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(outcome.model, out)
    save_labels(class_names, out)
    report = training_report(outcome, settings)
    write_report(report, report_path(out))

    table = Table(title='Training summary', box=box.SIMPLE)
    table.add_column('Metric', style='cyan')
    table.add_column('Value', justify='right', style='green')
    for key, value in report.items():
        table.add_row(key, value)
    console.print(table)
    console.print(f'[green]✓[/green] Model written to {out}')


@cli.command('eval')
@click.option('--model', 'model_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@data_options
@feature_options
@click.option('--subset', type=click.Choice(['train', 'test', 'all']), default='test', show_default=True,
              help='Part of the split to evaluate on')
@click.option('--confusion', type=click.Path(dir_okay=False, path_type=Path), help='Write the confusion matrix CSV')
@handle_errors
def eval_cmd(model_path, subset, confusion, **opts):
    """Evaluate a trained model on a dataset split"""
    settings = _pipeline_config(opts)
    model = load_model(model_path)
    _check_input_size(model, settings.features)

    samples, class_names = _load_samples(opts, settings)
    if len(class_names) != model.n_out:
        raise ValueError(f'model has {model.n_out} outputs but the dataset has {len(class_names)} classes')
    train_set, test_set = split(samples, settings.split, class_names)
    chosen = {'train': train_set, 'test': test_set, 'all': train_set + test_set}[subset]

    features, labels = _featurize(chosen, settings.features, opts['workers'], f'Featurizing {subset} set')
    result = evaluate(model, features, labels)
    click.echo(f'accuracy {result.accuracy:.4f}')

    if confusion:
        frame = pd.DataFrame(result.confusion, index=class_names, columns=class_names)
        frame.index.name = 'true'
        frame.to_csv(confusion)
        console.print(f'[green]✓[/green] Confusion matrix written to {confusion}')


@cli.command('predict')
@click.argument('image', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--model', 'model_path', required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@feature_options
@handle_errors
def predict_cmd(image, model_path, **opts):
    """Classify one image: prints class_index class_name score"""
    settings = _pipeline_config(opts)
    model = load_model(model_path)
    _check_input_size(model, settings.features)

    vector = featurize(read_raster(image, settings.binarize_threshold), settings.features).as_array()
    index = predict(model, vector)
    score = forward(model, vector)[index]
    names = load_labels(model_path, model.n_out)
    click.echo(f'{index} {names[index]} {score:.6f}')


@cli.command()
@click.argument('image', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out-dir', '-o', required=True, type=click.Path(file_okay=False, path_type=Path))
@feature_options
@handle_errors
def inspect(image, out_dir, **opts):
    """Write every preprocessing stage as PBM plus the feature line"""
    settings = _pipeline_config(opts)
    stages = run_stages(read_raster(image, settings.binarize_threshold))
    out_dir.mkdir(parents=True, exist_ok=True)

    table = Table(title=f'Stages of {image.name}', box=box.SIMPLE)
    table.add_column('File', style='cyan')
    table.add_column('Size', justify='right')
    table.add_column('Stroke px', justify='right', style='green')
    for file_name, attr in STAGE_FILES:
        stage = getattr(stages, attr)
        write_pbm(stage, out_dir / file_name)
        table.add_row(file_name, f'{stage.height}x{stage.width}', str(stage.stroke_count))

    vector = extract_features(stages.pruned, stages.canonical, settings.features)
    (out_dir / 'features.txt').write_text(vector.to_line() + '\n', encoding='ascii')
    console.print(table)
    console.print(f'[*] shirorekha {vector.shirorekha.value}, spine {vector.spine.value}')


@cli.command('thin')
@click.argument('image', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--out-dir', '-o', required=True, type=click.Path(file_okay=False, path_type=Path))
@click.option('--every-pass', is_flag=True, help='Also write pass_NN.pbm after each pass')
@click.option('--canonical', is_flag=True, help='Crop and scale to the canonical frame first')
@click.option('--threshold', type=click.IntRange(0, 255), default=DEFAULT_THRESHOLD, show_default=True)
@handle_errors
def thin_cmd(image, out_dir, every_pass, canonical, threshold):
    """Thin one image and write the skeleton (thinned.pbm)"""
    raster = read_raster(image, threshold)
    if canonical:
        raster = scale_to_canonical(crop_to_content(raster))
    out_dir.mkdir(parents=True, exist_ok=True)

    result, passes = raster, 0
    for passes, result in enumerate(thin_passes(raster), start=1):
        if every_pass:
            write_pbm(result, out_dir / f'pass_{passes:02d}.pbm')
    write_pbm(result, out_dir / 'thinned.pbm')
    console.print(f'[+] {passes} passes, {raster.stroke_count} -> {result.stroke_count} stroke pixels')


@cli.command('features')
@click.argument('images', nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@feature_options
@handle_errors
def features_cmd(images, **opts):
    """Print one comma-separated feature vector per image"""
    settings = _pipeline_config(opts)
    for image in images:
        click.echo(featurize(read_raster(image, settings.binarize_threshold), settings.features).to_line())


@cli.command()
@click.option('--out', '-o', 'out_dir', default=str(Path(config.DATA_DIR) / 'synthetic'), show_default=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option('--classes', type=int, default=25, show_default=True)
@click.option('--per-class', type=int, default=40, show_default=True)
@click.option('--seed', type=int, default=1, show_default=True)
@click.option('--manifest', type=click.Path(dir_okay=False, path_type=Path),
              help='Also write source_id,class_index,class_name CSV')
@handle_errors
def gen(out_dir, classes, per_class, seed, manifest):
    """Write a synthetic dataset as one PBM directory per class"""
    samples, class_names = generate_synthetic(classes, per_class, seed)
    written = write_dataset(samples, class_names, out_dir)
    if manifest:
        export_manifest(samples, class_names, manifest)
    console.print(f'[green]✓[/green] Wrote {len(written)} images in {len(class_names)} classes to {out_dir}')


@cli.command()
@data_options
@stage_options
@training_options
@click.option('--grids', default='2,3,4,5', show_default=True, callback=_grid_list,
              help='Comma-separated grid sizes')
@click.option('--norms', default='20,40,80', show_default=True, callback=_norm_list,
              help='Comma-separated normalization factors')
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False, path_type=Path), help='Write the results table')
@handle_errors
def sweep(grids, norms, csv_path, **opts):
    """Train and score one model per grid size / normalization factor pair"""
    settings = _pipeline_config(opts)
    samples, class_names = _load_samples(opts, settings)
    train_set, test_set = split(samples, settings.split, class_names)

    with _progress() as progress:
        task = progress.add_task('Thinning glyphs', total=len(train_set) + len(test_set))

        def advance(n):
            progress.advance(task, n)

        train_glyphs = prepare_samples(train_set, opts['workers'], advance)
        test_glyphs = prepare_samples(test_set, opts['workers'], advance)

    train_labels = [s.label for s in train_set]
    test_labels = [s.label for s in test_set]
    with console.status('[bold green]Training sweep...'):
        frame = run_sweep(
            train_glyphs, train_labels, test_glyphs, test_labels, len(class_names),
            grids, norms, settings, opts['workers'],
        )

    table = Table(title='Sweep results', box=box.MINIMAL_DOUBLE_HEAD)
    for column in frame.columns:
        table.add_column(column, justify='right')
    for row in frame.itertuples(index=False):
        table.add_row(
            str(row.grid_n), f'{row.norm_factor:g}', f'{row.train_accuracy:.4f}',
            f'{row.test_accuracy:.4f}', f'{row.final_loss:.6g}', str(row.iterations),
        )
    console.print(table)

    best = frame.loc[frame['test_accuracy'].idxmax()]
    click.echo(
        f"best grid_n={int(best['grid_n'])} norm_factor={best['norm_factor']:g} "
        f"test_accuracy={best['test_accuracy']:.4f}"
    )
    if csv_path:
        frame.to_csv(csv_path, index=False)
        console.print(f'[green]✓[/green] Results written to {csv_path}')


def main():
    cli()


if __name__ == '__main__':
    main()
