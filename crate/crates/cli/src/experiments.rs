//! The three pipelines, one task per experiment x family x seed x sweep point.

use std::time::Instant;

use gentropy::clustering::{cef, cluster, labels_to_image, ClusterOptions};
use gentropy::imaging::{gray_localmean_histogram, histogram, GrayImage};
use gentropy::metrics::{confusion, kappa, overall_accuracy, score_parts, threshold_correlation};
use gentropy::registration::{default_control_points, image_center, register, rmse_control_points, warp};
use gentropy::thresholding::{apply_threshold, apply_threshold_2d, entropic_threshold, entropic_threshold_2d};
use gentropy::{EntropySpec, FeatureSet, SearchConfig};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig, Variant};
use crate::error::{CliError, StageExt};
use crate::fixtures;

/// One point of an experiment's sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint {
    Variant(Variant),
    Bins(usize),
    SigmaScale(f64),
}

impl SweepPoint {
    pub fn label(&self) -> String {
        match self {
            SweepPoint::Variant(v) => format!("variant={}", v.name()),
            SweepPoint::Bins(b) => format!("bins={b}"),
            SweepPoint::SigmaScale(s) => format!("sigma_scale={s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub experiment: Experiment,
    pub family: EntropySpec,
    pub seed: u64,
    pub sweep: SweepPoint,
}

/// Result of one task. `metrics[0]` is the experiment's primary metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub task: Task,
    pub metrics: Vec<(&'static str, f64)>,
    /// Seconds spent in the pipeline call, excluding fixture generation.
    pub wall_time: f64,
    pub image: GrayImage,
}

pub fn primary_metric(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::Threshold => "average_score",
        Experiment::Register => "nccc",
        Experiment::Cluster => "kappa",
    }
}

pub fn tasks(cfg: &ExperimentConfig) -> Vec<Task> {
    let mut out = Vec::new();
    for &experiment in &cfg.experiments {
        let sweep: Vec<SweepPoint> = match experiment {
            Experiment::Threshold => cfg.threshold.variants.iter().map(|&v| SweepPoint::Variant(v)).collect(),
            Experiment::Register => cfg.register.bins.iter().map(|&b| SweepPoint::Bins(b)).collect(),
            Experiment::Cluster => cfg.cluster.sigma_scales.iter().map(|&s| SweepPoint::SigmaScale(s)).collect(),
        };
        for &seed in &cfg.seeds {
            for &point in &sweep {
                for &family in &cfg.families {
                    out.push(Task { experiment, family, seed, sweep: point });
                }
            }
        }
    }
    out
}

/// Runs every task; independent tasks may run concurrently but outcomes
/// keep task order.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<Outcome>, CliError> {
    tasks(cfg).into_par_iter().map(|t| run_task(cfg, t)).collect()
}

pub fn run_task(cfg: &ExperimentConfig, task: Task) -> Result<Outcome, CliError> {
    match (task.experiment, task.sweep) {
        (Experiment::Threshold, SweepPoint::Variant(v)) => threshold(cfg, task, v),
        (Experiment::Register, SweepPoint::Bins(b)) => registration(cfg, task, b),
        (Experiment::Cluster, SweepPoint::SigmaScale(s)) => clustering(cfg, task, s),
        _ => unreachable!("tasks() pairs each experiment with its own sweep"),
    }
}

fn stage_name(task: &Task) -> String {
    format!("{} [{} seed={} {}]", task.experiment, task.family, task.seed, task.sweep.label())
}

fn threshold(cfg: &ExperimentConfig, task: Task, variant: Variant) -> Result<Outcome, CliError> {
    let fx = fixtures::bimodal(&cfg.threshold, task.seed)?;
    let stage = || stage_name(&task);
    let spec = task.family;
    let window = cfg.threshold.window;

    let start = Instant::now();
    let (binary, cut) = match variant {
        Variant::OneD => {
            let r = entropic_threshold(&histogram(&fx.image), spec).stage(stage)?;
            (apply_threshold(&fx.image, r.threshold), (r.threshold, None))
        }
        Variant::TwoD => {
            let j = gray_localmean_histogram(&fx.image, window).stage(stage)?;
            let r = entropic_threshold_2d(&j, spec).stage(stage)?;
            let b = apply_threshold_2d(&fx.image, r.threshold, r.mean_threshold, window).stage(stage)?;
            (b, (r.threshold, Some(r.mean_threshold)))
        }
    };
    let wall_time = start.elapsed().as_secs_f64();

    let parts = score_parts(&fx.image, &binary, &fx.mask).stage(stage)?;
    let mut metrics = vec![
        ("average_score", parts.mean()),
        ("correlation", threshold_correlation(&fx.image, &binary).stage(stage)?),
        ("classification", parts.classification),
        ("area", parts.area),
        ("uniformity", parts.uniformity),
        ("threshold", cut.0 as f64),
    ];
    if let Some(s) = cut.1 {
        metrics.push(("mean_threshold", s as f64));
    }
    Ok(Outcome { task, metrics, wall_time, image: binary })
}

fn registration(cfg: &ExperimentConfig, task: Task, bins: usize) -> Result<Outcome, CliError> {
    let fx = fixtures::shift_pair(&cfg.register, task.seed)?;
    let stage = || stage_name(&task);
    let search = SearchConfig {
        window: cfg.register.window,
        rotations: cfg.register.rotations.clone(),
        bins,
        refine: cfg.register.refine,
    };

    let start = Instant::now();
    let r = register(&fx.master, &fx.slave, task.family, &search).stage(stage)?;
    let wall_time = start.elapsed().as_secs_f64();

    let (w, h) = fx.master.dims();
    let rmse = rmse_control_points(&r.params, &fx.truth, &default_control_points(w, h), image_center(w, h))
        .stage(stage)?;
    let metrics = vec![
        ("nccc", r.nccc),
        ("rmse", rmse),
        ("mi", r.mi),
        ("dx", r.params.dx),
        ("dy", r.params.dy),
        ("theta", r.params.theta),
        ("evaluations", r.evaluations as f64),
    ];
    // slave resampled into the master frame
    let aligned = warp(&fx.slave, &r.params.inverse(), 0);
    Ok(Outcome { task, metrics, wall_time, image: aligned })
}

fn clustering(cfg: &ExperimentConfig, task: Task, sigma_scale: f64) -> Result<Outcome, CliError> {
    let fx = fixtures::blobs(&cfg.cluster, task.seed)?;
    let stage = || stage_name(&task);
    let points = FeatureSet::from_image(&fx.image, cfg.cluster.coords);
    let sigma = sigma_scale * points.default_sigma();
    let opts = ClusterOptions { max_sweeps: cfg.cluster.max_sweeps, ..ClusterOptions::default() };

    let start = Instant::now();
    let out = cluster(&points, cfg.cluster.k, sigma, task.family, &opts).stage(stage)?;
    let wall_time = start.elapsed().as_secs_f64();

    let cm = confusion(fx.truth.labels(), out.labeling.labels(), true).stage(stage)?;
    let metrics = vec![
        ("kappa", kappa(&cm)),
        ("overall_accuracy", overall_accuracy(&cm)),
        ("cef", cef(&points, &out.labeling, sigma, task.family).stage(stage)?),
        ("sigma", sigma),
        ("sweeps", out.sweeps as f64),
        ("converged", if out.converged { 1.0 } else { 0.0 }),
    ];
    let image = labels_to_image(&out.labeling, fx.image.dims()).stage(stage)?;
    Ok(Outcome { task, metrics, wall_time, image })
}
