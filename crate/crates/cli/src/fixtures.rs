//! Seeded fixtures for the three experiments and the `gen-fixtures` writer.

use std::fs;
use std::io::Write;
use std::path::Path;

use gentropy::clustering::labels_to_image;
use gentropy::imaging::{add_noise, shift_image, synth_bimodal, synth_scene, write_pgm, GrayImage};
use gentropy::{Labeling, TransformParams};
use serde::Serialize;

use crate::config::{ClusterConfig, ExperimentConfig, RegisterConfig, ThresholdConfig};
use crate::error::{CliError, StageExt};

pub struct Bimodal {
    pub image: GrayImage,
    pub mask: GrayImage,
}

pub fn bimodal(cfg: &ThresholdConfig, seed: u64) -> Result<Bimodal, CliError> {
    let (image, mask) = synth_bimodal(cfg.width, cfg.height, cfg.mu.0, cfg.mu.1, cfg.sigma, cfg.split, seed)
        .stage(|| "threshold fixture".into())?;
    Ok(Bimodal { image, mask })
}

pub struct ShiftPair {
    pub master: GrayImage,
    pub slave: GrayImage,
    pub truth: TransformParams,
}

/// Textured master, slave moved by the planted shift with noise added to
/// the slave only.
pub fn shift_pair(cfg: &RegisterConfig, seed: u64) -> Result<ShiftPair, CliError> {
    let stage = || "register fixture".to_string();
    let master = synth_scene(cfg.size, cfg.size, seed).stage(stage)?;
    let moved = shift_image(&master, cfg.shift.0, cfg.shift.1, 0).stage(stage)?;
    let slave = add_noise(&moved, cfg.noise, seed.wrapping_add(1)).stage(stage)?;
    Ok(ShiftPair { master, slave, truth: TransformParams::translation(cfg.shift.0 as f64, cfg.shift.1 as f64) })
}

pub struct Blobs {
    pub image: GrayImage,
    pub truth: Labeling,
}

/// `k - 1` discs on a background, each region covering about `1 / k` of the
/// image, at evenly spaced gray levels plus Gaussian noise.
pub fn blobs(cfg: &ClusterConfig, seed: u64) -> Result<Blobs, CliError> {
    let stage = || "cluster fixture".to_string();
    let (s, k) = (cfg.size, cfg.k);
    let side = s as f64;
    let radius = side / (std::f64::consts::PI * k as f64).sqrt();
    let c = (side - 1.0) / 2.0;
    let centers: Vec<(f64, f64)> = (1..k)
        .map(|m| {
            if k == 2 {
                return (c, c);
            }
            let angle = std::f64::consts::TAU * (m - 1) as f64 / (k - 1) as f64;
            (c + side / 4.0 * angle.cos(), c + side / 4.0 * angle.sin())
        })
        .collect();
    let mut labels = Vec::with_capacity(s * s);
    for y in 0..s {
        for x in 0..s {
            let d = |&(cx, cy): &(f64, f64)| (x as f64 - cx).hypot(y as f64 - cy);
            let nearest = (0..centers.len()).min_by(|&a, &b| d(&centers[a]).total_cmp(&d(&centers[b]))).unwrap();
            labels.push(if d(&centers[nearest]) <= radius { nearest + 1 } else { 0 });
        }
    }
    let truth = Labeling::new(labels, k).stage(stage)?;
    let level = |m: usize| (40.0 + 175.0 * m as f64 / (k - 1) as f64).round() as u8;
    let clean = GrayImage::new(s, s, truth.labels().iter().map(|&m| level(m)).collect()).stage(stage)?;
    let image = add_noise(&clean, cfg.noise, seed).stage(stage)?;
    Ok(Blobs { image, truth })
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    fixture: &'a str,
    seed: u64,
    width: usize,
    height: usize,
    files: Vec<(&'a str, String)>,
    #[serde(flatten)]
    truth: Truth,
}

#[derive(Serialize)]
#[serde(tag = "truth", rename_all = "snake_case")]
enum Truth {
    Mask { mu: (f64, f64), sigma: f64, split: f64 },
    Shift { dx: f64, dy: f64, theta: f64, noise: f64 },
    Labels { k: usize, noise: f64 },
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(CliError::io(path))
}

fn labels_text(labels: &Labeling, width: usize) -> String {
    let mut out = String::new();
    for row in labels.labels().chunks(width) {
        let line: Vec<String> = row.iter().map(|l| l.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Writes every fixture for every configured seed plus `manifest.jsonl`;
/// returns the number of manifest entries.
pub fn gen_fixtures(cfg: &ExperimentConfig) -> Result<usize, CliError> {
    fs::create_dir_all(&cfg.out).map_err(CliError::io(&cfg.out))?;
    let mut manifest = Vec::new();
    let mut entries = 0;
    let push = |manifest: &mut Vec<u8>, entry: &ManifestEntry| {
        let line = serde_json::to_string(entry).expect("manifest entries serialize");
        writeln!(manifest, "{line}").expect("writing to a Vec cannot fail");
    };
    for &seed in &cfg.seeds {
        let file = |stem: &str, ext: &str| format!("{stem}_s{seed}.{ext}");

        let b = bimodal(&cfg.threshold, seed)?;
        let (img, mask) = (file("bimodal", "pgm"), file("bimodal_mask", "pgm"));
        write_file(&cfg.out.join(&img), &write_pgm(&b.image))?;
        write_file(&cfg.out.join(&mask), &write_pgm(&b.mask))?;
        let t = &cfg.threshold;
        push(&mut manifest, &ManifestEntry {
            fixture: "bimodal",
            seed,
            width: t.width,
            height: t.height,
            files: vec![("image", img), ("mask", mask)],
            truth: Truth::Mask { mu: t.mu, sigma: t.sigma, split: t.split },
        });

        let p = shift_pair(&cfg.register, seed)?;
        let (master, slave) = (file("shift_master", "pgm"), file("shift_slave", "pgm"));
        write_file(&cfg.out.join(&master), &write_pgm(&p.master))?;
        write_file(&cfg.out.join(&slave), &write_pgm(&p.slave))?;
        push(&mut manifest, &ManifestEntry {
            fixture: "shift_pair",
            seed,
            width: cfg.register.size,
            height: cfg.register.size,
            files: vec![("master", master), ("slave", slave)],
            truth: Truth::Shift { dx: p.truth.dx, dy: p.truth.dy, theta: p.truth.theta, noise: cfg.register.noise },
        });

        let bl = blobs(&cfg.cluster, seed)?;
        let size = cfg.cluster.size;
        let (img, label_pgm, label_txt) = (file("blobs", "pgm"), file("blobs_labels", "pgm"), file("blobs_labels", "txt"));
        write_file(&cfg.out.join(&img), &write_pgm(&bl.image))?;
        let label_img = labels_to_image(&bl.truth, (size, size)).stage(|| "cluster fixture".into())?;
        write_file(&cfg.out.join(&label_pgm), &write_pgm(&label_img))?;
        write_file(&cfg.out.join(&label_txt), labels_text(&bl.truth, size).as_bytes())?;
        push(&mut manifest, &ManifestEntry {
            fixture: "blobs",
            seed,
            width: size,
            height: size,
            files: vec![("image", img), ("labels", label_pgm), ("labels_text", label_txt)],
            truth: Truth::Labels { k: cfg.cluster.k, noise: cfg.cluster.noise },
        });
        entries += 3;
    }
    write_file(&cfg.out.join("manifest.jsonl"), &manifest)?;
    Ok(entries)
}
