//! Report assembly: long-format rows, per-experiment tables, images and a
//! ranked summary. Single writer; runs after every task has finished.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gentropy::imaging::write_pgm;
use gentropy::metrics::categorize_time;
use gentropy::{EntropySpec, Family};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig, Format, Timing};
use crate::error::CliError;
use crate::experiments::{primary_metric, Outcome};
use crate::fixtures::write_file;

/// Relative gap below which two family means count as tied.
pub const RANK_TIE: f64 = 1e-9;

/// One metric of one task, as written to `report.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub family: String,
    pub order: String,
    pub seed: u64,
    pub sweep: String,
    pub metric: String,
    pub value: String,
    pub wall_time_s: String,
    pub time_category: String,
}

fn order_text(spec: EntropySpec) -> String {
    spec.order().map_or_else(|| "NA".into(), |o| o.to_string())
}

fn value_text(v: f64) -> String {
    format!("{v:.6}")
}

fn timing_text(timing: Timing, seconds: f64) -> Result<(String, String), CliError> {
    match timing {
        Timing::Off => Ok(("NA".into(), "NA".into())),
        Timing::Wall => {
            let category = categorize_time(seconds)
                .map_err(|source| CliError::Pipeline { stage: "timing".into(), source })?;
            Ok((format!("{seconds:.3}"), category.to_string()))
        }
    }
}

pub fn rows(outcomes: &[Outcome], timing: Timing) -> Result<Vec<ReportRow>, CliError> {
    let mut out = Vec::new();
    for o in outcomes {
        let (wall, category) = timing_text(timing, o.wall_time)?;
        for &(metric, value) in &o.metrics {
            out.push(ReportRow {
                experiment: o.task.experiment.to_string(),
                family: o.task.family.family().to_string(),
                order: order_text(o.task.family),
                seed: o.task.seed,
                sweep: o.task.sweep.label(),
                metric: metric.into(),
                value: value_text(value),
                wall_time_s: wall.clone(),
                time_category: category.clone(),
            });
        }
    }
    Ok(out)
}

fn csv_bytes<S: Serialize>(records: &[S]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("report rows serialize");
    }
    w.into_inner().expect("writing to a Vec cannot fail")
}

fn table_bytes(header: &[String], body: &[Vec<String>], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("csv header");
            for row in body {
                w.write_record(row).expect("csv row");
            }
            w.into_inner().expect("writing to a Vec cannot fail")
        }
        Format::Markdown => {
            let mut s = String::new();
            let _ = writeln!(s, "| {} |", header.join(" | "));
            let _ = writeln!(s, "|{}|", vec!["---"; header.len()].join("|"));
            for row in body {
                let _ = writeln!(s, "| {} |", row.join(" | "));
            }
            s.into_bytes()
        }
    }
}

/// One row per family x seed x sweep point with every metric as a column.
fn experiment_table(outcomes: &[&Outcome], timing: Timing) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut metric_names: Vec<&str> = Vec::new();
    for o in outcomes {
        for &(m, _) in &o.metrics {
            if !metric_names.contains(&m) {
                metric_names.push(m);
            }
        }
    }
    let mut header: Vec<String> = ["family", "order", "seed", "sweep"].iter().map(|s| s.to_string()).collect();
    header.extend(metric_names.iter().map(|s| s.to_string()));
    header.extend(["wall_time_s".to_string(), "time_category".to_string()]);
    let mut body = Vec::new();
    for o in outcomes {
        let mut row = vec![
            o.task.family.family().to_string(),
            order_text(o.task.family),
            o.task.seed.to_string(),
            o.task.sweep.label(),
        ];
        for name in &metric_names {
            row.push(o.metrics.iter().find(|(m, _)| m == name).map_or_else(|| "NA".into(), |&(_, v)| value_text(v)));
        }
        let (wall, category) = timing_text(timing, o.wall_time)?;
        row.extend([wall, category]);
        body.push(row);
    }
    Ok((header, body))
}

/// Published ordering each experiment is compared against, best first.
pub fn reference_ordering(experiment: Experiment) -> [Family; 3] {
    match experiment {
        Experiment::Register => [Family::Renyi, Family::Tsallis, Family::Shannon],
        Experiment::Threshold | Experiment::Cluster => [Family::Tsallis, Family::Renyi, Family::Shannon],
    }
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= RANK_TIE * a.abs().max(b.abs()).max(1e-300)
}

/// Outcome of comparing observed family means with the reference ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Observed ordering, best first, ties joined by `=`.
    pub observed: String,
    pub reference: String,
    /// `yes`, `no: ...` or `not comparable: ...`.
    pub agreement: String,
}

pub fn compare(experiment: Experiment, means: &BTreeMap<Family, f64>) -> Comparison {
    let reference = reference_ordering(experiment);
    let mut ranked: Vec<(Family, f64)> = means.iter().map(|(&f, &v)| (f, v)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut observed = String::new();
    for (i, (f, v)) in ranked.iter().enumerate() {
        if i > 0 {
            observed.push_str(if tied(ranked[i - 1].1, *v) { " = " } else { " > " });
        }
        observed.push_str(&f.to_string());
    }
    let reference_text = reference.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" > ");
    let missing: Vec<String> = reference.iter().filter(|f| !means.contains_key(f)).map(|f| f.to_string()).collect();
    let agreement = if !missing.is_empty() {
        format!("not comparable: no {} rows", missing.join(", "))
    } else {
        let problems: Vec<String> = reference
            .windows(2)
            .filter_map(|w| {
                let (a, b) = (means[&w[0]], means[&w[1]]);
                if tied(a, b) {
                    Some(format!("{} ties {}", w[0], w[1]))
                } else if a < b {
                    Some(format!("{} below {}", w[0], w[1]))
                } else {
                    None
                }
            })
            .collect();
        if problems.is_empty() {
            "yes".into()
        } else {
            format!("no: {}", problems.join("; "))
        }
    };
    Comparison { observed, reference: reference_text, agreement }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn note(experiment: Experiment) -> &'static str {
    match experiment {
        Experiment::Threshold => {
            "Renyi and Tsallis criteria of equal order are both monotone in the product of the class power sums, so they select the same cut up to rounding."
        }
        Experiment::Register => {
            "Mutual information uses H(A) + H(B) - H(A,B) for every family; for Tsallis this sum also tracks how concentrated the overlap marginals are, not only their alignment."
        }
        Experiment::Cluster => {
            "Renyi uses the kernel cross information potential; Shannon and Tsallis use a histogram plug-in of feature 0, which ignores geometry and favors balanced partitions."
        }
    }
}

fn summary(cfg: &ExperimentConfig, outcomes: &[Outcome]) -> Result<String, CliError> {
    let mut s = String::from("# Benchmark summary\n\n");
    let _ = writeln!(
        s,
        "Families: {}. Seeds: {}. Timing: {}.\n",
        cfg.families.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", "),
        cfg.seeds.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", "),
        match cfg.timing {
            Timing::Wall => "wall clock per pipeline call; concurrent tasks can inflate it, use `--jobs 1` for timing claims",
            Timing::Off => "off",
        }
    );
    for &experiment in &cfg.experiments {
        let primary = primary_metric(experiment);
        let mine: Vec<&Outcome> = outcomes.iter().filter(|o| o.task.experiment == experiment).collect();
        let _ = writeln!(s, "## {experiment}\n");
        let _ = writeln!(s, "Ranked by mean {primary} over {} runs per entropy.\n", mine.len() / cfg.families.len());
        let _ = writeln!(s, "| rank | entropy | mean {primary} | mean wall time (s) | time category |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        let mut per_spec: Vec<(EntropySpec, f64, f64)> = cfg
            .families
            .iter()
            .map(|&spec| {
                let runs: Vec<&&Outcome> = mine.iter().filter(|o| o.task.family == spec).collect();
                let values: Vec<f64> = runs.iter().map(|o| o.metrics[0].1).collect();
                let times: Vec<f64> = runs.iter().map(|o| o.wall_time).collect();
                (spec, mean(&values), mean(&times))
            })
            .collect();
        per_spec.sort_by(|a, b| b.1.total_cmp(&a.1));
        for (rank, (spec, value, time)) in per_spec.iter().enumerate() {
            let (wall, category) = timing_text(cfg.timing, *time)?;
            let _ = writeln!(s, "| {} | {spec} | {} | {wall} | {category} |", rank + 1, value_text(*value));
        }
        let mut by_family: BTreeMap<Family, Vec<f64>> = BTreeMap::new();
        for o in &mine {
            by_family.entry(o.task.family.family()).or_default().push(o.metrics[0].1);
        }
        let means: BTreeMap<Family, f64> = by_family.iter().map(|(&f, v)| (f, mean(v))).collect();
        let c = compare(experiment, &means);
        let _ = writeln!(s, "\nObserved ordering: {}", c.observed);
        let _ = writeln!(s, "Reference ordering: {}", c.reference);
        let _ = writeln!(s, "Agreement: {}\n", c.agreement);
        let _ = writeln!(s, "{}\n", note(experiment));
    }
    Ok(s)
}

fn slug(text: &str) -> String {
    text.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' }).collect()
}

/// Files written by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub files: Vec<PathBuf>,
    pub rows: usize,
}

pub fn write_reports(cfg: &ExperimentConfig, outcomes: &[Outcome]) -> Result<Written, CliError> {
    let out = &cfg.out;
    let mut files = Vec::new();
    let mut put = |rel: PathBuf, bytes: &[u8]| -> Result<(), CliError> {
        let path = out.join(&rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(CliError::io(parent))?;
        }
        write_file(&path, bytes)?;
        files.push(rel);
        Ok(())
    };

    let all_rows = rows(outcomes, cfg.timing)?;
    put(PathBuf::from("report.csv"), &csv_bytes(&all_rows))?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Markdown => "md",
    };
    for &experiment in &cfg.experiments {
        let mine: Vec<&Outcome> = outcomes.iter().filter(|o| o.task.experiment == experiment).collect();
        let (header, body) = experiment_table(&mine, cfg.timing)?;
        put(PathBuf::from(format!("{experiment}.{ext}")), &table_bytes(&header, &body, cfg.format))?;
        for o in mine {
            let name = format!("{}_{}_s{}.pgm", slug(&o.task.family.to_string()), slug(&o.task.sweep.label()), o.task.seed);
            put(Path::new("images").join(experiment.name()).join(name), &write_pgm(&o.image))?;
        }
    }
    put(PathBuf::from("summary.md"), summary(cfg, outcomes)?.as_bytes())?;
    Ok(Written { files, rows: all_rows.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn means(pairs: &[(Family, f64)]) -> BTreeMap<Family, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn matching_order_agrees() {
        let c = compare(
            Experiment::Register,
            &means(&[(Family::Renyi, 0.9), (Family::Tsallis, 0.8), (Family::Shannon, 0.7)]),
        );
        assert_eq!(c.observed, "renyi > tsallis > shannon");
        assert_eq!(c.agreement, "yes");
    }

    #[test]
    fn ties_and_reversals_are_reported() {
        let c = compare(
            Experiment::Cluster,
            &means(&[(Family::Renyi, 0.9), (Family::Tsallis, 0.9), (Family::Shannon, 0.95)]),
        );
        assert_eq!(c.observed, "shannon > renyi = tsallis");
        assert_eq!(c.agreement, "no: tsallis ties renyi; renyi below shannon");
        let partial = compare(Experiment::Threshold, &means(&[(Family::Shannon, 0.5)]));
        assert!(partial.agreement.starts_with("not comparable"));
    }

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("renyi:0.5"), "renyi-0.5");
        assert_eq!(slug("variant=2d"), "variant-2d");
    }
}
