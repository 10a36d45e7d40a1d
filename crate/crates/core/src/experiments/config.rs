//! Serializable experiment configurations and the files they produce.
//!
//! Running the same config twice yields byte-identical artifacts: every random draw is
//! seeded per index, every parallel loop merges in index order, and floats are printed
//! with the shortest round-trip representation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::hits::{lacunary_hits, multiplicative_hits};
use super::pipeline::pipeline;
use crate::dispersion::{concentration_survey, sample_betas, Scale};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::kronecker::{build_inhom_sequence, geometric_sequence, LacunarySequence};
use crate::measures::MeasureModel;
use crate::realnum::RealSpec;

pub const SPEC_VERSION: u32 = 1;

/// A textual sequence source: `geometric:m`, `terms:a,b,c,…` or `inhom:α;γ`.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq)]
pub enum SequenceSource {
    Geometric(u64),
    Terms(Vec<BigInt>),
    Inhomogeneous { alpha: RealSpec, gamma: RealSpec },
}

impl SequenceSource {
    /// The first `count` terms (all terms for `terms:`, which must have enough).
    pub fn build(&self, count: usize) -> Result<LacunarySequence> {
        match self {
            SequenceSource::Geometric(m) => geometric_sequence(*m, count),
            SequenceSource::Terms(terms) => {
                if terms.len() < count {
                    return Err(Error::invalid(format!("{} terms supplied, {count} needed", terms.len())));
                }
                LacunarySequence::from_terms(terms.clone())
            }
            SequenceSource::Inhomogeneous { alpha, gamma } => Ok(build_inhom_sequence(alpha, gamma, count, None)?.sequence),
        }
    }
}

impl fmt::Display for SequenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSource::Geometric(m) => write!(f, "geometric:{m}"),
            SequenceSource::Terms(t) => {
                let s: Vec<String> = t.iter().map(BigInt::to_string).collect();
                write!(f, "terms:{}", s.join(","))
            }
            SequenceSource::Inhomogeneous { alpha, gamma } => write!(f, "inhom:{alpha};{gamma}"),
        }
    }
}

impl FromStr for SequenceSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<SequenceSource> {
        let s = s.trim();
        if let Some(m) = s.strip_prefix("geometric:") {
            return m.parse().map(SequenceSource::Geometric).map_err(|_| Error::Parse(format!("bad base {m:?}")));
        }
        if let Some(t) = s.strip_prefix("terms:") {
            let terms = t
                .split(',')
                .map(|x| x.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad term {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SequenceSource::Terms(terms));
        }
        if let Some(rest) = s.strip_prefix("inhom:") {
            let (a, g) = rest.split_once(';').unwrap_or((rest, "0"));
            return Ok(SequenceSource::Inhomogeneous {
                alpha: a.parse()?,
                gamma: g.parse()?,
            });
        }
        Err(Error::Parse(format!("unknown sequence source {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    MultiplicativeHits {
        alpha: RealSpec,
        gamma: RealSpec,
        beta: RealSpec,
        delta: RealSpec,
        n_max: u64,
        epsilon: f64,
    },
    LacunaryHits {
        sequence: String,
        beta: RealSpec,
        delta: RealSpec,
        t_max: usize,
        epsilon: f64,
    },
    Survey {
        sequence: String,
        measure: String,
        blocks: Vec<usize>,
        epsilon: f64,
        samples: usize,
        seed: u64,
    },
    Pipeline {
        alpha: RealSpec,
        gamma: RealSpec,
        delta: RealSpec,
        measure: String,
        epsilon: f64,
        t_max: usize,
        samples: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub spec_version: u32,
    #[serde(flatten)]
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> ExperimentConfig {
        ExperimentConfig {
            spec_version: SPEC_VERSION,
            experiment,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn from_json(s: &str) -> Result<ExperimentConfig> {
        let c: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if c.spec_version != SPEC_VERSION {
            return Err(Error::invalid(format!(
                "spec_version {} is not supported (expected {SPEC_VERSION})",
                c.spec_version
            )));
        }
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Output files plus a machine-readable summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub files: Vec<Artifact>,
    pub summary: serde_json::Value,
}

impl Artifacts {
    fn new(config: &ExperimentConfig, summary: serde_json::Value, mut files: Vec<Artifact>) -> Artifacts {
        files.insert(
            0,
            Artifact {
                name: "config.json".into(),
                contents: config.to_json(),
            },
        );
        files.push(Artifact {
            name: "summary.json".into(),
            contents: serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
        });
        Artifacts { files, summary }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for f in &self.files {
            std::fs::write(dir.join(&f.name), &f.contents)?;
        }
        Ok(())
    }
}

fn artifact(name: &str, contents: String) -> Artifact {
    Artifact { name: name.into(), contents }
}

pub fn run(config: &ExperimentConfig, exec: Execution) -> Result<Artifacts> {
    if config.spec_version != SPEC_VERSION {
        return Err(Error::invalid(format!("spec_version {} is not supported", config.spec_version)));
    }
    match &config.experiment {
        Experiment::MultiplicativeHits {
            alpha,
            gamma,
            beta,
            delta,
            n_max,
            epsilon,
        } => {
            let scan = multiplicative_hits(alpha, gamma, beta, delta, *n_max, *epsilon, exec)?;
            let summary = json!({
                "kind": "multiplicative_hits",
                "scanned": scan.records.len(),
                "hits": scan.hit_count(),
                "skipped": scan.skipped,
                "trend": scan.trend,
            });
            Ok(Artifacts::new(
                config,
                summary,
                vec![artifact("hits.csv", scan.hits_csv()), artifact("trend.csv", scan.trend_csv())],
            ))
        }
        Experiment::LacunaryHits {
            sequence,
            beta,
            delta,
            t_max,
            epsilon,
        } => {
            let seq = sequence.parse::<SequenceSource>()?.build(*t_max)?;
            let scan = lacunary_hits(&seq, beta, delta, *t_max, *epsilon, exec)?;
            let hit_ts: Vec<String> = scan.hits().map(|r| r.index.to_string()).collect();
            let summary = json!({
                "kind": "lacunary_hits",
                "scanned": scan.records.len(),
                "hits": scan.hit_count(),
                "hit_indices": hit_ts,
                "skipped": scan.skipped,
                "trend": scan.trend,
            });
            Ok(Artifacts::new(
                config,
                summary,
                vec![artifact("hits.csv", scan.hits_csv()), artifact("trend.csv", scan.trend_csv())],
            ))
        }
        Experiment::Survey {
            sequence,
            measure,
            blocks,
            epsilon,
            samples,
            seed,
        } => {
            let t_max = *blocks.iter().max().ok_or_else(|| Error::invalid("survey needs at least one block"))?;
            let seq = sequence.parse::<SequenceSource>()?.build(2 * t_max)?;
            let model: MeasureModel = measure.parse()?;
            let betas = sample_betas(&model, &seq, t_max, *samples, *seed, exec)?;
            let mut csv = String::new();
            let mut per_block = Vec::new();
            for &t in blocks {
                let survey = concentration_survey(&seq, &betas, &Scale::new(t, *epsilon)?, exec)?;
                let body = survey.to_csv();
                if csv.is_empty() {
                    csv.push_str(&body);
                } else {
                    csv.push_str(body.split_once('\n').map_or("", |(_, rest)| rest));
                }
                per_block.push(survey.summary_json());
            }
            let summary = json!({ "kind": "survey", "blocks": per_block });
            Ok(Artifacts::new(config, summary, vec![artifact("survey.csv", csv)]))
        }
        Experiment::Pipeline {
            alpha,
            gamma,
            delta,
            measure,
            epsilon,
            t_max,
            samples,
            seed,
        } => {
            let model: MeasureModel = measure.parse()?;
            let rep = pipeline(alpha, gamma, delta, &model, *epsilon, *t_max, *samples, *seed, exec)?;
            let mut summary = rep.summary_json();
            summary["kind"] = json!("pipeline");
            Ok(Artifacts::new(
                config,
                summary,
                vec![
                    artifact("sequence.json", rep.sequence.sequence.to_json() + "\n"),
                    artifact("translated_hits.csv", rep.hits_csv()),
                ],
            ))
        }
    }
}
