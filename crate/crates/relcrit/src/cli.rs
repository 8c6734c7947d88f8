//! Batch job layer: structured input documents, job descriptions and the
//! dispatcher producing deterministic reports.
//!
//! Exit convention: successful evaluation is 0 whatever the verdict; with
//! `fail_on_negative` a failing verdict maps to 3; invalid input maps to 2.

use crate::cone::{partition_check, PartitionOutcome};
use crate::criterion::{check_all, series_probe, CheckOptions, Exponent, ExponentFamily, Verdict};
use crate::involution::InvolutionData;
use crate::jacquet::{borel_exponents, parabolic_exponents, RepSpec};
use crate::lattice::{parse_rat, rat_to_string, Rat};
use crate::presets::{datum_from_parts, golden_family, golden_family_normalized, preset};
use crate::report::{
    self, check_report, describe_report, parse_simple_name, series_entry, subset_names, to_machine,
    NormalizedEntry,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Inline datum given in an input document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InlineDatum {
    pub rank: usize,
    pub roots: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coroots: Option<Vec<Vec<i64>>>,
    pub simple: Vec<usize>,
    pub sigma: Vec<Vec<i64>>,
}

/// One exponent entry of an input document. The parabolic is the list of
/// simple-root names of the split subset carrying the exponent; rationals
/// are strings so exactness survives any parser.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentInput {
    pub parabolic: Vec<String>,
    pub vector: Vec<String>,
    #[serde(default)]
    pub lambda_support: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InputOptions {
    #[serde(default)]
    pub lambda_only: bool,
    #[serde(default)]
    pub unitary: bool,
    #[serde(default)]
    pub threshold: Option<i64>,
    #[serde(default)]
    pub radius: Option<i64>,
    #[serde(default)]
    pub q: Option<u32>,
    #[serde(default)]
    pub poly_degree: Option<u32>,
    #[serde(default)]
    pub fail_on_negative: bool,
}

/// A structured job input: either a preset name or an inline datum, plus
/// exponent data and options.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct InputDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_datum: Option<InlineDatum>,
    #[serde(default)]
    pub exponents: Vec<ExponentInput>,
    #[serde(default)]
    pub options: InputOptions,
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Machine,
}

#[derive(Clone, Debug)]
pub enum Source {
    Preset(String),
    Inline(Box<InputDocument>),
}

#[derive(Clone, Debug)]
pub enum JobCommand {
    Describe {
        source: Source,
    },
    Check {
        source: Source,
        golden: bool,
        lambda_only: bool,
        unitary: bool,
    },
    Exponents {
        gl_rank: usize,
        rep: String,
        along: Vec<String>,
    },
    Partition {
        source: Source,
        threshold: i64,
        radius: i64,
    },
    Series {
        source: Source,
        golden: bool,
        vector: Option<Vec<String>>,
        parabolic: Vec<String>,
        q: u32,
        poly_degree: u32,
        radii: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: JobCommand,
    pub format: OutputFormat,
    pub fail_on_negative: bool,
}

pub struct RunOutcome {
    pub rendered: String,
    pub verdict_failed: bool,
}

struct ResolvedSource {
    preset_name: Option<String>,
    description: Option<String>,
    data: InvolutionData,
    document: Option<InputDocument>,
}

fn resolve(source: &Source) -> Result<ResolvedSource> {
    match source {
        Source::Preset(name) => {
            let desc = preset(name)?;
            let data = desc.build()?;
            desc.verify_golden_structure(&data)?;
            Ok(ResolvedSource {
                preset_name: Some(desc.name.clone()),
                description: Some(desc.description.clone()),
                data,
                document: None,
            })
        }
        Source::Inline(doc) => {
            if let Some(name) = &doc.preset {
                let desc = preset(name)?;
                let data = desc.build()?;
                desc.verify_golden_structure(&data)?;
                return Ok(ResolvedSource {
                    preset_name: Some(desc.name.clone()),
                    description: Some(desc.description.clone()),
                    data,
                    document: Some((**doc).clone()),
                });
            }
            let inline = doc
                .root_datum
                .as_ref()
                .ok_or_else(|| Error::InvalidJob("input needs `preset` or `root_datum`".into()))?;
            let (datum, sigma) = datum_from_parts(
                inline.rank,
                inline.roots.clone(),
                inline.coroots.clone(),
                inline.simple.clone(),
                inline.sigma.clone(),
            )?;
            let data = InvolutionData::build(datum, sigma)?;
            Ok(ResolvedSource {
                preset_name: None,
                description: None,
                data,
                document: Some((**doc).clone()),
            })
        }
    }
}

fn parse_subset(data: &InvolutionData, names: &[String]) -> Result<Vec<usize>> {
    let mut subset = names
        .iter()
        .map(|n| parse_simple_name(n))
        .collect::<Result<Vec<usize>>>()?;
    subset.sort_unstable();
    subset.dedup();
    for &k in &subset {
        if k >= data.base().simple_count() {
            return Err(Error::InvalidJob(format!(
                "simple position {k} out of range"
            )));
        }
    }
    Ok(subset)
}

fn family_from_document(data: &InvolutionData, doc: &InputDocument) -> Result<ExponentFamily> {
    let mut family = ExponentFamily::new(doc.options.unitary);
    for (idx, e) in doc.exponents.iter().enumerate() {
        let subset = parse_subset(data, &e.parabolic)?;
        if !data.is_sigma_split(&subset) {
            return Err(Error::NotSigmaSplit(subset));
        }
        let vector: Vec<Rat> = e
            .vector
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<_>>()?;
        if vector.len() != data.base().rank() {
            return Err(Error::DimensionMismatch {
                expected: data.base().rank(),
                got: vector.len(),
            });
        }
        let label = e
            .label
            .clone()
            .unwrap_or_else(|| format!("exp_{}", idx + 1));
        family.insert(&subset, Exponent::new(&label, vector, e.lambda_support));
    }
    Ok(family)
}

fn render<T: Serialize>(report: &T, table: String, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Table => Ok(table),
        OutputFormat::Machine => to_machine(report),
    }
}

/// Execute a job and produce its deterministic report.
pub fn run(job: &JobSpec) -> Result<RunOutcome> {
    match &job.command {
        JobCommand::Describe { source } => {
            let resolved = resolve(source)?;
            let report = describe_report(
                resolved.preset_name.as_deref(),
                resolved.description.as_deref(),
                &resolved.data,
            )?;
            Ok(RunOutcome {
                rendered: render(&report, report.render_table(), job.format)?,
                verdict_failed: false,
            })
        }
        JobCommand::Check {
            source,
            golden,
            lambda_only,
            unitary,
        } => {
            let resolved = resolve(source)?;
            let doc_opts = resolved
                .document
                .as_ref()
                .map(|d| d.options.clone())
                .unwrap_or_default();
            let opts = CheckOptions {
                lambda_only: *lambda_only || doc_opts.lambda_only,
                unitary: *unitary || doc_opts.unitary,
            };
            let (verdict, normalized): (Verdict, Option<Vec<NormalizedEntry>>) = if *golden {
                let name = resolved
                    .preset_name
                    .as_deref()
                    .ok_or_else(|| Error::InvalidJob("--golden requires a preset source".into()))?;
                let desc = preset(name)?;
                let family = golden_family(&desc, &resolved.data)?;
                let verdict = check_all(&resolved.data, &family, opts)?;
                let normalized = match golden_family_normalized(&desc, &resolved.data)? {
                    None => None,
                    Some(norm_family) => {
                        let norm_verdict = check_all(&resolved.data, &norm_family, opts)?;
                        let minimal = norm_verdict
                            .parabolics
                            .iter()
                            .find(|p| !p.exponents.is_empty());
                        minimal.map(|p| {
                            p.exponents
                                .iter()
                                .map(|e| NormalizedEntry {
                                    label: e.label.clone(),
                                    ray_pairings: e.pairings.iter().map(rat_to_string).collect(),
                                })
                                .collect()
                        })
                    }
                };
                (verdict, normalized)
            } else {
                let doc = resolved.document.as_ref().ok_or_else(|| {
                    Error::InvalidJob("check without --golden needs an input document".into())
                })?;
                let family = family_from_document(&resolved.data, doc)?;
                (check_all(&resolved.data, &family, opts)?, None)
            };
            let failed = !verdict.pass;
            let report = check_report(
                resolved.preset_name.as_deref(),
                *golden,
                opts.lambda_only,
                opts.unitary,
                &verdict,
                normalized,
            )?;
            Ok(RunOutcome {
                rendered: render(&report, report.render_table(), job.format)?,
                verdict_failed: failed,
            })
        }
        JobCommand::Exponents {
            gl_rank,
            rep,
            along,
        } => {
            let spec = RepSpec::parse(rep)?;
            if spec.size() != *gl_rank {
                return Err(Error::InvalidJob(format!(
                    "representation has size {} but the rank option says {gl_rank}",
                    spec.size()
                )));
            }
            let mut subset = along
                .iter()
                .map(|n| parse_simple_name(n))
                .collect::<Result<Vec<usize>>>()?;
            subset.sort_unstable();
            subset.dedup();
            let report = if subset.is_empty() {
                let m = borel_exponents(&spec)?;
                report::ExponentsReport {
                    tool: report::TOOL_NAME.into(),
                    version: report::TOOL_VERSION.into(),
                    command: "exponents".into(),
                    gl_rank: *gl_rank,
                    rep: rep.clone(),
                    along: vec![],
                    total: m.total(),
                    entries: m
                        .entries
                        .iter()
                        .map(|e| report::MultisetEntryReport {
                            vector: e.vector.iter().map(rat_to_string).collect(),
                            coset_word: e.coset.word.clone(),
                            coset_permutation: e.coset.permutation.clone(),
                            multiplicity: e.multiplicity,
                        })
                        .collect(),
                }
            } else {
                let p = parabolic_exponents(&spec, &subset)?;
                report::ExponentsReport {
                    tool: report::TOOL_NAME.into(),
                    version: report::TOOL_VERSION.into(),
                    command: "exponents".into(),
                    gl_rank: *gl_rank,
                    rep: rep.clone(),
                    along: subset_names(&subset),
                    total: p.total(),
                    entries: p
                        .entries
                        .iter()
                        .map(|e| report::MultisetEntryReport {
                            vector: e.values.iter().map(rat_to_string).collect(),
                            coset_word: e
                                .cosets
                                .iter()
                                .map(|c| c.word.clone())
                                .collect::<Vec<_>>()
                                .join(" | "),
                            coset_permutation: None,
                            multiplicity: e.multiplicity,
                        })
                        .collect(),
                }
            };
            Ok(RunOutcome {
                rendered: render(&report, report.render_table(), job.format)?,
                verdict_failed: false,
            })
        }
        JobCommand::Partition {
            source,
            threshold,
            radius,
        } => {
            let resolved = resolve(source)?;
            let doc_opts = resolved
                .document
                .as_ref()
                .map(|d| d.options.clone())
                .unwrap_or_default();
            let threshold = doc_opts.threshold.unwrap_or(*threshold);
            let radius = doc_opts.radius.unwrap_or(*radius);
            if threshold < 1 {
                return Err(Error::InvalidJob("threshold must be at least 1".into()));
            }
            if radius < 1 {
                return Err(Error::InvalidJob("radius must be at least 1".into()));
            }
            let outcome = partition_check(&resolved.data, threshold, radius);
            let report = match outcome {
                PartitionOutcome::Ok { points_checked } => report::PartitionReport {
                    tool: report::TOOL_NAME.into(),
                    version: report::TOOL_VERSION.into(),
                    command: "partition".into(),
                    preset: resolved.preset_name.clone(),
                    threshold,
                    radius,
                    outcome: "ok".into(),
                    points_checked,
                    violation_point: None,
                    violation_members: None,
                },
                PartitionOutcome::Violation { point, containing } => report::PartitionReport {
                    tool: report::TOOL_NAME.into(),
                    version: report::TOOL_VERSION.into(),
                    command: "partition".into(),
                    preset: resolved.preset_name.clone(),
                    threshold,
                    radius,
                    outcome: "violation".into(),
                    points_checked: 0,
                    violation_point: Some(
                        point
                            .iter()
                            .map(|x| i64::try_from(x).unwrap_or_default())
                            .collect(),
                    ),
                    violation_members: Some(containing.iter().map(|i| subset_names(i)).collect()),
                },
            };
            let failed = report.outcome != "ok";
            Ok(RunOutcome {
                rendered: render(&report, report.render_table(), job.format)?,
                verdict_failed: failed,
            })
        }
        JobCommand::Series {
            source,
            golden,
            vector,
            parabolic,
            q,
            poly_degree,
            radii,
        } => {
            let resolved = resolve(source)?;
            let doc_opts = resolved
                .document
                .as_ref()
                .map(|d| d.options.clone())
                .unwrap_or_default();
            let q = doc_opts.q.unwrap_or(*q);
            let poly_degree = doc_opts.poly_degree.unwrap_or(*poly_degree);

            // assemble the probe targets: golden family, explicit vector, or
            // the document's exponent entries
            let mut targets: Vec<(Vec<usize>, Exponent)> = Vec::new();
            if *golden {
                let name = resolved
                    .preset_name
                    .as_deref()
                    .ok_or_else(|| Error::InvalidJob("--golden requires a preset source".into()))?;
                let desc = preset(name)?;
                let g = desc.golden.as_ref().ok_or_else(|| {
                    Error::InvalidJob(format!("preset {name} has no golden data"))
                })?;
                for e in &g.exponents {
                    if e.lambda_support {
                        targets.push((
                            g.parabolic.clone(),
                            Exponent::new(&e.label, e.vector.clone(), true),
                        ));
                    }
                }
            } else if let Some(vec_strings) = vector {
                let subset = parse_subset(&resolved.data, parabolic)?;
                let v: Vec<Rat> = vec_strings
                    .iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<_>>()?;
                targets.push((subset, Exponent::new("probe", v, true)));
            } else if let Some(doc) = &resolved.document {
                for (idx, e) in doc.exponents.iter().enumerate() {
                    let subset = parse_subset(&resolved.data, &e.parabolic)?;
                    let v: Vec<Rat> = e
                        .vector
                        .iter()
                        .map(|s| parse_rat(s))
                        .collect::<Result<_>>()?;
                    let label = e
                        .label
                        .clone()
                        .unwrap_or_else(|| format!("exp_{}", idx + 1));
                    targets.push((subset, Exponent::new(&label, v, e.lambda_support)));
                }
            }
            if targets.is_empty() {
                return Err(Error::InvalidJob(
                    "series needs --golden, --vector, or exponents in the input".into(),
                ));
            }
            let subset_key = targets[0].0.clone();
            if targets.iter().any(|(s, _)| *s != subset_key) {
                return Err(Error::InvalidJob(
                    "series probes one parabolic at a time".into(),
                ));
            }
            let subset = resolved
                .data
                .subset_by_i(&subset_key)
                .ok_or_else(|| Error::NotSigmaSplit(subset_key.clone()))?;
            let mut entries = Vec::new();
            for (_, e) in &targets {
                let probe = series_probe(&resolved.data, subset, e, poly_degree, q, radii)?;
                entries.push(series_entry(&e.label, &e.vector, &probe));
            }
            let report = report::SeriesReport {
                tool: report::TOOL_NAME.into(),
                version: report::TOOL_VERSION.into(),
                command: "series".into(),
                preset: resolved.preset_name.clone(),
                parabolic: subset_names(&subset_key),
                q,
                poly_degree,
                radii: radii.clone(),
                entries,
            };
            let failed = report
                .entries
                .iter()
                .any(|e| e.classification == "divergent");
            Ok(RunOutcome {
                rendered: render(&report, report.render_table(), job.format)?,
                verdict_failed: failed,
            })
        }
    }
}

/// Default radii of the series probe.
pub fn default_radii() -> Vec<usize> {
    vec![4, 8, 12, 16]
}
