//! Machine- and human-readable reports. Machine output is JSON with a fixed
//! field order and exact rationals rendered as `p/q` strings; lattice points
//! are integer arrays in cocharacter coordinates. Identical jobs produce
//! byte-identical machine output.

use crate::criterion::{
    ExponentStatus, ParabolicVerdict, ProbeClassification, ProbeReport, Verdict,
};
use crate::involution::InvolutionData;
use crate::lattice::{rat_to_string, Int, Rat};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const TOOL_NAME: &str = "relcrit";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn simple_name(k: usize) -> String {
    format!("alpha_{}", k + 1)
}

pub fn restricted_name(k: usize) -> String {
    format!("abar_{}", k + 1)
}

pub fn parse_simple_name(name: &str) -> Result<usize> {
    name.trim()
        .strip_prefix("alpha_")
        .and_then(|s| s.parse::<usize>().ok())
        .and_then(|k| k.checked_sub(1))
        .ok_or_else(|| Error::Parse(format!("bad simple root name `{name}`")))
}

pub fn subset_names(subset: &[usize]) -> Vec<String> {
    subset.iter().map(|&k| simple_name(k)).collect()
}

pub fn ibar_names(ibar: &[usize]) -> Vec<String> {
    ibar.iter().map(|&k| restricted_name(k)).collect()
}

fn int_point(point: &[Int]) -> Result<Vec<i64>> {
    point
        .iter()
        .map(|x| {
            i64::try_from(x).map_err(|_| {
                Error::InvariantViolation("lattice point exceeds the i64 report range".into())
            })
        })
        .collect()
}

fn rats_to_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(rat_to_string).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExponentReport {
    pub label: String,
    pub status: String,
    pub vanishes_centrally: bool,
    pub ray_pairings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct WitnessReport {
    pub exponent: String,
    pub point: Vec<i64>,
    pub pairing: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ParabolicReport {
    pub parabolic: Vec<String>,
    pub restricted: Vec<String>,
    pub outcome: String,
    pub rays: Vec<Vec<i64>>,
    pub exponents: Vec<ExponentReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Pairings of the normalized-calculus variants recorded alongside a golden
/// run, when the preset carries both normalizations.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NormalizedEntry {
    pub label: String,
    pub ray_pairings: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub golden: bool,
    pub lambda_only: bool,
    pub unitary: bool,
    pub outcome: String,
    pub parabolics: Vec<ParabolicReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_calculus: Option<Vec<NormalizedEntry>>,
}

fn status_string(s: &ExponentStatus) -> String {
    match s {
        ExponentStatus::Pass => "pass".into(),
        ExponentStatus::Fail => "fail".into(),
        ExponentStatus::Skipped => "skipped".into(),
    }
}

fn outcome_string(pass: bool) -> String {
    if pass {
        "pass".into()
    } else {
        "fail".into()
    }
}

pub fn parabolic_report(v: &ParabolicVerdict) -> Result<ParabolicReport> {
    Ok(ParabolicReport {
        parabolic: subset_names(&v.subset),
        restricted: ibar_names(&v.ibar),
        outcome: outcome_string(v.pass),
        rays: v.rays.iter().map(|r| int_point(r)).collect::<Result<_>>()?,
        exponents: v
            .exponents
            .iter()
            .map(|e| ExponentReport {
                label: e.label.clone(),
                status: status_string(&e.status),
                vanishes_centrally: e.vanishes_centrally,
                ray_pairings: rats_to_strings(&e.pairings),
            })
            .collect(),
        witness: v
            .witness
            .as_ref()
            .map(|w| -> Result<WitnessReport> {
                Ok(WitnessReport {
                    exponent: w.exponent_label.clone(),
                    point: int_point(&w.point)?,
                    pairing: rat_to_string(&w.pairing),
                    reason: w.reason.clone(),
                })
            })
            .transpose()?,
        note: v.note.clone(),
    })
}

pub fn check_report(
    preset: Option<&str>,
    golden: bool,
    lambda_only: bool,
    unitary: bool,
    verdict: &Verdict,
    normalized: Option<Vec<NormalizedEntry>>,
) -> Result<CheckReport> {
    Ok(CheckReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "check".into(),
        preset: preset.map(|s| s.to_string()),
        golden,
        lambda_only,
        unitary,
        outcome: outcome_string(verdict.pass),
        parabolics: verdict
            .parabolics
            .iter()
            .map(parabolic_report)
            .collect::<Result<_>>()?,
        normalized_calculus: normalized,
    })
}

impl CheckReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let verdict_line = if self.outcome == "pass" {
            if self.lambda_only {
                "PASS (H-square integrable w.r.t. lambda)"
            } else {
                "PASS (H-square integrable)"
            }
        } else if self.lambda_only {
            "FAIL (not H-square integrable w.r.t. lambda)"
        } else {
            "FAIL (criterion violated)"
        };
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset: {p}\n"));
        }
        out.push_str(&format!(
            "options: golden={} lambda_only={} unitary={}\n",
            self.golden, self.lambda_only, self.unitary
        ));
        out.push_str(&format!("verdict: {verdict_line}\n\n"));
        for p in &self.parabolics {
            let name = if p.parabolic.is_empty() {
                "{}".to_string()
            } else {
                format!("{{{}}}", p.parabolic.join(", "))
            };
            out.push_str(&format!(
                "parabolic I = {name}   [{}]\n",
                p.outcome.to_uppercase()
            ));
            if let Some(note) = &p.note {
                out.push_str(&format!("  note: {note}\n"));
            }
            for (j, ray) in p.rays.iter().enumerate() {
                out.push_str(&format!("  ray {}: {:?}\n", j + 1, ray));
            }
            for e in &p.exponents {
                let pairings = if e.ray_pairings.is_empty() {
                    "-".to_string()
                } else {
                    e.ray_pairings.join(", ")
                };
                out.push_str(&format!(
                    "  exponent {:<14} status={:<7} pairings=[{}]\n",
                    e.label, e.status, pairings
                ));
            }
            if let Some(w) = &p.witness {
                out.push_str(&format!(
                    "  witness: exponent {} at point {:?} pairs to {} ({})\n",
                    w.exponent, w.point, w.pairing, w.reason
                ));
            }
            out.push('\n');
        }
        if let Some(entries) = &self.normalized_calculus {
            out.push_str("normalized-calculus pairings (recorded alongside):\n");
            for e in entries {
                out.push_str(&format!(
                    "  {:<14} [{}]\n",
                    e.label,
                    e.ray_pairings.join(", ")
                ));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SubsetReport {
    pub parabolic: Vec<String>,
    pub restricted: Vec<String>,
    pub split_lattice: Vec<Vec<i64>>,
    pub modulus_exponent: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DescribeReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub rank: usize,
    pub simple_roots: Vec<Vec<i64>>,
    pub positive_root_count: usize,
    pub fixed_simple: Vec<String>,
    pub restricted_basis: Vec<Vec<String>>,
    pub antifixed_lattice: Vec<Vec<i64>>,
    pub central_lattice: Vec<Vec<i64>>,
    pub split_subsets: Vec<SubsetReport>,
}

pub fn describe_report(
    preset: Option<&str>,
    description: Option<&str>,
    data: &InvolutionData,
) -> Result<DescribeReport> {
    let rd = data.base();
    let simple_roots: Vec<Vec<i64>> = (0..rd.simple_count())
        .map(|k| int_point(rd.simple_root(k)))
        .collect::<Result<_>>()?;
    let restricted_basis: Vec<Vec<String>> = (0..data.dbar_len())
        .map(|k| rats_to_strings(data.dbar_vector(k)))
        .collect();
    let lattice_rows = |l: &crate::lattice::Sublattice| -> Result<Vec<Vec<i64>>> {
        l.basis_rows().iter().map(|r| int_point(r)).collect()
    };
    let mut split_subsets = Vec::new();
    for s in data.sigma_split_subsets() {
        let p = rd.parabolic(&s.i);
        split_subsets.push(SubsetReport {
            parabolic: subset_names(&s.i),
            restricted: ibar_names(&s.ibar),
            split_lattice: lattice_rows(&s.s_lattice)?,
            modulus_exponent: int_point(&p.two_rho)?,
        });
    }
    Ok(DescribeReport {
        tool: TOOL_NAME.into(),
        version: TOOL_VERSION.into(),
        command: "describe".into(),
        preset: preset.map(|s| s.to_string()),
        description: description.map(|s| s.to_string()),
        rank: rd.rank(),
        simple_roots,
        positive_root_count: rd.positive_roots().len(),
        fixed_simple: subset_names(data.delta_sigma()),
        restricted_basis,
        antifixed_lattice: lattice_rows(data.s0_lattice())?,
        central_lattice: lattice_rows(data.z0_lattice())?,
        split_subsets,
    })
}

impl DescribeReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset: {p}\n"));
        }
        if let Some(d) = &self.description {
            out.push_str(&format!("{d}\n"));
        }
        out.push_str(&format!(
            "rank {} with {} positive roots; simple system {:?}\n",
            self.rank, self.positive_root_count, self.simple_roots
        ));
        out.push_str(&format!("fixed simple roots: {:?}\n", self.fixed_simple));
        out.push_str(&format!(
            "restricted basis ({}): {:?}\n",
            self.restricted_basis.len(),
            self.restricted_basis
        ));
        out.push_str(&format!(
            "antifixed lattice: {:?}\n",
            self.antifixed_lattice
        ));
        out.push_str(&format!("central lattice: {:?}\n", self.central_lattice));
        out.push_str("split subsets:\n");
        for s in &self.split_subsets {
            out.push_str(&format!(
                "  I = {:?}  Ibar = {:?}  split lattice {:?}  modulus exponent {:?}\n",
                s.parabolic, s.restricted, s.split_lattice, s.modulus_exponent
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PartitionReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub threshold: i64,
    pub radius: i64,
    pub outcome: String,
    pub points_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_point: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation_members: Option<Vec<Vec<String>>>,
}

impl PartitionReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset: {p}\n"));
        }
        out.push_str(&format!(
            "threshold N = {}, coefficient radius = {}\n",
            self.threshold, self.radius
        ));
        if self.outcome == "ok" {
            out.push_str(&format!(
                "partition verified: 0 overlaps, 0 gaps ({} box points)\n",
                self.points_checked
            ));
        } else {
            out.push_str(&format!(
                "partition violated at {:?}: contained in {:?}\n",
                self.violation_point.as_ref().unwrap(),
                self.violation_members.as_ref().unwrap()
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MultisetEntryReport {
    pub vector: Vec<String>,
    pub coset_word: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coset_permutation: Option<Vec<usize>>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExponentsReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub gl_rank: usize,
    pub rep: String,
    pub along: Vec<String>,
    pub total: usize,
    pub entries: Vec<MultisetEntryReport>,
}

impl ExponentsReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "GL({}) representation `{}` along I = {:?}\n",
            self.gl_rank, self.rep, self.along
        ));
        out.push_str(&format!(
            "{} exponents ({} distinct entries)\n",
            self.total,
            self.entries.len()
        ));
        for e in &self.entries {
            let perm = e
                .coset_permutation
                .as_ref()
                .map(|p| format!("{p:?}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "  [{}] x{}  coset {} perm {}\n",
                e.vector.join(", "),
                e.multiplicity,
                e.coset_word,
                perm
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesEntryReport {
    pub label: String,
    pub vector: Vec<String>,
    pub classification: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_ratio: Option<f64>,
    pub shell_sums: Vec<f64>,
    pub central_dependent: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub parabolic: Vec<String>,
    pub q: u32,
    pub poly_degree: u32,
    pub radii: Vec<usize>,
    pub entries: Vec<SeriesEntryReport>,
}

pub fn classification_string(c: ProbeClassification) -> String {
    match c {
        ProbeClassification::Convergent => "convergent".into(),
        ProbeClassification::Divergent => "divergent".into(),
        ProbeClassification::Inconclusive => "inconclusive".into(),
    }
}

pub fn series_entry(label: &str, vector: &[Rat], probe: &ProbeReport) -> SeriesEntryReport {
    SeriesEntryReport {
        label: label.to_string(),
        vector: rats_to_strings(vector),
        classification: classification_string(probe.classification),
        tail_ratio: probe.tail_ratio,
        shell_sums: probe.shell_sums.clone(),
        central_dependent: probe.central_dependent,
    }
}

impl SeriesReport {
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preset {
            out.push_str(&format!("preset: {p}\n"));
        }
        out.push_str(&format!(
            "series probe along I = {:?} with q = {}, degree = {}, radii = {:?}\n",
            self.parabolic, self.q, self.poly_degree, self.radii
        ));
        for e in &self.entries {
            let ratio = e
                .tail_ratio
                .map(|r| format!("{r:.4}"))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "  {:<14} [{}] -> {} (tail ratio {})\n",
                e.label,
                e.vector.join(", "),
                e.classification,
                ratio
            ));
            if e.central_dependent {
                out.push_str("    note: exponent does not vanish centrally; sums depend on representatives\n");
            }
        }
        out
    }
}

/// Serialize any report to the canonical machine form.
pub fn to_machine<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_names_round_trip() {
        assert_eq!(simple_name(0), "alpha_1");
        assert_eq!(parse_simple_name("alpha_3").unwrap(), 2);
        assert!(parse_simple_name("alpha_0").is_err());
        assert!(parse_simple_name("beta_1").is_err());
    }

    #[test]
    fn machine_output_round_trips_byte_for_byte() {
        let report = CheckReport {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: "check".into(),
            preset: Some("gl3_inner".into()),
            golden: true,
            lambda_only: true,
            unitary: true,
            outcome: "pass".into(),
            parabolics: vec![ParabolicReport {
                parabolic: vec![],
                restricted: vec![],
                outcome: "pass".into(),
                rays: vec![vec![1, 0, -1]],
                exponents: vec![ExponentReport {
                    label: "chi_1".into(),
                    status: "pass".into(),
                    vanishes_centrally: true,
                    ray_pairings: vec!["1".into()],
                }],
                witness: None,
                note: None,
            }],
            normalized_calculus: Some(vec![NormalizedEntry {
                label: "chi_1".into(),
                ray_pairings: vec!["1/2".into()],
            }]),
        };
        let first = to_machine(&report).unwrap();
        let parsed: CheckReport = serde_json::from_str(&first).unwrap();
        let second = to_machine(&parsed).unwrap();
        assert_eq!(first, second);
        assert_eq!(parsed, report);
    }
}
