//! The cone-positivity decision engine.
//!
//! An exponent is the unramified part of a quasi-character, stored as a
//! rational functional on the ambient character space: `|χ(s)| = q^{-<e, ν(s)>}`.
//! A parabolic check passes exactly when every considered exponent vanishes
//! on the central lattice and pairs strictly positively with every extreme
//! ray of the dominant cone of the split component taken modulo the center.
//! Witnesses and ray certificates are exact lattice data, so each verdict can
//! be re-verified independently.

use crate::cone::coefficient_box;
use crate::involution::{group_case_datum, InvolutionData, SigmaSplitSubset};
use crate::lattice::{
    complement_of, dot_rat, dot_rat_int, int, primitive_int_vector, rat_from_int, Int, Rat,
    Sublattice,
};
use crate::root_datum::BasedRootDatum;
use crate::{Error, Result};
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Unramified part of a quasi-character, with its analytic support flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Exponent {
    pub label: String,
    /// Functional on the ambient character space, length = datum rank.
    pub vector: Vec<Rat>,
    /// Whether the attached invariant form survives on this eigenspace.
    /// Always user-declared, never computed.
    pub lambda_support: bool,
}

impl Exponent {
    pub fn new(label: &str, vector: Vec<Rat>, lambda_support: bool) -> Self {
        Exponent {
            label: label.to_string(),
            vector,
            lambda_support,
        }
    }

    /// Values on the rows of a lattice basis: the restriction of the
    /// functional to that lattice.
    pub fn values_on(&self, lattice: &Sublattice) -> Vec<Rat> {
        lattice
            .basis_rows()
            .iter()
            .map(|row| dot_rat_int(&self.vector, row))
            .collect()
    }
}

/// Exponent lists keyed by split subsets of the simple system.
#[derive(Clone, Debug, Default)]
pub struct ExponentFamily {
    /// Keys are sorted simple-position subsets.
    pub entries: BTreeMap<Vec<usize>, Vec<Exponent>>,
    /// Enforce central vanishing as an input contract.
    pub unitary: bool,
    /// Declared unramified central character, if any.
    pub central_character: Option<Vec<Rat>>,
}

impl ExponentFamily {
    pub fn new(unitary: bool) -> Self {
        ExponentFamily {
            entries: BTreeMap::new(),
            unitary,
            central_character: None,
        }
    }

    pub fn insert(&mut self, subset: &[usize], exponent: Exponent) {
        let mut key = subset.to_vec();
        key.sort_unstable();
        self.entries.entry(key).or_default().push(exponent);
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CheckOptions {
    /// Only consider exponents with the support flag set.
    pub lambda_only: bool,
    /// Enforce central vanishing of every considered exponent.
    pub unitary: bool,
}

/// Status of one exponent inside a parabolic check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExponentStatus {
    Pass,
    Fail,
    /// Excluded by the support filter.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct ExponentCheck {
    pub label: String,
    pub status: ExponentStatus,
    pub vanishes_centrally: bool,
    /// Pairing against each extreme ray, in ray order.
    pub pairings: Vec<Rat>,
}

/// Exact counterexample for a failing check.
#[derive(Clone, Debug)]
pub struct Witness {
    pub exponent_label: String,
    /// Cone lattice point outside the central lattice.
    pub point: Vec<Int>,
    /// Its non-positive pairing with the exponent.
    pub pairing: Rat,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ParabolicVerdict {
    /// Simple positions of the parabolic subset.
    pub subset: Vec<usize>,
    /// Restricted positions (empty for the plain engine).
    pub ibar: Vec<usize>,
    /// Extreme rays of the dominant cone modulo the center, one per
    /// functional outside the subset.
    pub rays: Vec<Vec<Int>>,
    pub exponents: Vec<ExponentCheck>,
    pub pass: bool,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub parabolics: Vec<ParabolicVerdict>,
    pub pass: bool,
}

/// Geometry shared by the split and plain engines: an ambient lattice, its
/// central sublattice and the cut functionals, with precomputed extreme rays.
struct ConeGeometry {
    ambient: Sublattice,
    central: Sublattice,
    rays: Vec<Vec<Int>>,
}

impl ConeGeometry {
    fn build(ambient: Sublattice, central: Sublattice, functionals: &[Vec<Rat>]) -> Result<Self> {
        let complement = complement_of(&ambient, &central)?;
        if complement.rank() != functionals.len() {
            return Err(Error::InvariantViolation(format!(
                "cone is not simplicial: {} functionals on a complement of rank {}",
                functionals.len(),
                complement.rank()
            )));
        }
        let mut rays = Vec::with_capacity(functionals.len());
        for j in 0..functionals.len() {
            // coefficients on the complement basis solving <f_k, r> = δ_{jk}
            let rows: Vec<Vec<Rat>> = complement
                .basis_rows()
                .iter()
                .map(|b| functionals.iter().map(|f| dot_rat_int(f, b)).collect())
                .collect();
            let rhs: Vec<Rat> = (0..functionals.len())
                .map(|k| if k == j { Rat::one() } else { Rat::zero() })
                .collect();
            let coeffs = crate::lattice::solve_row_combination(&rows, &rhs).ok_or_else(|| {
                Error::InvariantViolation("cone functionals are degenerate".into())
            })?;
            let primitive = primitive_int_vector(&coeffs, false);
            let mut point = complement.point_from_coords(&primitive);
            // the scaling must keep the defining pairing positive
            if dot_rat_int(&functionals[j], &point).is_negative() {
                point = point.iter().map(|x| -x).collect();
            }
            rays.push(canonicalize_mod(&point, &central));
        }
        Ok(ConeGeometry {
            ambient,
            central,
            rays,
        })
    }

    fn check_exponent(
        &self,
        exponent: &Exponent,
        opts: CheckOptions,
    ) -> (ExponentCheck, Option<Witness>) {
        let vanishes = self
            .central
            .basis_rows()
            .iter()
            .all(|z| dot_rat_int(&exponent.vector, z).is_zero());
        let pairings: Vec<Rat> = self
            .rays
            .iter()
            .map(|r| dot_rat_int(&exponent.vector, r))
            .collect();
        if !vanishes {
            let reason = if opts.unitary {
                "exponent does not vanish on the central lattice (unitary contract violated)"
            } else {
                "exponent does not vanish on the central lattice"
            };
            let witness = self
                .central_witness(exponent)
                .map(|(point, pairing)| Witness {
                    exponent_label: exponent.label.clone(),
                    point,
                    pairing,
                    reason: reason.into(),
                });
            // with no rays and no unitary contract the region is empty and
            // nothing can fail
            if witness.is_none() && !opts.unitary {
                return (
                    ExponentCheck {
                        label: exponent.label.clone(),
                        status: ExponentStatus::Pass,
                        vanishes_centrally: false,
                        pairings,
                    },
                    None,
                );
            }
            return (
                ExponentCheck {
                    label: exponent.label.clone(),
                    status: ExponentStatus::Fail,
                    vanishes_centrally: false,
                    pairings,
                },
                witness.or_else(|| {
                    Some(Witness {
                        exponent_label: exponent.label.clone(),
                        point: vec![],
                        pairing: Rat::zero(),
                        reason: reason.into(),
                    })
                }),
            );
        }
        match pairings.iter().position(|p| !p.is_positive()) {
            None => (
                ExponentCheck {
                    label: exponent.label.clone(),
                    status: ExponentStatus::Pass,
                    vanishes_centrally: true,
                    pairings,
                },
                None,
            ),
            Some(j) => {
                let witness = Witness {
                    exponent_label: exponent.label.clone(),
                    point: self.rays[j].clone(),
                    pairing: pairings[j].clone(),
                    reason: "non-positive pairing on an extreme ray".into(),
                };
                (
                    ExponentCheck {
                        label: exponent.label.clone(),
                        status: ExponentStatus::Fail,
                        vanishes_centrally: true,
                        pairings,
                    },
                    Some(witness),
                )
            }
        }
    }

    /// For an exponent with a nonzero central value: a cone point outside the
    /// central lattice with non-positive pairing, when the cone has rays.
    fn central_witness(&self, exponent: &Exponent) -> Option<(Vec<Int>, Rat)> {
        let ray = self.rays.first()?;
        let z = self
            .central
            .basis_rows()
            .into_iter()
            .find(|z| !dot_rat_int(&exponent.vector, z).is_zero())?;
        let p0 = dot_rat_int(&exponent.vector, ray);
        let pz = dot_rat_int(&exponent.vector, &z);
        // integer k with p0 + k * pz <= 0
        let k = if pz.is_positive() {
            -(&p0 / &pz).ceil().to_integer()
        } else {
            (&p0 / &pz.clone().abs()).ceil().to_integer()
        };
        let point: Vec<Int> = ray.iter().zip(&z).map(|(r, zz)| r + &k * zz).collect();
        let pairing = dot_rat_int(&exponent.vector, &point);
        debug_assert!(!pairing.is_positive());
        Some((point, pairing))
    }
}

/// Pick the representative of `point + central` with least l1 norm,
/// lexicographically greatest among ties. Purely cosmetic but deterministic.
fn canonicalize_mod(point: &[Int], central: &Sublattice) -> Vec<Int> {
    if central.rank() == 0 {
        return point.to_vec();
    }
    let norm1 = |v: &[Int]| -> Int { v.iter().map(|x| x.abs()).sum() };
    let bound: i64 = i64::try_from(&norm1(point)).unwrap_or(8).max(1) + 1;
    let mut best = point.to_vec();
    for coeffs in coefficient_box(central.rank(), bound) {
        let ic: Vec<Int> = coeffs.iter().map(|&x| int(x)).collect();
        let shift = central.point_from_coords(&ic);
        let cand: Vec<Int> = point.iter().zip(&shift).map(|(p, s)| p + s).collect();
        let better = match norm1(&cand).cmp(&norm1(&best)) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => cand > best,
            std::cmp::Ordering::Greater => false,
        };
        if better {
            best = cand;
        }
    }
    best
}

fn split_geometry(data: &InvolutionData, subset: &SigmaSplitSubset) -> Result<ConeGeometry> {
    let functionals: Vec<Vec<Rat>> = (0..data.dbar_len())
        .filter(|k| !subset.ibar.contains(k))
        .map(|k| data.dbar_integral(k).iter().map(rat_from_int).collect())
        .collect();
    ConeGeometry::build(
        subset.s_lattice.clone(),
        data.z0_lattice().clone(),
        &functionals,
    )
}

fn run_check(
    geometry: &ConeGeometry,
    subset: Vec<usize>,
    ibar: Vec<usize>,
    exponents: &[Exponent],
    opts: CheckOptions,
) -> Result<ParabolicVerdict> {
    let rank = geometry.ambient.ambient_rank();
    let mut checks = Vec::new();
    let mut witness = None;
    let mut pass = true;
    for e in exponents {
        if e.vector.len() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                got: e.vector.len(),
            });
        }
        if opts.lambda_only && !e.lambda_support {
            checks.push(ExponentCheck {
                label: e.label.clone(),
                status: ExponentStatus::Skipped,
                vanishes_centrally: true,
                pairings: vec![],
            });
            continue;
        }
        let (check, w) = geometry.check_exponent(e, opts);
        if check.status == ExponentStatus::Fail {
            pass = false;
            if witness.is_none() {
                witness = w;
            }
        }
        checks.push(check);
    }
    Ok(ParabolicVerdict {
        subset,
        ibar,
        rays: geometry.rays.clone(),
        exponents: checks,
        pass,
        witness,
        note: None,
    })
}

/// Check one split parabolic subset against its exponent list.
pub fn check_parabolic(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    exponents: &[Exponent],
    opts: CheckOptions,
) -> Result<ParabolicVerdict> {
    let geometry = split_geometry(data, subset)?;
    run_check(
        &geometry,
        subset.i.clone(),
        subset.ibar.clone(),
        exponents,
        opts,
    )
}

fn no_data_verdict(subset: Vec<usize>, ibar: Vec<usize>) -> ParabolicVerdict {
    ParabolicVerdict {
        subset,
        ibar,
        rays: vec![],
        exponents: vec![],
        pass: false,
        witness: None,
        note: Some("no exponent data declared for this parabolic".into()),
    }
}

fn check_over<'a>(
    data: &InvolutionData,
    family: &ExponentFamily,
    opts: CheckOptions,
    subsets: impl Iterator<Item = &'a SigmaSplitSubset>,
) -> Result<Verdict> {
    // the family-level unitary contract is as binding as the caller's flag
    let opts = CheckOptions {
        lambda_only: opts.lambda_only,
        unitary: opts.unitary || family.unitary,
    };
    let mut parabolics = Vec::new();
    let mut pass = true;
    for subset in subsets {
        let verdict = match family.entries.get(&subset.i) {
            None => no_data_verdict(subset.i.clone(), subset.ibar.clone()),
            Some(exponents) => check_parabolic(data, subset, exponents, opts)?,
        };
        pass &= verdict.pass;
        parabolics.push(verdict);
    }
    Ok(Verdict { parabolics, pass })
}

/// Conjunction of the parabolic checks over every proper split subset.
/// Subsets with no declared data fail explicitly rather than passing.
pub fn check_all(
    data: &InvolutionData,
    family: &ExponentFamily,
    opts: CheckOptions,
) -> Result<Verdict> {
    for key in family.entries.keys() {
        if !data.is_sigma_split(key) {
            return Err(Error::NotSigmaSplit(key.clone()));
        }
    }
    if opts.unitary || family.unitary {
        if let Some(central) = &family.central_character {
            if central.len() != data.base().rank() {
                return Err(Error::DimensionMismatch {
                    expected: data.base().rank(),
                    got: central.len(),
                });
            }
            let vanishes = data
                .z0_lattice()
                .basis_rows()
                .iter()
                .all(|z| dot_rat_int(central, z).is_zero());
            if !vanishes {
                return Err(Error::InvalidJob(
                    "declared central character does not vanish on the central lattice in the unitary regime"
                        .into(),
                ));
            }
        }
    }
    check_over(data, family, opts, data.proper_subsets())
}

/// Close a family under restriction: every exponent declared on a subset is
/// pushed to all larger split subsets, merging support flags on equal
/// restrictions. Idempotent.
pub fn restriction_closure(
    data: &InvolutionData,
    family: &ExponentFamily,
) -> Result<ExponentFamily> {
    for key in family.entries.keys() {
        if !data.is_sigma_split(key) {
            return Err(Error::NotSigmaSplit(key.clone()));
        }
    }
    let mut out = family.clone();
    let declared: Vec<Vec<usize>> = family.entries.keys().cloned().collect();
    for key in &declared {
        let source = data.subset_by_i(key).expect("validated above");
        let exponents = family.entries[key].clone();
        for target in data.sigma_split_subsets() {
            let is_superset = source.ibar.iter().all(|k| target.ibar.contains(k));
            if !is_superset || target.i == source.i {
                continue;
            }
            let entry = out.entries.entry(target.i.clone()).or_default();
            for e in &exponents {
                let values = e.values_on(&target.s_lattice);
                match entry
                    .iter_mut()
                    .find(|cand| cand.values_on(&target.s_lattice) == values)
                {
                    Some(existing) => existing.lambda_support |= e.lambda_support,
                    None => entry.push(e.clone()),
                }
            }
        }
    }
    Ok(out)
}

/// Whether closing the family changes nothing.
pub fn is_restriction_closed(data: &InvolutionData, family: &ExponentFamily) -> Result<bool> {
    let closed = restriction_closure(data, family)?;
    if closed.entries.keys().collect::<Vec<_>>() != family.entries.keys().collect::<Vec<_>>() {
        return Ok(false);
    }
    for (key, list) in &closed.entries {
        let orig = &family.entries[key];
        if orig.len() != list.len() {
            return Ok(false);
        }
        let lattice = &data.subset_by_i(key).expect("split key").s_lattice;
        for (a, b) in orig.iter().zip(list) {
            if a.values_on(lattice) != b.values_on(lattice) || a.lambda_support != b.lambda_support
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub all: Verdict,
    pub maximal: Verdict,
    pub agree: bool,
}

/// Compare the full conjunction with the maximal-subsets-only conjunction.
/// Requires a restriction-closed family.
pub fn check_maximal_reduction(
    data: &InvolutionData,
    family: &ExponentFamily,
    opts: CheckOptions,
) -> Result<ReductionReport> {
    if !is_restriction_closed(data, family)? {
        return Err(Error::ClosureRequired(
            "family must be closed under restriction before the maximal reduction".into(),
        ));
    }
    let all = check_all(data, family, opts)?;
    let maximal = check_over(
        data,
        family,
        opts,
        data.maximal_proper_subsets().into_iter(),
    )?;
    let agree = all.pass == maximal.pass;
    Ok(ReductionReport {
        all,
        maximal,
        agree,
    })
}

/// The plain engine: dominant cones of ordinary standard parabolics modulo
/// the full center, quantified over every proper subset of the simple system.
pub fn casselman_check(
    rd: &BasedRootDatum,
    family: &BTreeMap<Vec<usize>, Vec<Exponent>>,
) -> Result<Verdict> {
    let all: Vec<usize> = (0..rd.simple_count()).collect();
    let center = rd.parabolic(&all).split_lattice;
    let mut parabolics = Vec::new();
    let mut pass = true;
    for bits in 0..(1u32 << rd.simple_count()) {
        let subset: Vec<usize> = (0..rd.simple_count())
            .filter(|k| bits & (1 << k) != 0)
            .collect();
        if subset.len() == rd.simple_count() {
            continue;
        }
        let verdict = match family.get(&subset) {
            None => no_data_verdict(subset.clone(), vec![]),
            Some(exponents) => {
                let parabolic = rd.parabolic(&subset);
                let functionals: Vec<Vec<Rat>> = (0..rd.simple_count())
                    .filter(|k| !subset.contains(k))
                    .map(|k| rd.simple_root(k).iter().map(rat_from_int).collect())
                    .collect();
                let geometry = ConeGeometry::build(
                    parabolic.split_lattice.clone(),
                    center.clone(),
                    &functionals,
                )?;
                run_check(
                    &geometry,
                    subset.clone(),
                    vec![],
                    exponents,
                    CheckOptions::default(),
                )?
            }
        };
        pass &= verdict.pass;
        parabolics.push(verdict);
    }
    parabolics.sort_by_key(|a| (a.subset.len(), a.subset.clone()));
    Ok(Verdict { parabolics, pass })
}

#[derive(Clone, Debug)]
pub struct GroupCaseReport {
    pub plain: Verdict,
    pub relative: Verdict,
    pub agree: bool,
}

/// Run the plain engine on a datum and the split engine on its doubled datum
/// with exponents transported through the restricted-basis identification,
/// and compare outcome by outcome.
pub fn group_case_equivalence(
    rd: &BasedRootDatum,
    family: &BTreeMap<Vec<usize>, Vec<Exponent>>,
) -> Result<GroupCaseReport> {
    let plain = casselman_check(rd, family)?;
    let (doubled, swap) = group_case_datum(rd);
    let data = InvolutionData::build(doubled, swap)?;
    let mut relative_family = ExponentFamily::new(false);
    for (subset, exponents) in family {
        // the restricted basis of the doubled datum is indexed like the
        // simple system of the original
        let split = data
            .subset_by_ibar(subset)
            .ok_or_else(|| Error::NotSigmaSplit(subset.clone()))?;
        for e in exponents {
            let mut vector = e.vector.clone();
            vector.extend(vec![Rat::zero(); rd.rank()]);
            relative_family.insert(&split.i, Exponent::new(&e.label, vector, true));
        }
        relative_family.entries.entry(split.i.clone()).or_default();
    }
    let relative = check_all(&data, &relative_family, CheckOptions::default())?;
    // per-subset agreement through the bijection, then globally
    let mut agree = plain.pass == relative.pass;
    for pv in &plain.parabolics {
        let split = data.subset_by_ibar(&pv.subset).expect("bijection");
        let rv = relative
            .parabolics
            .iter()
            .find(|r| r.subset == split.i)
            .expect("relative verdict present");
        agree &= pv.pass == rv.pass;
    }
    Ok(GroupCaseReport {
        plain,
        relative,
        agree,
    })
}

#[derive(Clone, Debug)]
pub struct ImplicationReport {
    pub plain_pass: bool,
    pub relative_pass: bool,
    pub holds: bool,
}

/// Plain square integrability forces the relative one: run both engines on a
/// family giving exponents on every ordinary parabolic, restricting to the
/// split subsets for the relative side.
pub fn plain_implies_relative(
    data: &InvolutionData,
    full_family: &BTreeMap<Vec<usize>, Vec<Exponent>>,
) -> Result<ImplicationReport> {
    let plain = casselman_check(data.base(), full_family)?;
    let mut relative_family = ExponentFamily::new(false);
    for subset in data.proper_subsets() {
        let exponents = full_family.get(&subset.i).cloned().unwrap_or_default();
        relative_family.entries.insert(subset.i.clone(), exponents);
    }
    let relative = check_all(data, &relative_family, CheckOptions::default())?;
    Ok(ImplicationReport {
        plain_pass: plain.pass,
        relative_pass: relative.pass,
        holds: !plain.pass || relative.pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeClassification {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ProbeReport {
    /// Shell sums by l1 radius in the quotient coordinates.
    pub shell_sums: Vec<f64>,
    /// Largest ratio of consecutive nonzero tail shells.
    pub tail_ratio: Option<f64>,
    pub classification: ProbeClassification,
    /// Set when the exponent does not vanish centrally, in which case the
    /// sums depend on the chosen representatives.
    pub central_dependent: bool,
}

/// Numeric probe of the series behind a parabolic check: partial sums of
/// `q^{-2<e,y>} (1 + |y|)^{2d}` over cone points of the split component
/// modulo the center, sliced into l1 shells of the quotient coordinates.
pub fn series_probe(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    exponent: &Exponent,
    poly_degree: u32,
    q: u32,
    radii: &[usize],
) -> Result<ProbeReport> {
    if q < 2 {
        return Err(Error::InvalidJob("probe base must be at least 2".into()));
    }
    if exponent.vector.len() != data.base().rank() {
        return Err(Error::DimensionMismatch {
            expected: data.base().rank(),
            got: exponent.vector.len(),
        });
    }
    let complement = complement_of(&subset.s_lattice, data.z0_lattice())?;
    let m = complement.rank();
    let max_radius = radii.iter().copied().max().unwrap_or(16);
    let central_dependent = !data
        .z0_lattice()
        .basis_rows()
        .iter()
        .all(|z| dot_rat_int(&exponent.vector, z).is_zero());
    let outside: Vec<usize> = (0..data.dbar_len())
        .filter(|k| !subset.ibar.contains(k))
        .collect();

    let mut shell_sums = vec![0.0f64; max_radius + 1];
    if m == 0 {
        shell_sums[0] = 1.0;
    } else {
        for coeffs in l1_shell_points(m, max_radius) {
            let norm: i64 = coeffs.iter().map(|c| c.abs()).sum();
            let ic: Vec<Int> = coeffs.iter().map(|&x| int(x)).collect();
            let y = complement.point_from_coords(&ic);
            let in_cone = outside
                .iter()
                .all(|&k| !data.pair_dbar(k, &y).is_negative());
            if !in_cone {
                continue;
            }
            let t = dot_rat_int(&exponent.vector, &y)
                .to_f64()
                .expect("finite rational");
            let term = (q as f64).powf(-2.0 * t) * (1.0 + norm as f64).powi(2 * poly_degree as i32);
            shell_sums[norm as usize] += term;
        }
    }

    // classify on the tail ratios
    let mut tail = Vec::new();
    let lo = max_radius.saturating_sub(3);
    for k in lo..=max_radius {
        if k == 0 {
            continue;
        }
        if shell_sums[k - 1] > 0.0 && shell_sums[k] > 0.0 {
            tail.push(shell_sums[k] / shell_sums[k - 1]);
        }
    }
    let tail_ratio = tail.iter().cloned().fold(None, |acc: Option<f64>, r| {
        Some(acc.map_or(r, |a| a.max(r)))
    });
    let classification = if tail.len() < 2 {
        ProbeClassification::Inconclusive
    } else if tail.iter().all(|&r| r < 0.98) {
        ProbeClassification::Convergent
    } else if tail.iter().all(|&r| r >= 1.0) {
        ProbeClassification::Divergent
    } else {
        ProbeClassification::Inconclusive
    };
    Ok(ProbeReport {
        shell_sums,
        tail_ratio,
        classification,
        central_dependent,
    })
}

fn l1_shell_points(rank: usize, radius: usize) -> Vec<Vec<i64>> {
    coefficient_box(rank, radius as i64)
        .into_iter()
        .filter(|c| c.iter().map(|x| x.abs()).sum::<i64>() <= radius as i64)
        .collect()
}

/// Brute-force cone oracle used by the verification suites: search a
/// coefficient box of the split-component lattice for a cone point outside
/// the central lattice with non-positive pairing.
pub fn box_counterexample(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    exponent: &Exponent,
    radius: i64,
) -> Option<Vec<Int>> {
    let lattice = &subset.s_lattice;
    let outside: Vec<usize> = (0..data.dbar_len())
        .filter(|k| !subset.ibar.contains(k))
        .collect();
    for coeffs in coefficient_box(lattice.rank(), radius) {
        let ic: Vec<Int> = coeffs.iter().map(|&x| int(x)).collect();
        let y = lattice.point_from_coords(&ic);
        let in_cone = outside
            .iter()
            .all(|&k| !data.pair_dbar(k, &y).is_negative());
        if !in_cone || data.z0_lattice().contains(&y) {
            continue;
        }
        if !dot_rat_int(&exponent.vector, &y).is_positive() {
            return Some(y);
        }
    }
    None
}

/// Verify a fail witness independently of the engine that produced it.
pub fn verify_witness(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    exponent: &Exponent,
    point: &[Int],
) -> bool {
    if point.is_empty() {
        return false;
    }
    if !subset.s_lattice.contains(point) || data.z0_lattice().contains(point) {
        return false;
    }
    let in_cone = (0..data.dbar_len())
        .filter(|k| !subset.ibar.contains(k))
        .all(|k| !data.pair_dbar(k, point).is_negative());
    in_cone && !dot_rat_int(&exponent.vector, point).is_positive()
}

/// Dot helper exposed for the report layer.
pub fn pair_vectors(a: &[Rat], b: &[Rat]) -> Rat {
    dot_rat(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ints, rat, rats, IntMatrix};
    use rand::{Rng, SeedableRng};

    fn gl3_inner() -> InvolutionData {
        let rd = BasedRootDatum::gl(3);
        let sigma = IntMatrix::from_i64(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        InvolutionData::build(rd, sigma).unwrap()
    }

    fn gl4_symplectic() -> InvolutionData {
        let rd = BasedRootDatum::gl(4);
        let p = IntMatrix::from_i64(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
        InvolutionData::build(rd, p.neg()).unwrap()
    }

    fn group_gl(n: usize) -> InvolutionData {
        let (rd, swap) = group_case_datum(&BasedRootDatum::gl(n));
        InvolutionData::build(rd, swap).unwrap()
    }

    fn exp(label: &str, v: &[(i64, i64)], lambda: bool) -> Exponent {
        Exponent::new(label, v.iter().map(|&(n, d)| rat(n, d)).collect(), lambda)
    }

    #[test]
    fn gl3_first_exponent_passes_with_unit_pairing() {
        let data = gl3_inner();
        let subset = &data.sigma_split_subsets()[0];
        let e = exp("chi_1", &[(0, 1), (1, 1), (-1, 1)], true);
        let v = check_parabolic(&data, subset, &[e], CheckOptions::default()).unwrap();
        assert!(v.pass);
        assert_eq!(v.rays, vec![ints(&[1, 0, -1])]);
        assert_eq!(v.exponents[0].pairings, vec![rat(1, 1)]);
    }

    #[test]
    fn zero_exponent_fails_with_ray_witness() {
        let data = gl3_inner();
        let subset = &data.sigma_split_subsets()[0];
        let e = exp("zero", &[(0, 1), (0, 1), (0, 1)], true);
        let v = check_parabolic(
            &data,
            subset,
            std::slice::from_ref(&e),
            CheckOptions::default(),
        )
        .unwrap();
        assert!(!v.pass);
        let w = v.witness.unwrap();
        assert!(verify_witness(&data, subset, &e, &w.point));
    }

    #[test]
    fn gl4_single_supported_exponent_passes() {
        let data = gl4_symplectic();
        let subset = &data.sigma_split_subsets()[0];
        let e = exp("w_cross", &[(1, 1), (0, 1), (0, 1), (-1, 1)], true);
        let v = check_parabolic(&data, subset, &[e], CheckOptions::default()).unwrap();
        assert!(v.pass);
        assert_eq!(v.rays, vec![ints(&[1, 1, 0, 0])]);
        assert_eq!(v.exponents[0].pairings, vec![rat(1, 1)]);
    }

    #[test]
    fn central_obstruction_yields_verifiable_witness() {
        let data = gl4_symplectic();
        let subset = &data.sigma_split_subsets()[0];
        // nonzero on the scalar lattice
        let e = exp("bad_central", &[(1, 1), (0, 1), (0, 1), (0, 1)], true);
        let v = check_parabolic(
            &data,
            subset,
            std::slice::from_ref(&e),
            CheckOptions::default(),
        )
        .unwrap();
        assert!(!v.pass);
        let w = v.witness.unwrap();
        assert!(verify_witness(&data, subset, &e, &w.point));
        assert!(!w.pairing.is_positive());
    }

    #[test]
    fn lambda_filter_skips_unsupported_exponents() {
        let data = gl4_symplectic();
        let subset = &data.sigma_split_subsets()[0];
        let bad = exp("w_swap", &[(-1, 1), (0, 1), (0, 1), (1, 1)], false);
        let good = exp("w_cross", &[(1, 1), (0, 1), (0, 1), (-1, 1)], true);
        let opts = CheckOptions {
            lambda_only: true,
            unitary: false,
        };
        let v = check_parabolic(&data, subset, &[bad.clone(), good], opts).unwrap();
        assert!(v.pass);
        assert_eq!(v.exponents[0].status, ExponentStatus::Skipped);
        // without the filter the swapped exponent fails the check
        let v2 = check_parabolic(&data, subset, &[bad], CheckOptions::default()).unwrap();
        assert!(!v2.pass);
    }

    #[test]
    fn check_all_flags_missing_subsets() {
        let data = group_gl(3);
        let mut family = ExponentFamily::new(false);
        family.insert(
            &[],
            exp(
                "e",
                &[(1, 1), (0, 1), (-1, 1), (0, 1), (0, 1), (0, 1)],
                true,
            ),
        );
        let v = check_all(&data, &family, CheckOptions::default()).unwrap();
        assert!(!v.pass);
        assert!(v
            .parabolics
            .iter()
            .any(|p| p.note.as_deref() == Some("no exponent data declared for this parabolic")));
    }

    #[test]
    fn closure_adds_restrictions_and_is_idempotent() {
        let data = group_gl(3);
        let mut family = ExponentFamily::new(false);
        // Steinberg-type vector on the minimal subset
        family.insert(
            &[],
            exp(
                "st",
                &[(1, 1), (0, 1), (-1, 1), (0, 1), (0, 1), (0, 1)],
                true,
            ),
        );
        let closed = restriction_closure(&data, &family).unwrap();
        assert_eq!(closed.entries.len(), data.sigma_split_subsets().len());
        for subset in data.proper_subsets() {
            assert_eq!(
                closed.entries[&subset.i].len(),
                1,
                "one restriction per larger subset"
            );
        }
        assert!(is_restriction_closed(&data, &closed).unwrap());
        let closed_twice = restriction_closure(&data, &closed).unwrap();
        assert_eq!(
            closed_twice.entries.keys().count(),
            closed.entries.keys().count()
        );
        let v = check_all(&data, &closed, CheckOptions::default()).unwrap();
        assert!(v.pass, "transported Steinberg vector is strictly dominant");
    }

    #[test]
    fn empty_family_closure_is_empty() {
        let data = gl3_inner();
        let family = ExponentFamily::new(false);
        let closed = restriction_closure(&data, &family).unwrap();
        assert!(closed.entries.is_empty());
    }

    #[test]
    fn maximal_reduction_refuses_open_families() {
        let data = group_gl(3);
        let mut family = ExponentFamily::new(false);
        family.insert(
            &[],
            exp(
                "st",
                &[(1, 1), (0, 1), (-1, 1), (0, 1), (0, 1), (0, 1)],
                true,
            ),
        );
        assert!(matches!(
            check_maximal_reduction(&data, &family, CheckOptions::default()),
            Err(Error::ClosureRequired(_))
        ));
        let closed = restriction_closure(&data, &family).unwrap();
        let report = check_maximal_reduction(&data, &closed, CheckOptions::default()).unwrap();
        assert!(report.agree);
    }

    #[test]
    fn maximal_reduction_trivial_when_single_proper_subset() {
        let data = gl3_inner();
        let mut family = ExponentFamily::new(false);
        family.insert(&[], exp("chi_1", &[(0, 1), (1, 1), (-1, 1)], true));
        let closed = restriction_closure(&data, &family).unwrap();
        let report = check_maximal_reduction(&data, &closed, CheckOptions::default()).unwrap();
        assert!(report.agree);
        assert!(report.all.pass && report.maximal.pass);
    }

    fn casselman_family_gl2(vec: &[(i64, i64)]) -> BTreeMap<Vec<usize>, Vec<Exponent>> {
        let mut family = BTreeMap::new();
        family.insert(vec![], vec![exp("e", vec, true)]);
        family
    }

    #[test]
    fn casselman_gl2_steinberg_passes() {
        let rd = BasedRootDatum::gl(2);
        let v = casselman_check(&rd, &casselman_family_gl2(&[(1, 2), (-1, 2)])).unwrap();
        assert!(v.pass);
        let borel = &v.parabolics[0];
        assert_eq!(borel.rays, vec![ints(&[1, 0])]);
        assert_eq!(borel.exponents[0].pairings, vec![rat(1, 2)]);
    }

    #[test]
    fn casselman_gl2_trivial_fails_on_ray() {
        let rd = BasedRootDatum::gl(2);
        let v = casselman_check(&rd, &casselman_family_gl2(&[(-1, 2), (1, 2)])).unwrap();
        assert!(!v.pass);
        let w = v.parabolics[0].witness.as_ref().unwrap();
        assert_eq!(w.point, ints(&[1, 0]));
    }

    #[test]
    fn casselman_gl2_unitary_character_fails() {
        let rd = BasedRootDatum::gl(2);
        let v = casselman_check(&rd, &casselman_family_gl2(&[(0, 1), (0, 1)])).unwrap();
        assert!(!v.pass);
    }

    #[test]
    fn group_case_equivalence_on_named_examples() {
        let rd = BasedRootDatum::gl(2);
        for vec in [[(1i64, 2i64), (-1, 2)], [(-1, 2), (1, 2)], [(0, 1), (0, 1)]] {
            let report = group_case_equivalence(&rd, &casselman_family_gl2(&vec)).unwrap();
            assert!(report.agree);
        }
    }

    fn random_family(
        rd: &BasedRootDatum,
        rng: &mut impl Rng,
    ) -> BTreeMap<Vec<usize>, Vec<Exponent>> {
        let mut family = BTreeMap::new();
        for bits in 0..(1u32 << rd.simple_count()) {
            let subset: Vec<usize> = (0..rd.simple_count())
                .filter(|k| bits & (1 << k) != 0)
                .collect();
            if subset.len() == rd.simple_count() {
                continue;
            }
            let count = rng.gen_range(1..=2);
            let exponents: Vec<Exponent> = (0..count)
                .map(|j| {
                    let v: Vec<Rat> = (0..rd.rank())
                        .map(|_| rat(rng.gen_range(-2..=2), rng.gen_range(1..=4)))
                        .collect();
                    Exponent::new(&format!("r{bits}_{j}"), v, true)
                })
                .collect();
            family.insert(subset, exponents);
        }
        family
    }

    #[test]
    fn group_case_equivalence_randomized() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for n in [2usize, 3] {
            let rd = BasedRootDatum::gl(n);
            for _ in 0..25 {
                let family = random_family(&rd, &mut rng);
                let report = group_case_equivalence(&rd, &family).unwrap();
                assert!(report.agree);
            }
        }
    }

    #[test]
    fn plain_implies_relative_on_synthetic_and_random_families() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(31);
        for data in [gl3_inner(), gl4_symplectic(), group_gl(2)] {
            let rd = data.base().clone();
            // strictly dominant synthetic family: half-sums of radical roots
            let mut dominant = BTreeMap::new();
            for bits in 0..(1u32 << rd.simple_count()) {
                let subset: Vec<usize> = (0..rd.simple_count())
                    .filter(|k| bits & (1 << k) != 0)
                    .collect();
                if subset.len() == rd.simple_count() {
                    continue;
                }
                let p = rd.parabolic(&subset);
                let vector: Vec<Rat> = p
                    .two_rho
                    .iter()
                    .map(|x| Rat::new(x.clone(), int(2)))
                    .collect();
                dominant.insert(subset, vec![Exponent::new("rho", vector, true)]);
            }
            let report = plain_implies_relative(&data, &dominant).unwrap();
            assert!(
                report.plain_pass,
                "half-sum exponents are strictly dominant"
            );
            assert!(report.holds);

            for _ in 0..30 {
                let family = random_family(&rd, &mut rng);
                let report = plain_implies_relative(&data, &family).unwrap();
                assert!(report.holds);
            }
        }
    }

    #[test]
    fn probe_gl3_golden_exponent_converges_toward_quarter_ratio() {
        let data = gl3_inner();
        let subset = &data.sigma_split_subsets()[0];
        let e = exp("chi_1", &[(0, 1), (1, 1), (-1, 1)], true);
        let report = series_probe(&data, subset, &e, 1, 2, &[4, 8, 12, 16]).unwrap();
        assert_eq!(report.classification, ProbeClassification::Convergent);
        let ratio = report.tail_ratio.unwrap();
        assert!((ratio - 0.25).abs() < 0.05, "tail ratio {ratio}");
    }

    #[test]
    fn probe_zero_exponent_diverges() {
        let data = gl3_inner();
        let subset = &data.sigma_split_subsets()[0];
        let e = exp("zero", &[(0, 1), (0, 1), (0, 1)], true);
        let report = series_probe(&data, subset, &e, 0, 2, &[4, 8, 12, 16]).unwrap();
        assert_eq!(report.classification, ProbeClassification::Divergent);
    }

    #[test]
    fn probe_gl4_golden_exponent_converges() {
        let data = gl4_symplectic();
        let subset = &data.sigma_split_subsets()[0];
        let e = exp("w_cross", &[(1, 1), (0, 1), (0, 1), (-1, 1)], true);
        let report = series_probe(&data, subset, &e, 1, 2, &[4, 8, 12, 16]).unwrap();
        assert_eq!(report.classification, ProbeClassification::Convergent);
    }

    #[test]
    fn probe_matches_checker_away_from_borderline() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(41);
        for data in [gl3_inner(), gl4_symplectic()] {
            let subset = &data.sigma_split_subsets()[0].clone();
            let m = data.dbar_len();
            for trial in 0..10 {
                // random half-integer multiples of the basis functionals so
                // every ray pairing is at least 1/2 in absolute value
                let choices = [-4i64, -3, -2, -1, 1, 2, 3, 4];
                let coeffs: Vec<Rat> = (0..m)
                    .map(|_| rat(choices[rng.gen_range(0..8)], 2))
                    .collect();
                let mut vector = vec![Rat::zero(); data.base().rank()];
                for (k, c) in coeffs.iter().enumerate() {
                    for (vi, fi) in vector.iter_mut().zip(data.dbar_integral(k)) {
                        *vi += c * rat_from_int(fi);
                    }
                }
                let e = Exponent::new(&format!("t{trial}"), vector, true);
                let check = check_parabolic(
                    &data,
                    subset,
                    std::slice::from_ref(&e),
                    CheckOptions::default(),
                )
                .unwrap();
                let probe = series_probe(&data, subset, &e, 1, 2, &[4, 8, 12, 16]).unwrap();
                match probe.classification {
                    ProbeClassification::Convergent => assert!(check.pass),
                    ProbeClassification::Divergent => assert!(!check.pass),
                    ProbeClassification::Inconclusive => panic!("non-borderline but inconclusive"),
                }
            }
        }
    }

    #[test]
    fn soundness_against_box_oracle_small_grid() {
        // all exponents with entries in {-1, -1/2, 0, 1/2, 1} on the minimal
        // split subset of the small preset
        let data = gl3_inner();
        let subset = &data.sigma_split_subsets()[0];
        let grid = [-2i64, -1, 0, 1, 2];
        for a in grid {
            for b in grid {
                for c in grid {
                    let e = Exponent::new("g", vec![rat(a, 2), rat(b, 2), rat(c, 2)], true);
                    let verdict = check_parabolic(
                        &data,
                        subset,
                        std::slice::from_ref(&e),
                        CheckOptions::default(),
                    )
                    .unwrap();
                    let counter = box_counterexample(&data, subset, &e, 10);
                    if verdict.pass {
                        assert!(counter.is_none(), "pass but {counter:?} on ({a},{b},{c})/2");
                    } else {
                        let w = verdict.witness.unwrap();
                        assert!(verify_witness(&data, subset, &e, &w.point));
                    }
                }
            }
        }
    }

    #[test]
    fn values_on_restriction_match_expected_generators() {
        let data = gl3_inner();
        let s0 = data.s0_lattice();
        let chi1 = exp("chi_1", &[(0, 1), (1, 1), (-1, 1)], true);
        let chi2 = exp("chi_2", &[(1, 1), (0, 1), (-1, 1)], true);
        assert_eq!(chi1.values_on(s0), rats(&ints(&[1])));
        assert_eq!(chi2.values_on(s0), rats(&ints(&[2])));
    }

    #[test]
    fn passing_verdicts_certify_one_positive_pairing_per_cut() {
        let data = group_gl(3);
        let mut family = ExponentFamily::new(false);
        family.insert(
            &[],
            exp(
                "st",
                &[(1, 1), (0, 1), (-1, 1), (0, 1), (0, 1), (0, 1)],
                true,
            ),
        );
        let closed = restriction_closure(&data, &family).unwrap();
        let v = check_all(&data, &closed, CheckOptions::default()).unwrap();
        assert!(v.pass);
        for p in &v.parabolics {
            let cuts = data.dbar_len() - p.ibar.len();
            assert_eq!(p.rays.len(), cuts);
            for e in &p.exponents {
                assert_eq!(e.pairings.len(), cuts);
                assert!(e.pairings.iter().all(|x| x.is_positive()));
            }
        }
    }

    #[test]
    fn family_level_unitary_contract_binds() {
        let data = gl4_symplectic();
        let mut family = ExponentFamily::new(true);
        // nonzero on the scalar lattice: violates the contract even though
        // the caller passes default options
        family.insert(&[0, 2], exp("bad", &[(1, 1), (0, 1), (0, 1), (0, 1)], true));
        let v = check_all(&data, &family, CheckOptions::default()).unwrap();
        assert!(!v.pass);
        let minimal = &v.parabolics[0];
        assert!(minimal
            .witness
            .as_ref()
            .unwrap()
            .reason
            .contains("unitary contract"));
    }

    #[test]
    fn full_subset_check_is_vacuous_unless_the_contract_is_violated() {
        // the full subset has no cut functionals: its region is empty, so
        // everything passes vacuously; only the unitary contract can fail
        let data = gl4_symplectic();
        let full = data.sigma_split_subsets().last().unwrap();
        assert_eq!(full.ibar.len(), data.dbar_len());
        let central = exp("central", &[(1, 1), (1, 1), (1, 1), (1, 1)], true);
        let v = check_parabolic(&data, full, &[central.clone()], CheckOptions::default()).unwrap();
        assert!(v.pass);
        assert!(v.rays.is_empty());
        let strict = CheckOptions {
            lambda_only: false,
            unitary: true,
        };
        let v2 = check_parabolic(&data, full, &[central], strict).unwrap();
        assert!(!v2.pass);
    }

    #[test]
    fn declared_central_character_must_vanish_in_the_unitary_regime() {
        let data = gl4_symplectic();
        let mut family = ExponentFamily::new(true);
        family.insert(&[0, 2], exp("ok", &[(1, 1), (0, 1), (0, 1), (-1, 1)], true));
        family.central_character = Some(vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert!(matches!(
            check_all(&data, &family, CheckOptions::default()),
            Err(Error::InvalidJob(_))
        ));
        family.central_character = Some(vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(-1, 1)]);
        assert!(check_all(&data, &family, CheckOptions::default()).is_ok());
    }
}
