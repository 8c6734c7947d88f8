//! Valuation-cone geometry on the antifixed cocharacter lattice.
//!
//! Group elements are replaced by their valuation images: a threshold
//! `N >= 0` encodes `ε = q^{-N}`, so `|s^α| <= ε` becomes the integer
//! inequality `<α, y> >= N`. All region tests are finitely many exact
//! pairing comparisons.

use crate::involution::{InvolutionData, SigmaSplitSubset};
use crate::lattice::{add_vec, int, sub_vec, CosetTable, Int, Sublattice};
use crate::{Error, Result};
use num::{Signed, Zero};
use rayon::prelude::*;

/// Which region of the antifixed lattice a test refers to.
///
/// `SMinus` lives on the split-component lattice of the subset; the remaining
/// kinds live on the full antifixed lattice. `Plus` variants contain a point
/// exactly when the corresponding `Minus` region contains its negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    /// `<α, y> >= N` for α outside the subset, on the split component.
    SMinus,
    /// `<α, y> >= N` outside, `<α, y> >= 0` inside, on the antifixed lattice.
    SZeroIMinus,
    /// `<α, y> >= N` outside, `0 <= <α, y> < N` inside.
    PreSZeroMinus,
    /// `<α, y> >= 0` everywhere.
    SZeroMinus,
    SPlus,
    SZeroIPlus,
    PreSZeroPlus,
    SZeroPlus,
}

/// A region instance: kind, split subset, and integer threshold.
#[derive(Clone, Debug)]
pub struct ConeRegion {
    pub kind: RegionKind,
    pub subset: Vec<usize>,
    pub threshold: i64,
}

impl ConeRegion {
    pub fn new(kind: RegionKind, subset: &[usize], threshold: i64) -> Self {
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        ConeRegion {
            kind,
            subset,
            threshold,
        }
    }
}

/// Exact membership test. The point must lie in the region's ambient lattice
/// (split component for `SMinus`/`SPlus`, antifixed lattice otherwise).
pub fn region_contains(data: &InvolutionData, region: &ConeRegion, y: &[Int]) -> Result<bool> {
    let subset = data
        .subset_by_i(&region.subset)
        .ok_or_else(|| Error::NotSigmaSplit(region.subset.clone()))?;
    let negated;
    let (minus_kind, point) = match region.kind {
        RegionKind::SPlus
        | RegionKind::SZeroIPlus
        | RegionKind::PreSZeroPlus
        | RegionKind::SZeroPlus => {
            negated = y.iter().map(|v| -v).collect::<Vec<Int>>();
            let kind = match region.kind {
                RegionKind::SPlus => RegionKind::SMinus,
                RegionKind::SZeroIPlus => RegionKind::SZeroIMinus,
                RegionKind::PreSZeroPlus => RegionKind::PreSZeroMinus,
                _ => RegionKind::SZeroMinus,
            };
            (kind, negated.as_slice())
        }
        _ => (region.kind, y),
    };
    let ambient = match minus_kind {
        RegionKind::SMinus => &subset.s_lattice,
        _ => data.s0_lattice(),
    };
    if point.len() != ambient.ambient_rank() {
        return Err(Error::DimensionMismatch {
            expected: ambient.ambient_rank(),
            got: point.len(),
        });
    }
    if !ambient.contains(point) {
        return Err(Error::LatticeMismatch(
            "point is not in the region's ambient lattice".into(),
        ));
    }
    Ok(minus_region_contains(
        data,
        subset,
        minus_kind,
        region.threshold,
        point,
    ))
}

fn minus_region_contains(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    kind: RegionKind,
    threshold: i64,
    y: &[Int],
) -> bool {
    let n = int(threshold);
    let m = data.dbar_len();
    let outside: Vec<usize> = (0..m).filter(|k| !subset.ibar.contains(k)).collect();
    match kind {
        RegionKind::SMinus => outside.iter().all(|&k| data.pair_dbar(k, y) >= n),
        RegionKind::SZeroMinus => (0..m).all(|k| data.pair_dbar(k, y) >= int(0)),
        RegionKind::SZeroIMinus => {
            outside.iter().all(|&k| data.pair_dbar(k, y) >= n)
                && subset.ibar.iter().all(|&k| data.pair_dbar(k, y) >= int(0))
        }
        RegionKind::PreSZeroMinus => {
            outside.iter().all(|&k| data.pair_dbar(k, y) >= n)
                && subset.ibar.iter().all(|&k| {
                    let p = data.pair_dbar(k, y);
                    p >= int(0) && p < n
                })
        }
        _ => unreachable!("plus kinds already reduced"),
    }
}

/// Outcome of the exhaustive partition verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionOutcome {
    Ok {
        points_checked: usize,
    },
    Violation {
        point: Vec<Int>,
        containing: Vec<Vec<usize>>,
    },
}

/// Check, over a coefficient box of the antifixed lattice, that every point
/// of the dominant cone lies in exactly one sliced region over the split
/// subsets. A violation reports the lexicographically least witness.
pub fn partition_check(data: &InvolutionData, threshold: i64, radius: i64) -> PartitionOutcome {
    assert!(threshold >= 1, "slicing is vacuous below threshold 1");
    let rank = data.s0_lattice().rank();
    if rank == 0 {
        // rank zero: the single point 0 lies exactly in the full-subset slice
        return PartitionOutcome::Ok { points_checked: 1 };
    }
    let coords = coefficient_box(rank, radius);
    let violation = coords
        .par_iter()
        .filter_map(|c| {
            let ic: Vec<Int> = c.iter().map(|&x| int(x)).collect();
            let y = data.s0_lattice().point_from_coords(&ic);
            let in_cone = (0..data.dbar_len()).all(|k| data.pair_dbar(k, &y) >= int(0));
            if !in_cone {
                return None;
            }
            let containing: Vec<Vec<usize>> = data
                .sigma_split_subsets()
                .iter()
                .filter(|s| {
                    minus_region_contains(data, s, RegionKind::PreSZeroMinus, threshold, &y)
                })
                .map(|s| s.i.clone())
                .collect();
            if containing.len() == 1 {
                None
            } else {
                Some((y, containing))
            }
        })
        .min_by(|a, b| a.0.cmp(&b.0));
    match violation {
        Some((point, containing)) => PartitionOutcome::Violation { point, containing },
        None => PartitionOutcome::Ok {
            points_checked: coords.len(),
        },
    }
}

pub(crate) fn coefficient_box(rank: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for c in &out {
            for v in -radius..=radius {
                let mut c2 = c.clone();
                c2.push(v);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}

/// Split data for one subset: the two component lattices, coset
/// representatives of the antifixed lattice modulo their sum (shifted into
/// the dominant cone), and the pairing bound they force.
pub struct SplitContext<'a> {
    data: &'a InvolutionData,
    subset: &'a SigmaSplitSubset,
    component: Sublattice,
    co_component: Sublattice,
    /// Cone representatives of the antifixed lattice modulo the component sum.
    pub gammas: Vec<Vec<Int>>,
    /// Largest outside-pairing over the representatives.
    pub gamma_bound: i64,
    /// Complement of the central lattice inside the antifixed lattice, used
    /// for canonical translate representatives.
    complement: Sublattice,
}

impl<'a> SplitContext<'a> {
    pub fn new(data: &'a InvolutionData, subset: &'a SigmaSplitSubset) -> Result<SplitContext<'a>> {
        let (component, co_component, _) = data.component_lattices(&subset.ibar)?;
        let sum = component.sum(&co_component);
        let table = CosetTable::new(data.s0_lattice(), &sum)?;
        let complement = central_complement(data)?;

        // shift representatives into the dominant cone by a deep interior
        // element of the sum lattice
        let reps = table.representatives();
        let gammas = if reps.len() == 1 {
            vec![vec![int(0); data.s0_lattice().ambient_rank()]]
        } else {
            let deep = deep_cone_vector(data, &sum)?;
            reps.into_iter()
                .map(|g| {
                    let mut shifted = g;
                    loop {
                        let ok =
                            (0..data.dbar_len()).all(|k| data.pair_dbar(k, &shifted) >= int(0));
                        if ok {
                            break shifted;
                        }
                        shifted = add_vec(&shifted, &deep);
                    }
                })
                .collect()
        };
        let m = data.dbar_len();
        let mut bound = 0i64;
        for g in &gammas {
            for k in 0..m {
                if subset.ibar.contains(&k) {
                    continue;
                }
                let p = data.pair_dbar(k, g);
                let p: i64 = i64::try_from(&p).map_err(|_| {
                    Error::InvariantViolation("representative pairing out of i64 range".into())
                })?;
                bound = bound.max(p);
            }
        }
        Ok(SplitContext {
            data,
            subset,
            component,
            co_component,
            gammas,
            gamma_bound: bound,
            complement,
        })
    }

    /// Split `y` as `u + v + γ` with `u` in the component, `v` in the
    /// co-component and `γ` one of the representatives.
    fn split(&self, y: &[Int]) -> Result<(Vec<Int>, Vec<Int>, Vec<Int>)> {
        for g in &self.gammas {
            let rem = sub_vec(y, g);
            let mut gens = self.component.basis_rows();
            let split_at = gens.len();
            gens.extend(self.co_component.basis_rows());
            if gens.is_empty() {
                if rem.iter().all(|x| x.is_zero()) {
                    return Ok((vec![int(0); y.len()], vec![int(0); y.len()], g.clone()));
                }
                continue;
            }
            let coeffs = match solve_over_rows(&gens, &rem) {
                Some(c) => c,
                None => continue,
            };
            let mut u = vec![int(0); y.len()];
            let mut v = vec![int(0); y.len()];
            for (idx, c) in coeffs.iter().enumerate() {
                let row = &gens[idx];
                let target = if idx < split_at { &mut u } else { &mut v };
                for (t, x) in target.iter_mut().zip(row) {
                    *t += c * x;
                }
            }
            return Ok((u, v, g.clone()));
        }
        Err(Error::InvariantViolation(
            "no representative matched the point".into(),
        ))
    }

    /// Canonical translate with the same restricted pairings as `t`, taken
    /// from the central complement, together with the central remainder.
    fn canonical_translate(&self, t: &[Int]) -> Result<(Vec<Int>, Vec<Int>)> {
        let m = self.data.dbar_len();
        let target: Vec<Int> = (0..m).map(|k| self.data.pair_dbar(k, t)).collect();
        let rep = self.solve_pairings(&target)?;
        let z = sub_vec(t, &rep);
        if !self.data.z0_lattice().contains(&z) {
            return Err(Error::InvariantViolation(
                "translate remainder is not central".into(),
            ));
        }
        Ok((rep, z))
    }

    /// Point of the central complement with prescribed restricted pairings.
    fn solve_pairings(&self, target: &[Int]) -> Result<Vec<Int>> {
        let m = self.data.dbar_len();
        let rows: Vec<Vec<crate::lattice::Rat>> = self
            .complement
            .basis_rows()
            .iter()
            .map(|b| {
                (0..m)
                    .map(|k| crate::lattice::rat_from_int(&self.data.pair_dbar(k, b)))
                    .collect()
            })
            .collect();
        let rhs: Vec<crate::lattice::Rat> =
            target.iter().map(crate::lattice::rat_from_int).collect();
        let coeffs = crate::lattice::solve_row_combination(&rows, &rhs)
            .ok_or_else(|| Error::InvariantViolation("pairing solve inconsistent".into()))?;
        let mut int_coeffs = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if !c.is_integer() {
                return Err(Error::InvariantViolation(
                    "pairing solve is not integral".into(),
                ));
            }
            int_coeffs.push(c.to_integer());
        }
        Ok(self.complement.point_from_coords(&int_coeffs))
    }

    /// The finite translate list: canonical representatives of every
    /// achievable pairing vector inside the box forced by the threshold and
    /// the representative bound.
    pub fn translate_list(&self, threshold: i64) -> Result<Vec<Vec<Int>>> {
        let m = self.data.dbar_len();
        let mut targets = vec![vec![]];
        for k in 0..m {
            let hi = if self.subset.ibar.contains(&k) {
                (threshold - 1).max(0)
            } else {
                self.gamma_bound
            };
            let mut next = Vec::new();
            for t in &targets {
                for v in 0..=hi {
                    let mut t2 = t.clone();
                    t2.push(int(v));
                    next.push(t2);
                }
            }
            targets = next;
        }
        let mut list = Vec::new();
        for t in targets {
            if let Ok(rep) = self.solve_pairings(&t) {
                list.push(rep);
            }
        }
        Ok(list)
    }
}

fn solve_over_rows(rows: &[Vec<Int>], target: &[Int]) -> Option<Vec<Int>> {
    let rat_rows: Vec<Vec<crate::lattice::Rat>> = rows
        .iter()
        .map(|r| r.iter().map(crate::lattice::rat_from_int).collect())
        .collect();
    let rhs: Vec<crate::lattice::Rat> = target.iter().map(crate::lattice::rat_from_int).collect();
    let coeffs = crate::lattice::solve_row_combination(&rat_rows, &rhs)?;
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer());
    }
    Some(out)
}

/// A complement of the central lattice inside the antifixed lattice.
pub fn central_complement(data: &InvolutionData) -> Result<Sublattice> {
    crate::lattice::complement_of(data.s0_lattice(), data.z0_lattice())
}

/// A lattice point of `within` with all restricted pairings at least 1.
fn deep_cone_vector(data: &InvolutionData, within: &Sublattice) -> Result<Vec<Int>> {
    let m = data.dbar_len();
    if m == 0 {
        return Ok(vec![int(0); within.ambient_rank()]);
    }
    let complement = central_complement(data)?;
    let ones: Vec<Int> = vec![int(1); m];
    let rows: Vec<Vec<crate::lattice::Rat>> = complement
        .basis_rows()
        .iter()
        .map(|b| {
            (0..m)
                .map(|k| crate::lattice::rat_from_int(&data.pair_dbar(k, b)))
                .collect()
        })
        .collect();
    let rhs: Vec<crate::lattice::Rat> = ones.iter().map(crate::lattice::rat_from_int).collect();
    let coeffs = crate::lattice::solve_row_combination(&rows, &rhs)
        .ok_or_else(|| Error::InvariantViolation("no interior direction".into()))?;
    let mut denom = Int::from(1);
    for c in &coeffs {
        denom = num::Integer::lcm(&denom, c.denom());
    }
    let int_coeffs: Vec<Int> = coeffs
        .iter()
        .map(|c| c.numer() * (&denom / c.denom()))
        .collect();
    let mut v = complement.point_from_coords(&int_coeffs);
    // scale by the quotient index so the point lands in the target lattice:
    // the index annihilates the quotient group whatever its prime factors
    match crate::lattice::quotient_index(data.s0_lattice(), within)? {
        crate::lattice::QuotientIndex::Finite(idx) => {
            v = crate::lattice::scale_vec(&idx, &v);
        }
        crate::lattice::QuotientIndex::Infinite => {
            return Err(Error::InvariantViolation(
                "interior direction does not enter the sum lattice".into(),
            ));
        }
    }
    if !within.contains(&v) {
        return Err(Error::InvariantViolation(
            "scaled interior direction missed the sum lattice".into(),
        ));
    }
    Ok(v)
}

/// A verified three-part factorization of a sliced-region point.
#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Component part, in the split-component cone at the derived threshold.
    pub component_part: Vec<Int>,
    /// Translate from the finite list.
    pub translate: Vec<Int>,
    /// Central remainder.
    pub central_part: Vec<Int>,
    /// Threshold certified for the component part; may be negative when the
    /// representative bound exceeds the requested threshold.
    pub derived_threshold: i64,
    /// The full translate list the factorization draws from.
    pub translate_list: Vec<Vec<Int>>,
}

/// Factor a point of the sliced region (`0 <= <α,y> < N` inside the subset,
/// `<α,y> >= N` outside) as component + translate + central, mirroring the
/// finite-index splitting of the antifixed lattice.
pub fn decompose_point(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    threshold: i64,
    y: &[Int],
) -> Result<Decomposition> {
    let region = ConeRegion::new(RegionKind::PreSZeroMinus, &subset.i, threshold);
    if !region_contains(data, &region, y)? {
        return Err(Error::OutsideRegion(format!(
            "point {y:?} is outside the sliced region at threshold {threshold}"
        )));
    }
    let ctx = SplitContext::new(data, subset)?;
    let (u, v, gamma) = ctx.split(y)?;
    let t_raw = add_vec(&v, &gamma);
    let (translate, central_part) = ctx.canonical_translate(&t_raw)?;
    let derived_threshold = threshold - ctx.gamma_bound;
    // re-verify every part before reporting
    let m = data.dbar_len();
    for k in 0..m {
        if !subset.ibar.contains(&k) && data.pair_dbar(k, &u) < int(derived_threshold) {
            return Err(Error::InvariantViolation(
                "component part misses its derived threshold".into(),
            ));
        }
        if data.pair_dbar(k, &translate).is_negative() {
            return Err(Error::InvariantViolation("translate left the cone".into()));
        }
    }
    if !subset.s_lattice.contains(&u) {
        return Err(Error::InvariantViolation(
            "component part left the split component".into(),
        ));
    }
    if !data.z0_lattice().contains(&central_part) {
        return Err(Error::InvariantViolation("central part not central".into()));
    }
    let recomposed = add_vec(&add_vec(&u, &translate), &central_part);
    if recomposed != y {
        return Err(Error::InvariantViolation(
            "decomposition does not recompose".into(),
        ));
    }
    let translate_list = ctx.translate_list(threshold)?;
    if !translate_list.contains(&translate) {
        return Err(Error::InvariantViolation(
            "translate missing from the finite list".into(),
        ));
    }
    Ok(Decomposition {
        component_part: u,
        translate,
        central_part,
        derived_threshold,
        translate_list,
    })
}

/// Threshold transfer for the inclusion of the relaxed region into the
/// product of the component cone and the dominant cone.
pub fn inclusion_threshold(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    threshold: i64,
) -> Result<i64> {
    let ctx = SplitContext::new(data, subset)?;
    Ok(threshold + ctx.gamma_bound)
}

/// Factor a point of the relaxed region at the transferred threshold as a
/// component-cone point plus a dominant-cone point; both parts re-verified.
pub fn factor_dominant_point(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    threshold: i64,
    y: &[Int],
) -> Result<(Vec<Int>, Vec<Int>)> {
    let ctx = SplitContext::new(data, subset)?;
    let transferred = threshold + ctx.gamma_bound;
    let region = ConeRegion::new(RegionKind::SZeroIMinus, &subset.i, transferred);
    if !region_contains(data, &region, y)? {
        return Err(Error::OutsideRegion(format!(
            "point {y:?} is outside the relaxed region at threshold {transferred}"
        )));
    }
    let (u, v, gamma) = ctx.split(y)?;
    let rest = add_vec(&v, &gamma);
    let m = data.dbar_len();
    for k in 0..m {
        if !subset.ibar.contains(&k) && data.pair_dbar(k, &u) < int(threshold) {
            return Err(Error::InvariantViolation(
                "component factor misses the requested threshold".into(),
            ));
        }
        if data.pair_dbar(k, &rest).is_negative() {
            return Err(Error::InvariantViolation(
                "dominant factor left the cone".into(),
            ));
        }
    }
    if !subset.s_lattice.contains(&u) {
        return Err(Error::InvariantViolation(
            "component factor left the split component".into(),
        ));
    }
    if add_vec(&u, &rest) != y {
        return Err(Error::InvariantViolation(
            "factorization does not recompose".into(),
        ));
    }
    Ok((u, rest))
}
