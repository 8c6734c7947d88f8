//! Ready-made symmetric-space data: general linear groups with an inner
//! involution by the antidiagonal, with the symplectic involution, and the
//! doubled group with the factor swap. Each preset bundles frozen expected
//! structure and, where meaningful, a golden exponent family together with
//! the pairings it must certify.

use crate::criterion::{Exponent, ExponentFamily};
use crate::involution::{group_case_datum, InvolutionData};
use crate::jacquet::{borel_exponents, RepSpec};
use crate::lattice::{int, rat, IntMatrix, Rat};
use crate::root_datum::BasedRootDatum;
use crate::{Error, Result};
use num::Zero;

/// One golden exponent: the display-normalization vector handed to the
/// engine, the normalized-calculus variant when the two differ, and the
/// support flag from the distinction analysis.
#[derive(Clone, Debug)]
pub struct GoldenExponent {
    pub label: String,
    pub vector: Vec<Rat>,
    pub normalized_vector: Option<Vec<Rat>>,
    pub lambda_support: bool,
}

/// Golden family plus the ray pairings it must produce.
#[derive(Clone, Debug)]
pub struct GoldenData {
    /// Sorted simple positions of the parabolic carrying the exponents.
    pub parabolic: Vec<usize>,
    pub exponents: Vec<GoldenExponent>,
    /// Expected ray pairings of the display vectors, for the supported ones.
    pub expected_pairings: Vec<Rat>,
    /// Expected pairings of the normalized variants, when present.
    pub expected_normalized_pairings: Vec<Rat>,
}

/// A named symmetric-space datum with frozen expected structure.
pub struct PresetDescriptor {
    pub name: String,
    pub description: String,
    pub datum: BasedRootDatum,
    pub sigma: IntMatrix,
    /// Expected fixed simple positions.
    pub expected_delta_sigma: Vec<usize>,
    /// Expected size of the restricted basis.
    pub expected_dbar_size: usize,
    /// Expected canonical basis of the antifixed lattice.
    pub expected_s0: Vec<Vec<i64>>,
    /// Expected canonical basis of the central antifixed lattice.
    pub expected_z0: Vec<Vec<i64>>,
    pub golden: Option<GoldenData>,
}

impl PresetDescriptor {
    pub fn build(&self) -> Result<InvolutionData> {
        InvolutionData::build(self.datum.clone(), self.sigma.clone())
    }

    /// Verify the frozen structure against a freshly built datum.
    pub fn verify_golden_structure(&self, data: &InvolutionData) -> Result<()> {
        if data.delta_sigma() != self.expected_delta_sigma.as_slice() {
            return Err(Error::InvariantViolation(format!(
                "preset {}: fixed simple positions {:?} != expected {:?}",
                self.name,
                data.delta_sigma(),
                self.expected_delta_sigma
            )));
        }
        if data.dbar_len() != self.expected_dbar_size {
            return Err(Error::InvariantViolation(format!(
                "preset {}: restricted basis size {} != expected {}",
                self.name,
                data.dbar_len(),
                self.expected_dbar_size
            )));
        }
        let s0: Vec<Vec<i64>> = lattice_rows_i64(data.s0_lattice());
        if s0 != self.expected_s0 {
            return Err(Error::InvariantViolation(format!(
                "preset {}: antifixed basis {s0:?} != expected {:?}",
                self.name, self.expected_s0
            )));
        }
        let z0: Vec<Vec<i64>> = lattice_rows_i64(data.z0_lattice());
        if z0 != self.expected_z0 {
            return Err(Error::InvariantViolation(format!(
                "preset {}: central basis {z0:?} != expected {:?}",
                self.name, self.expected_z0
            )));
        }
        Ok(())
    }
}

fn lattice_rows_i64(l: &crate::lattice::Sublattice) -> Vec<Vec<i64>> {
    l.basis_rows()
        .iter()
        .map(|row| row.iter().map(|x| i64::try_from(x).unwrap()).collect())
        .collect()
}

/// Look up a preset by name: `gl3_inner`, `gl4_symplectic`, `group_case(n)`.
pub fn preset(name: &str) -> Result<PresetDescriptor> {
    match name {
        "gl3_inner" => Ok(gl3_inner()),
        "gl4_symplectic" => Ok(gl4_symplectic()),
        _ => {
            if let Some(rest) = name.strip_prefix("group_case(") {
                if let Some(num) = rest.strip_suffix(')') {
                    let n: usize = num
                        .trim()
                        .parse()
                        .map_err(|_| Error::UnknownPreset(name.to_string()))?;
                    if !(1..=4).contains(&n) {
                        return Err(Error::InvalidJob(format!(
                            "group_case rank must be between 1 and 4, got {n}"
                        )));
                    }
                    return Ok(group_case(n));
                }
            }
            Err(Error::UnknownPreset(name.to_string()))
        }
    }
}

pub fn preset_names() -> Vec<&'static str> {
    vec!["gl3_inner", "gl4_symplectic", "group_case(n)"]
}

/// GL(3) with the involution conjugating by the antidiagonal; the fixed
/// points are GL(2) x GL(1). On characters of the diagonal torus the
/// involution reverses coordinates.
fn gl3_inner() -> PresetDescriptor {
    let datum = BasedRootDatum::gl(3);
    let sigma = IntMatrix::from_i64(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
    let golden = GoldenData {
        parabolic: vec![],
        exponents: vec![
            GoldenExponent {
                label: "chi_1".into(),
                vector: vec![rat(0, 1), rat(1, 1), rat(-1, 1)],
                normalized_vector: Some(vec![rat(0, 1), rat(1, 2), rat(-1, 2)]),
                lambda_support: true,
            },
            GoldenExponent {
                label: "chi_2".into(),
                vector: vec![rat(1, 1), rat(0, 1), rat(-1, 1)],
                normalized_vector: Some(vec![rat(1, 2), rat(0, 1), rat(-1, 2)]),
                lambda_support: true,
            },
            GoldenExponent {
                label: "chi_3".into(),
                vector: vec![rat(1, 1), rat(-1, 1), rat(0, 1)],
                normalized_vector: Some(vec![rat(1, 2), rat(-1, 2), rat(0, 1)]),
                lambda_support: true,
            },
        ],
        expected_pairings: vec![rat(1, 1), rat(2, 1), rat(1, 1)],
        expected_normalized_pairings: vec![rat(1, 2), rat(1, 1), rat(1, 2)],
    };
    PresetDescriptor {
        name: "gl3_inner".into(),
        description: "GL(3) with the inner involution by the antidiagonal permutation; \
                      fixed points GL(2) x GL(1)"
            .into(),
        datum,
        sigma,
        expected_delta_sigma: vec![],
        expected_dbar_size: 1,
        expected_s0: vec![vec![1, 0, -1]],
        expected_z0: vec![],
        golden: Some(golden),
    }
}

/// GL(4) with the involution g -> J (g^T)^{-1} J^{-1} for the standard
/// skew form J; the fixed points are the symplectic group. On characters the
/// involution is the negated block swap (12)(34).
fn gl4_symplectic() -> PresetDescriptor {
    let datum = BasedRootDatum::gl(4);
    let p = IntMatrix::from_i64(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]]);
    let sigma = p.neg();
    // exponents of the block-Steinberg induction along the (2,2) parabolic,
    // restricted to the split component; only the middle twist survives the
    // distinction analysis
    let golden = GoldenData {
        parabolic: vec![0, 2],
        exponents: vec![
            GoldenExponent {
                label: "w_identity".into(),
                vector: vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(-1, 1)],
                normalized_vector: None,
                lambda_support: false,
            },
            GoldenExponent {
                label: "w_block_swap".into(),
                vector: vec![rat(-1, 1), rat(0, 1), rat(0, 1), rat(1, 1)],
                normalized_vector: None,
                lambda_support: false,
            },
            GoldenExponent {
                label: "w_cross".into(),
                vector: vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(-1, 1)],
                normalized_vector: None,
                lambda_support: true,
            },
        ],
        expected_pairings: vec![rat(1, 1)],
        expected_normalized_pairings: vec![],
    };
    PresetDescriptor {
        name: "gl4_symplectic".into(),
        description: "GL(4) with the symplectic involution; fixed points Sp(4)".into(),
        datum,
        sigma,
        expected_delta_sigma: vec![0, 2],
        expected_dbar_size: 1,
        expected_s0: vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]],
        expected_z0: vec![vec![1, 1, 1, 1]],
        golden: Some(golden),
    }
}

/// The doubled general linear group with the factor swap; the fixed points
/// are the diagonal copy. The second factor's simple system is negated so
/// the simple system is adapted to the swap.
fn group_case(n: usize) -> PresetDescriptor {
    let base = BasedRootDatum::gl(n);
    let (datum, sigma) = group_case_datum(&base);
    let expected_s0: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut v = vec![0i64; 2 * n];
            v[i] = 1;
            v[n + i] = -1;
            v
        })
        .collect();
    let expected_z0: Vec<Vec<i64>> = if n == 0 {
        vec![]
    } else {
        vec![{
            let mut v = vec![1i64; n];
            v.extend(vec![-1i64; n]);
            v
        }]
    };
    // golden family: the Steinberg staircase transported to the doubled
    // datum, supported everywhere; verified square integrable on both sides
    let golden = if n >= 2 {
        let st = borel_exponents(&RepSpec::steinberg(n)).expect("small rank");
        let mut vector = st.entries[0].vector.clone();
        vector.extend(vec![Rat::zero(); n]);
        // staircase paired with the j-th fundamental coweight: j(n-j)/2
        let expected_pairings: Vec<Rat> = (1..n).map(|j| rat((j * (n - j)) as i64, 2)).collect();
        Some(GoldenData {
            parabolic: vec![],
            exponents: vec![GoldenExponent {
                label: "steinberg".into(),
                vector,
                normalized_vector: None,
                lambda_support: true,
            }],
            expected_pairings,
            expected_normalized_pairings: vec![],
        })
    } else {
        None
    };
    PresetDescriptor {
        name: format!("group_case({n})"),
        description: format!(
            "GL({n}) x GL({n}) with the factor swap; fixed points the diagonal copy"
        ),
        datum,
        sigma,
        expected_delta_sigma: vec![],
        expected_dbar_size: n.saturating_sub(1),
        expected_s0,
        expected_z0,
        golden,
    }
}

/// The golden exponent family of a preset, closed under restriction so the
/// full conjunction has data on every proper split subset.
pub fn golden_family(desc: &PresetDescriptor, data: &InvolutionData) -> Result<ExponentFamily> {
    let golden = desc
        .golden
        .as_ref()
        .ok_or_else(|| Error::InvalidJob(format!("preset {} has no golden data", desc.name)))?;
    let mut family = ExponentFamily::new(true);
    for g in &golden.exponents {
        family.insert(
            &golden.parabolic,
            Exponent::new(&g.label, g.vector.clone(), g.lambda_support),
        );
    }
    crate::criterion::restriction_closure(data, &family)
}

/// The same family built from the normalized-calculus vectors, for presets
/// recording both normalizations.
pub fn golden_family_normalized(
    desc: &PresetDescriptor,
    data: &InvolutionData,
) -> Result<Option<ExponentFamily>> {
    let golden = desc
        .golden
        .as_ref()
        .ok_or_else(|| Error::InvalidJob(format!("preset {} has no golden data", desc.name)))?;
    if golden
        .exponents
        .iter()
        .all(|g| g.normalized_vector.is_none())
    {
        return Ok(None);
    }
    let mut family = ExponentFamily::new(true);
    for g in &golden.exponents {
        let vector = g
            .normalized_vector
            .clone()
            .unwrap_or_else(|| g.vector.clone());
        family.insert(
            &golden.parabolic,
            Exponent::new(&g.label, vector, g.lambda_support),
        );
    }
    Ok(Some(crate::criterion::restriction_closure(data, &family)?))
}

/// Parse an inline datum: rank, roots, optional coroots (defaulting to the
/// roots), simple indices into the root list, and the involution matrix.
pub fn datum_from_parts(
    rank: usize,
    roots: Vec<Vec<i64>>,
    coroots: Option<Vec<Vec<i64>>>,
    simple: Vec<usize>,
    sigma_rows: Vec<Vec<i64>>,
) -> Result<(BasedRootDatum, IntMatrix)> {
    let to_int = |rows: &[Vec<i64>]| -> Vec<Vec<crate::lattice::Int>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    };
    if sigma_rows.len() != rank || sigma_rows.iter().any(|r| r.len() != rank) {
        return Err(Error::DimensionMismatch {
            expected: rank,
            got: sigma_rows.len(),
        });
    }
    let coroots = coroots.unwrap_or_else(|| roots.clone());
    let datum = BasedRootDatum::new(rank, to_int(&roots), to_int(&coroots), simple);
    let sigma = IntMatrix::from_rows(to_int(&sigma_rows));
    Ok((datum, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::{check_all, CheckOptions};

    #[test]
    fn all_presets_build_and_match_frozen_structure() {
        for name in [
            "gl3_inner",
            "gl4_symplectic",
            "group_case(2)",
            "group_case(3)",
        ] {
            let desc = preset(name).unwrap();
            assert!(desc.datum.validate().is_empty(), "{name} datum invalid");
            let data = desc.build().unwrap();
            desc.verify_golden_structure(&data).unwrap();
        }
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(matches!(preset("so5"), Err(Error::UnknownPreset(_))));
        assert!(matches!(
            preset("group_case(x)"),
            Err(Error::UnknownPreset(_))
        ));
        assert!(matches!(preset("group_case(9)"), Err(Error::InvalidJob(_))));
    }

    #[test]
    fn golden_families_pass_with_support_filter() {
        for name in [
            "gl3_inner",
            "gl4_symplectic",
            "group_case(2)",
            "group_case(3)",
        ] {
            let desc = preset(name).unwrap();
            let data = desc.build().unwrap();
            let family = golden_family(&desc, &data).unwrap();
            let opts = CheckOptions {
                lambda_only: true,
                unitary: true,
            };
            let verdict = check_all(&data, &family, opts).unwrap();
            assert!(verdict.pass, "{name} golden family must pass");
        }
    }

    #[test]
    fn golden_vectors_agree_with_the_exponent_calculus() {
        // the normalized golden vectors of the rank-3 preset are exactly the
        // Jacquet exponents of the induced block representation
        let rep3 = RepSpec::parse("ind(1,2 | char 0 ; st 2)").unwrap();
        let m3 = borel_exponents(&rep3).unwrap();
        let computed: std::collections::BTreeSet<Vec<String>> = m3
            .entries
            .iter()
            .map(|e| e.vector.iter().map(|x| x.to_string()).collect())
            .collect();
        let desc3 = preset("gl3_inner").unwrap();
        let frozen: std::collections::BTreeSet<Vec<String>> = desc3
            .golden
            .as_ref()
            .unwrap()
            .exponents
            .iter()
            .map(|g| {
                g.normalized_vector
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|x| x.to_string())
                    .collect()
            })
            .collect();
        assert_eq!(computed, frozen);

        // every rank-4 golden exponent restricts on the split component like
        // some Jacquet exponent of the twisted block induction
        let desc4 = preset("gl4_symplectic").unwrap();
        let data4 = desc4.build().unwrap();
        let subset = &data4.sigma_split_subsets()[0];
        let rep4 = RepSpec::parse("ind(2,2 | st 2 twist 1/2 ; st 2 twist -1/2)").unwrap();
        let m4 = borel_exponents(&rep4).unwrap();
        let calculus_values: std::collections::BTreeSet<Vec<String>> = m4
            .entries
            .iter()
            .map(|e| {
                subset
                    .s_lattice
                    .basis_rows()
                    .iter()
                    .map(|row| crate::lattice::dot_rat_int(&e.vector, row).to_string())
                    .collect()
            })
            .collect();
        for g in &desc4.golden.as_ref().unwrap().exponents {
            let values: Vec<String> = subset
                .s_lattice
                .basis_rows()
                .iter()
                .map(|row| crate::lattice::dot_rat_int(&g.vector, row).to_string())
                .collect();
            assert!(
                calculus_values.contains(&values),
                "{} restriction {values:?} not produced by the calculus",
                g.label
            );
        }
    }

    #[test]
    fn gl3_golden_pairings_both_normalizations() {
        let desc = preset("gl3_inner").unwrap();
        let data = desc.build().unwrap();
        let golden = desc.golden.as_ref().unwrap();

        let family = golden_family(&desc, &data).unwrap();
        let verdict = check_all(&data, &family, CheckOptions::default()).unwrap();
        let minimal = &verdict.parabolics[0];
        let pairings: Vec<Rat> = minimal
            .exponents
            .iter()
            .map(|e| e.pairings[0].clone())
            .collect();
        assert_eq!(pairings, golden.expected_pairings);

        let normalized = golden_family_normalized(&desc, &data).unwrap().unwrap();
        let verdict2 = check_all(&data, &normalized, CheckOptions::default()).unwrap();
        let pairings2: Vec<Rat> = verdict2.parabolics[0]
            .exponents
            .iter()
            .map(|e| e.pairings[0].clone())
            .collect();
        assert_eq!(pairings2, golden.expected_normalized_pairings);
    }

    #[test]
    fn gl4_unsupported_exponent_fails_without_filter() {
        let desc = preset("gl4_symplectic").unwrap();
        let data = desc.build().unwrap();
        let family = golden_family(&desc, &data).unwrap();
        let verdict = check_all(&data, &family, CheckOptions::default()).unwrap();
        assert!(!verdict.pass, "the block-swapped twist violates the cone");
        let witness = verdict.parabolics[0].witness.as_ref().unwrap();
        assert_eq!(witness.exponent_label, "w_block_swap");
    }

    #[test]
    fn group_case_golden_pairings_match_frozen_values() {
        for n in [2usize, 3, 4] {
            let desc = preset(&format!("group_case({n})")).unwrap();
            let data = desc.build().unwrap();
            let family = golden_family(&desc, &data).unwrap();
            let verdict = check_all(&data, &family, CheckOptions::default()).unwrap();
            assert!(verdict.pass);
            let minimal = verdict
                .parabolics
                .iter()
                .find(|p| p.subset.is_empty())
                .unwrap();
            assert_eq!(
                minimal.exponents[0].pairings,
                desc.golden.as_ref().unwrap().expected_pairings,
                "group_case({n})"
            );
        }
    }

    #[test]
    fn group_case_golden_matches_plain_engine() {
        // the transported Steinberg family passes, mirroring plain square
        // integrability of the Steinberg representation
        let desc = preset("group_case(3)").unwrap();
        let data = desc.build().unwrap();
        let family = golden_family(&desc, &data).unwrap();
        let verdict = check_all(&data, &family, CheckOptions::default()).unwrap();
        assert!(verdict.pass);

        let mut plain = std::collections::BTreeMap::new();
        let st = borel_exponents(&RepSpec::steinberg(3)).unwrap();
        let rd = BasedRootDatum::gl(3);
        for bits in 0..(1u32 << rd.simple_count()) {
            let subset: Vec<usize> = (0..rd.simple_count())
                .filter(|k| bits & (1 << k) != 0)
                .collect();
            if subset.len() == rd.simple_count() {
                continue;
            }
            plain.insert(
                subset,
                vec![Exponent::new("st", st.entries[0].vector.clone(), true)],
            );
        }
        let pv = crate::criterion::casselman_check(&rd, &plain).unwrap();
        assert!(pv.pass);
    }

    #[test]
    fn inline_datum_round_trip() {
        let (datum, sigma) = datum_from_parts(
            2,
            vec![vec![1, 1], vec![-1, -1], vec![1, -1], vec![-1, 1]],
            None,
            vec![0, 2],
            vec![vec![-1, 0], vec![0, -1]],
        )
        .unwrap();
        let data = InvolutionData::build(datum, sigma).unwrap();
        assert_eq!(data.dbar_len(), 2);
    }
}
