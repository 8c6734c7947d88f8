//! Exponent calculus for induced representations of GL(n): the exponents of
//! the semisimplified Jacquet module along the Borel, obtained by twisting
//! the inducing data's torus exponents across minimal coset representatives.
//!
//! Functors are normalized throughout, so a Weyl twist acts on exponent
//! vectors by plain coordinate permutation with no modulus shift. A Steinberg
//! block of size k contributes the staircase vector
//! ((k-1)/2, (k-3)/2, ..., -(k-1)/2) plus its determinant twist.

use crate::involution::{InvolutionData, SigmaSplitSubset};
use crate::lattice::{dot_rat_int, int, Rat, Sublattice};
use crate::root_datum::{BasedRootDatum, WeylElement, WEYL_SIZE_LIMIT};
use crate::{Error, Result};
use num::Zero;

/// Induction tree over GL(n). Leaves are torus characters or Steinberg
/// blocks (optionally twisted by an unramified determinant character);
/// internal nodes are normalized parabolic inductions along a composition.
#[derive(Clone, Debug, PartialEq)]
pub enum RepSpec {
    /// Unramified character of the diagonal torus of GL(k).
    Character { values: Vec<Rat> },
    /// Steinberg of GL(k), twisted by |det|^twist.
    Steinberg { size: usize, twist: Rat },
    /// Normalized induction along the composition given by the factor sizes.
    Induced { factors: Vec<RepSpec> },
}

impl RepSpec {
    pub fn size(&self) -> usize {
        match self {
            RepSpec::Character { values } => values.len(),
            RepSpec::Steinberg { size, .. } => *size,
            RepSpec::Induced { factors } => factors.iter().map(|f| f.size()).sum(),
        }
    }

    pub fn character(values: Vec<Rat>) -> Self {
        RepSpec::Character { values }
    }

    pub fn steinberg(size: usize) -> Self {
        RepSpec::Steinberg {
            size,
            twist: Rat::zero(),
        }
    }

    pub fn steinberg_twisted(size: usize, twist: Rat) -> Self {
        RepSpec::Steinberg { size, twist }
    }

    pub fn induced(factors: Vec<RepSpec>) -> Self {
        RepSpec::Induced { factors }
    }

    /// Textual form: `char a,b,...` | `st k [twist t]` | `ind(c1,c2,...|spec;spec;...)`.
    pub fn parse(input: &str) -> Result<RepSpec> {
        let s = input.trim();
        if let Some(rest) = s.strip_prefix("ind") {
            let rest = rest.trim();
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected ind(...) in `{s}`")))?;
            let (comp_part, specs_part) = split_top_level(inner, '|')
                .ok_or_else(|| Error::Parse(format!("expected `|` inside ind(...) in `{s}`")))?;
            let sizes: Vec<usize> = comp_part
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad composition entry `{t}`")))
                })
                .collect::<Result<_>>()?;
            let specs = split_all_top_level(specs_part, ';');
            if specs.len() != sizes.len() {
                return Err(Error::Parse(format!(
                    "composition has {} parts but {} factors were given",
                    sizes.len(),
                    specs.len()
                )));
            }
            let mut factors = Vec::with_capacity(specs.len());
            for (size, spec) in sizes.iter().zip(specs) {
                let factor = RepSpec::parse(spec)?;
                if factor.size() != *size {
                    return Err(Error::Parse(format!(
                        "factor `{spec}` has size {} but the composition says {size}",
                        factor.size()
                    )));
                }
                factors.push(factor);
            }
            return Ok(RepSpec::Induced { factors });
        }
        if let Some(rest) = s.strip_prefix("char") {
            let values: Vec<Rat> = rest
                .trim()
                .split(',')
                .map(crate::lattice::parse_rat)
                .collect::<Result<_>>()?;
            if values.is_empty() {
                return Err(Error::Parse("empty character".into()));
            }
            return Ok(RepSpec::Character { values });
        }
        if let Some(rest) = s.strip_prefix("st") {
            let rest = rest.trim();
            let (size_part, twist) = match rest.split_once("twist") {
                Some((a, b)) => (a.trim(), crate::lattice::parse_rat(b)?),
                None => (rest, Rat::zero()),
            };
            let size: usize = size_part
                .parse()
                .map_err(|_| Error::Parse(format!("bad block size `{size_part}`")))?;
            if size == 0 {
                return Err(Error::Parse("zero-size block".into()));
            }
            return Ok(RepSpec::Steinberg { size, twist });
        }
        Err(Error::Parse(format!("cannot parse `{s}`")))
    }
}

fn split_top_level(s: &str, sep: char) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn split_all_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Identifier of the coset twist producing an exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTag {
    pub word: String,
    /// Image array of the coordinate permutation when the element is one.
    pub permutation: Option<Vec<usize>>,
}

impl CosetTag {
    fn of(w: &WeylElement) -> Self {
        CosetTag {
            word: w.word_string(),
            permutation: w.as_permutation(),
        }
    }

    fn identity(rank: usize) -> Self {
        CosetTag {
            word: "e".to_string(),
            permutation: Some((0..rank).collect()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MultisetEntry {
    pub vector: Vec<Rat>,
    pub coset: CosetTag,
    pub multiplicity: usize,
}

/// Exponents of a semisimplified Jacquet module, with multiplicity and the
/// coset twist that produced each one.
#[derive(Clone, Debug)]
pub struct ExponentMultiset {
    pub rank: usize,
    pub entries: Vec<MultisetEntry>,
}

impl ExponentMultiset {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn vectors(&self) -> Vec<Vec<Rat>> {
        let mut out = Vec::new();
        for e in &self.entries {
            for _ in 0..e.multiplicity {
                out.push(e.vector.clone());
            }
        }
        out
    }
}

/// Size guard: the calculus enumerates the Weyl group of GL(n).
pub const MAX_GL_RANK: usize = 8;

/// Exponents of the semisimplified Jacquet module along the Borel.
pub fn borel_exponents(rep: &RepSpec) -> Result<ExponentMultiset> {
    let n = rep.size();
    if n > MAX_GL_RANK {
        return Err(Error::WeylSizeLimit(MAX_GL_RANK));
    }
    let entries = match rep {
        RepSpec::Character { values } => vec![MultisetEntry {
            vector: values.clone(),
            coset: CosetTag::identity(n),
            multiplicity: 1,
        }],
        RepSpec::Steinberg { size, twist } => vec![MultisetEntry {
            vector: steinberg_vector(*size, twist),
            coset: CosetTag::identity(n),
            multiplicity: 1,
        }],
        RepSpec::Induced { factors } => {
            let rd = BasedRootDatum::gl(n);
            // Levi subset: simple positions away from the block boundaries
            let mut boundaries = std::collections::BTreeSet::new();
            let mut offset = 0usize;
            for f in factors {
                offset += f.size();
                boundaries.insert(offset);
            }
            let levi: Vec<usize> = (0..n.saturating_sub(1))
                .filter(|k| !boundaries.contains(&(k + 1)))
                .collect();
            // minimal representatives positive on the Levi's simple roots;
            // these are the twists acting on exponents
            let reps = rd.coset_reps(&[], Some(&levi), WEYL_SIZE_LIMIT)?;
            // inducing-datum exponents: concatenations of factor exponents
            let factor_sets: Vec<ExponentMultiset> =
                factors.iter().map(borel_exponents).collect::<Result<_>>()?;
            let mut concatenated: Vec<(Vec<Rat>, usize)> = vec![(vec![], 1)];
            for set in &factor_sets {
                let mut next = Vec::new();
                for (prefix, mult) in &concatenated {
                    for e in &set.entries {
                        let mut v = prefix.clone();
                        v.extend(e.vector.iter().cloned());
                        next.push((v, mult * e.multiplicity));
                    }
                }
                concatenated = next;
            }
            let mut entries = Vec::new();
            for w in &reps {
                for (v, mult) in &concatenated {
                    entries.push(MultisetEntry {
                        vector: w.apply_x_rat(v),
                        coset: CosetTag::of(w),
                        multiplicity: *mult,
                    });
                }
            }
            entries
        }
    };
    Ok(ExponentMultiset { rank: n, entries })
}

/// The staircase exponent of a Steinberg block, shifted by the twist.
pub fn steinberg_vector(size: usize, twist: &Rat) -> Vec<Rat> {
    (0..size)
        .map(|i| {
            let numer = (size as i64 - 1) - 2 * i as i64;
            Rat::new(int(numer), int(2)) + twist
        })
        .collect()
}

/// Borel exponents restricted to the split component of a standard
/// parabolic, merged by equality of the restrictions.
#[derive(Clone, Debug)]
pub struct RestrictedEntry {
    /// Values on the canonical basis of the split-component lattice.
    pub values: Vec<Rat>,
    /// One ambient representative.
    pub sample: Vec<Rat>,
    pub multiplicity: usize,
    pub cosets: Vec<CosetTag>,
}

#[derive(Clone, Debug)]
pub struct ParabolicExponents {
    pub subset: Vec<usize>,
    pub lattice: Sublattice,
    pub entries: Vec<RestrictedEntry>,
}

impl ParabolicExponents {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }
}

/// Restrict the Borel multiset to the split component of the parabolic of a
/// subset of simple positions.
pub fn parabolic_exponents(rep: &RepSpec, subset: &[usize]) -> Result<ParabolicExponents> {
    let n = rep.size();
    let rd = BasedRootDatum::gl(n);
    if subset.iter().any(|&k| k >= rd.simple_count()) {
        return Err(Error::InvalidJob(format!(
            "subset {subset:?} out of range for rank {n}"
        )));
    }
    let borel = borel_exponents(rep)?;
    let lattice = rd.parabolic(subset).split_lattice;
    restrict_multiset(&borel, subset, lattice)
}

fn restrict_multiset(
    borel: &ExponentMultiset,
    subset: &[usize],
    lattice: Sublattice,
) -> Result<ParabolicExponents> {
    let mut entries: Vec<RestrictedEntry> = Vec::new();
    for e in &borel.entries {
        let values: Vec<Rat> = lattice
            .basis_rows()
            .iter()
            .map(|row| dot_rat_int(&e.vector, row))
            .collect();
        match entries.iter_mut().find(|r| r.values == values) {
            Some(existing) => {
                existing.multiplicity += e.multiplicity;
                if !existing.cosets.contains(&e.coset) {
                    existing.cosets.push(e.coset.clone());
                }
            }
            None => entries.push(RestrictedEntry {
                values,
                sample: e.vector.clone(),
                multiplicity: e.multiplicity,
                cosets: vec![e.coset.clone()],
            }),
        }
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    Ok(ParabolicExponents {
        subset,
        lattice,
        entries,
    })
}

/// Distinct exponents of a multiset on the split component of a split
/// subset, as engine-ready exponents. Support flags are left unset: they are
/// an analytic input, not something the calculus can see.
pub fn restrict_to_split_component(
    data: &InvolutionData,
    subset: &SigmaSplitSubset,
    multiset: &ExponentMultiset,
) -> Result<Vec<crate::criterion::Exponent>> {
    if multiset.rank != data.base().rank() {
        return Err(Error::DimensionMismatch {
            expected: data.base().rank(),
            got: multiset.rank,
        });
    }
    let mut seen: Vec<Vec<Rat>> = Vec::new();
    let mut out = Vec::new();
    for e in &multiset.entries {
        let values: Vec<Rat> = subset
            .s_lattice
            .basis_rows()
            .iter()
            .map(|row| dot_rat_int(&e.vector, row))
            .collect();
        if seen.contains(&values) {
            continue;
        }
        seen.push(values);
        out.push(crate::criterion::Exponent::new(
            &format!("exp_{}", out.len() + 1),
            e.vector.clone(),
            false,
        ));
    }
    Ok(out)
}

/// Cross-check helper: the unrestricted multiset on the Borel is recovered
/// as the empty-subset case.
pub fn borel_equals_empty_parabolic(rep: &RepSpec) -> Result<bool> {
    let borel = borel_exponents(rep)?;
    let empty = parabolic_exponents(rep, &[])?;
    Ok(borel.total() == empty.total())
}
