//! The involution structure on a based root datum: validation of the adapted
//! simple system, restricted roots, split subsets of the simple system and
//! the associated split-component lattices.
//!
//! Restricted characters are modeled inside X ⊗ Q via v ↦ (v − σv)/2. On the
//! antifixed part of the cocharacter lattice this functional agrees with v
//! itself, which is what every downstream pairing uses.

use crate::lattice::{
    dot_int, dot_rat_int, eigenlattice, int, quotient_index, Int, IntMatrix, QuotientIndex, Rat,
    Sublattice,
};
use crate::root_datum::BasedRootDatum;
use crate::{Error, Result};

/// A nonzero restriction of a root, with the roots mapping onto it.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedRoot {
    /// (α − σα)/2 as a vector in X ⊗ Q.
    pub vector: Vec<Rat>,
    /// Indices of the roots restricting to this vector.
    pub preimages: Vec<usize>,
}

/// A split subset of the simple system together with its restricted side and
/// the split-component lattice of the corresponding standard parabolic.
#[derive(Clone, Debug)]
pub struct SigmaSplitSubset {
    /// Positions in the restricted basis (sorted).
    pub ibar: Vec<usize>,
    /// Positions in the simple system (sorted): preimages of `ibar` plus all
    /// fixed simple roots.
    pub i: Vec<usize>,
    /// {y in S0 : <abar, y> = 0 for abar in ibar}.
    pub s_lattice: Sublattice,
}

/// Derived structure of an involution acting on a based root datum.
pub struct InvolutionData {
    base: BasedRootDatum,
    sigma_x: IntMatrix,
    sigma_y: IntMatrix,
    /// Positions of the fixed simple roots.
    delta_sigma: Vec<usize>,
    /// Indices of the fixed roots.
    phi_sigma: Vec<usize>,
    /// All restricted roots, deduplicated, in order of first appearance.
    restricted: Vec<RestrictedRoot>,
    /// Positions into `restricted` forming the restricted basis.
    dbar: Vec<usize>,
    /// Antifixed part of the cocharacter lattice.
    s0: Sublattice,
    /// Central part: antifixed cocharacters annihilated by every root.
    z0: Sublattice,
    /// All split subsets, ordered by (|ibar|, ibar).
    subsets: Vec<SigmaSplitSubset>,
}

impl InvolutionData {
    /// Validate the datum and the involution, derive all the structure.
    pub fn build(base: BasedRootDatum, sigma_x: IntMatrix) -> Result<InvolutionData> {
        let violations = base.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidDatum(violations));
        }
        let n = base.rank();
        if sigma_x.rows != n || sigma_x.cols != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: sigma_x.rows,
            });
        }
        if !sigma_x.is_involution() {
            return Err(Error::NotInvolution);
        }
        let sigma_y = sigma_x.transpose();

        // sigma must permute the roots compatibly with the coroots
        let mut image_of = vec![0usize; base.num_roots()];
        for i in 0..base.num_roots() {
            let image = sigma_x.mul_vec(base.root(i));
            match base.root_index(&image) {
                None => return Err(Error::NotRootPermutation(i)),
                Some(j) => {
                    if sigma_y.mul_vec(base.coroot(i)) != base.coroot(j) {
                        return Err(Error::CorootMismatch(i));
                    }
                    image_of[i] = j;
                }
            }
        }

        // adapted simple system: positive non-fixed roots go negative
        for &i in &base.positive_roots() {
            let j = image_of[i];
            if j != i && base.root_sign(base.root(j)) != Some(-1) {
                let root: Vec<i64> = base
                    .root(i)
                    .iter()
                    .map(|x| i64::try_from(x).unwrap_or_default())
                    .collect();
                return Err(Error::SigmaBasisViolation { root });
            }
        }

        let phi_sigma: Vec<usize> = (0..base.num_roots())
            .filter(|&i| image_of[i] == i)
            .collect();
        let delta_sigma: Vec<usize> = (0..base.simple_count())
            .filter(|&k| image_of[base.simple_root_index(k)] == base.simple_root_index(k))
            .collect();

        // restricted roots: (α − σα)/2 over all non-fixed roots
        let mut restricted: Vec<RestrictedRoot> = Vec::new();
        for i in 0..base.num_roots() {
            if image_of[i] == i {
                continue;
            }
            let v = restrict_vector(&sigma_x, base.root(i));
            match restricted.iter_mut().find(|r| r.vector == v) {
                Some(r) => r.preimages.push(i),
                None => restricted.push(RestrictedRoot {
                    vector: v,
                    preimages: vec![i],
                }),
            }
        }

        let mut dbar = Vec::new();
        for k in 0..base.simple_count() {
            if delta_sigma.contains(&k) {
                continue;
            }
            let v = restrict_vector(&sigma_x, base.simple_root(k));
            let idx = restricted
                .iter()
                .position(|r| r.vector == v)
                .ok_or_else(|| Error::InvariantViolation("simple restriction missing".into()))?;
            if !dbar.contains(&idx) {
                dbar.push(idx);
            }
        }

        let s0 = eigenlattice(&sigma_y, -1)?;
        let z0 = annihilator_inside(
            &s0,
            &(0..base.simple_count())
                .map(|k| base.simple_root(k).to_vec())
                .collect::<Vec<_>>(),
        );

        // the restricted basis must be independent on S0 with common kernel Z0
        if s0.rank() != dbar.len() + z0.rank() {
            return Err(Error::InvariantViolation(format!(
                "restricted basis size {} does not complement the central rank {} in rank {}",
                dbar.len(),
                z0.rank(),
                s0.rank()
            )));
        }

        let mut data = InvolutionData {
            base,
            sigma_x,
            sigma_y,
            delta_sigma,
            phi_sigma,
            restricted,
            dbar,
            s0,
            z0,
            subsets: Vec::new(),
        };
        data.subsets = data.enumerate_subsets();
        Ok(data)
    }

    fn enumerate_subsets(&self) -> Vec<SigmaSplitSubset> {
        let m = self.dbar.len();
        let mut subsets = Vec::with_capacity(1 << m);
        for bits in 0..(1u32 << m) {
            let ibar: Vec<usize> = (0..m).filter(|k| bits & (1 << k) != 0).collect();
            subsets.push(self.subset_from_ibar(&ibar));
        }
        subsets.sort_by(|a, b| (a.ibar.len(), &a.ibar).cmp(&(b.ibar.len(), &b.ibar)));
        subsets
    }

    fn subset_from_ibar(&self, ibar: &[usize]) -> SigmaSplitSubset {
        let mut i: Vec<usize> = self.delta_sigma.clone();
        for k in 0..self.base.simple_count() {
            if self.delta_sigma.contains(&k) {
                continue;
            }
            let v = restrict_vector(&self.sigma_x, self.base.simple_root(k));
            let idx = self
                .restricted
                .iter()
                .position(|r| r.vector == v)
                .expect("restriction of a non-fixed simple root");
            let pos = self
                .dbar
                .iter()
                .position(|&d| d == idx)
                .expect("basis member");
            if ibar.contains(&pos) {
                i.push(k);
            }
        }
        i.sort_unstable();
        // pairing constraints: one preimage root per restricted basis member
        let constraints: Vec<Vec<Int>> = ibar
            .iter()
            .map(|&pos| {
                let r = &self.restricted[self.dbar[pos]];
                self.base.root(r.preimages[0]).to_vec()
            })
            .collect();
        let s_lattice = annihilator_inside(&self.s0, &constraints);
        SigmaSplitSubset {
            ibar: ibar.to_vec(),
            i,
            s_lattice,
        }
    }

    pub fn base(&self) -> &BasedRootDatum {
        &self.base
    }

    pub fn sigma_x(&self) -> &IntMatrix {
        &self.sigma_x
    }

    pub fn sigma_y(&self) -> &IntMatrix {
        &self.sigma_y
    }

    pub fn delta_sigma(&self) -> &[usize] {
        &self.delta_sigma
    }

    pub fn phi_sigma(&self) -> &[usize] {
        &self.phi_sigma
    }

    /// All restricted roots (the full restricted system, possibly non-reduced).
    pub fn restricted_roots(&self) -> &[RestrictedRoot] {
        &self.restricted
    }

    /// The restricted basis, as positions into `restricted_roots`.
    pub fn dbar(&self) -> &[usize] {
        &self.dbar
    }

    pub fn dbar_len(&self) -> usize {
        self.dbar.len()
    }

    pub fn dbar_vector(&self, pos: usize) -> &[Rat] {
        &self.restricted[self.dbar[pos]].vector
    }

    /// An integral representative of a restricted basis functional: any
    /// preimage root. On antifixed cocharacters the pairings agree.
    pub fn dbar_integral(&self, pos: usize) -> &[Int] {
        let r = &self.restricted[self.dbar[pos]];
        self.base.root(r.preimages[0])
    }

    pub fn s0_lattice(&self) -> &Sublattice {
        &self.s0
    }

    pub fn z0_lattice(&self) -> &Sublattice {
        &self.z0
    }

    /// All split subsets of the simple system, ordered by (size, indices) of
    /// the restricted side.
    pub fn sigma_split_subsets(&self) -> &[SigmaSplitSubset] {
        &self.subsets
    }

    /// Proper split subsets, i.e. everything except the full simple system.
    pub fn proper_subsets(&self) -> impl Iterator<Item = &SigmaSplitSubset> {
        let m = self.dbar.len();
        self.subsets.iter().filter(move |s| s.ibar.len() < m)
    }

    /// One maximal proper subset per restricted basis member.
    pub fn maximal_proper_subsets(&self) -> Vec<&SigmaSplitSubset> {
        let m = self.dbar.len();
        self.subsets
            .iter()
            .filter(|s| s.ibar.len() + 1 == m)
            .collect()
    }

    pub fn subset_by_ibar(&self, ibar: &[usize]) -> Option<&SigmaSplitSubset> {
        let mut key = ibar.to_vec();
        key.sort_unstable();
        self.subsets.iter().find(|s| s.ibar == key)
    }

    pub fn subset_by_i(&self, i: &[usize]) -> Option<&SigmaSplitSubset> {
        let mut key = i.to_vec();
        key.sort_unstable();
        self.subsets.iter().find(|s| s.i == key)
    }

    pub fn is_sigma_split(&self, i: &[usize]) -> bool {
        self.subset_by_i(i).is_some()
    }

    /// Recover the restricted side from a split subset of the simple system.
    pub fn ibar_of(&self, i: &[usize]) -> Option<Vec<usize>> {
        self.subset_by_i(i).map(|s| s.ibar.clone())
    }

    /// The two split-component lattices of a decomposition of the restricted
    /// basis, plus the index of their sum inside the antifixed lattice.
    pub fn component_lattices(&self, ibar: &[usize]) -> Result<(Sublattice, Sublattice, Int)> {
        let m = self.dbar.len();
        let complement: Vec<usize> = (0..m).filter(|k| !ibar.contains(k)).collect();
        let a = self
            .subset_by_ibar(ibar)
            .ok_or_else(|| Error::NotSigmaSplit(ibar.to_vec()))?
            .s_lattice
            .clone();
        let b = self
            .subset_by_ibar(&complement)
            .expect("complement subset")
            .s_lattice
            .clone();
        // the two components intersect exactly in the central lattice
        if a.intersect(&b) != self.z0 {
            return Err(Error::InvariantViolation(
                "component intersection differs from the central lattice".into(),
            ));
        }
        let sum = a.sum(&b);
        match quotient_index(&self.s0, &sum)? {
            QuotientIndex::Finite(idx) => Ok((a, b, idx)),
            QuotientIndex::Infinite => Err(Error::InvariantViolation(
                "component sum has infinite index".into(),
            )),
        }
    }

    /// Pair an X ⊗ Q functional with a cocharacter lattice point.
    pub fn pair(&self, functional: &[Rat], point: &[Int]) -> Rat {
        dot_rat_int(functional, point)
    }

    /// Integer pairing of the `pos`-th restricted basis member with an
    /// antifixed lattice point.
    pub fn pair_dbar(&self, pos: usize, point: &[Int]) -> Int {
        dot_int(self.dbar_integral(pos), point)
    }
}

/// (v − σv)/2 in X ⊗ Q.
pub fn restrict_vector(sigma_x: &IntMatrix, v: &[Int]) -> Vec<Rat> {
    let image = sigma_x.mul_vec(v);
    v.iter()
        .zip(&image)
        .map(|(a, b)| Rat::new(a - b, int(2)))
        .collect()
}

/// {y in lattice : <c, y> = 0 for all constraints c}, as a sublattice.
/// Saturated inside the input lattice whenever that one is saturated.
pub(crate) fn annihilator_inside(lattice: &Sublattice, constraints: &[Vec<Int>]) -> Sublattice {
    if lattice.rank() == 0 || constraints.is_empty() {
        return lattice.clone();
    }
    // pairing matrix in basis coordinates
    let rows: Vec<Vec<Int>> = lattice
        .basis_rows()
        .iter()
        .map(|b| constraints.iter().map(|c| dot_int(c, b)).collect())
        .collect();
    let m = IntMatrix::from_rows(rows);
    let kernel = m.left_kernel();
    let gens: Vec<Vec<Int>> = (0..kernel.rows)
        .map(|r| lattice.point_from_coords(&kernel.row_vec(r)))
        .collect();
    Sublattice::from_generators(lattice.ambient_rank(), &gens)
}

/// The doubled datum with swapped factors: characters are pairs, the second
/// factor's simple system is negated so the swap sends every positive root of
/// one factor to a negative root of the other. Returns the datum and the
/// swap matrix on X.
pub fn group_case_datum(rd: &BasedRootDatum) -> (BasedRootDatum, IntMatrix) {
    let n = rd.rank();
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for i in 0..rd.num_roots() {
        let mut left = rd.root(i).to_vec();
        left.extend(vec![int(0); n]);
        roots.push(left);
        let mut cleft = rd.coroot(i).to_vec();
        cleft.extend(vec![int(0); n]);
        coroots.push(cleft);
    }
    for i in 0..rd.num_roots() {
        let mut right = vec![int(0); n];
        right.extend(rd.root(i).to_vec());
        roots.push(right);
        let mut cright = vec![int(0); n];
        cright.extend(rd.coroot(i).to_vec());
        coroots.push(cright);
    }
    let mut simple = Vec::new();
    for k in 0..rd.simple_count() {
        simple.push(rd.simple_root_index(k));
    }
    for k in 0..rd.simple_count() {
        // negated simple root of the second factor
        let mut v = vec![int(0); n];
        v.extend(rd.simple_root(k).iter().map(|x| -x));
        let idx = roots
            .iter()
            .position(|r| *r == v)
            .expect("negated root present");
        simple.push(idx);
    }
    let datum = BasedRootDatum::new(2 * n, roots, coroots, simple);
    let mut swap = IntMatrix::zero(2 * n, 2 * n);
    for i in 0..n {
        swap.set(i, n + i, int(1));
        swap.set(n + i, i, int(1));
    }
    (datum, swap)
}
