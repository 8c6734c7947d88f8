//! Based root data, Weyl groups, standard parabolic data and minimal-length
//! coset representatives.
//!
//! Vectors in the character lattice X act as functionals on the cocharacter
//! lattice Y through the standard dot pairing; Weyl elements are stored as
//! exact integer matrices on X together with the contragredient action on Y.

use crate::lattice::{
    dot_int, int, is_zero_vec, neg_vec, rat_from_int, solve_row_combination, Int, IntMatrix, Rat,
    Sublattice,
};
use crate::{Error, Result};
use num::{Signed, Zero};

/// A based root datum with an ordered simple system.
#[derive(Clone, Debug)]
pub struct BasedRootDatum {
    rank: usize,
    roots: Vec<Vec<Int>>,
    coroots: Vec<Vec<Int>>,
    simple: Vec<usize>,
}

/// Data of the standard parabolic attached to a subset of the simple system.
#[derive(Clone, Debug)]
pub struct ParabolicData {
    /// Positions in the simple system (sorted).
    pub subset: Vec<usize>,
    /// Indices of the positive roots in the unipotent radical.
    pub radical_roots: Vec<usize>,
    /// Indices of the positive roots of the Levi factor.
    pub levi_roots: Vec<usize>,
    /// Cocharacters of the split component: the annihilator of the subset.
    pub split_lattice: Sublattice,
    /// Sum of the unipotent-radical roots (the modulus-character exponent).
    pub two_rho: Vec<Int>,
}

/// A Weyl group element: exact matrices on both lattices plus a reduced word.
#[derive(Clone, Debug)]
pub struct WeylElement {
    pub on_x: IntMatrix,
    pub on_y: IntMatrix,
    inv_on_x: IntMatrix,
    pub word: Vec<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.on_x == other.on_x
    }
}
impl Eq for WeylElement {}

impl WeylElement {
    pub fn identity(rank: usize) -> Self {
        WeylElement {
            on_x: IntMatrix::identity(rank),
            on_y: IntMatrix::identity(rank),
            inv_on_x: IntMatrix::identity(rank),
            word: vec![],
        }
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn apply_x(&self, v: &[Int]) -> Vec<Int> {
        self.on_x.mul_vec(v)
    }

    pub fn apply_x_inv(&self, v: &[Int]) -> Vec<Int> {
        self.inv_on_x.mul_vec(v)
    }

    pub fn apply_x_rat(&self, v: &[Rat]) -> Vec<Rat> {
        self.on_x.mul_vec_rat(v)
    }

    /// Image array when the X-action is a coordinate permutation: entry `i`
    /// is the index that basis vector `i` is sent to.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let n = self.on_x.cols;
        let mut perm = vec![usize::MAX; n];
        for j in 0..n {
            let mut hit = None;
            for i in 0..n {
                let v = self.on_x.get(i, j);
                if v.is_zero() {
                    continue;
                }
                if *v != int(1) || hit.is_some() {
                    return None;
                }
                hit = Some(i);
            }
            perm[j] = hit?;
        }
        Some(perm)
    }

    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word
                .iter()
                .map(|i| format!("s{}", i + 1))
                .collect::<Vec<_>>()
                .join("*")
        }
    }
}

impl BasedRootDatum {
    pub fn new(
        rank: usize,
        roots: Vec<Vec<Int>>,
        coroots: Vec<Vec<Int>>,
        simple: Vec<usize>,
    ) -> Self {
        BasedRootDatum {
            rank,
            roots,
            coroots,
            simple,
        }
    }

    /// Standard datum of GL(n) on the diagonal torus: roots `e_i - e_j`,
    /// coroots equal to roots, simple system `e_i - e_{i+1}`.
    pub fn gl(n: usize) -> Self {
        assert!(n >= 1);
        let mut roots = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut v = vec![int(0); n];
                    v[i] = int(1);
                    v[j] = int(-1);
                    roots.push(v);
                }
            }
        }
        let coroots = roots.clone();
        let simple: Vec<usize> = (0..n.saturating_sub(1))
            .map(|i| {
                roots
                    .iter()
                    .position(|r| {
                        let mut v = vec![int(0); n];
                        v[i] = int(1);
                        v[i + 1] = int(-1);
                        *r == v
                    })
                    .unwrap()
            })
            .collect();
        BasedRootDatum::new(n, roots, coroots, simple)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn root(&self, i: usize) -> &[Int] {
        &self.roots[i]
    }

    pub fn coroot(&self, i: usize) -> &[Int] {
        &self.coroots[i]
    }

    pub fn simple_count(&self) -> usize {
        self.simple.len()
    }

    /// Root index of the k-th simple root.
    pub fn simple_root_index(&self, k: usize) -> usize {
        self.simple[k]
    }

    pub fn simple_root(&self, k: usize) -> &[Int] {
        self.root(self.simple[k])
    }

    pub fn simple_coroot(&self, k: usize) -> &[Int] {
        self.coroot(self.simple[k])
    }

    pub fn root_index(&self, v: &[Int]) -> Option<usize> {
        self.roots.iter().position(|r| r.as_slice() == v)
    }

    /// Coefficients of `v` over the simple roots, if `v` lies in their span.
    pub fn simple_coefficients(&self, v: &[Int]) -> Option<Vec<Rat>> {
        let rows: Vec<Vec<Rat>> = (0..self.simple_count())
            .map(|k| self.simple_root(k).iter().map(rat_from_int).collect())
            .collect();
        let target: Vec<Rat> = v.iter().map(rat_from_int).collect();
        solve_row_combination(&rows, &target)
    }

    /// Sign of a root with respect to the simple system.
    pub fn root_sign(&self, v: &[Int]) -> Option<i32> {
        let coeffs = self.simple_coefficients(v)?;
        if coeffs.iter().all(|c| !c.is_negative()) && coeffs.iter().any(|c| c.is_positive()) {
            Some(1)
        } else if coeffs.iter().all(|c| !c.is_positive()) && coeffs.iter().any(|c| c.is_negative())
        {
            Some(-1)
        } else {
            None
        }
    }

    /// Exhaustive invariant check; an empty list means the datum is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.roots.len() != self.coroots.len() {
            violations.push("roots and coroots have different cardinality".into());
            return violations;
        }
        for (i, r) in self.roots.iter().enumerate() {
            if r.len() != self.rank || self.coroots[i].len() != self.rank {
                violations.push(format!("root {i} has wrong dimension"));
                return violations;
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, r) in self.roots.iter().enumerate() {
            if is_zero_vec(r) {
                violations.push(format!("root {i} is zero"));
            }
            if !seen.insert(r.clone()) {
                violations.push(format!("root {i} repeated"));
            }
            let pairing = dot_int(r, &self.coroots[i]);
            if pairing != int(2) {
                violations.push(format!(
                    "pairing of root {i} with its coroot is {pairing}, not 2"
                ));
            }
            if self.root_index(&neg_vec(r)).is_none() {
                violations.push(format!("root {i} has no negative"));
            }
        }
        for k in &self.simple {
            if *k >= self.roots.len() {
                violations.push(format!("simple index {k} out of range"));
                return violations;
            }
        }
        // simple reflections permute the roots (with matching coroots)
        for k in 0..self.simple_count() {
            for (i, r) in self.roots.iter().enumerate() {
                let image = self.reflect_root(k, r);
                match self.root_index(&image) {
                    None => violations.push(format!(
                        "reflection in simple root {k} sends root {i} outside the system"
                    )),
                    Some(j) => {
                        let coimage = self.reflect_coroot(k, &self.coroots[i]);
                        if coimage != self.coroots[j] {
                            violations.push(format!(
                                "reflection in simple root {k} breaks coroot correspondence at root {i}"
                            ));
                        }
                    }
                }
            }
        }
        // every root is an all-nonnegative or all-nonpositive integral combination
        for (i, r) in self.roots.iter().enumerate() {
            match self.simple_coefficients(r) {
                None => {
                    violations.push(format!("root {i} is outside the span of the simple system"))
                }
                Some(coeffs) => {
                    if coeffs.iter().any(|c| !c.is_integer()) {
                        violations.push(format!("root {i} has non-integral simple coefficients"));
                    } else if self.root_sign(r).is_none() {
                        violations.push(format!("root {i} has mixed-sign simple coefficients"));
                    }
                }
            }
        }
        violations
    }

    pub(crate) fn reflect_root(&self, k: usize, v: &[Int]) -> Vec<Int> {
        let c = dot_int(v, self.simple_coroot(k));
        v.iter()
            .zip(self.simple_root(k))
            .map(|(x, a)| x - &c * a)
            .collect()
    }

    fn reflect_coroot(&self, k: usize, y: &[Int]) -> Vec<Int> {
        let c = dot_int(self.simple_root(k), y);
        y.iter()
            .zip(self.simple_coroot(k))
            .map(|(x, a)| x - &c * a)
            .collect()
    }

    /// Matrix of the k-th simple reflection on X.
    pub fn simple_reflection_x(&self, k: usize) -> IntMatrix {
        let n = self.rank;
        let mut m = IntMatrix::identity(n);
        let alpha = self.simple_root(k);
        let covec = self.simple_coroot(k);
        for j in 0..n {
            for i in 0..n {
                let v = m.get(i, j) - &alpha[i] * &covec[j];
                m.set(i, j, v);
            }
        }
        m
    }

    /// Matrix of the k-th simple reflection on Y (transpose of the X action).
    pub fn simple_reflection_y(&self, k: usize) -> IntMatrix {
        self.simple_reflection_x(k).transpose()
    }

    /// Indices of the positive roots, ordered by height and list position.
    pub fn positive_roots(&self) -> Vec<usize> {
        let mut pos: Vec<(Rat, usize)> = Vec::new();
        for (i, r) in self.roots.iter().enumerate() {
            if self.root_sign(r) == Some(1) {
                let coeffs = self.simple_coefficients(r).unwrap();
                let height: Rat = coeffs.iter().sum();
                pos.push((height, i));
            }
        }
        pos.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        pos.into_iter().map(|(_, i)| i).collect()
    }

    /// Standard parabolic data for a subset of simple positions.
    pub fn parabolic(&self, subset: &[usize]) -> ParabolicData {
        let mut subset: Vec<usize> = subset.to_vec();
        subset.sort_unstable();
        subset.dedup();
        assert!(subset.iter().all(|&k| k < self.simple_count()));
        let span_rows: Vec<Vec<Rat>> = subset
            .iter()
            .map(|&k| self.simple_root(k).iter().map(rat_from_int).collect())
            .collect();
        let mut radical_roots = Vec::new();
        let mut levi_roots = Vec::new();
        for i in self.positive_roots() {
            let target: Vec<Rat> = self.roots[i].iter().map(rat_from_int).collect();
            if solve_row_combination(&span_rows, &target).is_some() {
                levi_roots.push(i);
            } else {
                radical_roots.push(i);
            }
        }
        let mut two_rho = vec![int(0); self.rank];
        for &i in &radical_roots {
            for (t, v) in two_rho.iter_mut().zip(&self.roots[i]) {
                *t += v;
            }
        }
        // annihilator of the subset inside Y
        let constraint = if subset.is_empty() {
            IntMatrix::zero(0, self.rank)
        } else {
            IntMatrix::from_rows(
                subset
                    .iter()
                    .map(|&k| self.simple_root(k).to_vec())
                    .collect(),
            )
        };
        let kernel = constraint.transpose().left_kernel();
        let gens: Vec<Vec<Int>> = kernel.rows_iter().map(|r| r.to_vec()).collect();
        let split_lattice = Sublattice::from_generators(self.rank, &gens);
        ParabolicData {
            subset,
            radical_roots,
            levi_roots,
            split_lattice,
            two_rho,
        }
    }

    /// The full Weyl group, BFS over reduced words. Errors out above the
    /// size limit so desk-scale inputs stay desk-scale.
    pub fn weyl_group(&self, size_limit: usize) -> Result<Vec<WeylElement>> {
        let gens_x: Vec<IntMatrix> = (0..self.simple_count())
            .map(|k| self.simple_reflection_x(k))
            .collect();
        let gens_y: Vec<IntMatrix> = (0..self.simple_count())
            .map(|k| self.simple_reflection_y(k))
            .collect();
        let mut elements = vec![WeylElement::identity(self.rank)];
        let mut seen = std::collections::BTreeMap::new();
        seen.insert(matrix_key(&elements[0].on_x), 0usize);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &idx in &frontier {
                for k in 0..self.simple_count() {
                    let (on_x, key) = {
                        let w = &elements[idx];
                        let on_x = w.on_x.mul(&gens_x[k]);
                        let key = matrix_key(&on_x);
                        (on_x, key)
                    };
                    if seen.contains_key(&key) {
                        continue;
                    }
                    let w = &elements[idx];
                    let on_y = w.on_y.mul(&gens_y[k]);
                    let inv_on_x = gens_x[k].mul(&w.inv_on_x);
                    let mut word = w.word.clone();
                    word.push(k);
                    let new = WeylElement {
                        on_x,
                        on_y,
                        inv_on_x,
                        word,
                    };
                    if elements.len() >= size_limit {
                        return Err(Error::WeylSizeLimit(size_limit));
                    }
                    seen.insert(key, elements.len());
                    next.push(elements.len());
                    elements.push(new);
                }
            }
            frontier = next;
        }
        Ok(elements)
    }

    /// Minimal-length (double) coset representatives. With only `i_left`,
    /// these are the minimal representatives of the cosets `W_I \ W`; with
    /// `i_right` as well, of the double cosets `W_I \ W / W_J`.
    pub fn coset_reps(
        &self,
        i_left: &[usize],
        i_right: Option<&[usize]>,
        size_limit: usize,
    ) -> Result<Vec<WeylElement>> {
        let group = self.weyl_group(size_limit)?;
        let mut reps = Vec::new();
        'outer: for w in group {
            for &k in i_left {
                let image = w.apply_x_inv(self.simple_root(k));
                if self.root_sign(&image) != Some(1) {
                    continue 'outer;
                }
            }
            if let Some(right) = i_right {
                for &k in right {
                    let image = w.apply_x(self.simple_root(k));
                    if self.root_sign(&image) != Some(1) {
                        continue 'outer;
                    }
                }
            }
            reps.push(w);
        }
        Ok(reps)
    }
}

fn matrix_key(m: &IntMatrix) -> Vec<String> {
    (0..m.rows)
        .flat_map(|r| m.row(r).iter().map(|x| x.to_string()))
        .collect()
}

/// Default guard for Weyl group enumeration.
pub const WEYL_SIZE_LIMIT: usize = 100_000;
