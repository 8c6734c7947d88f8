//! Exact integer and rational linear algebra: matrices over `BigInt`,
//! Hermite and Smith normal forms with transforms, sublattices in canonical
//! Hermite basis, kernels, saturations and quotient indices.
//!
//! No floating point anywhere in this module.

use crate::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_from_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Parse "p", "-p" or "p/q" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let d: Int = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(n, d))
}

/// Render a rational as "p" or "p/q".
pub fn rat_to_string(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat_int(a: &[Rat], b: &[Int]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x * Rat::from_integer(y.clone()))
        .sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add_vec(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Int], b: &[Int]) -> Vec<Int> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(k: &Int, a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| k * x).collect()
}

pub fn neg_vec(a: &[Int]) -> Vec<Int> {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Int]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn rats(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_from_int).collect()
}

/// Clear denominators and divide by the content, keeping the sign of the
/// leading nonzero entry positive only if `positive_lead` is set.
pub fn primitive_int_vector(v: &[Rat], positive_lead: bool) -> Vec<Int> {
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: Vec<Int> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = Int::zero();
    for x in &out {
        g = g.gcd(x);
    }
    if !g.is_zero() {
        for x in &mut out {
            *x /= &g;
        }
    }
    if positive_lead {
        if let Some(first) = out.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                out = neg_vec(&out);
            }
        }
    }
    out
}

/// Dense integer matrix, row major. All arithmetic is exact.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<Int>,
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(
                f,
                "  {:?}",
                (0..self.cols)
                    .map(|c| self.get(r, c).to_string())
                    .collect::<Vec<_>>()
            )?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend(row);
        }
        IntMatrix {
            rows: r,
            cols: c,
            entries,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| ints(r)).collect())
    }

    pub fn get(&self, r: usize, c: usize) -> &Int {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Int) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Int] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<Int> {
        self.row(r).to_vec()
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Int]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut m = Self::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = Int::zero();
                for k in 0..self.cols {
                    acc += self.get(r, k) * other.get(k, c);
                }
                m.set(r, c, acc);
            }
        }
        m
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|r| dot_int(self.row(r), v)).collect()
    }

    /// Matrix times rational column vector.
    pub fn mul_vec_rat(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| Rat::from_integer(a.clone()) * x)
                    .sum()
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(v: &[Int], m: &Self) -> Vec<Int> {
        assert_eq!(v.len(), m.rows);
        (0..m.cols)
            .map(|c| v.iter().zip(0..m.rows).map(|(x, r)| x * m.get(r, c)).sum())
            .collect()
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    pub fn is_involution(&self) -> bool {
        self.rows == self.cols && self.mul(self).is_identity()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            self.set(r, c, v);
        }
    }

    /// row[dst] -= q * row[src]
    fn submul_row(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(dst, c) - q * self.get(src, c);
            self.set(dst, c, v);
        }
    }

    /// Row-style Hermite normal form. Returns `(h, u)` with `u` unimodular and
    /// `u * self == h`; pivots are positive, entries above a pivot are reduced
    /// into `[0, pivot)`, zero rows sit at the bottom.
    pub fn hermite(&self) -> (IntMatrix, IntMatrix) {
        let mut h = self.clone();
        let mut u = IntMatrix::identity(self.rows);
        let mut pivot_row = 0usize;
        for col in 0..h.cols {
            if pivot_row == h.rows {
                break;
            }
            if (pivot_row..h.rows).all(|r| h.get(r, col).is_zero()) {
                continue;
            }
            // euclidean elimination below the pivot
            loop {
                let mut best: Option<usize> = None;
                for r in pivot_row..h.rows {
                    if !h.get(r, col).is_zero() {
                        match best {
                            None => best = Some(r),
                            Some(b) => {
                                if h.get(r, col).abs() < h.get(b, col).abs() {
                                    best = Some(r);
                                }
                            }
                        }
                    }
                }
                let b = best.unwrap();
                h.swap_rows(pivot_row, b);
                u.swap_rows(pivot_row, b);
                if h.get(pivot_row, col).is_negative() {
                    h.negate_row(pivot_row);
                    u.negate_row(pivot_row);
                }
                let pivot = h.get(pivot_row, col).clone();
                let mut done = true;
                for r in pivot_row + 1..h.rows {
                    if !h.get(r, col).is_zero() {
                        let q = h.get(r, col).div_floor(&pivot);
                        h.submul_row(r, pivot_row, &q);
                        u.submul_row(r, pivot_row, &q);
                        if !h.get(r, col).is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            // reduce the entries above the pivot into [0, pivot)
            let pivot = h.get(pivot_row, col).clone();
            for r in 0..pivot_row {
                let q = h.get(r, col).div_floor(&pivot);
                h.submul_row(r, pivot_row, &q);
                u.submul_row(r, pivot_row, &q);
            }
            pivot_row += 1;
        }
        (h, u)
    }

    /// Basis of the left kernel `{x : x * self = 0}` in canonical Hermite form.
    pub fn left_kernel(&self) -> IntMatrix {
        let (h, u) = self.hermite();
        let mut rows = Vec::new();
        for r in 0..h.rows {
            if is_zero_vec(h.row(r)) {
                rows.push(u.row_vec(r));
            }
        }
        if rows.is_empty() {
            return IntMatrix::zero(0, self.rows);
        }
        let m = IntMatrix::from_rows(rows);
        m.hermite().0
    }

    /// Basis of the right kernel `{y : self * y = 0}` (vectors as rows).
    pub fn right_kernel(&self) -> IntMatrix {
        self.transpose().left_kernel()
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let swap = (k + 1..n).find(|&r| !m.get(r, k).is_zero());
                match swap {
                    Some(r) => {
                        m.swap_rows(k, r);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, Int::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }

    /// Exact inverse over the rationals; `None` if singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<Rat>>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<Rat>> = (0..n)
            .map(|r| self.row(r).iter().map(rat_from_int).collect())
            .collect();
        let mut inv: Vec<Vec<Rat>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] /= &p;
                inv[col][c] /= &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..n {
                        let av = &a[col][c] * &f;
                        a[r][c] -= av;
                        let iv = &inv[col][c] * &f;
                        inv[r][c] -= iv;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Inverse of a unimodular matrix, staying integral.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let inv = self.inverse_rational()?;
        let mut rows = Vec::with_capacity(self.rows);
        for r in inv {
            let mut row = Vec::with_capacity(self.cols);
            for x in r {
                if !x.is_integer() {
                    return None;
                }
                row.push(x.to_integer());
            }
            rows.push(row);
        }
        Some(IntMatrix::from_rows(rows))
    }
}

/// Public entry point matching the usual statement: `u * m = h`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    m.hermite()
}

/// Smith normal form `u * m * v = d` with positive elementary divisors
/// `d[0] | d[1] | ...`.
pub struct SmithForm {
    pub divisors: Vec<Int>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(a.rows);
    let mut v = IntMatrix::identity(a.cols);
    let t_max = a.rows.min(a.cols);

    fn swap_cols(a: &mut IntMatrix, v: &mut IntMatrix, x: usize, y: usize) {
        if x == y {
            return;
        }
        for r in 0..a.rows {
            let tmp = a.get(r, x).clone();
            a.set(r, x, a.get(r, y).clone());
            a.set(r, y, tmp);
        }
        for r in 0..v.rows {
            let tmp = v.get(r, x).clone();
            v.set(r, x, v.get(r, y).clone());
            v.set(r, y, tmp);
        }
    }
    fn submul_col(a: &mut IntMatrix, v: &mut IntMatrix, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for r in 0..a.rows {
            let val = a.get(r, dst) - q * a.get(r, src);
            a.set(r, dst, val);
        }
        for r in 0..v.rows {
            let val = v.get(r, dst) - q * v.get(r, src);
            v.set(r, dst, val);
        }
    }
    let mut t = 0usize;
    while t < t_max {
        // locate smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for r in t..a.rows {
            for c in t..a.cols {
                if !a.get(r, c).is_zero() {
                    match best {
                        None => best = Some((r, c)),
                        Some((br, bc)) => {
                            if a.get(r, c).abs() < a.get(br, bc).abs() {
                                best = Some((r, c));
                            }
                        }
                    }
                }
            }
        }
        let Some((br, bc)) = best else { break };
        a.swap_rows(t, br);
        u.swap_rows(t, br);
        swap_cols(&mut a, &mut v, t, bc);
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        // clear row and column t
        let mut dirty = false;
        let pivot = a.get(t, t).clone();
        for r in t + 1..a.rows {
            if !a.get(r, t).is_zero() {
                let q = a.get(r, t).div_floor(&pivot);
                a.submul_row(r, t, &q);
                u.submul_row(r, t, &q);
                if !a.get(r, t).is_zero() {
                    dirty = true;
                }
            }
        }
        for c in t + 1..a.cols {
            if !a.get(t, c).is_zero() {
                let q = a.get(t, c).div_floor(&pivot);
                submul_col(&mut a, &mut v, c, t, &q);
                if !a.get(t, c).is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue;
        }
        // enforce divisibility of the remaining block by the pivot
        let mut fixed = true;
        'outer: for r in t + 1..a.rows {
            for c in t + 1..a.cols {
                if !(a.get(r, c) % &pivot).is_zero() {
                    // fold that row into row t and restart the elimination
                    for k in 0..a.cols {
                        let val = a.get(t, k) + a.get(r, k);
                        a.set(t, k, val);
                    }
                    for k in 0..u.cols {
                        let val = u.get(t, k) + u.get(r, k);
                        u.set(t, k, val);
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if fixed {
            t += 1;
        }
    }
    let mut divisors = Vec::with_capacity(t_max);
    for i in 0..t_max {
        let d = a.get(i, i).clone();
        if d.is_zero() {
            break;
        }
        divisors.push(d);
    }
    SmithForm { divisors, u, v }
}

/// A sublattice of `Z^ambient_rank`, stored with its canonical Hermite basis
/// so that equality of sublattices is equality of bases. The index in the
/// saturation is carried separately; a saturated lattice has index one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: IntMatrix,
    index_in_saturation: Int,
}

impl Sublattice {
    pub fn from_generators(ambient_rank: usize, gens: &[Vec<Int>]) -> Self {
        for g in gens {
            assert_eq!(g.len(), ambient_rank, "generator has wrong length");
        }
        if gens.is_empty() {
            return Sublattice {
                ambient_rank,
                basis: IntMatrix::zero(0, ambient_rank),
                index_in_saturation: Int::one(),
            };
        }
        let m = IntMatrix::from_rows(gens.to_vec());
        let (h, _) = m.hermite();
        let rows: Vec<Vec<Int>> = h
            .rows_iter()
            .filter(|r| !is_zero_vec(r))
            .map(|r| r.to_vec())
            .collect();
        let basis = if rows.is_empty() {
            IntMatrix::zero(0, ambient_rank)
        } else {
            IntMatrix::from_rows(rows)
        };
        let index = if basis.rows == 0 {
            Int::one()
        } else {
            smith_normal_form(&basis).divisors.iter().product()
        };
        Sublattice {
            ambient_rank,
            basis,
            index_in_saturation: index,
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        let gens: Vec<Vec<Int>> = IntMatrix::identity(ambient_rank)
            .rows_iter()
            .map(|r| r.to_vec())
            .collect();
        Self::from_generators(ambient_rank, &gens)
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self::from_generators(ambient_rank, &[])
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Int>> {
        self.basis.rows_iter().map(|r| r.to_vec()).collect()
    }

    pub fn index_in_saturation(&self) -> &Int {
        &self.index_in_saturation
    }

    pub fn is_saturated(&self) -> bool {
        self.index_in_saturation.is_one()
    }

    /// Coordinates of `point` in the basis, if the point lies in the lattice.
    pub fn solve(&self, point: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(point.len(), self.ambient_rank);
        if self.basis.rows == 0 {
            return if is_zero_vec(point) {
                Some(vec![])
            } else {
                None
            };
        }
        // basis is already in Hermite form: forward substitution on pivots
        let mut rem = point.to_vec();
        let mut coords = vec![Int::zero(); self.basis.rows];
        for r in 0..self.basis.rows {
            let pivot_col = (0..self.basis.cols).find(|&c| !self.basis.get(r, c).is_zero())?;
            let p = self.basis.get(r, pivot_col);
            let (q, m) = rem[pivot_col].div_mod_floor(p);
            if !m.is_zero() {
                return None;
            }
            for c in 0..self.basis.cols {
                let v = &rem[c] - &q * self.basis.get(r, c);
                rem[c] = v;
            }
            coords[r] = q;
        }
        if is_zero_vec(&rem) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, point: &[Int]) -> bool {
        self.solve(point).is_some()
    }

    /// Rational coordinates in the basis when the point lies in the span.
    pub fn solve_rational(&self, point: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(point.len(), self.ambient_rank);
        let rows: Vec<Vec<Rat>> = self
            .basis
            .rows_iter()
            .map(|r| r.iter().map(rat_from_int).collect())
            .collect();
        solve_row_combination(&rows, point)
    }

    pub fn point_from_coords(&self, coords: &[Int]) -> Vec<Int> {
        assert_eq!(coords.len(), self.basis.rows);
        let mut out = vec![Int::zero(); self.ambient_rank];
        for (r, c) in coords.iter().enumerate() {
            for j in 0..self.ambient_rank {
                let v = &out[j] + c * self.basis.get(r, j);
                out[j] = v;
            }
        }
        out
    }

    pub fn sum(&self, other: &Sublattice) -> Sublattice {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        let mut gens = self.basis_rows();
        gens.extend(other.basis_rows());
        Sublattice::from_generators(self.ambient_rank, &gens)
    }

    /// Intersection via the left kernel of the stacked bases.
    pub fn intersect(&self, other: &Sublattice) -> Sublattice {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        if self.rank() == 0 || other.rank() == 0 {
            return Sublattice::zero(self.ambient_rank);
        }
        let mut stacked = self.basis_rows();
        stacked.extend(other.basis_rows());
        let m = IntMatrix::from_rows(stacked);
        let k = m.left_kernel();
        let mut gens = Vec::new();
        for r in 0..k.rows {
            let coeffs = &k.row(r)[0..self.rank()];
            let mut vec = vec![Int::zero(); self.ambient_rank];
            for (i, c) in coeffs.iter().enumerate() {
                for j in 0..self.ambient_rank {
                    let v = &vec[j] + c * self.basis.get(i, j);
                    vec[j] = v;
                }
            }
            gens.push(vec);
        }
        Sublattice::from_generators(self.ambient_rank, &gens)
    }

    /// The saturation `(self ⊗ Q) ∩ Z^n`.
    pub fn saturation(&self) -> Sublattice {
        if self.rank() == 0 {
            return self.clone();
        }
        // orthogonal complement computed twice
        let k = self.basis.right_kernel(); // rows y with basis * y^t = 0 ... rows of k satisfy k * basis^t = 0
        if k.rows == 0 {
            return Sublattice::full(self.ambient_rank);
        }
        let sat = k.transpose().left_kernel();
        let gens: Vec<Vec<Int>> = sat.rows_iter().map(|r| r.to_vec()).collect();
        Sublattice::from_generators(self.ambient_rank, &gens)
    }
}

/// A complement of `inner` inside `outer`, requiring `inner` to be saturated
/// in `outer`: returns `c` with `outer = inner ⊕ c`.
pub fn complement_of(outer: &Sublattice, inner: &Sublattice) -> Result<Sublattice> {
    if inner.rank() == 0 {
        return Ok(outer.clone());
    }
    if inner.rank() == outer.rank() {
        return Ok(Sublattice::zero(outer.ambient_rank()));
    }
    let coords: Vec<Vec<Int>> = inner
        .basis_rows()
        .iter()
        .map(|row| outer.solve(row).ok_or(Error::NotContained))
        .collect::<Result<_>>()?;
    let k = IntMatrix::from_rows(coords);
    let smith = smith_normal_form(&k);
    if smith.divisors.iter().any(|d| !d.is_one()) {
        return Err(Error::LatticeMismatch(
            "inner lattice is not saturated in the outer one".into(),
        ));
    }
    let v_inv = smith
        .v
        .inverse_unimodular()
        .ok_or_else(|| Error::InvariantViolation("smith transform not unimodular".into()))?;
    // rows of v_inv are a coordinate basis whose first inner-rank rows span
    // the inner coordinates
    let gens: Vec<Vec<Int>> = (inner.rank()..outer.rank())
        .map(|r| outer.point_from_coords(&v_inv.row_vec(r)))
        .collect();
    Ok(Sublattice::from_generators(outer.ambient_rank(), &gens))
}

/// Solve `x * rows = target` over the rationals (consistency checked; free
/// variables pinned to zero). `rows` need not be independent.
pub fn solve_row_combination(rows: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let m = rows.len();
    if m == 0 {
        return if target.iter().all(|x| x.is_zero()) {
            Some(vec![])
        } else {
            None
        };
    }
    let n = rows[0].len();
    assert_eq!(target.len(), n);
    // gaussian elimination on the transposed system: columns are unknowns
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|j| (0..m).map(|i| rows[i][j].clone()).collect())
        .collect();
    let mut b: Vec<Rat> = target.to_vec();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; m];
    let mut used_rows = Vec::new();
    let mut row = 0usize;
    for col in 0..m {
        let pivot = (row..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        b.swap(row, p);
        let pv = a[row][col].clone();
        for c in 0..m {
            a[row][c] /= &pv;
        }
        b[row] /= &pv;
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..m {
                    let v = &a[row][c] * &f;
                    a[r][c] -= v;
                }
                let v = &b[row] * &f;
                b[r] -= v;
            }
        }
        pivot_of_col[col] = Some(row);
        used_rows.push(row);
        row += 1;
        if row == n {
            break;
        }
    }
    // consistency: remaining rows must have zero rhs
    for r in row..n {
        if !b[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); m];
    for col in 0..m {
        if let Some(r) = pivot_of_col[col] {
            x[col] = b[r].clone();
        }
    }
    Some(x)
}

/// Invariant sublattice of an integer involution acting on column vectors.
pub fn eigenlattice(a: &IntMatrix, sign: i64) -> Result<Sublattice> {
    assert!(sign == 1 || sign == -1);
    if !a.is_involution() {
        return Err(Error::NotInvolution);
    }
    let n = a.rows;
    let mut m = a.clone();
    for i in 0..n {
        let v = m.get(i, i) - int(sign);
        m.set(i, i, v);
    }
    // {y : m * y = 0}
    let k = m.right_kernel();
    let gens: Vec<Vec<Int>> = k.rows_iter().map(|r| r.to_vec()).collect();
    let lat = Sublattice::from_generators(n, &gens);
    debug_assert!(lat.is_saturated());
    Ok(lat)
}

/// Group index `[outer : inner]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientIndex {
    Finite(Int),
    Infinite,
}

pub fn quotient_index(outer: &Sublattice, inner: &Sublattice) -> Result<QuotientIndex> {
    assert_eq!(outer.ambient_rank(), inner.ambient_rank());
    let mut coords = Vec::with_capacity(inner.rank());
    for row in inner.basis_rows() {
        match outer.solve(&row) {
            Some(c) => coords.push(c),
            None => return Err(Error::NotContained),
        }
    }
    if inner.rank() < outer.rank() {
        return Ok(QuotientIndex::Infinite);
    }
    let c = IntMatrix::from_rows(coords);
    Ok(QuotientIndex::Finite(c.det().abs()))
}

/// Coset bookkeeping for a finite quotient `outer / inner`, with canonical
/// labels obtained from the Smith form of the coordinate matrix.
pub struct CosetTable {
    outer: Sublattice,
    diag: Vec<Int>,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl CosetTable {
    pub fn new(outer: &Sublattice, inner: &Sublattice) -> Result<CosetTable> {
        match quotient_index(outer, inner)? {
            QuotientIndex::Finite(_) => {}
            QuotientIndex::Infinite => {
                return Err(Error::LatticeMismatch(
                    "coset table requires a finite quotient".into(),
                ))
            }
        }
        let r = outer.rank();
        let coords: Vec<Vec<Int>> = inner
            .basis_rows()
            .iter()
            .map(|row| outer.solve(row).unwrap())
            .collect();
        let c = IntMatrix::from_rows(coords);
        let smith = smith_normal_form(&c);
        let v_inv = smith
            .v
            .inverse_unimodular()
            .ok_or_else(|| Error::InvariantViolation("smith transform not unimodular".into()))?;
        let mut diag = smith.divisors.clone();
        diag.resize(r, Int::zero());
        if diag.iter().any(|d| d.is_zero()) {
            return Err(Error::LatticeMismatch("quotient is not finite".into()));
        }
        Ok(CosetTable {
            outer: outer.clone(),
            diag,
            v: smith.v,
            v_inv,
        })
    }

    pub fn order(&self) -> Int {
        self.diag.iter().product()
    }

    /// Canonical label of a point of the outer lattice.
    pub fn label(&self, point: &[Int]) -> Option<Vec<Int>> {
        let coords = self.outer.solve(point)?;
        let t = IntMatrix::vec_mul(&coords, &self.v);
        Some(
            t.iter()
                .zip(&self.diag)
                .map(|(x, d)| x.mod_floor(d))
                .collect(),
        )
    }

    /// One representative per coset, in lexicographic label order.
    pub fn representatives(&self) -> Vec<Vec<Int>> {
        let mut labels = vec![vec![]];
        for d in &self.diag {
            let mut next = Vec::new();
            let mut k = Int::zero();
            while &k < d {
                for l in &labels {
                    let mut l2 = l.clone();
                    l2.push(k.clone());
                    next.push(l2);
                }
                k += 1;
            }
            labels = next;
        }
        labels.sort();
        labels
            .into_iter()
            .map(|label| {
                let coords = IntMatrix::vec_mul(&label, &self.v_inv);
                self.outer.point_from_coords(&coords)
            })
            .collect()
    }
}
