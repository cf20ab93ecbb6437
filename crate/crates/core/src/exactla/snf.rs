use std::cell::Cell;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// U * M * V = D with U, V unimodular and D diagonal with a divisibility
/// chain d1 | d2 | ... (nonnegative, zeros trailing). `u_inv` is carried
/// along because cokernel sections need it and inverting after the fact
/// would cost another elimination.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries, length min(rows, cols), zeros included.
    pub fn factors(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.factors().iter().filter(|f| !f.is_zero()).count()
    }

    pub fn verify(&self, m: &IntMatrix) -> bool {
        self.u.mul(m).mul(&self.v) == self.d
            && self.u.mul(&self.u_inv) == IntMatrix::identity(self.u.rows())
    }
}

/// Division with remainder of minimal absolute value; keeps entry growth in
/// check during elimination. Truncated division leaves sign(r) = sign(a), so
/// the adjustment direction follows from comparing signs with b.
fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.magnitude() * 2u32 > *b.magnitude() {
        if r.sign() == b.sign() {
            q + BigInt::one()
        } else {
            q - BigInt::one()
        }
    } else {
        q
    }
}

struct Transforms {
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

enum Tf<'a> {
    Full(&'a mut Transforms),
    None,
}

impl Tf<'_> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if let Tf::Full(t) = self {
            t.u.swap_rows(a, b);
            t.u_inv.swap_cols(a, b);
        }
    }
    fn swap_cols(&mut self, a: usize, b: usize) {
        if let Tf::Full(t) = self {
            t.v.swap_cols(a, b);
        }
    }
    fn negate_row(&mut self, r: usize) {
        if let Tf::Full(t) = self {
            t.u.negate_row(r);
            t.u_inv.negate_col(r);
        }
    }
    fn negate_col(&mut self, c: usize) {
        if let Tf::Full(t) = self {
            t.v.negate_col(c);
        }
    }
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if let Tf::Full(t) = self {
            t.u.add_row_multiple(dst, src, k);
            let neg = -k;
            t.u_inv.add_col_multiple(src, dst, &neg);
        }
    }
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if let Tf::Full(t) = self {
            t.v.add_col_multiple(dst, src, k);
        }
    }
}

/// Pivot rule: smallest nonzero absolute value in the trailing submatrix,
/// ties broken by row-major position. An entry of absolute value 1 can stop
/// the scan early since nothing beats it and the first one found row-major is
/// already the tie-winner.
fn find_pivot(m: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..m.rows() {
        for j in k..m.cols() {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            if v.magnitude().is_one() {
                return Some((i, j));
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if v.magnitude() < m.get(bi, bj).magnitude() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

fn eliminate(m: &mut IntMatrix, tf: &mut Tf) {
    let rows = m.rows();
    let cols = m.cols();
    let steps = rows.min(cols);
    for k in 0..steps {
        let Some((pi, pj)) = find_pivot(m, k) else {
            break;
        };
        m.swap_rows(k, pi);
        tf.swap_rows(k, pi);
        m.swap_cols(k, pj);
        tf.swap_cols(k, pj);
        if m.get(k, k).is_negative() {
            m.negate_row(k);
            tf.negate_row(k);
        }
        'reduce: loop {
            // Clear column k. A nonzero remainder after rounded division is
            // strictly smaller than the pivot, so swapping it in makes
            // progress (Euclid's descent).
            for i in k + 1..rows {
                if m.get(i, k).is_zero() {
                    continue;
                }
                let q = rounded_div(m.get(i, k), m.get(k, k));
                if !q.is_zero() {
                    let neg = -q;
                    m.add_row_multiple(i, k, &neg);
                    tf.add_row_multiple(i, k, &neg);
                }
                if !m.get(i, k).is_zero() {
                    m.swap_rows(i, k);
                    tf.swap_rows(i, k);
                    if m.get(k, k).is_negative() {
                        m.negate_row(k);
                        tf.negate_row(k);
                    }
                    continue 'reduce;
                }
            }
            // Clear row k.
            for j in k + 1..cols {
                if m.get(k, j).is_zero() {
                    continue;
                }
                let q = rounded_div(m.get(k, j), m.get(k, k));
                if !q.is_zero() {
                    let neg = -q;
                    m.add_col_multiple(j, k, &neg);
                    tf.add_col_multiple(j, k, &neg);
                }
                if !m.get(k, j).is_zero() {
                    m.swap_cols(j, k);
                    tf.swap_cols(j, k);
                    if m.get(k, k).is_negative() {
                        m.negate_col(k);
                        tf.negate_col(k);
                    }
                    continue 'reduce;
                }
            }
            // Row and column are clear. A unit pivot divides everything;
            // otherwise absorb any entry the pivot fails to divide so that
            // the divisibility chain holds by induction.
            if !m.get(k, k).magnitude().is_one() {
                let pivot = m.get(k, k).clone();
                for i in k + 1..rows {
                    for j in k + 1..cols {
                        if num_integer::Integer::mod_floor(m.get(i, j), &pivot).is_zero() {
                            continue;
                        }
                        m.add_row_multiple(k, i, &BigInt::one());
                        tf.add_row_multiple(k, i, &BigInt::one());
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        if m.get(k, k).is_negative() {
            m.negate_row(k);
            tf.negate_row(k);
        }
    }
    debug_assert!(divisibility_chain_holds(m));
}

fn divisibility_chain_holds(d: &IntMatrix) -> bool {
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            if i != j && !d.get(i, j).is_zero() {
                return false;
            }
        }
    }
    let n = d.rows().min(d.cols());
    for i in 1..n {
        let prev = d.get(i - 1, i - 1);
        let cur = d.get(i, i);
        if prev.is_zero() {
            if !cur.is_zero() {
                return false;
            }
        } else if !num_integer::Integer::mod_floor(cur, prev).is_zero() {
            return false;
        }
    }
    true
}

thread_local! {
    static VERIFY_TICK: Cell<u64> = const { Cell::new(0) };
}

/// Full Smith normal form with unimodular transforms. Deterministic.
///
/// Debug builds re-verify U*M*V = D on every decomposition up to a size
/// cutoff and on a 1-in-32 sample above it; release builds keep only the
/// sampled check. The cubic cost of a full verification on the largest
/// lattice levels would otherwise dominate entire test runs.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let mut d = m.clone();
    let mut transforms = Transforms {
        u: IntMatrix::identity(m.rows()),
        u_inv: IntMatrix::identity(m.rows()),
        v: IntMatrix::identity(m.cols()),
    };
    eliminate(&mut d, &mut Tf::Full(&mut transforms));
    let dec = SmithDecomposition {
        u: transforms.u,
        u_inv: transforms.u_inv,
        v: transforms.v,
        d,
    };
    let sampled = VERIFY_TICK.with(|t| {
        let n = t.get().wrapping_add(1);
        t.set(n);
        n % 32 == 0
    });
    let small = m.rows().max(m.cols()) <= 96;
    if (cfg!(debug_assertions) && small) || sampled {
        assert!(dec.verify(m), "normal form verification failed");
    }
    dec
}

/// Invariant factors without transforms, after splitting the matrix into
/// independent diagonal blocks (connected components of the nonzero
/// pattern). This is the fast oracle path for permutation-structured
/// matrices; the factors come back as a diagonal presentation per component
/// and are NOT merged into a single global divisibility chain.
///
/// Returns the nonzero factors plus the count of zero diagonal entries.
pub fn diagonal_factors(m: &IntMatrix) -> (Vec<BigInt>, usize) {
    let rows = m.rows();
    let cols = m.cols();
    let mut dsu = Dsu::new(rows + cols);
    for i in 0..rows {
        for j in 0..cols {
            if !m.get(i, j).is_zero() {
                dsu.union(i, rows + j);
            }
        }
    }
    // Group rows and columns by component, ordered by smallest member.
    let mut comp_rows: std::collections::BTreeMap<usize, (Vec<usize>, Vec<usize>)> =
        std::collections::BTreeMap::new();
    for i in 0..rows {
        if (0..cols).any(|j| !m.get(i, j).is_zero()) {
            comp_rows.entry(dsu.find(i)).or_default().0.push(i);
        }
    }
    for j in 0..cols {
        if (0..rows).any(|i| !m.get(i, j).is_zero()) {
            comp_rows.entry(dsu.find(rows + j)).or_default().1.push(j);
        }
    }
    let mut nonzero = Vec::new();
    for (rws, cls) in comp_rows.values() {
        let sub = IntMatrix::from_fn(rws.len(), cls.len(), |i, j| m.get(rws[i], cls[j]).clone());
        let mut block = sub;
        eliminate(&mut block, &mut Tf::None);
        let n = block.rows().min(block.cols());
        for i in 0..n {
            let v = block.get(i, i);
            if !v.is_zero() {
                nonzero.push(v.clone());
            }
        }
    }
    let zeros = rows.min(cols) - nonzero.len();
    (nonzero, zeros)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            match ra.cmp(&rb) {
                Ordering::Less => self.parent[rb] = ra,
                _ => self.parent[ra] = rb,
            }
        }
    }
}

/// The t x t block of psi^ell - 1 on one basis cycle: -1 on the diagonal,
/// scale on the superdiagonal and in the corner.
pub fn cyclic_block(t: usize, scale: &BigInt) -> IntMatrix {
    let mut m = IntMatrix::zeros(t, t);
    for i in 0..t {
        m.set(i, i, BigInt::from(-1));
        m.set(i, (i + 1) % t, scale.clone());
    }
    if t == 1 {
        m.set(0, 0, scale - BigInt::one());
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors_of(rows: &[Vec<i64>]) -> Vec<BigInt> {
        smith_normal_form(&IntMatrix::from_rows(rows)).factors()
    }

    #[test]
    fn snf_2x2_example() {
        // det = -3, entry gcd 1 => factors (1, 3).
        assert_eq!(
            factors_of(&[vec![-1, 2], vec![2, -1]]),
            vec![BigInt::from(1), BigInt::from(3)]
        );
    }

    #[test]
    fn snf_identity() {
        let id = IntMatrix::identity(5);
        assert_eq!(smith_normal_form(&id).factors(), vec![BigInt::one(); 5]);
    }

    #[test]
    fn snf_cyclic_block_gives_unit_factors_and_power() {
        // (1, ..., 1, ell^(d*t) - 1) for the t x t cycle block.
        for (ell, d, t) in [(2i64, 1u32, 2usize), (2, 1, 6), (5, 2, 3), (2, 3, 4)] {
            let scale = BigInt::from(ell).pow(d);
            let m = cyclic_block(t, &scale);
            let dec = smith_normal_form(&m);
            let mut want = vec![BigInt::one(); t - 1];
            want.push(BigInt::from(ell).pow(d * t as u32) - BigInt::one());
            assert_eq!(dec.factors(), want, "ell={ell} d={d} t={t}");
            assert!(dec.verify(&m));
        }
    }

    #[test]
    fn snf_rank_deficient_zeros_last() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(factors_of(&[vec![1, 2], vec![2, 4]]), vec![BigInt::one(), BigInt::zero()]);
        assert_eq!(smith_normal_form(&m).rank(), 1);
    }

    #[test]
    fn snf_zero_and_rectangular() {
        assert_eq!(
            factors_of(&[vec![0, 0], vec![0, 0]]),
            vec![BigInt::zero(), BigInt::zero()]
        );
        assert_eq!(
            factors_of(&[vec![2, 4, 4]]),
            vec![BigInt::from(2)]
        );
        assert_eq!(
            factors_of(&[vec![2, 0], vec![0, 3], vec![0, 0]]),
            vec![BigInt::one(), BigInt::from(6)]
        );
    }

    #[test]
    fn diagonal_factors_split_matches_full() {
        let m = IntMatrix::from_rows(&[
            vec![-1, 2, 0, 0],
            vec![2, -1, 0, 0],
            vec![0, 0, 6, 0],
            vec![0, 0, 0, 0],
        ]);
        let (mut nz, zeros) = diagonal_factors(&m);
        nz.sort();
        assert_eq!(nz, vec![BigInt::one(), BigInt::from(3), BigInt::from(6)]);
        assert_eq!(zeros, 1);
        let full = smith_normal_form(&m);
        let mut full_nz: Vec<BigInt> = full.factors().into_iter().filter(|f| !f.is_zero()).collect();
        full_nz.sort();
        // Same product and same multiset of prime powers; the global chain
        // differs from per-component diagonals only by regrouping.
        let prod_a: BigInt = nz.iter().product();
        let prod_b: BigInt = full_nz.iter().product();
        assert_eq!(prod_a, prod_b);
    }

    #[test]
    fn product_of_factors_is_abs_det() {
        for m in [
            IntMatrix::from_rows(&[vec![3, 1], vec![0, 4]]),
            IntMatrix::from_rows(&[vec![6, 4, 2], vec![4, 6, 4], vec![2, 4, 6]]),
            IntMatrix::from_rows(&[vec![-5, 7], vec![2, 9]]),
        ] {
            let dec = smith_normal_form(&m);
            let prod: BigInt = dec.factors().iter().product();
            assert_eq!(prod, m.determinant().abs());
        }
    }

    /// Brute-force determinantal-divisor oracle: the product d1..dk equals
    /// the gcd of all k x k minors.
    fn minor_gcd(m: &IntMatrix, k: usize) -> BigInt {
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in combos(n, k - 1) {
                    if rest.iter().all(|&x| x > first) {
                        let mut c = vec![first];
                        c.append(&mut rest);
                        out.push(c);
                    }
                }
            }
            out
        }
        let mut g = BigInt::zero();
        for rsel in combos(m.rows(), k) {
            for csel in combos(m.cols(), k) {
                let sub =
                    IntMatrix::from_fn(k, k, |i, j| m.get(rsel[i], csel[j]).clone());
                g = num_integer::Integer::gcd(&g, &sub.determinant());
            }
        }
        g
    }

    #[test]
    fn factors_match_minor_gcds() {
        // Deterministic pseudo-random small matrices, entries in [-9, 9].
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..40 {
            let r = 1 + (next() % 4) as usize;
            let c = 1 + (next() % 4) as usize;
            let m = IntMatrix::from_fn(r, c, |_, _| BigInt::from((next() % 19) as i64 - 9));
            let dec = smith_normal_form(&m);
            let factors = dec.factors();
            let mut prod = BigInt::one();
            for (k, f) in factors.iter().enumerate() {
                if f.is_zero() {
                    break;
                }
                prod *= f;
                assert_eq!(
                    prod,
                    minor_gcd(&m, k + 1).abs(),
                    "trial {trial}: d1..d{} vs {}x{} minor gcd of {m:?}",
                    k + 1,
                    k + 1,
                    k + 1
                );
            }
        }
    }
}
