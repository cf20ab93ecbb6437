use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{smith_normal_form, IntMatrix};
use crate::arith::{q_valuation, Valuation};
use crate::error::{Error, Result};

/// Which ring the quotient lives over: the integers, or the q-adics (where
/// only the q-primary part of each relation order survives and free rank
/// becomes q-profinite rank).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientMode {
    Integral,
    QComplete(u64),
}

/// A presented quotient Z^ambient / (relations), with a chosen generating
/// set. `proj` rewrites an ambient vector in the generators; `section` picks
/// ambient representatives for the generators; `relations` columns generate
/// the kernel of `proj`, kept around so induced maps can verify descent
/// instead of assuming it.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub mode: QuotientMode,
    pub ambient_dim: usize,
    /// One entry per kept generator: 0 means free (integral mode) or
    /// q-profinite (q-complete mode); otherwise the order, > 1.
    pub orders: Vec<BigInt>,
    pub proj: IntMatrix,
    pub section: IntMatrix,
    pub relations: IntMatrix,
}

impl QuotientPresentation {
    pub fn new(
        mode: QuotientMode,
        ambient_dim: usize,
        orders: Vec<BigInt>,
        proj: IntMatrix,
        section: IntMatrix,
        relations: IntMatrix,
    ) -> Self {
        debug_assert_eq!(proj.rows(), orders.len());
        debug_assert_eq!(proj.cols(), ambient_dim);
        debug_assert_eq!(section.rows(), ambient_dim);
        debug_assert_eq!(section.cols(), orders.len());
        let pres = QuotientPresentation {
            mode,
            ambient_dim,
            orders,
            proj,
            section,
            relations,
        };
        debug_assert!(pres.section_splits(), "lift does not split the projection");
        debug_assert!(pres.relations_die(), "relation columns survive projection");
        pres
    }

    pub fn generator_count(&self) -> usize {
        self.orders.len()
    }

    pub fn free_rank(&self) -> usize {
        self.orders.iter().filter(|o| o.is_zero()).count()
    }

    /// Finite relation orders, sorted ascending (the summand multiset).
    pub fn torsion_orders(&self) -> Vec<BigInt> {
        let mut t: Vec<BigInt> = self
            .orders
            .iter()
            .filter(|o| !o.is_zero())
            .cloned()
            .collect();
        t.sort();
        t
    }

    /// Reduce a vector of generator coordinates modulo the relation orders.
    pub fn reduce(&self, coords: &mut [BigInt]) {
        assert_eq!(coords.len(), self.orders.len());
        for (c, o) in coords.iter_mut().zip(&self.orders) {
            if !o.is_zero() {
                *c = num_integer::Integer::mod_floor(c, o);
            }
        }
    }

    /// Project an ambient vector to reduced generator coordinates.
    pub fn project(&self, ambient: &[BigInt]) -> Vec<BigInt> {
        let mut v = self.proj.mul_vec(ambient);
        self.reduce(&mut v);
        v
    }

    fn section_splits(&self) -> bool {
        let composite = self.proj.mul(&self.section);
        for i in 0..composite.rows() {
            for j in 0..composite.cols() {
                let mut want = if i == j { BigInt::one() } else { BigInt::zero() };
                let mut got = composite.get(i, j).clone();
                if !self.orders[i].is_zero() {
                    got = num_integer::Integer::mod_floor(&got, &self.orders[i]);
                    want = num_integer::Integer::mod_floor(&want, &self.orders[i]);
                }
                if got != want {
                    return false;
                }
            }
        }
        true
    }

    fn relations_die(&self) -> bool {
        (0..self.relations.cols()).all(|j| {
            let col = self.relations.column(j);
            self.project(&col).iter().all(Zero::is_zero)
        })
    }
}

/// Cokernel of an integer matrix as a presented quotient of its row space.
/// Integral mode keeps the invariant factors (units dropped, zeros for free
/// rank); q-complete mode keeps only the q-primary part of each factor.
pub fn cokernel_presentation(m: &IntMatrix, mode: QuotientMode) -> Result<QuotientPresentation> {
    let dec = smith_normal_form(m);
    let ambient = m.rows();
    let diag_len = m.rows().min(m.cols());
    let mut orders_full: Vec<BigInt> = Vec::with_capacity(ambient);
    for i in 0..ambient {
        let d = if i < diag_len {
            dec.d.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        let order = match mode {
            QuotientMode::Integral => d,
            QuotientMode::QComplete(q) => {
                if d.is_zero() {
                    d
                } else {
                    match q_valuation(&d, q)? {
                        Valuation::Finite(v) => BigInt::from(q).pow(v),
                        Valuation::Infinite => unreachable!("nonzero d"),
                    }
                }
            }
        };
        orders_full.push(order);
    }
    let kept: Vec<usize> = (0..ambient)
        .filter(|&i| !orders_full[i].is_one())
        .collect();
    let orders: Vec<BigInt> = kept.iter().map(|&i| orders_full[i].clone()).collect();
    let mut proj = IntMatrix::from_fn(kept.len(), ambient, |i, j| dec.u.get(kept[i], j).clone());
    proj.reduce_rows_mod(&orders);
    let section = IntMatrix::from_fn(ambient, kept.len(), |i, j| dec.u_inv.get(i, kept[j]).clone());
    Ok(QuotientPresentation::new(
        mode,
        ambient,
        orders,
        proj,
        section,
        m.clone(),
    ))
}

/// The matrix of the map induced on quotients by an ambient map `f`, in the
/// generator bases, entries reduced modulo the target orders. Descent is
/// checked, not assumed: every relation of the source must map into the
/// kernel of the target projection, otherwise the map does not exist on the
/// quotients (a non-equivariant map was passed).
pub fn induced_quotient_map(
    f: &IntMatrix,
    source: &QuotientPresentation,
    target: &QuotientPresentation,
) -> Result<IntMatrix> {
    if f.cols() != source.ambient_dim || f.rows() != target.ambient_dim {
        return Err(Error::Contract(format!(
            "map of shape {}x{} does not match ambient dims {} -> {}",
            f.rows(),
            f.cols(),
            source.ambient_dim,
            target.ambient_dim
        )));
    }
    for j in 0..source.relations.cols() {
        let image = f.mul_vec(&source.relations.column(j));
        let projected = target.project(&image);
        if !projected.iter().all(Zero::is_zero) {
            return Err(Error::Contract(format!(
                "map does not descend: source relation {j} survives in the target quotient"
            )));
        }
    }
    let mut matrix = target.proj.mul(&f.mul(&source.section));
    matrix.reduce_rows_mod(&target.orders);
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cokernel_of_scalar_matrices() {
        let m = IntMatrix::from_rows(&[vec![3]]);
        let pres = cokernel_presentation(&m, QuotientMode::Integral).unwrap();
        assert_eq!(pres.orders, vec![BigInt::from(3)]);
        assert_eq!(pres.free_rank(), 0);

        let m6 = IntMatrix::from_rows(&[vec![6]]);
        let pres6 = cokernel_presentation(&m6, QuotientMode::QComplete(3)).unwrap();
        assert_eq!(pres6.orders, vec![BigInt::from(3)]);
    }

    #[test]
    fn cokernel_of_psi_minus_one_on_c3() {
        // 2S - I on the character basis of C3 (S = multiplication by 2).
        let m = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, -1, 2], vec![0, 2, -1]]);
        let pres = cokernel_presentation(&m, QuotientMode::QComplete(3)).unwrap();
        assert_eq!(pres.orders, vec![BigInt::from(3)]);
        assert_eq!(pres.free_rank(), 0);
    }

    #[test]
    fn identity_induces_identity() {
        let m = IntMatrix::from_rows(&[vec![4, 0], vec![0, 6]]);
        let pres = cokernel_presentation(&m, QuotientMode::Integral).unwrap();
        let f = IntMatrix::identity(2);
        let induced = induced_quotient_map(&f, &pres, &pres).unwrap();
        assert_eq!(induced, IntMatrix::identity(pres.generator_count()));
    }

    #[test]
    fn non_descending_map_is_rejected() {
        // Z/2 -> Z/4 via multiplication by 1 does not descend: 2 maps to 2,
        // which is nonzero mod 4.
        let src = cokernel_presentation(
            &IntMatrix::from_rows(&[vec![2]]),
            QuotientMode::Integral,
        )
        .unwrap();
        let tgt = cokernel_presentation(
            &IntMatrix::from_rows(&[vec![4]]),
            QuotientMode::Integral,
        )
        .unwrap();
        let f = IntMatrix::identity(1);
        assert!(matches!(
            induced_quotient_map(&f, &src, &tgt),
            Err(Error::Contract(_))
        ));
        // Multiplication by 2 does descend.
        let f2 = IntMatrix::from_rows(&[vec![2]]);
        let induced = induced_quotient_map(&f2, &src, &tgt).unwrap();
        assert_eq!(induced, IntMatrix::from_rows(&[vec![2]]));
    }

    #[test]
    fn induced_respects_composition() {
        // Diagonal quotients with maps built to descend by construction:
        // entry f[i][j] is a multiple of tgt_i / gcd(tgt_i, src_j).
        fn diag_pres(orders: &[i64]) -> QuotientPresentation {
            let n = orders.len();
            let m = IntMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    BigInt::from(orders[i])
                } else {
                    BigInt::zero()
                }
            });
            cokernel_presentation(&m, QuotientMode::Integral).unwrap()
        }
        fn descending_map(src: &[i64], tgt: &[i64], seed: &mut u64) -> IntMatrix {
            let mut next = move |s: &mut u64| {
                *s ^= *s << 13;
                *s ^= *s >> 7;
                *s ^= *s << 17;
                *s
            };
            IntMatrix::from_fn(tgt.len(), src.len(), |i, j| {
                let g = num_integer::Integer::gcd(&tgt[i], &src[j]);
                let step = tgt[i] / g;
                BigInt::from(step * ((next(seed) % 5) as i64))
            })
        }
        let mut seed = 0x1234_5678_9abc_def0u64;
        let a = [4i64, 6, 10];
        let b = [8i64, 12];
        let c = [24i64, 2];
        for _ in 0..25 {
            let pa = diag_pres(&a);
            let pb = diag_pres(&b);
            let pc = diag_pres(&c);
            let f = descending_map(&a, &b, &mut seed);
            let g = descending_map(&b, &c, &mut seed);
            let gf = g.mul(&f);
            let ind_f = induced_quotient_map(&f, &pa, &pb).unwrap();
            let ind_g = induced_quotient_map(&g, &pb, &pc).unwrap();
            let ind_gf = induced_quotient_map(&gf, &pa, &pc).unwrap();
            let mut composed = ind_g.mul(&ind_f);
            composed.reduce_rows_mod(&pc.orders);
            assert_eq!(composed, ind_gf);
        }
    }
}
