//! Finite abelian q-groups: parsing, element arithmetic, the full subgroup
//! lattice, psi-orbit partitions of the character basis, and ingestion of
//! conjugacy-class data for groups we do not model structurally.

mod classdata;
mod lattice;
mod orbits;

pub use classdata::{ClassData, ClassOrbits};
pub use lattice::{CanonicalKey, Subgroup, SubgroupLattice, DEFAULT_ORDER_BOUND};
pub use orbits::{psi_orbits, psi_permutation, PsiOrbitPartition};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Mixed-radix encoding of coordinate tuples into single codes. Tuples are
/// big-endian: the first coordinate is the most significant, so numeric order
/// on codes is lexicographic order on tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedRadix {
    moduli: Vec<u64>,
    strides: Vec<u64>,
    size: u64,
}

impl MixedRadix {
    pub fn new(moduli: Vec<u64>) -> Self {
        let mut strides = vec![1u64; moduli.len()];
        for i in (0..moduli.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * moduli[i + 1];
        }
        let size = moduli.iter().product();
        MixedRadix {
            moduli,
            strides,
            size,
        }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn encode(&self, coords: &[u64]) -> u64 {
        debug_assert_eq!(coords.len(), self.moduli.len());
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    pub fn decode(&self, code: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.moduli.len());
        for (m, s) in self.moduli.iter().zip(&self.strides) {
            out.push(code / s % m);
        }
        out
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let mut out = 0;
        for (m, s) in self.moduli.iter().zip(&self.strides) {
            let ca = a / s % m;
            let cb = b / s % m;
            out += (ca + cb) % m * s;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let mut out = 0;
        for (m, s) in self.moduli.iter().zip(&self.strides) {
            let ca = a / s % m;
            out += (m - ca) % m * s;
        }
        out
    }

    pub fn scalar_mul(&self, k: u64, a: u64) -> u64 {
        let mut out = 0;
        for (m, s) in self.moduli.iter().zip(&self.strides) {
            let ca = a / s % m;
            out += (k as u128 * ca as u128 % *m as u128) as u64 * s;
        }
        out
    }
}

/// An element of an ambient group, in coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({})",
            self.coords
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// A finite abelian q-group, canonically a product of cyclic q-groups with
/// exponents sorted descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianQGroup {
    q: u64,
    exponents: Vec<u32>,
    radix: MixedRadix,
}

impl AbelianQGroup {
    pub fn new(q: u64, exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::input("group must have at least one cyclic factor"));
        }
        Self::new_allow_trivial(q, exponents)
    }

    /// Internal constructor that also models the trivial group (empty
    /// exponent list), which shows up as a subgroup level and as the dual of
    /// the trivial subgroup.
    pub(crate) fn new_allow_trivial(q: u64, mut exponents: Vec<u32>) -> Result<Self> {
        if q == 2 || !is_prime(q) {
            return Err(Error::input(format!("q = {q} must be an odd prime")));
        }
        if exponents.iter().any(|&e| e == 0) {
            return Err(Error::input("cyclic factor exponents must be positive"));
        }
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        let total: u32 = exponents.iter().sum();
        if total > 40 {
            return Err(Error::Bound(format!(
                "group order q^{total} does not fit the element encoding"
            )));
        }
        let moduli: Vec<u64> = exponents.iter().map(|&e| q.pow(e)).collect();
        Ok(AbelianQGroup {
            q,
            exponents,
            radix: MixedRadix::new(moduli),
        })
    }

    /// Parse a `C<n>` (joined by `x`) group description, e.g. `C9xC3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bytes = spec.as_bytes();
        let mut pos = 0usize;
        let mut q: Option<u64> = None;
        let mut exponents = Vec::new();
        loop {
            if pos >= bytes.len() || bytes[pos] != b'C' {
                return Err(Error::Parse {
                    pos,
                    msg: format!("expected `C<n>` in group spec `{spec}`"),
                });
            }
            pos += 1;
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Parse {
                    pos,
                    msg: "expected digits after `C`".to_string(),
                });
            }
            let n: u64 = spec[start..pos].parse().map_err(|_| Error::Parse {
                pos: start,
                msg: "cyclic order out of range".to_string(),
            })?;
            let (p, e) = prime_power_split(n).ok_or_else(|| Error::Parse {
                pos: start,
                msg: format!("{n} is not a prime power"),
            })?;
            if p == 2 {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("C{n} has even order; q must be odd"),
                });
            }
            match q {
                None => q = Some(p),
                Some(existing) if existing == p => {}
                Some(existing) => {
                    return Err(Error::Parse {
                        pos: start,
                        msg: format!("mixed primes {existing} and {p} in group spec"),
                    });
                }
            }
            exponents.push(e);
            if pos == bytes.len() {
                break;
            }
            if bytes[pos] != b'x' {
                return Err(Error::Parse {
                    pos,
                    msg: "expected `x` between cyclic factors".to_string(),
                });
            }
            pos += 1;
        }
        AbelianQGroup::new(q.expect("at least one factor parsed"), exponents)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn order(&self) -> u64 {
        self.radix.size()
    }

    /// Exponent of the group: the largest cyclic factor order q^{e_1}.
    pub fn exponent(&self) -> u64 {
        self.exponents.first().map_or(1, |&e| self.q.pow(e))
    }

    pub fn radix(&self) -> &MixedRadix {
        &self.radix
    }

    pub fn moduli(&self) -> &[u64] {
        self.radix.moduli()
    }

    pub fn element(&self, code: u64) -> GroupElement {
        GroupElement {
            coords: self.radix.decode(code),
        }
    }

    pub fn element_order(&self, code: u64) -> u64 {
        let mut ord = 1u64;
        for (m, c) in self.moduli().iter().zip(self.radix.decode(code)) {
            let g = crate::arith::gcd_u64(c, *m);
            ord = ord.max(m / g);
        }
        ord
    }

    pub fn structure_name(&self) -> String {
        if self.exponents.is_empty() {
            return "e".to_string();
        }
        self.moduli()
            .iter()
            .map(|m| format!("C{m}"))
            .collect::<Vec<_>>()
            .join("x")
    }
}

fn prime_power_split(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            return if m == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let g = AbelianQGroup::parse("C9").unwrap();
        assert_eq!(g.q(), 3);
        assert_eq!(g.exponents(), &[2]);

        let g = AbelianQGroup::parse("C3xC3").unwrap();
        assert_eq!(g.q(), 3);
        assert_eq!(g.exponents(), &[1, 1]);

        // Canonical form sorts exponents descending.
        let g = AbelianQGroup::parse("C3xC9").unwrap();
        assert_eq!(g.exponents(), &[2, 1]);
        assert_eq!(g.structure_name(), "C9xC3");

        assert!(matches!(
            AbelianQGroup::parse("C4"),
            Err(Error::Parse { pos: 1, .. })
        ));
        assert!(AbelianQGroup::parse("C12").is_err());
        assert!(AbelianQGroup::parse("C9xC5").is_err());
        assert!(AbelianQGroup::parse("C9x").is_err());
        assert!(AbelianQGroup::parse("").is_err());
        assert!(AbelianQGroup::parse("C1").is_err());
    }

    #[test]
    fn element_arithmetic() {
        let g = AbelianQGroup::parse("C9xC3").unwrap();
        assert_eq!(g.order(), 27);
        let a = g.radix().encode(&[4, 2]);
        let b = g.radix().encode(&[7, 2]);
        assert_eq!(g.radix().decode(g.radix().add(a, b)), vec![2, 1]);
        assert_eq!(g.radix().decode(g.radix().neg(a)), vec![5, 1]);
        assert_eq!(g.radix().decode(g.radix().scalar_mul(5, a)), vec![2, 1]);
        assert_eq!(g.element_order(a), 9);
        assert_eq!(g.element_order(g.radix().encode(&[3, 1])), 3);
        assert_eq!(g.element_order(0), 1);
    }

    #[test]
    fn codes_are_lexicographic() {
        let g = AbelianQGroup::parse("C9xC3").unwrap();
        let mut last = None;
        for c0 in 0..9 {
            for c1 in 0..3 {
                let code = g.radix().encode(&[c0, c1]);
                if let Some(prev) = last {
                    assert!(code > prev);
                }
                last = Some(code);
            }
        }
    }
}
