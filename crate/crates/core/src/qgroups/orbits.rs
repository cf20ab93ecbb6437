use super::MixedRadix;
use crate::arith::{gcd_u64, residue_mod};
use crate::error::{Error, Result};

/// The partition of a character group into orbits of chi -> chi^ell, each
/// cycle listed in psi-order starting from its least label. Characters of a
/// group with invariant factors q^{f_i} are coordinate tuples, encoded in the
/// same mixed radix as group elements.
#[derive(Clone, Debug)]
pub struct PsiOrbitPartition {
    pub q: u64,
    pub exponents: Vec<u32>,
    /// The acting multiplier, as a least nonnegative residue mod the group
    /// exponent.
    pub ell: u64,
    pub orbits: Vec<Vec<u64>>,
    /// Character code -> orbit index.
    orbit_of: Vec<u32>,
    /// Character code -> number of psi steps from it back to its orbit rep.
    steps_to_rep: Vec<u32>,
}

impl PsiOrbitPartition {
    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_index(&self, code: u64) -> usize {
        self.orbit_of[code as usize] as usize
    }

    pub fn rep(&self, orbit: usize) -> u64 {
        self.orbits[orbit][0]
    }

    /// Steps s >= 0 with psi^s(code) = rep of its orbit.
    pub fn steps_to_rep(&self, code: u64) -> u32 {
        self.steps_to_rep[code as usize]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

/// The permutation chi -> chi^ell on character codes of the group with the
/// given invariant factors.
pub fn psi_permutation(q: u64, exponents: &[u32], ell: i64) -> Result<Vec<u64>> {
    if ell.rem_euclid(q as i64) == 0 {
        return Err(Error::input(format!(
            "ell = {ell} is divisible by q = {q}; the Adams operation does not permute characters"
        )));
    }
    let radix = MixedRadix::new(exponents.iter().map(|&e| q.pow(e)).collect());
    let exponent = exponents.first().map_or(1, |&e| q.pow(e));
    let ell_res = residue_mod(ell, exponent);
    debug_assert!(exponent == 1 || gcd_u64(ell_res, q) == 1);
    Ok((0..radix.size())
        .map(|c| radix.scalar_mul(ell_res, c))
        .collect())
}

/// Orbits of the psi permutation, canonical representative (least code)
/// first in each cycle, cycles sorted by representative.
pub fn psi_orbits(q: u64, exponents: &[u32], ell: i64) -> Result<PsiOrbitPartition> {
    let perm = psi_permutation(q, exponents, ell)?;
    let n = perm.len();
    let mut visited = vec![false; n];
    let mut orbits = Vec::new();
    for start in 0..n as u64 {
        if visited[start as usize] {
            continue;
        }
        // Cycles are disjoint, so the first unvisited code is the least in
        // its cycle.
        visited[start as usize] = true;
        let mut cycle = vec![start];
        let mut cur = perm[start as usize];
        while cur != start {
            visited[cur as usize] = true;
            cycle.push(cur);
            cur = perm[cur as usize];
        }
        orbits.push(cycle);
    }
    orbits.sort_by_key(|c| (c.len(), c[0]));
    let mut orbit_of = vec![u32::MAX; n];
    let mut steps_to_rep = vec![0u32; n];
    for (orbit_idx, cycle) in orbits.iter().enumerate() {
        let len = cycle.len() as u32;
        for (pos, &c) in cycle.iter().enumerate() {
            orbit_of[c as usize] = orbit_idx as u32;
            steps_to_rep[c as usize] = (len - pos as u32) % len;
        }
    }
    let exponent = exponents.first().map_or(1, |&e| q.pow(e));
    Ok(PsiOrbitPartition {
        q,
        exponents: exponents.to_vec(),
        ell: residue_mod(ell, exponent),
        orbits,
        orbit_of,
        steps_to_rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct iteration oracle for a single cyclic group Z/m.
    fn iteration_orbits(m: u64, ell: u64) -> Vec<Vec<u64>> {
        let mut seen = vec![false; m as usize];
        let mut orbits = Vec::new();
        for start in 0..m {
            if seen[start as usize] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize] = true;
            let mut cur = start * ell % m;
            while cur != start {
                seen[cur as usize] = true;
                cycle.push(cur);
                cur = cur * ell % m;
            }
            orbits.push(cycle);
        }
        orbits
    }

    #[test]
    fn c9_orbits_under_two() {
        let part = psi_orbits(3, &[2], 2).unwrap();
        let mut got = part.orbits.clone();
        got.sort_by_key(|c| c[0]);
        assert_eq!(got, iteration_orbits(9, 2));
        assert_eq!(part.sizes(), vec![1, 2, 6]);
        assert_eq!(part.orbits[1], vec![3, 6]);
        assert_eq!(part.orbits[2], vec![1, 2, 4, 8, 7, 5]);
        // Steps from 4 back to the representative 1: two more doublings.
        assert_eq!(part.steps_to_rep(4), 4);
        assert_eq!(part.steps_to_rep(7), 2);
        assert_eq!(part.steps_to_rep(1), 0);
    }

    #[test]
    fn c3_orbits_swap_nontrivial_characters() {
        let part = psi_orbits(3, &[1], 2).unwrap();
        assert_eq!(part.sizes(), vec![1, 2]);
    }

    #[test]
    fn c3xc3_has_five_orbits() {
        let part = psi_orbits(3, &[1, 1], 2).unwrap();
        assert_eq!(part.sizes(), vec![1, 2, 2, 2, 2]);
    }

    #[test]
    fn rejects_ell_divisible_by_q() {
        assert!(psi_orbits(3, &[2], 6).is_err());
        assert!(psi_orbits(3, &[2], -3).is_err());
    }

    #[test]
    fn partition_independent_of_primitive_root() {
        // As a set partition the orbits agree for any two primitive roots.
        for (q, exps) in [(3u64, vec![2u32]), (3, vec![1, 1]), (5, vec![2]), (3, vec![2, 1])] {
            let modulus: u64 = exps.iter().map(|&e| q.pow(e)).product();
            let j = {
                let mut m = modulus;
                let mut j = 0;
                while m > 1 {
                    m /= q;
                    j += 1;
                }
                j
            };
            let roots = crate::arith::primitive_residues(q, j).unwrap();
            assert!(roots.len() >= 2);
            let normalize = |ell: u64| {
                let mut sets: Vec<Vec<u64>> = psi_orbits(q, &exps, ell as i64)
                    .unwrap()
                    .orbits
                    .into_iter()
                    .map(|mut o| {
                        o.sort_unstable();
                        o
                    })
                    .collect();
                sets.sort();
                sets
            };
            assert_eq!(normalize(roots[0]), normalize(roots[1]));
        }
    }

    #[test]
    fn trivial_group_single_orbit() {
        let part = psi_orbits(3, &[], 2).unwrap();
        assert_eq!(part.sizes(), vec![1]);
    }
}
