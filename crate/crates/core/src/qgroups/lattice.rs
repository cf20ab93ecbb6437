use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{AbelianQGroup, GroupElement, MixedRadix};
use crate::arith::gcd_u64;
use crate::error::{Error, Result};
use crate::exactla::{smith_normal_form, IntMatrix};

/// Default cap on the ambient group order for lattice enumeration; callers
/// with bigger appetites (the verification sweeps) pass an explicit bound.
pub const DEFAULT_ORDER_BOUND: u64 = 729;

/// Subgroups small enough to be identified by their sorted element list;
/// beyond this the canonical key falls back to a Hermite form of a generator
/// matrix.
const ELEMENT_KEY_CUTOFF: usize = 4096;

/// Deterministic identifier of a subgroup inside a fixed ambient group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalKey {
    Elements(Vec<u64>),
    GeneratorHnf(Vec<u64>),
}

/// A subgroup of a fixed ambient abelian q-group, carrying its own invariant
/// factor decomposition and a basis realizing it. The basis fixes the
/// identification of the character group used everywhere downstream.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub order: u64,
    /// Sorted ambient element codes.
    pub elements: Vec<u64>,
    /// Invariant factors of the subgroup itself, exponents descending.
    pub exponents: Vec<u32>,
    /// Ambient codes of independent generators: the subgroup is the direct
    /// sum of the cyclic groups they generate, orders q^exponents[i]. Each is
    /// the least ambient code among its unit multiples.
    pub basis: Vec<u64>,
    /// Mixed radix over q^exponents, indexing both coordinates and dual
    /// characters.
    dual: MixedRadix,
    /// Ambient element code -> coordinate code with respect to `basis`.
    coords: HashMap<u64, u64>,
    element_set: HashSet<u64>,
    key: CanonicalKey,
}

impl Subgroup {
    fn from_elements(group: &AbelianQGroup, mut elements: Vec<u64>) -> Self {
        elements.sort_unstable();
        let order = elements.len() as u64;
        let element_set: HashSet<u64> = elements.iter().copied().collect();
        let gens = greedy_generators(group, &elements, &element_set);
        let (exponents, basis) = smith_basis(group, &gens, order);
        let dual = MixedRadix::new(exponents.iter().map(|&e| group.q().pow(e)).collect());
        // Coordinates with respect to the basis, by direct enumeration.
        let mut coords = HashMap::with_capacity(elements.len());
        for tuple_code in 0..dual.size() {
            let tuple = dual.decode(tuple_code);
            let mut elt = 0u64;
            for (k, b) in tuple.iter().zip(&basis) {
                elt = group.radix().add(elt, group.radix().scalar_mul(*k, *b));
            }
            let prev = coords.insert(elt, tuple_code);
            debug_assert!(prev.is_none(), "basis is not independent");
        }
        debug_assert_eq!(coords.len() as u64, order);
        debug_assert!(elements.iter().all(|e| coords.contains_key(e)));
        let key = if elements.len() <= ELEMENT_KEY_CUTOFF {
            CanonicalKey::Elements(elements.clone())
        } else {
            CanonicalKey::GeneratorHnf(hermite_key(group, &basis))
        };
        Subgroup {
            order,
            elements,
            exponents,
            basis,
            dual,
            coords,
            element_set,
            key,
        }
    }

    pub fn contains(&self, code: u64) -> bool {
        self.element_set.contains(&code)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn is_cyclic(&self) -> bool {
        self.exponents.len() <= 1
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn canonical_key(&self) -> &CanonicalKey {
        &self.key
    }

    /// Mixed radix over the subgroup's own invariant factors; also indexes
    /// its character group.
    pub fn dual(&self) -> &MixedRadix {
        &self.dual
    }

    /// Coordinates of an ambient element with respect to the basis, as a
    /// dual-radix code. None if the element is not in the subgroup.
    pub fn coords_of(&self, ambient_code: u64) -> Option<u64> {
        self.coords.get(&ambient_code).copied()
    }

    pub fn generators(&self, group: &AbelianQGroup) -> Vec<GroupElement> {
        self.basis.iter().map(|&b| group.element(b)).collect()
    }

    pub fn structure_name(&self, q: u64) -> String {
        if self.exponents.is_empty() {
            return "e".to_string();
        }
        self.exponents
            .iter()
            .map(|&e| format!("C{}", q.pow(e)))
            .collect::<Vec<_>>()
            .join("x")
    }
}

/// A small generating set: scan elements by descending order (ties by code)
/// and keep those not already generated.
fn greedy_generators(
    group: &AbelianQGroup,
    elements: &[u64],
    element_set: &HashSet<u64>,
) -> Vec<u64> {
    let target = elements.len();
    let mut by_order: Vec<u64> = elements.iter().copied().filter(|&e| e != 0).collect();
    by_order.sort_unstable_by_key(|&e| (std::cmp::Reverse(group.element_order(e)), e));
    let mut gens: Vec<u64> = Vec::new();
    let mut generated: HashSet<u64> = HashSet::with_capacity(target);
    generated.insert(0);
    for e in by_order {
        if generated.contains(&e) {
            continue;
        }
        // generated is a subgroup, so extending by e is a union of cosets.
        let ord = group.element_order(e);
        let mut next = HashSet::with_capacity(generated.len() * ord as usize);
        for k in 0..ord {
            let ke = group.radix().scalar_mul(k, e);
            for &s in &generated {
                next.insert(group.radix().add(s, ke));
            }
        }
        generated = next;
        gens.push(e);
        if generated.len() == target {
            break;
        }
    }
    debug_assert!(generated.iter().all(|g| element_set.contains(g)));
    gens
}

/// Invariant factors and an independent basis for the subgroup generated by
/// `gens`: present the subgroup as Z^k / ker and diagonalize the kernel
/// lattice. Exponents come back descending; unit factors are dropped.
fn smith_basis(group: &AbelianQGroup, gens: &[u64], order: u64) -> (Vec<u32>, Vec<u64>) {
    if order == 1 {
        return (Vec::new(), Vec::new());
    }
    let r = group.rank();
    let k = gens.len();
    // Kernel of Z^k -> H: x with C x = 0 modulo the ambient relations, found
    // as the x-part of the kernel of [C | diag(moduli)].
    let a = IntMatrix::from_fn(r, k + r, |i, j| {
        if j < k {
            BigInt::from(group.radix().decode(gens[j])[i])
        } else if j - k == i {
            BigInt::from(group.moduli()[i])
        } else {
            BigInt::zero()
        }
    });
    let dec = smith_normal_form(&a);
    // A has full row rank r, so columns r.. of V span the kernel.
    let kernel_cols = k + r - r;
    let n = IntMatrix::from_fn(k, kernel_cols, |i, j| dec.v.get(i, r + j).clone());
    let dec2 = smith_normal_form(&n);
    let diag_len = n.rows().min(n.cols());
    let w = n.mul(&dec2.v);
    let mut factored: Vec<(u32, u64)> = Vec::new();
    for i in 0..k {
        let d = if i < diag_len {
            dec2.d.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        assert!(!d.is_zero(), "generator kernel lattice must have full rank");
        if d.is_one() {
            continue;
        }
        // Generator i of the diagonalized presentation is U^{-1} e_i, read
        // off from N V = U^{-1} D as column i divided by d_i. Coefficients
        // act modulo the group exponent.
        let mut elt = 0u64;
        for j in 0..k {
            let coeff = coeff_mod(&(w.get(j, i) / &d), group.exponent());
            elt = group
                .radix()
                .add(elt, group.radix().scalar_mul(coeff, gens[j]));
        }
        let d_u64 = u64::try_from(&d).expect("factor fits u64");
        let e = q_exponent_of(d_u64, group.q());
        debug_assert_eq!(group.element_order(elt), d_u64);
        factored.push((e, normalize_by_units(group, elt, d_u64)));
    }
    // Descending exponents; ties by ambient code for determinism.
    factored.sort_unstable_by_key(|&(e, code)| (std::cmp::Reverse(e), code));
    let prod: u64 = factored.iter().map(|&(e, _)| group.q().pow(e)).product();
    assert_eq!(prod, order, "invariant factors do not multiply to the order");
    (
        factored.iter().map(|&(e, _)| e).collect(),
        factored.iter().map(|&(_, c)| c).collect(),
    )
}

fn coeff_mod(c: &BigInt, modulus: u64) -> u64 {
    u64::try_from(num_integer::Integer::mod_floor(c, &BigInt::from(modulus)))
        .expect("reduced coefficient fits u64")
}

fn q_exponent_of(mut d: u64, q: u64) -> u32 {
    let mut e = 0;
    while d > 1 {
        assert_eq!(d % q, 0, "invariant factor is not a q-power");
        d /= q;
        e += 1;
    }
    e
}

/// Least ambient code among the unit multiples of a generator; unit scaling
/// preserves the generated cyclic group and the direct-sum property.
fn normalize_by_units(group: &AbelianQGroup, elt: u64, order: u64) -> u64 {
    let mut best = elt;
    for u in 1..order {
        if gcd_u64(u, group.q()) != 1 {
            continue;
        }
        best = best.min(group.radix().scalar_mul(u, elt));
    }
    best
}

/// Canonical generator-matrix key: the column Hermite normal form of the
/// lattice spanned by the generators together with the ambient relations.
fn hermite_key(group: &AbelianQGroup, gens: &[u64]) -> Vec<u64> {
    let r = group.rank();
    let k = gens.len();
    let mut m = IntMatrix::from_fn(r, k + r, |i, j| {
        if j < k {
            BigInt::from(group.radix().decode(gens[j])[i])
        } else if j - k == i {
            BigInt::from(group.moduli()[i])
        } else {
            BigInt::zero()
        }
    });
    let cols = k + r;
    for i in 0..r {
        loop {
            let mut best: Option<usize> = None;
            for j in i..cols {
                if m.get(i, j).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(j),
                    Some(b) => {
                        if m.get(i, j).magnitude() < m.get(i, b).magnitude() {
                            best = Some(j);
                        }
                    }
                }
            }
            let b = best.expect("full row rank");
            m.swap_cols(i, b);
            let mut done = true;
            for j in i + 1..cols {
                if m.get(i, j).is_zero() {
                    continue;
                }
                let quot = num_integer::Integer::div_floor(m.get(i, j), m.get(i, i));
                let neg = -quot;
                m.add_col_multiple(j, i, &neg);
                if !m.get(i, j).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m.get(i, i).is_negative() {
            m.negate_col(i);
        }
        // Uniqueness: entries left of the pivot reduced into [0, pivot).
        for j in 0..i {
            let quot = num_integer::Integer::div_floor(m.get(i, j), m.get(i, i));
            let neg = -quot;
            m.add_col_multiple(j, i, &neg);
        }
    }
    let mut flat = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in 0..=i {
            flat.push(u64::try_from(m.get(i, j)).expect("HNF entry fits u64"));
        }
    }
    flat
}

/// The full subgroup lattice of an abelian q-group: every subgroup exactly
/// once, sorted by (order, canonical key), with covering relations.
#[derive(Debug)]
pub struct SubgroupLattice {
    pub group: AbelianQGroup,
    pub subgroups: Vec<Subgroup>,
    /// Covering pairs (lower, upper), sorted.
    pub covers: Vec<(usize, usize)>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    names: Vec<String>,
    json_keys: Vec<String>,
}

impl SubgroupLattice {
    pub fn build(group: &AbelianQGroup, order_bound: Option<u64>) -> Result<Self> {
        let bound = order_bound.unwrap_or(DEFAULT_ORDER_BOUND);
        if group.order() > bound {
            return Err(Error::Bound(format!(
                "group order {} exceeds the lattice enumeration bound {bound}",
                group.order()
            )));
        }
        let q = group.q();
        let mut subs: Vec<Subgroup> = vec![Subgroup::from_elements(group, vec![0])];
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        index.insert(vec![0], 0);
        let mut cover_edges: Vec<(usize, usize)> = Vec::new();
        let mut work = 0usize;
        while work < subs.len() {
            let current = work;
            work += 1;
            if subs[current].order == group.order() {
                continue;
            }
            // Elements whose q-th multiple lands in the subgroup generate
            // exactly the index-q covers.
            let candidates: Vec<u64> = (0..group.order())
                .filter(|&g| {
                    !subs[current].contains(g)
                        && subs[current].contains(group.radix().scalar_mul(q, g))
                })
                .collect();
            let mut absorbed: HashSet<u64> = HashSet::new();
            for g in candidates {
                if absorbed.contains(&g) {
                    continue;
                }
                let mut elements =
                    Vec::with_capacity(subs[current].elements.len() * q as usize);
                for k in 0..q {
                    let kg = group.radix().scalar_mul(k, g);
                    for &h in &subs[current].elements {
                        elements.push(group.radix().add(h, kg));
                    }
                }
                elements.sort_unstable();
                debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
                for &e in &elements {
                    if !subs[current].contains(e) {
                        absorbed.insert(e);
                    }
                }
                let upper = match index.get(&elements) {
                    Some(&idx) => idx,
                    None => {
                        let sub = Subgroup::from_elements(group, elements.clone());
                        subs.push(sub);
                        index.insert(elements, subs.len() - 1);
                        subs.len() - 1
                    }
                };
                cover_edges.push((current, upper));
            }
        }
        // Canonical order, then remap the cover edges.
        let mut perm: Vec<usize> = (0..subs.len()).collect();
        perm.sort_by(|&a, &b| {
            (subs[a].order, subs[a].canonical_key())
                .cmp(&(subs[b].order, subs[b].canonical_key()))
        });
        let mut position = vec![0usize; subs.len()];
        for (new_idx, &old_idx) in perm.iter().enumerate() {
            position[old_idx] = new_idx;
        }
        let mut sorted_subs: Vec<Option<Subgroup>> = subs.into_iter().map(Some).collect();
        let subgroups: Vec<Subgroup> = perm
            .iter()
            .map(|&old| sorted_subs[old].take().expect("permutation is a bijection"))
            .collect();
        let mut covers: Vec<(usize, usize)> = cover_edges
            .into_iter()
            .map(|(a, b)| (position[a], position[b]))
            .collect();
        covers.sort_unstable();
        covers.dedup();
        let mut children = vec![Vec::new(); subgroups.len()];
        let mut parents = vec![Vec::new(); subgroups.len()];
        for &(lo, hi) in &covers {
            children[hi].push(lo);
            parents[lo].push(hi);
        }
        let (names, json_keys) = make_names(q, &subgroups);
        Ok(SubgroupLattice {
            group: group.clone(),
            subgroups,
            covers,
            children,
            parents,
            names,
            json_keys,
        })
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn top(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn bottom(&self) -> usize {
        0
    }

    /// Indices of maximal proper subgroups of `idx`.
    pub fn maximal_subgroups(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    /// Indices of minimal overgroups of `idx`.
    pub fn minimal_overgroups(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    pub fn leq(&self, lower: usize, upper: usize) -> bool {
        if lower == upper {
            return true;
        }
        let (a, b) = (&self.subgroups[lower], &self.subgroups[upper]);
        if a.order > b.order || b.order % a.order != 0 {
            return false;
        }
        a.elements.iter().all(|&e| b.contains(e))
    }

    pub fn index(&self, lower: usize, upper: usize) -> u64 {
        self.subgroups[upper].order / self.subgroups[lower].order
    }

    /// Cyclic subgroups, in lattice order. Conjugacy is trivial here, so
    /// these are exactly the conjugacy classes of cyclic subgroups.
    pub fn cyclic_subgroups(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.subgroups[i].is_cyclic())
            .collect()
    }

    /// A deterministic chain of covers from `upper` down to `lower`.
    pub fn cover_chain_down(&self, upper: usize, lower: usize) -> Result<Vec<(usize, usize)>> {
        if !self.leq(lower, upper) {
            return Err(Error::input(format!(
                "{} is not a subgroup of {}",
                self.name(lower),
                self.name(upper)
            )));
        }
        let mut chain = Vec::new();
        let mut cur = upper;
        while cur != lower {
            let next = self.children[cur]
                .iter()
                .copied()
                .find(|&c| self.leq(lower, c))
                .expect("cover chain exists in a q-group lattice");
            chain.push((next, cur));
            cur = next;
        }
        Ok(chain)
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn json_key(&self, idx: usize) -> &str {
        &self.json_keys[idx]
    }

    pub fn find_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn make_names(q: u64, subgroups: &[Subgroup]) -> (Vec<String>, Vec<String>) {
    let mut structure_counts: HashMap<String, usize> = HashMap::new();
    for sub in subgroups {
        *structure_counts
            .entry(sub.structure_name(q))
            .or_default() += 1;
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut order_seen: HashMap<u64, usize> = HashMap::new();
    let mut names = Vec::with_capacity(subgroups.len());
    let mut json_keys = Vec::with_capacity(subgroups.len());
    for sub in subgroups {
        let base = sub.structure_name(q);
        let name = if structure_counts[&base] > 1 {
            let k = seen.entry(base.clone()).or_default();
            let name = format!("{base}#{k}");
            *k += 1;
            name
        } else {
            base
        };
        names.push(name);
        let pos = order_seen.entry(sub.order).or_default();
        json_keys.push(format!("H{}_{}", sub.order, pos));
        *pos += 1;
    }
    (names, json_keys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(spec: &str) -> SubgroupLattice {
        SubgroupLattice::build(&AbelianQGroup::parse(spec).unwrap(), None).unwrap()
    }

    #[test]
    fn c9_is_a_chain() {
        let lat = lattice("C9");
        assert_eq!(lat.len(), 3);
        let orders: Vec<u64> = lat.subgroups.iter().map(|s| s.order).collect();
        assert_eq!(orders, vec![1, 3, 9]);
        assert_eq!(lat.covers, vec![(0, 1), (1, 2)]);
        assert_eq!(lat.name(0), "e");
        assert_eq!(lat.name(1), "C3");
        assert_eq!(lat.name(2), "C9");
        // The C3 inside C9 is generated by 3, normalized below 6.
        assert_eq!(lat.subgroups[1].basis, vec![3]);
        assert_eq!(lat.subgroups[2].basis, vec![1]);
    }

    #[test]
    fn c3xc3_has_six_subgroups() {
        // q + 1 = 4 subgroups of order q, plus trivial and full.
        let lat = lattice("C3xC3");
        assert_eq!(lat.len(), 6);
        let orders: Vec<u64> = lat.subgroups.iter().map(|s| s.order).collect();
        assert_eq!(orders, vec![1, 3, 3, 3, 3, 9]);
        // Atoms each cover the bottom and are covered by the top: 8 edges.
        assert_eq!(lat.covers.len(), 8);
        assert_eq!(lat.cyclic_subgroups().len(), 5);
    }

    #[test]
    fn c27_chain_length() {
        let lat = lattice("C27");
        assert_eq!(lat.len(), 4);
        assert_eq!(lat.cyclic_subgroups().len(), 4);
    }

    #[test]
    fn c9xc3_subgroup_census() {
        let lat = lattice("C9xC3");
        // Orders: 1, four C3s, C9 x3 and C3xC3, 27.
        let mut by_order: HashMap<u64, usize> = HashMap::new();
        for s in &lat.subgroups {
            *by_order.entry(s.order).or_default() += 1;
        }
        assert_eq!(by_order[&1], 1);
        assert_eq!(by_order[&3], 4);
        assert_eq!(by_order[&9], 4);
        assert_eq!(by_order[&27], 1);
        assert_eq!(lat.len(), 10);
        // 3 cyclic C9s + C3xC3 at order 9.
        let cyclic9 = lat
            .subgroups
            .iter()
            .filter(|s| s.order == 9 && s.is_cyclic())
            .count();
        assert_eq!(cyclic9, 3);
        assert_eq!(lat.cyclic_subgroups().len(), 1 + 4 + 3);
    }

    #[test]
    fn closed_under_intersection() {
        for spec in ["C9xC3", "C3xC3xC3", "C27"] {
            let lat = lattice(spec);
            for i in 0..lat.len() {
                for j in i + 1..lat.len() {
                    let meet: Vec<u64> = lat.subgroups[i]
                        .elements
                        .iter()
                        .copied()
                        .filter(|&e| lat.subgroups[j].contains(e))
                        .collect();
                    assert!(
                        lat.subgroups
                            .iter()
                            .any(|s| s.elements == meet),
                        "intersection missing in {spec}"
                    );
                }
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        let g = AbelianQGroup::parse("C2187").unwrap();
        assert!(matches!(
            SubgroupLattice::build(&g, None),
            Err(Error::Bound(_))
        ));
        assert!(SubgroupLattice::build(&g, Some(3000)).is_ok());
    }

    #[test]
    fn subgroup_invariant_factors() {
        let lat = lattice("C9xC3");
        let top = &lat.subgroups[lat.top()];
        assert_eq!(top.exponents, vec![2, 1]);
        assert_eq!(top.order, 27);
        // Every order-9 noncyclic subgroup decomposes as [1, 1].
        for s in &lat.subgroups {
            if s.order == 9 && !s.is_cyclic() {
                assert_eq!(s.exponents, vec![1, 1]);
            }
        }
    }

    #[test]
    fn coords_roundtrip() {
        let lat = lattice("C9xC3");
        for s in &lat.subgroups {
            for &e in &s.elements {
                let tuple_code = s.coords_of(e).unwrap();
                let tuple = s.dual().decode(tuple_code);
                let mut rebuilt = 0u64;
                for (k, b) in tuple.iter().zip(&s.basis) {
                    rebuilt = lat
                        .group
                        .radix()
                        .add(rebuilt, lat.group.radix().scalar_mul(*k, *b));
                }
                assert_eq!(rebuilt, e);
            }
        }
    }

    #[test]
    fn cover_chain_is_a_path() {
        let lat = lattice("C27");
        let chain = lat.cover_chain_down(lat.top(), lat.bottom()).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[0], (2, 3));
        assert_eq!(chain[2], (0, 1));
    }

    #[test]
    fn hermite_key_distinguishes_subgroups() {
        let g = AbelianQGroup::parse("C3xC3").unwrap();
        let lat = SubgroupLattice::build(&g, None).unwrap();
        let keys: Vec<Vec<u64>> = lat
            .subgroups
            .iter()
            .map(|s| hermite_key(&g, &s.basis))
            .collect();
        for i in 0..keys.len() {
            for j in i + 1..keys.len() {
                assert_ne!(keys[i], keys[j], "HNF keys collide for distinct subgroups");
            }
        }
    }
}
