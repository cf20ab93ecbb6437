use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Conjugacy-class data for a finite q-group ingested from outside: element
/// orders per class and the permutation induced on classes by g -> g^ell.
/// This is the entry point for nonabelian q-groups, which only support
/// single-level cokernel computations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassData {
    pub q: u64,
    pub classes: Vec<ClassInfo>,
    /// Keyed by the decimal value of ell.
    pub power_maps: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassInfo {
    pub order: u64,
}

/// Orbits of the class set under the ell-th power map, with the common
/// element order of each orbit.
#[derive(Clone, Debug)]
pub struct ClassOrbits {
    pub cycles: Vec<(Vec<usize>, u64)>,
}

impl ClassOrbits {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

impl ClassData {
    pub fn from_json(text: &str) -> Result<Self> {
        let data: ClassData = serde_json::from_str(text)?;
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 2 || !is_prime(self.q) {
            return Err(Error::ClassData {
                field: "q".to_string(),
                msg: format!("{} is not an odd prime", self.q),
            });
        }
        if self.classes.is_empty() {
            return Err(Error::ClassData {
                field: "classes".to_string(),
                msg: "class list is empty".to_string(),
            });
        }
        let mut identity_count = 0usize;
        for (i, c) in self.classes.iter().enumerate() {
            if c.order == 1 {
                identity_count += 1;
            }
            let mut m = c.order;
            while m > 1 && m % self.q == 0 {
                m /= self.q;
            }
            if m != 1 {
                return Err(Error::ClassData {
                    field: format!("classes[{i}].order"),
                    msg: format!("{} is not a power of q = {}", c.order, self.q),
                });
            }
        }
        if identity_count != 1 {
            return Err(Error::ClassData {
                field: "classes".to_string(),
                msg: format!("expected exactly one class of order 1, found {identity_count}"),
            });
        }
        for (key, map) in &self.power_maps {
            let ell: i64 = key.parse().map_err(|_| Error::ClassData {
                field: format!("power_maps.{key}"),
                msg: "key is not an integer".to_string(),
            })?;
            if ell.rem_euclid(self.q as i64) == 0 {
                return Err(Error::ClassData {
                    field: format!("power_maps.{key}"),
                    msg: format!("ell = {ell} is divisible by q = {}", self.q),
                });
            }
            if map.len() != self.classes.len() {
                return Err(Error::ClassData {
                    field: format!("power_maps.{key}"),
                    msg: format!(
                        "permutation length {} does not match {} classes",
                        map.len(),
                        self.classes.len()
                    ),
                });
            }
            let mut hit = vec![false; map.len()];
            for (i, &img) in map.iter().enumerate() {
                if img >= map.len() || hit[img] {
                    return Err(Error::ClassData {
                        field: format!("power_maps.{key}[{i}]"),
                        msg: "not a permutation of the class indices".to_string(),
                    });
                }
                hit[img] = true;
                // Powering by a unit preserves element order.
                if self.classes[img].order != self.classes[i].order {
                    return Err(Error::ClassData {
                        field: format!("power_maps.{key}[{i}]"),
                        msg: format!(
                            "class of order {} maps to class of order {}",
                            self.classes[i].order, self.classes[img].order
                        ),
                    });
                }
            }
            let identity = self.identity_class();
            if map[identity] != identity {
                return Err(Error::ClassData {
                    field: format!("power_maps.{key}"),
                    msg: "identity class is not fixed".to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn identity_class(&self) -> usize {
        self.classes
            .iter()
            .position(|c| c.order == 1)
            .expect("validated data has an identity class")
    }

    /// The exponent of the group: the largest class order.
    pub fn exponent(&self) -> u64 {
        self.classes.iter().map(|c| c.order).max().unwrap_or(1)
    }

    pub fn class_orbits(&self, ell: i64) -> Result<ClassOrbits> {
        let key = ell.to_string();
        let map = self.power_maps.get(&key).ok_or_else(|| Error::ClassData {
            field: format!("power_maps.{key}"),
            msg: "no power map for this ell".to_string(),
        })?;
        let n = map.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut cur = map[start];
            while cur != start {
                visited[cur] = true;
                cycle.push(cur);
                cur = map[cur];
            }
            let order = self.classes[start].order;
            if cycle.iter().any(|&c| self.classes[c].order != order) {
                return Err(Error::ClassData {
                    field: format!("power_maps.{key}"),
                    msg: format!("orbit through class {start} mixes element orders"),
                });
            }
            cycles.push((cycle, order));
        }
        Ok(ClassOrbits { cycles })
    }
}
