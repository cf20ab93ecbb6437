//! Exact elementary number theory: q-adic valuations, multiplicative orders,
//! primitivity tests, and the valuation nu_q(ell^e - 1) that drives every
//! cokernel order in this crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A q-adic valuation. The zero input gets an explicit infinite variant so
/// downstream branches (the d = 0 case of the cokernel formula) never have to
/// decode a sentinel integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

/// Deterministic primality test by trial division. The primes in scope are
/// group-order primes (small by the resource bounds), so nothing fancier is
/// warranted.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map_or(false, |sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn check_odd_prime(q: u64) -> Result<()> {
    if q == 2 || !is_prime(q) {
        return Err(Error::input(format!("q = {q} is not an odd prime")));
    }
    Ok(())
}

/// Largest e with q^e dividing n; `Infinite` for n = 0.
pub fn q_valuation(n: &BigInt, q: u64) -> Result<Valuation> {
    check_odd_prime(q)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let q_big = BigInt::from(q);
    let mut m = n.abs();
    let mut v = 0u32;
    loop {
        let (quot, rem) = num_integer::Integer::div_rem(&m, &q_big);
        if !rem.is_zero() {
            return Ok(Valuation::Finite(v));
        }
        v += 1;
        m = quot;
    }
}

/// Convenience wrapper for machine integers.
pub fn q_valuation_i64(n: i64, q: u64) -> Result<Valuation> {
    q_valuation(&BigInt::from(n), q)
}

/// b^e mod m with u128 intermediates.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least nonnegative residue of a (possibly negative) integer mod m.
pub fn residue_mod(ell: i64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let r = ell.rem_euclid(m as i64);
    r as u64
}

/// Inverse of a mod m; requires gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r.abs() != 1 {
        return Err(Error::input(format!("{a} is not invertible mod {m}")));
    }
    let inv = (old_s * old_r.signum()).rem_euclid(m as i128);
    Ok(inv as u64)
}

/// Least t >= 1 with ell^t = 1 mod m. Requires gcd(ell, m) = 1 and m >= 2.
pub fn multiplicative_order(ell: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::input(format!("modulus {m} must be at least 2")));
    }
    let r = residue_mod(ell, m);
    if gcd_u64(r, m) != 1 {
        return Err(Error::input(format!(
            "gcd({ell}, {m}) != 1; multiplicative order undefined"
        )));
    }
    let mut acc = r % m;
    let mut t = 1u64;
    while acc != 1 {
        acc = (acc as u128 * r as u128 % m as u128) as u64;
        t += 1;
    }
    Ok(t)
}

/// phi(q^k): q^k - q^(k-1) for k >= 1, and 1 for k = 0.
pub fn euler_phi_prime_power(q: u64, k: u32) -> u64 {
    if k == 0 {
        return 1;
    }
    let qk = q.pow(k);
    qk - qk / q
}

/// True iff ell generates the units mod q^j. For j = 0 the condition is
/// vacuous. Requires ell coprime to q.
pub fn is_primitive_mod(ell: i64, q: u64, j: u32) -> Result<bool> {
    check_odd_prime(q)?;
    if ell.rem_euclid(q as i64) == 0 {
        return Err(Error::input(format!("{ell} is divisible by q = {q}")));
    }
    if j == 0 {
        return Ok(true);
    }
    let m = q.pow(j);
    let order = multiplicative_order(ell, m)?;
    Ok(order == euler_phi_prime_power(q, j))
}

/// All primitive residues ell with 1 <= ell < q^j. Used by the sweep suites.
pub fn primitive_residues(q: u64, j: u32) -> Result<Vec<u64>> {
    check_odd_prime(q)?;
    let m = q.pow(j);
    let target = euler_phi_prime_power(q, j);
    let mut out = Vec::new();
    for ell in 2..m {
        if ell % q == 0 {
            continue;
        }
        if multiplicative_order(ell as i64, m)? == target {
            out.push(ell);
        }
    }
    Ok(out)
}

/// Smallest positive primitive root mod q^j, used to resolve `--ell auto`.
pub fn smallest_primitive_root(q: u64, j: u32) -> Result<u64> {
    primitive_residues(q, j)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Internal(format!("no primitive root mod {q}^{j}")))
}

/// nu_q(ell^e - 1) for e >= 1, without materializing ell^e: find the order t
/// of ell mod q, then lift the exponent. Falls out as 0 whenever t does not
/// divide e. Errors when ell^e - 1 = 0 (ell = 1, or ell = -1 with e even),
/// since the valuation is infinite there.
pub fn nu_q_power_minus_one(ell: i64, e: u64, q: u64) -> Result<u32> {
    check_odd_prime(q)?;
    if e == 0 {
        return Err(Error::input("exponent e must be positive".to_string()));
    }
    if ell == 1 || (ell == -1 && e % 2 == 0) {
        return Err(Error::input(format!(
            "ell^e - 1 = 0 for ell = {ell}, e = {e}; valuation is infinite"
        )));
    }
    if ell.rem_euclid(q as i64) == 0 {
        return Err(Error::input(format!("{ell} is divisible by q = {q}")));
    }
    let t = multiplicative_order(ell, q)?;
    if e % t != 0 {
        return Ok(0);
    }
    // ell^t = 1 mod q, so for odd q: nu(ell^e - 1) = nu(ell^t - 1) + nu(e/t).
    let base = BigInt::from(ell).pow(t as u32) - BigInt::one();
    let v_base = match q_valuation(&base, q)? {
        Valuation::Finite(v) => v,
        Valuation::Infinite => {
            return Err(Error::input(format!(
                "ell^{t} - 1 = 0 for ell = {ell}; valuation is infinite"
            )))
        }
    };
    let v_exp = match q_valuation(&BigInt::from(e / t), q)? {
        Valuation::Finite(v) => v,
        Valuation::Infinite => unreachable!("e/t >= 1"),
    };
    Ok(v_base + v_exp)
}

/// Valuation of ell^d - 1 for nonzero d of either sign: ell^(-e) - 1 differs
/// from ell^e - 1 by the unit -ell^(-e), so the q-adic valuation is that of
/// ell^|d| - 1.
pub fn nu_q_power_minus_one_signed(ell: i64, d: i64, q: u64) -> Result<u32> {
    if d == 0 {
        return Err(Error::input("degree d must be nonzero".to_string()));
    }
    nu_q_power_minus_one(ell, d.unsigned_abs(), q)
}

/// Oracle: full big-integer evaluation of ell^e - 1 followed by repeated
/// exact division. Quadratic in the result size; fine at test scale.
pub fn nu_q_power_minus_one_bigint(ell: i64, e: u64, q: u64) -> Result<Valuation> {
    let n = BigInt::from(ell).pow(u32::try_from(e).map_err(|_| {
        Error::input(format!("exponent {e} too large for the big-integer oracle"))
    })?) - BigInt::one();
    q_valuation(&n, q)
}

/// Oracle for large exponents: exact powering mod q^64 and valuation of the
/// residue. Sound because a residue different from 1 pins the valuation below
/// 64 on both sides; the (unreachable at our grid sizes) residue-1 case falls
/// back to full evaluation rather than guessing.
pub fn nu_q_power_minus_one_modular(ell: i64, e: u64, q: u64) -> Result<Valuation> {
    check_odd_prime(q)?;
    const HEADROOM: u32 = 64;
    let modulus = BigInt::from(q).pow(HEADROOM);
    let base = BigInt::from(ell).mod_floor_big(&modulus);
    let residue = base.modpow(&BigInt::from(e), &modulus);
    let shifted = residue - BigInt::one();
    if shifted.is_zero() {
        return nu_q_power_minus_one_bigint(ell, e, q);
    }
    q_valuation(&shifted, q)
}

trait ModFloorBig {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloorBig for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        num_integer::Integer::mod_floor(self, m)
    }
}
