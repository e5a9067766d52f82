//! Word-sized modular arithmetic shared by `Z/k`, `F_p[d]` and the fast
//! elimination and contraction kernels.

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, k: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % k as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, k: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        k - (b - a)
    }
}

#[inline]
pub(crate) fn neg_mod(a: u64, k: u64) -> u64 {
    if a == 0 {
        0
    } else {
        k - a
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, k: u64) -> u64 {
    ((a as u128 * b as u128) % k as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, k: u64) -> u64 {
    let mut acc = 1 % k;
    base %= k;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, k);
        }
        base = mul_mod(base, base, k);
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `k`, if `gcd(a, k) = 1`.
pub(crate) fn inv_mod(a: u64, k: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % k as i128, k as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(k as i128) as u64)
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A residue is nilpotent mod `k` iff it is divisible by every prime factor of `k`.
pub(crate) fn is_nilpotent_mod(a: u64, k: u64) -> bool {
    prime_factors(k).into_iter().all(|p| a.is_multiple_of(p))
}

/// Generator of `(Z/k)^*` when that group is cyclic (k = 2, 4, p^a, 2p^a).
pub(crate) fn unit_group_generator(k: u64) -> Option<u64> {
    if k == 2 {
        return Some(1);
    }
    if k == 4 {
        return Some(3);
    }
    let odd = if k.is_multiple_of(2) { k / 2 } else { k };
    if k.is_multiple_of(4) {
        return None;
    }
    let primes = prime_factors(odd);
    if primes.len() != 1 {
        return None;
    }
    // phi(2p^a) = phi(p^a)
    let p = primes[0];
    let phi = odd / p * (p - 1);
    let phi_primes = prime_factors(phi);
    (2..k).find(|&g| gcd(g, k) == 1 && phi_primes.iter().all(|&q| pow_mod(g, phi / q, k) != 1))
}
