//! Small exact integer helpers used throughout: modular arithmetic over a
//! prime, primality, binomial coefficients mod p, orders and divisors.

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo a prime `p`; panics on `a ≡ 0`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    assert!(a != 0, "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Binomial coefficient C(n, k) reduced mod a prime `p`, via the base-p
/// digit product rule. Digits satisfy n_i < p, so each digit factor is a
/// short multiplicative product.
pub fn lucas_binomial(mut n: u64, mut k: u64, p: u64) -> u64 {
    assert!(is_prime(p), "modulus must be prime");
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        acc = mul_mod(acc, binom_small(nd, kd, p), p);
        n /= p;
        k /= p;
    }
    acc
}

/// C(n, k) mod p for n, k < p.
fn binom_small(n: u64, k: u64, p: u64) -> u64 {
    debug_assert!(n < p && k < p);
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1u64;
    let mut den = 1u64;
    for t in 0..k {
        num = mul_mod(num, (n - t) % p, p);
        den = mul_mod(den, t + 1, p);
    }
    mul_mod(num, inv_mod(den, p), p)
}

/// Row of binomial coefficients C(top, 0..=top) mod p. Requires top < p,
/// in which case every entry is nonzero.
pub fn binom_row(top: u64, p: u64) -> Vec<u64> {
    assert!(top < p);
    let mut row = Vec::with_capacity(top as usize + 1);
    let mut c = 1u64;
    row.push(1);
    for n in 1..=top {
        // C(top, n) = C(top, n-1) * (top-n+1) / n
        c = mul_mod(c, top - n + 1, p);
        c = mul_mod(c, inv_mod(n, p), p);
        row.push(c);
    }
    row
}

/// Multiplicative order of `a` modulo `n` (requires gcd(a, n) = 1).
pub fn mult_order(a: u64, n: u64) -> u64 {
    assert!(n >= 1);
    if n == 1 {
        return 1;
    }
    assert!(gcd(a % n, n) == 1, "order of non-unit {a} mod {n}");
    let mut x = a % n;
    let mut ord = 1u64;
    while x != 1 {
        x = mul_mod(x, a % n, n);
        ord += 1;
    }
    ord
}

/// Divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Distinct prime factors of n, increasing.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1 + (d & 1);
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Reduce the fraction num/den to lowest terms (den > 0).
pub fn reduce_fraction(num: u64, den: u64) -> (u64, u64) {
    assert!(den > 0);
    if num == 0 {
        return (0, 1);
    }
    let g = gcd(num, den);
    (num / g, den / g)
}
