//! Finite fields F_{p^s} with exact coordinate arithmetic.
//!
//! A field is a context object holding the prime, the extension degree and
//! the defining polynomial; elements are plain coordinate vectors in the
//! power basis 1, t, ..., t^{s-1}. The defining polynomial is chosen
//! deterministically (the lexicographically first monic irreducible of the
//! requested degree), so two contexts for the same (p, s) are identical and
//! printed element coordinates are reproducible across runs.

use crate::arith::{add_mod, inv_mod, is_prime, mul_mod, prime_factors, sub_mod};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} too large")]
    TooLarge(u64),
    #[error("extension degree must be >= 1")]
    BadDegree,
}

/// Element of F_{p^s}: coordinates in the power basis, each in [0, p).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FqElem {
    c: Vec<u64>,
}

impl FqElem {
    pub fn coords(&self) -> &[u64] {
        &self.c
    }
}

/// Field context for F_{p^s}.
#[derive(Debug, Clone)]
pub struct Fq {
    p: u64,
    s: usize,
    /// Monic defining polynomial, coefficients c_0..c_s with c_s = 1.
    modulus: Vec<u64>,
    /// red_rows[i] = coordinates of t^{s+i} mod modulus, i in 0..s-1.
    red_rows: Vec<Vec<u64>>,
    /// frob[k] = s x s matrix (row-major) of x -> x^{p^k}, k in 0..s.
    frob: Vec<Vec<u64>>,
}

impl Fq {
    pub fn new(p: u64, s: usize) -> Result<Fq, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 31 {
            return Err(FieldError::TooLarge(p));
        }
        if s == 0 {
            return Err(FieldError::BadDegree);
        }
        let modulus = first_irreducible(p, s);
        let mut red_rows = Vec::with_capacity(s.saturating_sub(1));
        if s > 1 {
            // t^s = -(c_0 + ... + c_{s-1} t^{s-1})
            let mut row: Vec<u64> = (0..s).map(|i| sub_mod(0, modulus[i], p)).collect();
            red_rows.push(row.clone());
            for _ in 1..s - 1 {
                row = shift_reduce(&row, &red_rows[0], p);
                red_rows.push(row.clone());
            }
        }
        let mut fq = Fq { p, s, modulus, red_rows, frob: Vec::new() };
        fq.frob = fq.build_frobenius();
        Ok(fq)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of field elements, saturating at u128::MAX.
    pub fn size(&self) -> u128 {
        let mut n: u128 = 1;
        for _ in 0..self.s {
            n = n.saturating_mul(self.p as u128);
        }
        n
    }

    pub fn zero(&self) -> FqElem {
        FqElem { c: vec![0; self.s] }
    }

    pub fn one(&self) -> FqElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, n: u64) -> FqElem {
        let mut c = vec![0; self.s];
        c[0] = n % self.p;
        FqElem { c }
    }

    /// Signed constructor, for small literal matrices.
    pub fn from_i64(&self, n: i64) -> FqElem {
        let r = n.rem_euclid(self.p as i64) as u64;
        self.from_u64(r)
    }

    pub fn from_coords(&self, coords: &[u64]) -> FqElem {
        assert!(coords.len() <= self.s, "too many coordinates");
        let mut c = vec![0; self.s];
        for (i, &x) in coords.iter().enumerate() {
            c[i] = x % self.p;
        }
        FqElem { c }
    }

    /// Element with base-p digits of `idx` as coordinates; enumerates the
    /// whole field as idx runs over 0..p^s.
    pub fn from_index(&self, idx: u128) -> FqElem {
        let mut c = vec![0; self.s];
        let mut n = idx;
        for slot in c.iter_mut() {
            *slot = (n % self.p as u128) as u64;
            n /= self.p as u128;
        }
        FqElem { c }
    }

    pub fn is_zero(&self, x: &FqElem) -> bool {
        x.c.iter().all(|&v| v == 0)
    }

    pub fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem { c: a.c.iter().zip(&b.c).map(|(&x, &y)| add_mod(x, y, self.p)).collect() }
    }

    pub fn sub(&self, a: &FqElem, b: &FqElem) -> FqElem {
        FqElem { c: a.c.iter().zip(&b.c).map(|(&x, &y)| sub_mod(x, y, self.p)).collect() }
    }

    pub fn neg(&self, a: &FqElem) -> FqElem {
        FqElem { c: a.c.iter().map(|&x| sub_mod(0, x, self.p)).collect() }
    }

    pub fn scalar_mul(&self, k: u64, a: &FqElem) -> FqElem {
        FqElem { c: a.c.iter().map(|&x| mul_mod(k, x, self.p)).collect() }
    }

    pub fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if self.s == 1 {
            return FqElem { c: vec![mul_mod(a.c[0], b.c[0], self.p)] };
        }
        let mut conv = vec![0u64; 2 * self.s - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.c.iter().enumerate() {
                if y != 0 {
                    conv[i + j] = add_mod(conv[i + j], mul_mod(x, y, self.p), self.p);
                }
            }
        }
        self.reduce(conv)
    }

    fn reduce(&self, mut conv: Vec<u64>) -> FqElem {
        for i in (self.s..conv.len()).rev() {
            let coef = conv[i];
            if coef != 0 {
                conv[i] = 0;
                let row = &self.red_rows[i - self.s];
                for j in 0..self.s {
                    conv[j] = add_mod(conv[j], mul_mod(coef, row[j], self.p), self.p);
                }
            }
        }
        conv.truncate(self.s);
        FqElem { c: conv }
    }

    pub fn pow(&self, a: &FqElem, mut e: u128) -> FqElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FqElem) -> FqElem {
        assert!(!self.is_zero(a), "inverse of zero");
        if self.s == 1 {
            return FqElem { c: vec![inv_mod(a.c[0], self.p)] };
        }
        // a^(p^s - 2)
        let e = self.size() - 2;
        self.pow(a, e)
    }

    /// x -> x^{p^k}; negative k means the inverse automorphism, computed via
    /// k reduced mod s.
    pub fn frobenius(&self, x: &FqElem, k: i64) -> FqElem {
        let k = k.rem_euclid(self.s as i64) as usize;
        if k == 0 {
            return x.clone();
        }
        let m = &self.frob[k];
        let mut out = vec![0u64; self.s];
        for (j, &cj) in x.c.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            for i in 0..self.s {
                out[i] = add_mod(out[i], mul_mod(m[i * self.s + j], cj, self.p), self.p);
            }
        }
        FqElem { c: out }
    }

    fn build_frobenius(&self) -> Vec<Vec<u64>> {
        let s = self.s;
        let mut mats = Vec::with_capacity(s);
        let mut ident = vec![0u64; s * s];
        for i in 0..s {
            ident[i * s + i] = 1;
        }
        mats.push(ident);
        if s == 1 {
            return mats;
        }
        // t^p mod modulus
        let tp = poly_powmod_x(self.p as u128, &self.modulus, self.p);
        // columns of frob1: (t^p)^j
        let mut frob1 = vec![0u64; s * s];
        let mut pw = vec![0u64; s];
        pw[0] = 1;
        for j in 0..s {
            for i in 0..s {
                frob1[i * s + j] = pw[i];
            }
            if j + 1 < s {
                pw = poly_mulmod(&pw, &tp, &self.modulus, self.p);
            }
        }
        mats.push(frob1);
        for k in 2..s {
            let prev = &mats[k - 1];
            let f1 = &mats[1];
            let mut next = vec![0u64; s * s];
            for i in 0..s {
                for l in 0..s {
                    let mut acc = 0u64;
                    for j in 0..s {
                        acc = add_mod(acc, mul_mod(f1[i * s + j], prev[j * s + l], self.p), self.p);
                    }
                    next[i * s + l] = acc;
                }
            }
            mats.push(next);
        }
        mats
    }

    /// Canonical text form of an element: coordinates joined by ':'.
    pub fn fmt_elem(&self, x: &FqElem) -> String {
        x.c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(":")
    }

    pub fn parse_elem(&self, text: &str) -> Option<FqElem> {
        let coords: Option<Vec<u64>> = text.split(':').map(|t| t.trim().parse().ok()).collect();
        let coords = coords?;
        if coords.is_empty() || coords.len() > self.s {
            return None;
        }
        if coords.iter().any(|&v| v >= self.p) {
            return None;
        }
        Some(self.from_coords(&coords))
    }
}

fn shift_reduce(row: &[u64], base: &[u64], p: u64) -> Vec<u64> {
    // multiply by t, then reduce the overflow coefficient with t^s = base.
    let s = row.len();
    let mut out = vec![0u64; s];
    for i in 0..s - 1 {
        out[i + 1] = row[i];
    }
    let top = row[s - 1];
    if top != 0 {
        for i in 0..s {
            out[i] = add_mod(out[i], mul_mod(top, base[i], p), p);
        }
    }
    out
}

// --- dense univariate polynomial helpers over F_p (for the modulus search) ---

fn poly_trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm || (r.len() == dm + 1 && r.len() > 1) {
        let dr = r.len() - 1;
        if dr < dm {
            break;
        }
        let f = mul_mod(r[dr], lead_inv, p);
        if f != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = sub_mod(r[idx], mul_mod(f, m[i], p), p);
            }
        }
        poly_trim(&mut r);
        if r.len() == 1 && r[0] == 0 {
            break;
        }
        if r.len() <= dm {
            break;
        }
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut conv = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                conv[i + j] = add_mod(conv[i + j], mul_mod(x, y, p), p);
            }
        }
    }
    let mut r = poly_rem(&conv, m, p);
    r.resize(m.len() - 1, 0);
    r
}

/// x^e mod m over F_p.
fn poly_powmod_x(mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let s = m.len() - 1;
    let mut base = vec![0u64; s.max(2)];
    if s == 1 {
        // x mod (linear) is a constant
        let r = poly_rem(&[0, 1], m, p);
        base = r;
        base.resize(1, 0);
    } else {
        base[1] = 1;
        base.resize(s, 0);
    }
    let mut acc = vec![0u64; s.max(1)];
    acc[0] = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
        poly_trim(&mut b);
    }
    a
}

fn is_irreducible(m: &[u64], p: u64) -> bool {
    let s = m.len() - 1;
    if s == 1 {
        return true;
    }
    // x^{p^s} ≡ x mod m
    let ps = (p as u128).pow(s as u32);
    let xps = poly_powmod_x(ps, m, p);
    let mut x_poly = vec![0u64; s];
    x_poly[1 % s] = 1;
    if s > 1 {
        x_poly = vec![0; s];
        x_poly[1] = 1;
    }
    if xps != x_poly {
        return false;
    }
    // gcd(x^{p^{s/q}} - x, m) = 1 for each prime q | s
    for q in prime_factors(s as u64) {
        let e = (p as u128).pow((s as u64 / q) as u32);
        let mut h = poly_powmod_x(e, m, p);
        // h - x
        if h.len() > 1 {
            h[1] = sub_mod(h[1], 1, p);
        } else {
            h.resize(2, 0);
            h[1] = sub_mod(0, 1, p);
        }
        let g = poly_gcd(&h, m, p);
        if !(g.len() == 1 && g[0] != 0) {
            return false;
        }
    }
    true
}

/// Lexicographically first monic irreducible of degree s over F_p, scanning
/// constant-coefficient-first integer codes upward.
fn first_irreducible(p: u64, s: usize) -> Vec<u64> {
    if s == 1 {
        // t itself: modulus t + 0
        return vec![0, 1];
    }
    let mut code: u128 = 0;
    let limit = (p as u128).saturating_pow(s as u32);
    while code < limit {
        let mut m = vec![0u64; s + 1];
        let mut n = code;
        for slot in m.iter_mut().take(s) {
            *slot = (n % p as u128) as u64;
            n /= p as u128;
        }
        m[s] = 1;
        if is_irreducible(&m, p) {
            return m;
        }
        code += 1;
    }
    unreachable!("an irreducible polynomial of every degree exists");
}
