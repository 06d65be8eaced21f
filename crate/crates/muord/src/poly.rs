//! Sparse multivariate polynomials over the prime field F_p.
//!
//! Monomials are exponent vectors in lexicographic order with
//! x1 > x2 > ... > xr, realized by `Vec<u32>` ordering: the last key of the
//! term map is the lex-largest monomial. Coefficients are reduced
//! representatives in 0..p.

use crate::arith;
use crate::field::{Fq, FqElem};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparsePoly {
    p: u64,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, u64>,
}

impl SparsePoly {
    pub fn zero(p: u64, nvars: usize) -> SparsePoly {
        SparsePoly { p, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(p: u64, nvars: usize, c: i64) -> SparsePoly {
        let mut out = SparsePoly::zero(p, nvars);
        out.add_term(&vec![0; nvars], c.rem_euclid(p as i64) as u64);
        out
    }

    /// The single term c · x^exps.
    pub fn monomial(p: u64, exps: &[u32], c: u64) -> SparsePoly {
        let mut out = SparsePoly::zero(p, exps.len());
        out.add_term(exps, c % p);
        out
    }

    /// x_{var+1} − c (variables are 0-indexed internally, printed 1-indexed).
    pub fn var_minus_const(p: u64, nvars: usize, var: usize, c: u64) -> SparsePoly {
        let mut out = SparsePoly::zero(p, nvars);
        let mut e = vec![0u32; nvars];
        e[var] = 1;
        out.add_term(&e, 1);
        let mut z = vec![0u32; nvars];
        z.truncate(nvars);
        out.add_term(&z, (p - c % p) % p);
        out
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &u64)> {
        self.terms.iter()
    }

    /// Accumulate c into the coefficient of x^exps, dropping it if it cancels.
    pub fn add_term(&mut self, exps: &[u32], c: u64) {
        assert_eq!(exps.len(), self.nvars);
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert(0);
        *entry = (*entry + c) % self.p;
        if *entry == 0 {
            self.terms.remove(exps);
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        *self.terms.get(exps).unwrap_or(&0)
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        assert_eq!((self.p, self.nvars), (other.p, other.nvars));
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e, *c);
        }
        out
    }

    pub fn neg(&self) -> SparsePoly {
        let mut out = SparsePoly::zero(self.p, self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e, self.p - c);
        }
        out
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> SparsePoly {
        let mut out = SparsePoly::zero(self.p, self.nvars);
        for (e, k) in &self.terms {
            out.add_term(e, arith::mul_mod(*k, c % self.p, self.p));
        }
        out
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        assert_eq!((self.p, self.nvars), (other.p, other.nvars));
        let mut out = SparsePoly::zero(self.p, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(&e, arith::mul_mod(*ca, *cb, self.p));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.p, self.nvars, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Evaluate at a point with coordinates in F_{p^s}; a ring homomorphism.
    /// Per-variable power tables keep repeated exponents cheap.
    pub fn eval(&self, fq: &Fq, point: &[FqElem]) -> FqElem {
        assert_eq!(point.len(), self.nvars);
        assert_eq!(fq.p(), self.p);
        let mut maxes = vec![0u32; self.nvars];
        for e in self.terms.keys() {
            for (m, x) in maxes.iter_mut().zip(e) {
                *m = (*m).max(*x);
            }
        }
        let tables: Vec<Vec<FqElem>> = (0..self.nvars)
            .map(|v| {
                let mut t = Vec::with_capacity(maxes[v] as usize + 1);
                t.push(fq.one());
                for _ in 0..maxes[v] {
                    let last = t.last().unwrap().clone();
                    t.push(fq.mul(&last, &point[v]));
                }
                t
            })
            .collect();
        let mut acc = fq.zero();
        for (e, c) in &self.terms {
            let mut term = fq.from_u64(*c);
            for (v, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = fq.mul(&term, &tables[v][exp as usize]);
                }
            }
            acc = fq.add(&acc, &term);
        }
        acc
    }

    /// Lex-largest term (exponents, coefficient); None for the zero polynomial.
    pub fn max_monomial(&self) -> Option<(Vec<u32>, u64)> {
        self.terms.iter().next_back().map(|(e, c)| (e.clone(), *c))
    }

    /// Common total degree of all terms, if the polynomial is homogeneous
    /// (the zero polynomial counts as homogeneous of any degree — returns 0).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for e in self.terms.keys() {
            let d: u32 = e.iter().sum();
            match deg {
                None => deg = Some(d),
                Some(x) if x == d => {}
                _ => return None,
            }
        }
        Some(deg.unwrap_or(0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }
}

impl fmt::Display for SparsePoly {
    /// Plain-text export: terms lex-descending, each `c * x1^e1 x2^e2 ...`
    /// (zero exponents omitted), joined by ` + `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(v, &x)| format!("x{}^{}", v + 1, x))
                .collect();
            if vars.is_empty() {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{} * {}", c, vars.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Visit every composition (n_1, ..., n_r) with 0 ≤ n_k ≤ caps[k] and
/// Σ n_k = total. When `total` exceeds half of Σ caps the complement side
/// (Σ caps − total) is enumerated instead and mapped back through
/// n_k ↦ caps[k] − n_k, so the work is always the smaller of the two.
pub fn for_each_capped_composition(caps: &[u32], total: u64, mut visit: impl FnMut(&[u32])) {
    let sum: u64 = caps.iter().map(|&c| c as u64).sum();
    if total > sum {
        return;
    }
    let (target, complement) = if 2 * total > sum { (sum - total, true) } else { (total, false) };
    // suffix_sums[k] = caps[k] + ... + caps[r-1]
    let mut suffix = vec![0u64; caps.len() + 1];
    for k in (0..caps.len()).rev() {
        suffix[k] = suffix[k + 1] + caps[k] as u64;
    }
    let mut cur = vec![0u32; caps.len()];
    fn rec(
        caps: &[u32],
        suffix: &[u64],
        k: usize,
        remaining: u64,
        cur: &mut Vec<u32>,
        complement: bool,
        visit: &mut impl FnMut(&[u32]),
    ) {
        if k == caps.len() {
            debug_assert_eq!(remaining, 0);
            if complement {
                let flipped: Vec<u32> = caps.iter().zip(cur.iter()).map(|(c, n)| c - n).collect();
                visit(&flipped);
            } else {
                visit(cur);
            }
            return;
        }
        // n_k must leave a reachable remainder for the suffix
        let hi = (caps[k] as u64).min(remaining);
        let lo = remaining.saturating_sub(suffix[k + 1]);
        for n in lo..=hi {
            cur[k] = n as u32;
            rec(caps, suffix, k + 1, remaining - n, cur, complement, visit);
        }
        cur[k] = 0;
    }
    rec(caps, &suffix, 0, target, &mut cur, complement, &mut visit);
}

/// Number of capped compositions (counted through the same enumerator).
pub fn count_capped_compositions(caps: &[u32], total: u64) -> u64 {
    let mut n = 0u64;
    for_each_capped_composition(caps, total, |_| n += 1);
    n
}
