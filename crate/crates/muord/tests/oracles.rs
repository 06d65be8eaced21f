//! Independent oracles for the symbolic matrix entries.
//!
//! The library computes every Hasse-Witt entry as a signed sum of binomial
//! products over capped compositions, without ever expanding the defining
//! product of linear factors.  These tests rebuild the same entries from
//! first principles -- expand U = prod_k (x - x_k)^{beta_k} with polynomial
//! arithmetic written locally in this file, and read coefficients off the
//! expansion -- in two modes: exact symbolic comparison whenever the term
//! count is small enough, and evaluation at random field points otherwise.
//! Binomials come from exact big-integer arithmetic, cross-checking the
//! prime-base-digit shortcut used inside the library.

use std::collections::BTreeMap;

use muord::arith;
use muord::field::{Fq, FqElem};
use muord::hw;
use muord::monodromy::CyclicDatum;
use muord::poly::SparsePoly;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

// --- reference binomials from big integers ---

fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for t in 0..k.min(n - k) {
        num *= n - t;
        den *= t + 1;
    }
    num / den
}

fn binom_mod(n: u64, k: u64, p: u64) -> u64 {
    (big_binomial(n, k) % BigUint::from(p)).to_u64().unwrap()
}

// --- local sparse polynomials in x, x_1, ..., x_r (slot 0 is x) ---

#[derive(Clone)]
struct RefPoly {
    p: u64,
    terms: BTreeMap<Vec<u32>, u64>,
}

impl RefPoly {
    fn one(p: u64, nvars: usize) -> RefPoly {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0u32; nvars], 1 % p);
        RefPoly { p, terms }
    }

    fn add_term(&mut self, exps: Vec<u32>, c: u64) {
        if c % self.p == 0 {
            return;
        }
        let entry = self.terms.entry(exps).or_insert(0);
        *entry = (*entry + c) % self.p;
        if *entry == 0 {
            let key = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .unwrap();
            self.terms.remove(&key);
        }
    }

    fn mul(&self, other: &RefPoly) -> RefPoly {
        let mut out = RefPoly { p: self.p, terms: BTreeMap::new() };
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.add_term(exps, arith::mul_mod(ca, cb, self.p));
            }
        }
        out
    }
}

/// (x - x_k)^beta expanded by the binomial theorem.
fn power_factor(p: u64, r: usize, k: usize, beta: u64) -> RefPoly {
    let mut out = RefPoly { p, terms: BTreeMap::new() };
    for n in 0..=beta {
        let mut c = binom_mod(beta, n, p);
        if n % 2 == 1 {
            c = (p - c) % p;
        }
        let mut exps = vec![0u32; r + 1];
        exps[0] = (beta - n) as u32;
        exps[k + 1] = n as u32;
        out.add_term(exps, c);
    }
    out
}

/// prod_k (x - x_k)^{mults_k} over the polynomial ring in x, x_1..x_r.
fn power_product(p: u64, r: usize, mults: &[u64]) -> RefPoly {
    let mut out = RefPoly::one(p, r + 1);
    for (k, &b) in mults.iter().enumerate() {
        if b > 0 {
            out = out.mul(&power_factor(p, r, k, b));
        }
    }
    out
}

/// Coefficient of x^deg, as a polynomial in x_1..x_r alone.
fn x_coefficient(u: &RefPoly, deg: u64) -> BTreeMap<Vec<u32>, u64> {
    u.terms
        .iter()
        .filter(|(e, _)| e[0] as u64 == deg)
        .map(|(e, &c)| (e[1..].to_vec(), c))
        .collect()
}

fn library_terms(poly: &SparsePoly) -> BTreeMap<Vec<u32>, u64> {
    poly.terms().map(|(e, &c)| (e.clone(), c)).collect()
}

fn map_add_scaled(
    p: u64,
    acc: &mut BTreeMap<Vec<u32>, u64>,
    a: &BTreeMap<Vec<u32>, u64>,
    b: &BTreeMap<Vec<u32>, u64>,
    scale: u64,
) {
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let exps: Vec<u32> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
            let c = arith::mul_mod(arith::mul_mod(ca, cb, p), scale, p);
            let entry = acc.entry(exps).or_insert(0);
            *entry = (*entry + c) % p;
        }
    }
    acc.retain(|_, v| *v != 0);
}

fn map_negate(p: u64, m: &BTreeMap<Vec<u32>, u64>) -> BTreeMap<Vec<u32>, u64> {
    m.iter().map(|(e, &c)| (e.clone(), (p - c) % p)).collect()
}

/// The extension entry (j', j) assembled directly from its definition:
/// -sum_k beta_k [x^{pj-1}](U/(x-x_k)) [x^{j'-1}](Z/(x-x_k)), with every
/// product expanded term by term.
fn reference_psi_prime(
    p: u64,
    betas: &[u64],
    jp: usize,
    j: usize,
) -> BTreeMap<Vec<u32>, u64> {
    let r = betas.len();
    let mut acc = BTreeMap::new();
    for k in 0..r {
        if betas[k] == 0 {
            continue;
        }
        let mut reduced = betas.to_vec();
        reduced[k] -= 1;
        let u_k = power_product(p, r, &reduced);
        let big = x_coefficient(&u_k, p * j as u64 - 1);
        let mut linear = vec![1u64; r];
        linear[k] = 0;
        let z_k = power_product(p, r, &linear);
        let small = x_coefficient(&z_k, jp as u64 - 1);
        map_add_scaled(p, &mut acc, &big, &small, betas[k] % p);
    }
    map_negate(p, &acc)
}

// --- evaluation-mode helpers: univariate polynomials over F_q ---

fn lcg(state: &mut u64) -> u64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    *state >> 33
}

fn random_elems(fq: &Fq, n: usize, state: &mut u64) -> Vec<FqElem> {
    (0..n).map(|_| fq.from_index(lcg(state) as u128 % fq.size())).collect()
}

/// Multiply an ascending-coefficient polynomial by (x - c).
fn mul_linear(fq: &Fq, u: &[FqElem], c: &FqElem) -> Vec<FqElem> {
    let mut out = vec![fq.zero(); u.len() + 1];
    for (d, ud) in u.iter().enumerate() {
        out[d + 1] = fq.add(&out[d + 1], ud);
        out[d] = fq.sub(&out[d], &fq.mul(c, ud));
    }
    out
}

fn numeric_product(fq: &Fq, points: &[FqElem], mults: &[u64]) -> Vec<FqElem> {
    let mut u = vec![fq.one()];
    for (k, &b) in mults.iter().enumerate() {
        for _ in 0..b {
            u = mul_linear(fq, &u, &points[k]);
        }
    }
    u
}

fn coeff_of(u: &[FqElem], fq: &Fq, d: i64) -> FqElem {
    if d < 0 || d as usize >= u.len() {
        fq.zero()
    } else {
        u[d as usize].clone()
    }
}

fn numeric_psi_prime(
    fq: &Fq,
    p: u64,
    betas: &[u64],
    points: &[FqElem],
    jp: usize,
    j: usize,
) -> FqElem {
    let r = betas.len();
    let mut acc = fq.zero();
    for k in 0..r {
        if betas[k] == 0 {
            continue;
        }
        let mut reduced = betas.to_vec();
        reduced[k] -= 1;
        let u_k = numeric_product(fq, points, &reduced);
        let big = coeff_of(&u_k, fq, p as i64 * j as i64 - 1);
        let mut linear = vec![1u64; r];
        linear[k] = 0;
        let z_k = numeric_product(fq, points, &linear);
        let small = coeff_of(&z_k, fq, jp as i64 - 1);
        let term = fq.scalar_mul(betas[k] % p, &fq.mul(&big, &small));
        acc = fq.add(&acc, &term);
    }
    fq.neg(&acc)
}

// --- case generation ---

struct Case {
    d: CyclicDatum,
    p: u64,
    i: u64,
    cols: usize,
    phi_rows: usize,
    psi_rows: usize,
    betas: Vec<u64>,
}

fn random_case(state: &mut u64) -> Option<Case> {
    let m = 2 + lcg(state) % 9;
    let r = 3 + (lcg(state) % 3) as usize;
    let mut a: Vec<u64> = (0..r - 1).map(|_| 1 + lcg(state) % (m - 1)).collect();
    let last = (m - a.iter().sum::<u64>() % m) % m;
    if last == 0 {
        return None;
    }
    a.push(last);
    let d = CyclicDatum::new(m, a);
    if !d.violations().is_empty() {
        return None;
    }
    let primes: Vec<u64> = (2..=50).filter(|&n| arith::is_prime(n) && n % m != 0 && arith::gcd(n, m) == 1).collect();
    if primes.is_empty() {
        return None;
    }
    let p = primes[(lcg(state) as usize) % primes.len()];
    let i = 1 + lcg(state) % (m - 1);
    let sig = d.signature();
    let cols = sig[((m - i) % m) as usize] as usize;
    if cols == 0 {
        return None;
    }
    let pi = (p % m) * i % m;
    let phi_rows = sig[((m - pi) % m) as usize] as usize;
    let psi_rows = sig[pi as usize] as usize;
    let betas: Vec<u64> = d.a.iter().map(|&ak| p * ((i * ak) % m) / m).collect();
    Some(Case { d, p, i, cols, phi_rows, psi_rows, betas })
}

const SYMBOLIC_TERM_BOUND: u128 = 60_000;

/// 200 randomized cases: each Hasse-Witt entry equals the corresponding
/// coefficient of the expanded product of linear factors, and each
/// extension entry equals its series-coefficient construction.  Small
/// cases compare full symbolic expansions; large ones compare values at
/// random points of a quadratic extension.
#[test]
fn entries_match_independent_expansion_oracle() {
    let mut state = 0x6f72_6163_6c65u64;
    let mut cases = 0;
    let mut symbolic_cases = 0;
    let mut eval_cases = 0;
    let mut psi_checked = 0;
    while cases < 200 {
        let Some(c) = random_case(&mut state) else { continue };
        cases += 1;
        let r = c.d.r();
        let work: u128 = c.betas.iter().map(|&b| (b + 1) as u128).product();
        let symbolic = work <= SYMBOLIC_TERM_BOUND;
        if symbolic {
            symbolic_cases += 1;
        } else {
            eval_cases += 1;
        }
        let check_psi = arith::gcd(c.i, c.d.m) == 1 && c.psi_rows > 0;
        let phi_pick = if c.phi_rows > 0 {
            Some((1 + (lcg(&mut state) as usize) % c.phi_rows, 1 + (lcg(&mut state) as usize) % c.cols))
        } else {
            None
        };
        let psi_pick = if check_psi {
            Some((1 + (lcg(&mut state) as usize) % c.psi_rows, 1 + (lcg(&mut state) as usize) % c.cols))
        } else {
            None
        };

        if symbolic {
            let u = power_product(c.p, r, &c.betas);
            if let Some((jp, j)) = phi_pick {
                let lib = hw::phi_entry(&c.d, c.p, c.i, jp, j).unwrap();
                let want = x_coefficient(&u, c.p * j as u64 - jp as u64);
                assert_eq!(
                    library_terms(&lib),
                    want,
                    "phi mismatch at {} p={} i={} entry=({},{})",
                    c.d, c.p, c.i, jp, j
                );
            }
            if let Some((jp, j)) = psi_pick {
                let lib = hw::psi_prime_entry(&c.d, c.p, c.i, jp, j).unwrap();
                let want = reference_psi_prime(c.p, &c.betas, jp, j);
                assert_eq!(
                    library_terms(&lib),
                    want,
                    "psi' mismatch at {} p={} i={} entry=({},{})",
                    c.d, c.p, c.i, jp, j
                );
                psi_checked += 1;
            }
        } else {
            let fq = Fq::new(c.p, 2).unwrap();
            for _ in 0..3 {
                let points = random_elems(&fq, r, &mut state);
                let u = numeric_product(&fq, &points, &c.betas);
                if let Some((jp, j)) = phi_pick {
                    let lib = hw::phi_entry(&c.d, c.p, c.i, jp, j).unwrap().eval(&fq, &points);
                    let want = coeff_of(&u, &fq, c.p as i64 * j as i64 - jp as i64);
                    assert_eq!(
                        lib, want,
                        "phi value mismatch at {} p={} i={} entry=({},{})",
                        c.d, c.p, c.i, jp, j
                    );
                }
                if let Some((jp, j)) = psi_pick {
                    let lib =
                        hw::psi_prime_entry(&c.d, c.p, c.i, jp, j).unwrap().eval(&fq, &points);
                    let want = numeric_psi_prime(&fq, c.p, &c.betas, &points, jp, j);
                    assert_eq!(
                        lib, want,
                        "psi' value mismatch at {} p={} i={} entry=({},{})",
                        c.d, c.p, c.i, jp, j
                    );
                }
            }
            if psi_pick.is_some() {
                psi_checked += 1;
            }
        }
    }
    assert!(symbolic_cases >= 20, "only {} symbolic-mode cases", symbolic_cases);
    assert!(eval_cases >= 20, "only {} evaluation-mode cases", eval_cases);
    assert!(psi_checked >= 40, "only {} extension entries checked", psi_checked);
}

/// The base-p digit shortcut for binomials agrees with exact big-integer
/// binomials, including far beyond the range where factorials fit in a
/// machine word.
#[test]
fn digit_binomials_match_big_integer_reference() {
    for &p in &[2u64, 3, 5, 7, 13, 31, 97] {
        for n in 0..=60 {
            for k in 0..=n {
                assert_eq!(
                    arith::lucas_binomial(n, k, p),
                    binom_mod(n, k, p),
                    "binom({}, {}) mod {}",
                    n, k, p
                );
            }
        }
        for &n in &[100u64, 151, 249, 300] {
            for &k in &[0u64, 1, 7, 50, 149, 300] {
                assert_eq!(
                    arith::lucas_binomial(n, k, p),
                    binom_mod(n, k, p),
                    "binom({}, {}) mod {}",
                    n, k, p
                );
            }
        }
    }
}

/// Full binomial rows agree with the big-integer reference across the
/// whole domain of the fast path (row index below the prime, as at every
/// call site where the caps are floors of fractions of p).
#[test]
fn binomial_rows_match_big_integer_reference() {
    for &p in &[2u64, 5, 13, 47] {
        for top in 0..p {
            let row = arith::binom_row(top, p);
            assert_eq!(row.len() as u64, top + 1);
            for (k, &c) in row.iter().enumerate() {
                assert_eq!(c, binom_mod(top, k as u64, p));
                assert_ne!(c, 0, "C({}, {}) mod {} with top < p is a unit", top, k, p);
            }
        }
    }
}

/// The worked cubic example: the sole Hasse-Witt entry of the genus-one
/// cover y^3 = (x-x_1)(x-x_2)(x-x_3) at p=7, evaluated at (0, 1, 3),
/// equals the x^6 coefficient of ((x-0)(x-1)(x-3))^4 over F_7.
#[test]
fn cubic_entry_value_matches_expanded_sextic_coefficient() {
    let d = CyclicDatum::new(3, vec![1, 1, 1]);
    let fq = Fq::new(7, 1).unwrap();
    let points: Vec<FqElem> = [0u64, 1, 3].iter().map(|&c| fq.from_u64(c)).collect();
    let entry = hw::phi_entry(&d, 7, 2, 1, 1).unwrap();
    let got = entry.eval(&fq, &points);
    let u = numeric_product(&fq, &points, &[4, 4, 4]);
    assert_eq!(got, u[6].clone());
    assert!(!fq.is_zero(&got), "this member is ordinary, so the entry is a unit");
}

/// Evaluating the symbolic entry then extracting nothing further agrees
/// with extracting the expansion coefficient first and evaluating it:
/// the two orders commute on every entry of a small block.
#[test]
fn evaluation_commutes_with_coefficient_extraction() {
    let d = CyclicDatum::new(5, vec![1, 1, 1, 2]);
    let p = 13;
    let fq = Fq::new(p, 1).unwrap();
    let mut state = 17u64;
    for i in 1..5u64 {
        let sig = d.signature();
        let cols = sig[((5 - i) % 5) as usize] as usize;
        let pi = (p % 5) * i % 5;
        let phi_rows = sig[((5 - pi) % 5) as usize] as usize;
        if cols == 0 {
            continue;
        }
        let betas: Vec<u64> = d.a.iter().map(|&ak| p * ((i * ak) % 5) / 5).collect();
        for _ in 0..5 {
            let points = random_elems(&fq, 4, &mut state);
            let u = numeric_product(&fq, &points, &betas);
            for jp in 1..=phi_rows {
                for j in 1..=cols {
                    let symbolic = hw::phi_entry(&d, p, i, jp, j).unwrap();
                    let evaluated = symbolic.eval(&fq, &points);
                    let extracted = coeff_of(&u, &fq, p as i64 * j as i64 - jp as i64);
                    assert_eq!(evaluated, extracted);
                }
            }
        }
    }
}

/// The single-coefficient extractors agree with full expansion on every
/// monomial of every entry, and report zero on absent monomials.
#[test]
fn single_coefficient_extractors_match_expanded_entries() {
    let suites: Vec<(u64, Vec<u64>)> = vec![
        (3, vec![1, 1, 1]),
        (5, vec![1, 1, 1, 2]),
        (6, vec![1, 1, 1, 3]),
        (7, vec![1, 1, 1, 2, 2]),
        (8, vec![1, 2, 2, 3]),
    ];
    for (m, a) in suites {
        let d = CyclicDatum::new(m, a);
        let mut found = 0;
        let mut p = m * (d.r() as u64 - 2) + 1;
        while found < 2 {
            while !(arith::is_prime(p) && arith::gcd(p, m) == 1) {
                p += 1;
            }
            found += 1;
            let sig = d.signature();
            for i in 1..m {
                if arith::gcd(i, m) != 1 {
                    continue;
                }
                let cols = sig[((m - i) % m) as usize] as usize;
                let pi = (p % m) * i % m;
                let phi_rows = sig[((m - pi) % m) as usize] as usize;
                let psi_rows = sig[pi as usize] as usize;
                if cols == 0 {
                    continue;
                }
                let r = d.r();
                for jp in 1..=phi_rows {
                    for j in 1..=cols {
                        let entry = hw::phi_entry(&d, p, i, jp, j).unwrap();
                        for (exps, &c) in entry.terms() {
                            assert_eq!(hw::phi_coeff(&d, p, i, jp, j, exps).unwrap(), c);
                        }
                        let absent = vec![0u32; r];
                        if entry.coeff(&absent) == 0 {
                            assert_eq!(hw::phi_coeff(&d, p, i, jp, j, &absent).unwrap(), 0);
                        }
                    }
                }
                for jp in 1..=psi_rows {
                    for j in 1..=cols {
                        let entry = hw::psi_prime_entry(&d, p, i, jp, j).unwrap();
                        for (exps, &c) in entry.terms() {
                            assert_eq!(hw::psi_prime_coeff(&d, p, i, jp, j, exps).unwrap(), c);
                        }
                        let absent = vec![0u32; r];
                        if entry.coeff(&absent) == 0 {
                            assert_eq!(
                                hw::psi_prime_coeff(&d, p, i, jp, j, &absent).unwrap(),
                                0
                            );
                        }
                    }
                }
            }
            p += 1;
        }
    }
}
