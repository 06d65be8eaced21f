//! Symbolic entries of the Hasse-Witt matrix of a superelliptic family and of
//! its extension to the whole cohomology, as polynomials in the branch points,
//! together with the floor-function combinatorics that locate their maximal
//! monomials, a closed-form nonvanishing certificate for the corner entry of
//! the extension, and the monomial-separation check for Frobenius chains.
//!
//! Throughout, the family is y^m = prod_k (x - x_k)^{a_k} in characteristic
//! p with p coprime to m.  For a character index i the caps are
//! beta_k = floor(p * frac(i a_k / m)), and s_i = sum_k beta_k.  The entry
//! in row j', column j of the Hasse-Witt block of i is
//!
//!   (-1)^N sum_{n_1+...+n_r = N} prod_k binom(beta_k, n_k) x^n,
//!       N = s_i - (jp - j'),
//!
//! and the extension block is  -sum_k beta_k r_{i,j,k} q_{r-j',k}  where
//! r_{i,j,k} is the same kind of sum with the k-th cap lowered by one and
//! N = s_i - jp, and q_{r-j',k} is the x^{j'-1} coefficient of
//! prod_{l != k} (x - x_l).  Both entries are homogeneous.

use crate::arith;
use crate::monodromy::{CharacterSystem, CyclicDatum, MonodromyError};
use crate::poly::{for_each_capped_composition, SparsePoly};
use std::collections::{BTreeMap, BTreeSet};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum HwError {
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("p = {p} is not coprime to m = {m}")]
    BadPrime { p: u64, m: u64 },
    #[error("character {i} has gcd({i}, {m}) = {g} > 1; its extension block lives on the quotient datum")]
    NonNewCharacter { i: u64, m: u64, g: u64 },
    #[error("declined: {0}")]
    Declined(String),
    #[error("invalid datum: {0}")]
    Datum(String),
}

impl From<MonodromyError> for HwError {
    fn from(e: MonodromyError) -> HwError {
        HwError::Datum(e.to_string())
    }
}

/// Cap combinatorics of one character index: beta_k = floor(p frac(i a_k/m)),
/// s = sum beta_k, and the greedy decomposition of 0 <= N < s that fills the
/// slots 1, 2, ... to their caps and leaves the remainder in the first
/// unfilled slot.
#[derive(Clone, Debug)]
pub struct Frame {
    pub p: u64,
    pub i: u64,
    pub betas: Vec<u64>,
    pub s: u64,
}

impl Frame {
    pub fn new(d: &CyclicDatum, p: u64, i: u64) -> Result<Frame, HwError> {
        if arith::gcd(p, d.m) != 1 {
            return Err(HwError::BadPrime { p, m: d.m });
        }
        if i == 0 || i >= d.m {
            return Err(HwError::BadIndex(format!("character index {} not in 1..{}", i, d.m)));
        }
        if p >= 1 << 31 {
            return Err(HwError::Declined("prime too large for symbolic entries".to_string()));
        }
        let betas: Vec<u64> = d.a.iter().map(|&ak| p * ((i * ak) % d.m) / d.m).collect();
        let s = betas.iter().sum();
        Ok(Frame { p, i, betas, s })
    }

    /// 1-based index of the first slot whose running cap total exceeds n.
    pub fn pivot_slot(&self, n: u64) -> Result<usize, HwError> {
        if n >= self.s {
            return Err(HwError::BadIndex(format!("n = {} not below s = {}", n, self.s)));
        }
        let mut acc = 0;
        for (k, &b) in self.betas.iter().enumerate() {
            acc += b;
            if acc > n {
                return Ok(k + 1);
            }
        }
        unreachable!("running total reaches s > n");
    }

    /// What remains of n after filling slots 1..pivot-1 to their caps.
    pub fn pivot_remainder(&self, n: u64) -> Result<u64, HwError> {
        let c = self.pivot_slot(n)?;
        Ok(n - self.betas[..c - 1].iter().sum::<u64>())
    }

    /// Exponent vector (beta_1, ..., beta_{c-1}, remainder, 0, ..., 0): the
    /// lexicographically largest exponent vector of total n under the caps.
    pub fn greedy_exponents(&self, n: u64) -> Result<Vec<u32>, HwError> {
        let c = self.pivot_slot(n)?;
        let rem = n - self.betas[..c - 1].iter().sum::<u64>();
        let mut out = vec![0u32; self.betas.len()];
        for k in 0..c - 1 {
            out[k] = self.betas[k] as u32;
        }
        out[c - 1] = rem as u32;
        Ok(out)
    }
}

fn sign_of(n: u64, p: u64) -> u64 {
    if n % 2 == 0 {
        1 % p
    } else {
        p - 1
    }
}

/// sign * sum over capped compositions of `total` of prod_k binom(cap_k, n_k) x^n.
fn capped_binomial_sum(p: u64, caps: &[u64], total: u64, sign: u64) -> SparsePoly {
    let r = caps.len();
    let caps32: Vec<u32> = caps.iter().map(|&c| c as u32).collect();
    let rows: Vec<Vec<u64>> = caps.iter().map(|&c| arith::binom_row(c, p)).collect();
    let mut out = SparsePoly::zero(p, r);
    for_each_capped_composition(&caps32, total, |n| {
        let mut c = sign;
        for k in 0..r {
            c = arith::mul_mod(c, rows[k][n[k] as usize], p);
        }
        if c != 0 {
            out.add_term(n, c);
        }
    });
    out
}

/// x^{j'-1} coefficient of prod_{l != k} (x - x_l), as a polynomial in the
/// branch points: (-1)^{r-j'} times the elementary symmetric polynomial of
/// degree r-j' in the variables other than x_k.
fn q_coefficient(p: u64, r: usize, k: usize, jp: usize) -> SparsePoly {
    let deg = r - jp;
    let sign = sign_of(deg as u64, p);
    let vars: Vec<usize> = (0..r).filter(|&l| l != k).collect();
    let mut out = SparsePoly::zero(p, r);
    if deg > vars.len() {
        return out;
    }
    let caps: Vec<u32> = vec![1; vars.len()];
    for_each_capped_composition(&caps, deg as u64, |sel| {
        let mut exps = vec![0u32; r];
        for (t, &s) in sel.iter().enumerate() {
            exps[vars[t]] = s;
        }
        out.add_term(&exps, sign);
    });
    out
}

/// Column dimension of both blocks of character i (the block is empty when
/// this is zero), and the row dimensions of the Hasse-Witt block and of the
/// extension block.
fn block_dims(d: &CyclicDatum, p: u64, i: u64) -> (usize, usize, usize) {
    let f = d.signature();
    let m = d.m;
    let pi = (p % m) * i % m;
    let cols = f[(m - i) as usize] as usize;
    let phi_rows = f[((m - pi) % m) as usize] as usize;
    let psi_rows = f[pi as usize] as usize;
    (cols, phi_rows, psi_rows)
}

fn check_block_index(what: &str, jp: usize, rows: usize, j: usize, cols: usize) -> Result<(), HwError> {
    if j == 0 || j > cols || jp == 0 || jp > rows {
        return Err(HwError::BadIndex(format!(
            "{} entry ({}, {}) outside block of {} rows x {} cols",
            what, jp, j, rows, cols
        )));
    }
    Ok(())
}

fn phi_entry_with(fr: &Frame, jp: usize, j: usize) -> SparsePoly {
    let r = fr.betas.len();
    let n = fr.s as i64 - (fr.p as i64 * j as i64 - jp as i64);
    if n < 0 {
        return SparsePoly::zero(fr.p, r);
    }
    capped_binomial_sum(fr.p, &fr.betas, n as u64, sign_of(n as u64, fr.p))
}

fn psi_prime_entry_with(fr: &Frame, jp: usize, j: usize) -> SparsePoly {
    let p = fr.p;
    let r = fr.betas.len();
    let n = fr.s as i64 - p as i64 * j as i64;
    let mut acc = SparsePoly::zero(p, r);
    if n >= 0 {
        for k in 0..r {
            if fr.betas[k] == 0 {
                continue;
            }
            let mut caps = fr.betas.clone();
            caps[k] -= 1;
            let rk = capped_binomial_sum(p, &caps, n as u64, sign_of(n as u64, p));
            let qk = q_coefficient(p, r, k, jp);
            acc = acc.add(&rk.mul(&qk).scale(fr.betas[k] % p));
        }
    }
    acc.neg()
}

/// Entry (j', j) of the Hasse-Witt block of character i: the polynomial whose
/// value at the branch points is the corresponding matrix coefficient of the
/// p-power map on cohomology.  Zero when the composition total is negative.
pub fn phi_entry(d: &CyclicDatum, p: u64, i: u64, jp: usize, j: usize) -> Result<SparsePoly, HwError> {
    let fr = Frame::new(d, p, i)?;
    let (cols, phi_rows, _) = block_dims(d, p, i);
    check_block_index("Hasse-Witt", jp, phi_rows, j, cols)?;
    Ok(phi_entry_with(&fr, jp, j))
}

/// Entry (j', j) of the extension block of character i; only characters
/// coprime to m carry this block (others belong to a quotient datum).
pub fn psi_prime_entry(
    d: &CyclicDatum,
    p: u64,
    i: u64,
    jp: usize,
    j: usize,
) -> Result<SparsePoly, HwError> {
    let fr = Frame::new(d, p, i)?;
    let g = arith::gcd(i, d.m);
    if g != 1 {
        return Err(HwError::NonNewCharacter { i, m: d.m, g });
    }
    let (cols, _, psi_rows) = block_dims(d, p, i);
    check_block_index("extension", jp, psi_rows, j, cols)?;
    Ok(psi_prime_entry_with(&fr, jp, j))
}

/// Coefficient of the monomial with the given exponents in the Hasse-Witt
/// entry (j', j), computed from a single binomial product without expanding
/// the entry.
pub fn phi_coeff(
    d: &CyclicDatum,
    p: u64,
    i: u64,
    jp: usize,
    j: usize,
    exps: &[u32],
) -> Result<u64, HwError> {
    let fr = Frame::new(d, p, i)?;
    let (cols, phi_rows, _) = block_dims(d, p, i);
    check_block_index("Hasse-Witt", jp, phi_rows, j, cols)?;
    let r = fr.betas.len();
    if exps.len() != r {
        return Err(HwError::BadIndex(format!("expected {} exponents, got {}", r, exps.len())));
    }
    let n = fr.s as i64 - (p as i64 * j as i64 - jp as i64);
    if n < 0 || exps.iter().map(|&e| e as i64).sum::<i64>() != n {
        return Ok(0);
    }
    let mut c = sign_of(n as u64, p);
    for k in 0..r {
        if (exps[k] as u64) > fr.betas[k] {
            return Ok(0);
        }
        c = arith::mul_mod(c, arith::lucas_binomial(fr.betas[k], exps[k] as u64, p), p);
    }
    Ok(c)
}

/// Coefficient of the monomial with the given exponents in the extension
/// entry (j', j), computed by matching each squarefree factor of the
/// x^{j'-1} coefficient against a single capped composition.
pub fn psi_prime_coeff(
    d: &CyclicDatum,
    p: u64,
    i: u64,
    jp: usize,
    j: usize,
    exps: &[u32],
) -> Result<u64, HwError> {
    let fr = Frame::new(d, p, i)?;
    let g = arith::gcd(i, d.m);
    if g != 1 {
        return Err(HwError::NonNewCharacter { i, m: d.m, g });
    }
    let (cols, _, psi_rows) = block_dims(d, p, i);
    check_block_index("extension", jp, psi_rows, j, cols)?;
    let r = fr.betas.len();
    if exps.len() != r {
        return Err(HwError::BadIndex(format!("expected {} exponents, got {}", r, exps.len())));
    }
    let n = fr.s as i64 - p as i64 * j as i64;
    if n < 0 {
        return Ok(0);
    }
    let n = n as u64;
    let deg = r - jp;
    let pair_sign = arith::mul_mod(sign_of(n, p), sign_of(deg as u64, p), p);
    let mut total = 0u64;
    for k in 0..r {
        if fr.betas[k] == 0 {
            continue;
        }
        let vars: Vec<usize> = (0..r).filter(|&l| l != k).collect();
        let caps: Vec<u32> = vec![1; vars.len()];
        let mut k_total = 0u64;
        for_each_capped_composition(&caps, deg as u64, |sel| {
            let mut term = 1u64;
            let mut rem_sum = 0i64;
            for l in 0..r {
                let pick = vars.iter().position(|&v| v == l).map_or(0, |t| sel[t]);
                let e = exps[l] as i64 - pick as i64;
                let cap = fr.betas[l] - if l == k { 1 } else { 0 };
                if e < 0 || e as u64 > cap {
                    term = 0;
                    break;
                }
                rem_sum += e;
                term = arith::mul_mod(term, arith::lucas_binomial(cap, e as u64, p), p);
            }
            if term != 0 && rem_sum == n as i64 {
                k_total = arith::add_mod(k_total, term, p);
            }
        });
        total = arith::add_mod(
            total,
            arith::mul_mod(fr.betas[k] % p, arith::mul_mod(pair_sign, k_total, p), p),
            p,
        );
    }
    Ok(arith::sub_mod(0, total, p))
}

/// True when the extension block can stand in for the partially defined dual
/// map without adjustment: the target column space is zero, or the kernel of
/// the Hasse-Witt block is everything.
pub fn valid_extension_applicable(cs: &CharacterSystem, i: usize) -> bool {
    let istar = cs.conj[i];
    let g = cs.f[i] + cs.f[istar];
    cs.f[cs.mul_p[istar]] == 0 || cs.f[istar] == g
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateOutcome {
    /// Coefficient of x_1 ... x_{r-1} times the greedy monomial of s - p in
    /// the (1,1) extension entry; nonzero mod p and equal to the closed form
    /// -(-1)^{r-1+s-p} binom(beta_c, remainder) beta_r.
    Certified { residue: u64 },
    Declined { reason: String },
}

/// Certifies that the (1,1) extension entry of character i is not
/// identically zero, by extracting one explicit coefficient and checking it
/// against its closed form.  Declines outside the guard p > m(r-2) or when
/// the (1,1) entry does not exist.
pub fn psi11_certificate(d: &CyclicDatum, p: u64, i: u64) -> Result<CertificateOutcome, HwError> {
    let m = d.m;
    let r = d.r();
    let fr = Frame::new(d, p, i)?;
    let g = arith::gcd(i, m);
    if g != 1 {
        return Err(HwError::NonNewCharacter { i, m, g });
    }
    if p <= m * (r as u64 - 2) {
        return Ok(CertificateOutcome::Declined {
            reason: format!("requires p > m(r-2) = {}", m * (r as u64 - 2)),
        });
    }
    let (cols, _, psi_rows) = block_dims(d, p, i);
    if cols == 0 || psi_rows == 0 {
        return Ok(CertificateOutcome::Declined {
            reason: format!("the (1,1) entry does not exist: block is {} x {}", psi_rows, cols),
        });
    }
    assert!(fr.s > p, "caps must exceed p when the block is nonempty and p > m(r-2)");
    let n = fr.s - p;
    let c = fr.pivot_slot(n)?;
    let rem = fr.pivot_remainder(n)?;
    let mut target = fr.greedy_exponents(n)?;
    for e in target.iter_mut().take(r - 1) {
        *e += 1;
    }
    let extracted = psi_prime_coeff(d, p, i, 1, 1, &target)?;
    let closed = arith::sub_mod(
        0,
        arith::mul_mod(
            sign_of(r as u64 - 1 + n, p),
            arith::mul_mod(
                arith::lucas_binomial(fr.betas[c - 1], rem, p),
                fr.betas[r - 1] % p,
                p,
            ),
            p,
        ),
        p,
    );
    assert_eq!(
        extracted, closed,
        "extracted corner coefficient disagrees with its closed form: implementation bug"
    );
    assert_ne!(extracted, 0, "corner coefficient must be a unit mod p under the guard");
    Ok(CertificateOutcome::Certified { residue: extracted })
}

/// One character block of the full symbolic matrix pair.
#[derive(Clone, Debug)]
pub struct HwBlock {
    pub i: u64,
    /// Rows f(tau*_{pi}) x cols f(tau*_i).
    pub phi: Vec<Vec<SparsePoly>>,
    /// Rows f(tau_{pi}) x cols f(tau*_i); None when gcd(i, m) > 1, since
    /// that block belongs to the quotient datum.
    pub psi_prime: Option<Vec<Vec<SparsePoly>>>,
}

/// The symbolic Hasse-Witt matrix and its extension, block by character.
/// Characters whose column space is zero are omitted.
#[derive(Clone, Debug)]
pub struct HWSymbolic {
    pub p: u64,
    pub m: u64,
    pub r: usize,
    pub blocks: BTreeMap<u64, HwBlock>,
}

pub fn hw_symbolic(d: &CyclicDatum, p: u64) -> Result<HWSymbolic, HwError> {
    d.validate()?;
    if arith::gcd(p, d.m) != 1 {
        return Err(HwError::BadPrime { p, m: d.m });
    }
    let mut blocks = BTreeMap::new();
    for i in 1..d.m {
        let (cols, phi_rows, psi_rows) = block_dims(d, p, i);
        if cols == 0 {
            continue;
        }
        let fr = Frame::new(d, p, i)?;
        let phi: Vec<Vec<SparsePoly>> = (1..=phi_rows)
            .map(|jp| (1..=cols).map(|j| phi_entry_with(&fr, jp, j)).collect())
            .collect();
        let psi_prime = if arith::gcd(i, d.m) == 1 {
            Some(
                (1..=psi_rows)
                    .map(|jp| (1..=cols).map(|j| psi_prime_entry_with(&fr, jp, j)).collect())
                    .collect(),
            )
        } else {
            None
        };
        blocks.insert(i, HwBlock { i, phi, psi_prime });
    }
    Ok(HWSymbolic { p, m: d.m, r: d.r(), blocks })
}

/// Which closed-form family a chain block is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    HasseWitt,
    Extension,
}

/// One arrow of the Frobenius chain, reduced to the character whose
/// closed-form block realizes it (the conjugate character when the arrow
/// acts on dual spaces) and the max monomial of each of its entries.
#[derive(Clone, Debug)]
pub struct ChainBlock {
    pub kind: ChainKind,
    pub char_i: u64,
    pub rows: usize,
    pub cols: usize,
    /// max_exps[jp-1][j-1] is the exponent vector of the maximal monomial of
    /// entry (jp, j), or None for an identically zero entry.
    pub max_exps: Vec<Vec<Option<Vec<u32>>>>,
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    /// Character anchoring the chain: smallest in the orbit with dual
    /// signature value 1.
    pub chain_char: usize,
    pub length: usize,
    /// Whether the orbit's dual-signature values contain both 0 and 1, the
    /// situation in which a separated chain certifies a maximal word.
    pub theorem_applicable: bool,
    pub blocks: Vec<ChainBlock>,
    pub total_paths: u64,
    pub zero_paths: u64,
    /// Merged exponent vectors sum_i p^{l-1-i} exp_i, one per nonzero path.
    pub tees: Vec<Vec<u128>>,
    pub vacuous: bool,
    /// All nonzero merged exponent vectors are pairwise distinct.
    pub separated: bool,
    /// The path picking index 1 in every block avoids zero entries.
    pub all_ones_nonzero: bool,
    /// Every entry's monomials respect the per-variable cap (cap + 1 for
    /// extension blocks), which stays below p.
    pub valuations_ok: bool,
}

/// Checks that the maximal monomials of all entry paths through the chain of
/// blocks around the given new orbit stay pairwise distinct after merging
/// with p-power weights.  Distinctness means no two paths can cancel each
/// other's leading term, so the chain composite is generically nonzero.
pub fn monomial_separation(
    d: &CyclicDatum,
    p: u64,
    orbit: &[usize],
) -> Result<SeparationReport, HwError> {
    let m = d.m;
    let r = d.r();
    if r < 3 {
        return Err(HwError::Datum("need at least 3 branch points".to_string()));
    }
    if p <= m * (r as u64 - 2) {
        return Err(HwError::Declined(format!(
            "monomial bookkeeping requires p > m(r-2) = {}",
            m * (r as u64 - 2)
        )));
    }
    let cs = CharacterSystem::from_cyclic(d, p)?;
    if orbit.is_empty() {
        return Err(HwError::BadIndex("empty orbit".to_string()));
    }
    for &t in orbit {
        if t == 0 || t >= m as usize {
            return Err(HwError::BadIndex(format!("character {} not in 1..{}", t, m)));
        }
    }
    if arith::gcd(orbit[0] as u64, m) != 1 {
        return Err(HwError::Declined(
            "chain blocks are defined on new orbits; pass the quotient datum instead".to_string(),
        ));
    }
    let profile = cs.orbit_profile(orbit);
    let anchor = profile
        .f_values
        .iter()
        .position(|&v| v == 1)
        .map(|pos| profile.representatives[pos]);
    let Some(tau) = anchor else {
        return Err(HwError::Declined(
            "no character with dual signature value 1 in this orbit".to_string(),
        ));
    };
    let theorem_applicable = profile.f_values.contains(&0) && profile.f_values.contains(&1);
    let l = orbit.len();
    let a_of = |t: usize| -> usize {
        let fstar = cs.f[cs.conj[t]];
        if fstar >= 1 { fstar as usize } else { cs.f[t] as usize }
    };

    let mut dims = vec![a_of(tau)];
    let mut arrows: Vec<(ChainKind, u64)> = Vec::new();
    let mut cur = tau;
    for _ in 0..l {
        let nxt = cs.mul_p[cur];
        let fi = cs.f[cs.conj[cur]] >= 1;
        let fip = cs.f[cs.conj[nxt]] >= 1;
        let bchar = if fi { cur } else { cs.conj[cur] } as u64;
        let kind = if fi == fip { ChainKind::HasseWitt } else { ChainKind::Extension };
        arrows.push((kind, bchar));
        cur = nxt;
        dims.push(a_of(cur));
    }
    assert_eq!(cur, tau, "chain must return to its anchor after one orbit cycle");
    assert_eq!(dims[0], 1, "anchor has dual signature 1");

    if dims.iter().any(|&a| a == 0) {
        return Ok(SeparationReport {
            chain_char: tau,
            length: l,
            theorem_applicable,
            blocks: Vec::new(),
            total_paths: 0,
            zero_paths: 0,
            tees: Vec::new(),
            vacuous: true,
            separated: true,
            all_ones_nonzero: false,
            valuations_ok: true,
        });
    }

    let mut blocks = Vec::new();
    let mut valuations_ok = true;
    for (idx, &(kind, bchar)) in arrows.iter().enumerate() {
        let rows = dims[idx + 1];
        let cols = dims[idx];
        let fr = Frame::new(d, p, bchar)?;
        let extra = if kind == ChainKind::Extension { 1 } else { 0 };
        let mut max_exps = Vec::new();
        for jp in 1..=rows {
            let mut row = Vec::new();
            for j in 1..=cols {
                let entry = match kind {
                    ChainKind::HasseWitt => phi_entry_with(&fr, jp, j),
                    ChainKind::Extension => psi_prime_entry_with(&fr, jp, j),
                };
                for (exps, _) in entry.terms() {
                    for (k, &e) in exps.iter().enumerate() {
                        let bound = fr.betas[k] + extra;
                        if e as u64 > bound || bound > p - 1 {
                            valuations_ok = false;
                        }
                    }
                }
                row.push(entry.max_monomial().map(|(e, _)| e));
            }
            max_exps.push(row);
        }
        blocks.push(ChainBlock { kind, char_i: bchar, rows, cols, max_exps });
    }

    // p-power weights, highest power on the first block
    let mut weights = vec![1u128; l];
    for i in (0..l - 1).rev() {
        weights[i] = weights[i + 1].checked_mul(p as u128).ok_or_else(|| {
            HwError::Declined("orbit too long: merged exponents overflow".to_string())
        })?;
    }

    let total_paths: u64 = dims[1..l].iter().map(|&a| a as u64).product();
    let mut zero_paths = 0u64;
    let mut tees: Vec<Vec<u128>> = Vec::new();
    let mut seen: BTreeSet<Vec<u128>> = BTreeSet::new();
    let mut separated = true;
    let mut all_ones_nonzero = true;

    // iterate over the free indices J(1), ..., J(l-1); J(0) = J(l) = 1
    let mut j_free = vec![1usize; l.saturating_sub(1)];
    loop {
        let j_at = |i: usize| -> usize {
            if i == 0 || i == l { 1 } else { j_free[i - 1] }
        };
        let mut merged = vec![0u128; r];
        let mut dead = false;
        for i in 0..l {
            match &blocks[i].max_exps[j_at(i + 1) - 1][j_at(i) - 1] {
                None => {
                    dead = true;
                    break;
                }
                Some(exps) => {
                    for (k, &e) in exps.iter().enumerate() {
                        merged[k] += weights[i] * e as u128;
                    }
                }
            }
        }
        if dead {
            zero_paths += 1;
            if (0..l).all(|i| j_at(i) == 1) {
                all_ones_nonzero = false;
            }
        } else {
            if !seen.insert(merged.clone()) {
                separated = false;
            }
            tees.push(merged);
        }
        // next path
        let mut pos = 0;
        loop {
            if pos == j_free.len() {
                break;
            }
            if j_free[pos] < dims[pos + 1] {
                j_free[pos] += 1;
                break;
            }
            j_free[pos] = 1;
            pos += 1;
        }
        if pos == j_free.len() {
            break;
        }
    }

    Ok(SeparationReport {
        chain_char: tau,
        length: l,
        theorem_applicable,
        blocks,
        total_paths,
        zero_paths,
        tees,
        vacuous: false,
        separated,
        all_ones_nonzero,
        valuations_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(m: u64, a: &[u64]) -> CyclicDatum {
        CyclicDatum::new(m, a.to_vec())
    }

    #[test]
    fn frame_combinatorics_match_hand_values() {
        let d = datum(3, &[1, 1, 1]);
        let fr = Frame::new(&d, 7, 2).unwrap();
        assert_eq!(fr.betas, vec![4, 4, 4]);
        assert_eq!(fr.s, 12);
        assert_eq!(fr.greedy_exponents(5).unwrap(), vec![4, 1, 0]);
        assert_eq!(fr.pivot_slot(5).unwrap(), 2);
        assert_eq!(fr.pivot_remainder(5).unwrap(), 1);
        assert_eq!(fr.greedy_exponents(0).unwrap(), vec![0, 0, 0]);
        assert_eq!(fr.pivot_slot(0).unwrap(), 1);
        for n in 0..fr.s {
            let c = fr.pivot_slot(n).unwrap();
            let rem = fr.pivot_remainder(n).unwrap();
            assert!(1 <= c && c <= 3);
            assert!(rem < fr.betas[c - 1]);
            let e = fr.greedy_exponents(n).unwrap();
            assert_eq!(e.iter().map(|&x| x as u64).sum::<u64>(), n);
        }
        // with one column of the block defined, the remainder congruence
        // rem(s - p) = sum of caps from the pivot onward holds mod p
        let n = fr.s - 7;
        let c = fr.pivot_slot(n).unwrap();
        let tail: u64 = fr.betas[c - 1..].iter().sum();
        assert_eq!(fr.pivot_remainder(n).unwrap() % 7, tail % 7);
        assert_eq!(fr.pivot_slot(n).unwrap(), 2);
        // the pivot never lands in the last slot for column totals
        for (m, a, p) in [(3u64, vec![1u64, 1, 1], 7u64), (5, vec![1, 1, 1, 2], 13), (7, vec![1, 2, 2, 2], 29)] {
            let d = datum(m, &a);
            for i in 1..m {
                if arith::gcd(i, m) != 1 {
                    continue;
                }
                let fr = Frame::new(&d, p, i).unwrap();
                let mut j = 1;
                while p * j <= fr.s {
                    if fr.s - p * j < fr.s {
                        assert_ne!(fr.pivot_slot(fr.s - p * j).unwrap(), a.len());
                    }
                    j += 1;
                }
            }
        }
    }

    #[test]
    fn frame_rejects_bad_inputs() {
        let d = datum(3, &[1, 1, 1]);
        assert!(matches!(Frame::new(&d, 3, 1), Err(HwError::BadPrime { .. })));
        assert!(matches!(Frame::new(&d, 7, 0), Err(HwError::BadIndex(_))));
        assert!(matches!(Frame::new(&d, 7, 3), Err(HwError::BadIndex(_))));
        let fr = Frame::new(&d, 7, 2).unwrap();
        assert!(matches!(fr.pivot_slot(12), Err(HwError::BadIndex(_))));
    }

    #[test]
    fn hasse_witt_entry_example() {
        // genus-one family with three branch points: the block of the sole
        // character with a one-dimensional column space
        let d = datum(3, &[1, 1, 1]);
        let e = phi_entry(&d, 7, 2, 1, 1).unwrap();
        assert_eq!(e.num_terms(), 19);
        assert_eq!(e.homogeneous_degree(), Some(6));
        let (mx, c) = e.max_monomial().unwrap();
        assert_eq!(mx, vec![4, 2, 0]);
        assert_eq!(c, 6); // binom(4,4) binom(4,2) binom(4,0) = 6, even sign
        assert_eq!(e.coeff(&[2, 2, 2]), 216 % 7);
        // extraction agrees entry-wide
        for (exps, &coeff) in e.terms() {
            assert_eq!(phi_coeff(&d, 7, 2, 1, 1, exps).unwrap(), coeff);
        }
        assert_eq!(phi_coeff(&d, 7, 2, 1, 1, &[6, 0, 0]).unwrap(), 0);
    }

    #[test]
    fn entries_out_of_range_are_rejected() {
        let d = datum(3, &[1, 1, 1]);
        assert!(matches!(phi_entry(&d, 7, 2, 1, 2), Err(HwError::BadIndex(_))));
        assert!(matches!(phi_entry(&d, 7, 2, 2, 1), Err(HwError::BadIndex(_))));
        assert!(matches!(phi_entry(&d, 7, 1, 1, 1), Err(HwError::BadIndex(_))));
        let d6 = datum(6, &[1, 1, 1, 3]);
        assert!(matches!(
            psi_prime_entry(&d6, 5, 2, 1, 1),
            Err(HwError::NonNewCharacter { g: 2, .. })
        ));
    }

    #[test]
    fn negative_total_gives_zero_entry() {
        // all caps vanish for this character, so row 1 has total -1
        let d = datum(3, &[1, 1, 1, 1, 1, 1]);
        let e = phi_entry(&d, 2, 1, 1, 1).unwrap();
        assert!(e.is_zero());
        assert_eq!(phi_coeff(&d, 2, 1, 1, 1, &[0; 6]).unwrap(), 0);
        // same block, row 2: total 0, the entry is the constant 1
        let e2 = phi_entry(&d, 2, 1, 2, 1).unwrap();
        assert_eq!(e2.num_terms(), 1);
        assert_eq!(e2.coeff(&[0; 6]), 1);
    }

    #[test]
    fn extension_entries_are_homogeneous_with_expected_degree() {
        for (m, a, p) in [
            (5u64, vec![1u64, 1, 1, 2], 13u64),
            (7, vec![1, 2, 2, 2], 29),
            (5, vec![1, 1, 1, 2], 7),
        ] {
            let d = datum(m, &a);
            let r = a.len();
            let f = d.signature();
            for i in 1..m {
                if arith::gcd(i, m) != 1 {
                    continue;
                }
                let fr = Frame::new(&d, p, i).unwrap();
                let pi = p % m * i % m;
                let cols = f[(m - i) as usize] as usize;
                let psi_rows = f[pi as usize] as usize;
                let phi_rows = f[((m - pi) % m) as usize] as usize;
                for j in 1..=cols {
                    for jp in 1..=psi_rows {
                        let e = psi_prime_entry(&d, p, i, jp, j).unwrap();
                        if !e.is_zero() {
                            let want = fr.s as i64 - p as i64 * j as i64 + r as i64 - jp as i64;
                            assert_eq!(e.homogeneous_degree(), Some(want as u32));
                        }
                    }
                    for jp in 1..=phi_rows {
                        let e = phi_entry(&d, p, i, jp, j).unwrap();
                        if !e.is_zero() {
                            let want = fr.s as i64 - p as i64 * j as i64 + jp as i64;
                            assert_eq!(e.homogeneous_degree(), Some(want as u32));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn extension_extraction_agrees_with_expansion() {
        let d = datum(5, &[1, 1, 1, 2]);
        for i in [2u64, 3, 4, 1] {
            let f = d.signature();
            let pi = 13 % 5 * i % 5;
            let cols = f[(5 - i) as usize] as usize;
            let psi_rows = f[pi as usize] as usize;
            for j in 1..=cols {
                for jp in 1..=psi_rows {
                    let e = psi_prime_entry(&d, 13, i, jp, j).unwrap();
                    for (exps, &coeff) in e.terms() {
                        assert_eq!(psi_prime_coeff(&d, 13, i, jp, j, exps).unwrap(), coeff);
                    }
                    // absent monomials extract to zero
                    let deg = e.total_degree();
                    let mut probe = vec![0u32; 4];
                    probe[3] = deg + 1;
                    assert_eq!(psi_prime_coeff(&d, 13, i, jp, j, &probe).unwrap(), 0);
                }
            }
        }
    }

    #[test]
    fn corner_certificate_example() {
        let d = datum(5, &[1, 1, 1, 2]);
        assert_eq!(
            psi11_certificate(&d, 13, 2).unwrap(),
            CertificateOutcome::Certified { residue: 9 }
        );
        // below the guard the certificate declines rather than claims
        assert!(matches!(
            psi11_certificate(&d, 7, 2).unwrap(),
            CertificateOutcome::Declined { .. }
        ));
        // empty blocks decline
        let d3 = datum(3, &[1, 1, 1]);
        assert!(matches!(
            psi11_certificate(&d3, 7, 2).unwrap(),
            CertificateOutcome::Declined { .. }
        ));
        assert!(matches!(psi11_certificate(&d, 13, 0), Err(HwError::BadIndex(_))));
    }

    #[test]
    fn corner_certificate_consistency_suite() {
        // the assert inside the certificate checks extraction == closed form;
        // here we only confirm it certifies wherever the guards pass
        let mut certified = 0;
        for (m, a, p) in [
            (5u64, vec![1u64, 1, 1, 2], 13u64),
            (5, vec![1, 1, 1, 2], 17),
            (7, vec![1, 2, 2, 2], 29),
            (7, vec![1, 2, 2, 2], 31),
            (4, vec![1, 1, 2], 5),
            (3, vec![1, 1, 1], 7),
        ] {
            let d = datum(m, &a);
            for i in 1..m {
                if arith::gcd(i, m) != 1 {
                    continue;
                }
                match psi11_certificate(&d, p, i).unwrap() {
                    CertificateOutcome::Certified { residue } => {
                        assert_ne!(residue, 0);
                        certified += 1;
                    }
                    CertificateOutcome::Declined { .. } => {}
                }
            }
        }
        assert!(certified >= 4, "suite must exercise the certified path, got {}", certified);
    }

    #[test]
    fn valid_extension_three_cases() {
        let d = datum(5, &[1, 1, 1, 2]);
        let cs = CharacterSystem::from_cyclic(&d, 13).unwrap();
        // target column space zero
        assert!(valid_extension_applicable(&cs, 2));
        // kernel is everything: f(tau*) = g
        assert!(valid_extension_applicable(&cs, 4));
        // neither condition
        assert!(!valid_extension_applicable(&cs, 3));
    }

    #[test]
    fn symbolic_assembly_has_expected_blocks() {
        let d = datum(5, &[1, 1, 1, 2]);
        let hw = hw_symbolic(&d, 13).unwrap();
        assert_eq!(hw.blocks.keys().copied().collect::<Vec<_>>(), vec![2, 3, 4]);
        let b2 = &hw.blocks[&2];
        assert_eq!(b2.phi.len(), 0);
        let psi2 = b2.psi_prime.as_ref().unwrap();
        assert_eq!((psi2.len(), psi2[0].len()), (2, 1));
        let b4 = &hw.blocks[&4];
        assert_eq!((b4.phi.len(), b4.phi[0].len()), (1, 2));
        let psi4 = b4.psi_prime.as_ref().unwrap();
        assert_eq!((psi4.len(), psi4[0].len()), (1, 2));
        // a datum with non-new characters: their extension block is absent
        let d6 = datum(6, &[1, 1, 1, 3]);
        let hw6 = hw_symbolic(&d6, 5).unwrap();
        for (i, b) in &hw6.blocks {
            assert_eq!(b.psi_prime.is_some(), arith::gcd(*i, 6) == 1, "character {}", i);
        }
    }

    #[test]
    fn extension_max_monomial_matches_predicted_pattern() {
        // the two-case pattern for extension max monomials is checked
        // empirically; none of the separation logic assumes it
        for (m, a, p) in [(5u64, vec![1u64, 1, 1, 2], 13u64), (7, vec![1, 2, 2, 2], 29)] {
            let d = datum(m, &a);
            let r = a.len();
            let f = d.signature();
            for i in 1..m {
                if arith::gcd(i, m) != 1 {
                    continue;
                }
                let fr = Frame::new(&d, p, i).unwrap();
                let pi = p % m * i % m;
                let cols = f[(m - i) as usize] as usize;
                let psi_rows = f[pi as usize] as usize;
                for j in 1..=cols {
                    for jp in 1..=psi_rows {
                        let e = psi_prime_entry(&d, p, i, jp, j).unwrap();
                        if e.is_zero() {
                            continue;
                        }
                        let n = fr.s - p * j as u64;
                        let c = fr.pivot_slot(n).unwrap();
                        let mut want = fr.greedy_exponents(n).unwrap();
                        if c <= r - jp {
                            for e in want.iter_mut().take(r - jp) {
                                *e += 1;
                            }
                        } else {
                            for e in want.iter_mut().take(r - jp - 1) {
                                *e += 1;
                            }
                            want[c - 1] += 1;
                        }
                        assert_eq!(e.max_monomial().unwrap().0, want, "i={} jp={} j={}", i, jp, j);
                    }
                }
            }
        }
    }

    #[test]
    fn separation_on_a_length_four_orbit() {
        let d = datum(5, &[1, 1, 1, 2]);
        let cs = CharacterSystem::from_cyclic(&d, 13).unwrap();
        let orbits = cs.orbits();
        let orbit = orbits.orbits.iter().find(|o| o.contains(&1)).unwrap();
        assert_eq!(orbit.len(), 4);
        let rep = monomial_separation(&d, 13, orbit).unwrap();
        assert_eq!(rep.chain_char, 2);
        assert_eq!(rep.length, 4);
        assert!(rep.theorem_applicable);
        assert!(!rep.vacuous);
        assert_eq!(rep.total_paths, 4);
        assert_eq!(rep.tees.len() as u64 + rep.zero_paths, 4);
        assert!(rep.all_ones_nonzero);
        assert!(rep.separated);
        assert!(rep.valuations_ok);
        // arrow pattern around the cycle starting at the anchor
        let kinds: Vec<ChainKind> = rep.blocks.iter().map(|b| b.kind).collect();
        assert_eq!(
            kinds,
            vec![ChainKind::Extension, ChainKind::Extension, ChainKind::HasseWitt, ChainKind::HasseWitt]
        );
        assert_eq!(rep.blocks[0].char_i, 2);
        assert_eq!(rep.blocks[1].char_i, 4); // dual-side arrow via the conjugate
    }

    #[test]
    fn separation_on_a_singleton_orbit() {
        // split prime: every orbit is a single character; the chain has one
        // arrow and one path
        let d = datum(4, &[1, 1, 2]);
        let rep = monomial_separation(&d, 5, &[3]).unwrap();
        assert_eq!(rep.length, 1);
        assert_eq!(rep.total_paths, 1);
        assert!(rep.separated);
        assert!(rep.all_ones_nonzero);
        assert!(!rep.theorem_applicable); // no dual signature 0 here
    }

    #[test]
    fn separation_declines_when_preconditions_fail() {
        let d = datum(5, &[1, 1, 1, 2]);
        assert!(matches!(monomial_separation(&d, 7, &[1, 3, 4, 2]), Err(HwError::Declined(_))));
        let d3 = datum(3, &[1, 1, 1]);
        // orbit {1} has dual signature value 0 only
        assert!(matches!(monomial_separation(&d3, 7, &[1]), Err(HwError::Declined(_))));
    }
}
