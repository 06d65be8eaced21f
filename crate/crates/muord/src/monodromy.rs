//! Monodromy data for cyclic and abelian covers of the projective line:
//! validation, genus, signatures, character systems, Frobenius orbits and
//! reduction to cyclic quotient data.
//!
//! A cyclic datum (m, r, a) describes the smooth projective curve
//! y^m = (x-x_1)^{a_1} ... (x-x_r)^{a_r}; an abelian datum generalizes the
//! deck group to G = Z/d_1 x ... x Z/d_n with one inertia element per
//! branch point.

use crate::arith;
use std::fmt;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum MonodromyError {
    #[error("invalid monodromy datum: {0}")]
    Invalid(String),
    #[error("bad prime p={p}: it divides the group exponent {exponent}")]
    BadPrime { p: u64, exponent: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

// --- cyclic data ---

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CyclicDatum {
    pub m: u64,
    pub a: Vec<u64>,
}

impl CyclicDatum {
    pub fn new(m: u64, a: Vec<u64>) -> CyclicDatum {
        CyclicDatum { m, a }
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    /// Every violated validity condition, empty when the datum is good.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.m < 2 {
            v.push(format!("m={} must be at least 2", self.m));
        }
        if self.a.len() < 3 {
            v.push(format!("r={} must be at least 3", self.a.len()));
        }
        for (k, &ak) in self.a.iter().enumerate() {
            if ak == 0 || ak >= self.m {
                v.push(format!("a_{}={} outside 1..={}", k + 1, ak, self.m.saturating_sub(1)));
            }
        }
        if self.m >= 2 {
            let sum: u64 = self.a.iter().map(|&x| x % self.m).sum::<u64>() % self.m;
            if sum != 0 {
                v.push(format!("sum of inertia exponents is {} mod {}, not 0", sum, self.m));
            }
            let mut g = self.m;
            for &ak in &self.a {
                g = arith::gcd(g, ak);
            }
            if g != 1 {
                v.push(format!("gcd(a_1..a_r, m)={} is not 1", g));
            }
        }
        v
    }

    pub fn validate(&self) -> Result<(), MonodromyError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MonodromyError::Invalid(v.join("; ")))
        }
    }

    /// Genus of the cover by Riemann-Hurwitz:
    /// g = 1 + (m(r-2) - sum_k gcd(a_k, m)) / 2.
    pub fn genus(&self) -> u64 {
        let m = self.m as i64;
        let r = self.a.len() as i64;
        let gcds: i64 = self.a.iter().map(|&ak| arith::gcd(ak, self.m) as i64).sum();
        let twice = m * (r - 2) - gcds;
        debug_assert!(twice >= -2 && twice % 2 == 0);
        ((2 + twice) / 2).max(0) as u64
    }

    /// Signature vector indexed by character: f[i] = dim of the tau_i
    /// eigenspace of holomorphic differentials,
    /// f(tau_i) = -1 + sum_k <-i a_k / m> for i != 0, and f(tau_0) = 0.
    pub fn signature(&self) -> Vec<u64> {
        let m = self.m;
        let mut f = vec![0u64; m as usize];
        for i in 1..m {
            let mut num = 0u64; // sum of ((-i a_k) mod m)
            for &ak in &self.a {
                num += (m - (i * ak) % m) % m;
            }
            debug_assert_eq!(num % m, 0);
            f[i as usize] = num / m - 1;
        }
        f
    }

    /// The datum (m, r+2, (c, m-c, a_1..a_r)) with two extra branch points
    /// whose inertia cancels.
    pub fn extend(&self, c: u64) -> Result<CyclicDatum, MonodromyError> {
        if c % self.m == 0 {
            return Err(MonodromyError::Invalid(format!(
                "extension exponent c={} vanishes mod m={}",
                c, self.m
            )));
        }
        let c = c % self.m;
        let mut a = vec![c, self.m - c];
        a.extend_from_slice(&self.a);
        Ok(CyclicDatum::new(self.m, a))
    }
}

impl fmt::Display for CyclicDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        write!(f, "m={} r={} a={}", self.m, self.a.len(), a.join(","))
    }
}

// --- abelian data ---

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianDatum {
    /// G = Z/d_1 x ... x Z/d_n.
    pub invariant_factors: Vec<u64>,
    /// One inertia element per branch point, as residue tuples.
    pub rows: Vec<Vec<u64>>,
}

impl AbelianDatum {
    pub fn new(invariant_factors: Vec<u64>, rows: Vec<Vec<u64>>) -> AbelianDatum {
        AbelianDatum { invariant_factors, rows }
    }

    pub fn r(&self) -> usize {
        self.rows.len()
    }

    /// Exponent of G (lcm of the factor orders).
    pub fn exponent(&self) -> u64 {
        self.invariant_factors.iter().fold(1, |acc, &d| arith::lcm(acc, d))
    }

    pub fn group_order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.invariant_factors.is_empty() || self.invariant_factors.iter().any(|&d| d < 2) {
            v.push("every invariant factor must be at least 2".to_string());
        }
        let n = self.invariant_factors.len();
        for (k, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                v.push(format!("inertia element {} has {} coordinates, expected {}", k + 1, row.len(), n));
                continue;
            }
            if row.iter().zip(&self.invariant_factors).all(|(&c, &d)| c % d == 0) {
                v.push(format!("inertia element {} is zero in G", k + 1));
            }
            for (i, (&c, &d)) in row.iter().zip(&self.invariant_factors).enumerate() {
                if c >= d {
                    v.push(format!("coordinate {} of inertia element {} is {} >= {}", i + 1, k + 1, c, d));
                }
            }
        }
        if self.rows.iter().all(|row| row.len() == n) && !self.rows.is_empty() {
            // sum of inertia must vanish
            for i in 0..n {
                let d = self.invariant_factors[i];
                let s: u64 = self.rows.iter().map(|row| row[i] % d).sum::<u64>() % d;
                if s != 0 {
                    v.push(format!("coordinate {} of the inertia sum is {} mod {}, not 0", i + 1, s, d));
                }
            }
            // the inertia elements must generate G: the subgroup they span
            // has full order iff for every prime q | |G| the rows span
            // G/qG = (Z/q)^{#factors divisible by q}
            for q in prime_support(&self.invariant_factors) {
                let cols: Vec<usize> = (0..n).filter(|&i| self.invariant_factors[i] % q == 0).collect();
                let rank = fp_rank(
                    q,
                    &self
                        .rows
                        .iter()
                        .map(|row| cols.iter().map(|&i| row[i] % q).collect::<Vec<u64>>())
                        .collect::<Vec<_>>(),
                );
                if rank < cols.len() {
                    v.push(format!("inertia elements do not generate G (deficient mod {})", q));
                }
            }
        }
        v
    }

    pub fn validate(&self) -> Result<(), MonodromyError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(MonodromyError::Invalid(v.join("; ")))
        }
    }

    /// chi(row) = zeta_e^{t} for the character chi given as a residue tuple:
    /// t = sum_i (e/d_i) chi_i row_i mod e.
    pub fn pairing_exponent(&self, chi: &[u64], row: &[u64]) -> u64 {
        let e = self.exponent();
        let mut t = 0u64;
        for ((&c, &x), &d) in chi.iter().zip(row).zip(&self.invariant_factors) {
            t = (t + (e / d) * (c % d) % e * (x % d)) % e;
        }
        t
    }

    /// f(chi) = -1 + sum_k <-t_k/e> for chi != 0, f(0) = 0.
    pub fn signature_of(&self, chi: &[u64]) -> u64 {
        let e = self.exponent();
        if chi.iter().zip(&self.invariant_factors).all(|(&c, &d)| c % d == 0) {
            return 0;
        }
        let mut num = 0u64;
        for row in &self.rows {
            let t = self.pairing_exponent(chi, row);
            num += (e - t) % e;
        }
        debug_assert_eq!(num % e, 0);
        num / e - 1
    }

    /// Genus = total dimension of holomorphic differentials, summed over the
    /// nontrivial characters.
    pub fn genus(&self) -> u64 {
        let mut g = 0;
        for chi in enumerate_tuples(&self.invariant_factors) {
            g += self.signature_of(&chi);
        }
        g
    }

    /// Order of a character (or group element) given as a residue tuple.
    pub fn element_order(&self, chi: &[u64]) -> u64 {
        chi.iter()
            .zip(&self.invariant_factors)
            .fold(1, |acc, (&c, &d)| arith::lcm(acc, d / arith::gcd(c % d, d)))
    }
}

impl fmt::Display for AbelianDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.invariant_factors.iter().map(|d| d.to_string()).collect();
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|row| {
                let xs: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                format!("({})", xs.join(","))
            })
            .collect();
        write!(f, "G={} r={} a={}", g.join("x"), self.rows.len(), rows.join(";"))
    }
}

fn prime_support(factors: &[u64]) -> Vec<u64> {
    let mut ps = Vec::new();
    for &d in factors {
        for q in arith::prime_factors(d) {
            if !ps.contains(&q) {
                ps.push(q);
            }
        }
    }
    ps.sort_unstable();
    ps
}

/// Rank of an integer matrix over F_q (rows given as residue vectors).
fn fp_rank(q: u64, rows: &[Vec<u64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut mat: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % q).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..mat.len()).find(|&i| mat[i][c] != 0) else { continue };
        mat.swap(rank, pr);
        let inv = arith::inv_mod(mat[rank][c], q);
        for j in 0..cols {
            mat[rank][j] = arith::mul_mod(mat[rank][j], inv, q);
        }
        for i in 0..mat.len() {
            if i != rank && mat[i][c] != 0 {
                let f = mat[i][c];
                for j in 0..cols {
                    let sub = arith::mul_mod(f, mat[rank][j], q);
                    mat[i][j] = arith::sub_mod(mat[i][j], sub, q);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// All residue tuples for the given factor list, in lexicographic order
/// (first coordinate most significant); the zero tuple comes first.
pub fn enumerate_tuples(factors: &[u64]) -> Vec<Vec<u64>> {
    let total: u64 = factors.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    let mut cur = vec![0u64; factors.len()];
    loop {
        out.push(cur.clone());
        let mut k = factors.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < factors[k] {
                break;
            }
            cur[k] = 0;
        }
    }
}

// --- uniform character systems ---

/// Characters of the deck group numbered 0..n-1 (0 = trivial character),
/// with the signature, the multiplication-by-p successor and conjugation
/// precomputed. Both the cyclic and the abelian case reduce to this view.
#[derive(Clone, Debug)]
pub struct CharacterSystem {
    pub p: u64,
    pub labels: Vec<String>,
    /// tau |-> p tau
    pub mul_p: Vec<usize>,
    /// tau |-> tau* (negation)
    pub conj: Vec<usize>,
    /// signature f(tau)
    pub f: Vec<u64>,
}

impl CharacterSystem {
    pub fn from_cyclic(d: &CyclicDatum, p: u64) -> Result<CharacterSystem, MonodromyError> {
        d.validate()?;
        if p < 2 || arith::gcd(p, d.m) != 1 {
            return Err(MonodromyError::BadPrime { p, exponent: d.m });
        }
        let m = d.m as usize;
        Ok(CharacterSystem {
            p,
            labels: (0..m).map(|i| i.to_string()).collect(),
            mul_p: (0..m).map(|i| ((p as usize) * i) % m).collect(),
            conj: (0..m).map(|i| (m - i) % m).collect(),
            f: d.signature(),
        })
    }

    pub fn from_abelian(d: &AbelianDatum, p: u64) -> Result<CharacterSystem, MonodromyError> {
        d.validate()?;
        let e = d.exponent();
        if p < 2 || arith::gcd(p, e) != 1 {
            return Err(MonodromyError::BadPrime { p, exponent: e });
        }
        let tuples = enumerate_tuples(&d.invariant_factors);
        let index_of = |t: &[u64]| -> usize {
            let mut idx = 0u64;
            for (&c, &dd) in t.iter().zip(&d.invariant_factors) {
                idx = idx * dd + (c % dd);
            }
            idx as usize
        };
        let mut labels = Vec::new();
        let mut mul_p = Vec::new();
        let mut conj = Vec::new();
        let mut f = Vec::new();
        for t in &tuples {
            let xs: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            labels.push(format!("({})", xs.join(",")));
            let pt: Vec<u64> = t.iter().zip(&d.invariant_factors).map(|(&c, &dd)| (c * (p % dd)) % dd).collect();
            mul_p.push(index_of(&pt));
            let nt: Vec<u64> = t.iter().zip(&d.invariant_factors).map(|(&c, &dd)| (dd - c % dd) % dd).collect();
            conj.push(index_of(&nt));
            f.push(d.signature_of(t));
        }
        Ok(CharacterSystem { p, labels, mul_p, conj, f })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Frobenius orbits of the nontrivial characters under tau |-> p tau.
    /// Each orbit is listed in cycle order starting from its smallest
    /// member; orbits are sorted by that smallest member.
    pub fn orbits(&self) -> OrbitSet {
        let n = self.n();
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 1..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let mut members = vec![start];
            let mut cur = self.mul_p[start];
            while cur != start {
                members.push(cur);
                cur = self.mul_p[cur];
            }
            // `start` is the smallest unvisited index, hence the smallest
            // member of its orbit
            let id = orbits.len();
            for &t in &members {
                orbit_of[t] = id;
            }
            orbits.push(members);
        }
        let conj_orbit: Vec<usize> = orbits.iter().map(|o| orbit_of[self.conj[o[0]]]).collect();
        OrbitSet { orbits, orbit_of, conj_orbit }
    }

    /// Profile of one orbit: g(O) = f(tau) + f(tau*), the sorted distinct
    /// values of f(tau*) over the orbit, and for each distinct value the
    /// member of smallest character index realizing it.
    pub fn orbit_profile(&self, orbit: &[usize]) -> OrbitProfile {
        let g = self.f[orbit[0]] + self.f[self.conj[orbit[0]]];
        for &t in orbit {
            debug_assert_eq!(self.f[t] + self.f[self.conj[t]], g, "f + f* must be constant on the orbit");
        }
        let mut values: Vec<u64> = orbit.iter().map(|&t| self.f[self.conj[t]]).collect();
        values.sort_unstable();
        values.dedup();
        let representatives: Vec<usize> = values
            .iter()
            .map(|&v| orbit.iter().copied().filter(|&t| self.f[self.conj[t]] == v).min().unwrap())
            .collect();
        OrbitProfile { g, f_values: values, representatives }
    }
}

#[derive(Clone, Debug)]
pub struct OrbitSet {
    pub orbits: Vec<Vec<usize>>,
    /// Character index -> orbit id (usize::MAX for the trivial character).
    pub orbit_of: Vec<usize>,
    /// Orbit id -> orbit id of the conjugate orbit.
    pub conj_orbit: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitProfile {
    /// g(O) = f(tau) + f(tau*), constant on the orbit.
    pub g: u64,
    /// Sorted distinct values of f(tau*) over the orbit.
    pub f_values: Vec<u64>,
    /// Smallest-index member realizing each distinct value.
    pub representatives: Vec<usize>,
}

impl OrbitProfile {
    pub fn s(&self) -> usize {
        self.f_values.len()
    }
}

// --- cyclic quotients ---

/// One cyclic quotient cover: the subgroup is the kernel of the generating
/// character, the quotient deck group is Z/degree.
#[derive(Clone, Debug)]
pub struct QuotientEntry {
    /// Canonical generating character (lex-smallest in its Galois orbit),
    /// as a label in the parent indexing.
    pub rep_label: String,
    /// |G/H| = order of the generating character.
    pub degree: u64,
    /// Inertia exponents of the quotient before dropping unramified points.
    pub full_b: Vec<u64>,
    /// The quotient datum with zero exponents dropped.
    pub datum: CyclicDatum,
    /// 0-based indices of dropped branch points.
    pub dropped: Vec<usize>,
    /// j in 0..degree -> parent character index of (j * generator).
    pub char_map: Vec<usize>,
    /// True when nothing remains to verify: fewer than 3 surviving branch
    /// points, or quotient genus 0 (or the trivial quotient itself).
    pub trivial: bool,
}

/// Cyclic quotients of a cyclic datum, one per divisor d | m with d > 1.
/// The degree-d quotient has inertia exponents a_k mod d.
pub fn cyclic_quotients(d: &CyclicDatum) -> Vec<QuotientEntry> {
    let m = d.m;
    let mut out = Vec::new();
    for deg in arith::divisors(m) {
        if deg == 1 {
            continue;
        }
        let full_b: Vec<u64> = d.a.iter().map(|&ak| ak % deg).collect();
        let kept: Vec<u64> = full_b.iter().copied().filter(|&b| b != 0).collect();
        let dropped: Vec<usize> = (0..full_b.len()).filter(|&k| full_b[k] == 0).collect();
        let datum = CyclicDatum::new(deg, kept);
        let trivial = datum.a.len() < 3 || datum.genus() == 0;
        let char_map: Vec<usize> = (0..deg).map(|j| ((m / deg) * j) as usize).collect();
        out.push(QuotientEntry {
            rep_label: ((m / deg) % m).to_string(),
            degree: deg,
            full_b,
            datum,
            dropped,
            char_map,
            trivial,
        });
    }
    out
}

/// Cyclic quotients of an abelian datum, one per Galois orbit of characters
/// (including the trivial one, flagged trivial). The generating character of
/// each orbit is its lex-smallest member; the quotient exponents are read off
/// from the character pairing.
pub fn abelian_cyclic_quotients(d: &AbelianDatum) -> Vec<QuotientEntry> {
    let e = d.exponent();
    let tuples = enumerate_tuples(&d.invariant_factors);
    let index_of = |t: &[u64]| -> usize {
        let mut idx = 0u64;
        for (&c, &dd) in t.iter().zip(&d.invariant_factors) {
            idx = idx * dd + (c % dd);
        }
        idx as usize
    };
    let units: Vec<u64> = (1..=e).filter(|&u| arith::gcd(u, e) == 1).collect();
    let mut seen = vec![false; tuples.len()];
    let mut out = Vec::new();
    for (ti, t) in tuples.iter().enumerate() {
        if seen[ti] {
            continue;
        }
        // mark the whole Galois orbit; ti is its lex-smallest member because
        // tuple order equals index order
        for &u in &units {
            let ut: Vec<u64> = t.iter().zip(&d.invariant_factors).map(|(&c, &dd)| (c * (u % dd)) % dd).collect();
            seen[index_of(&ut)] = true;
        }
        let deg = d.element_order(t);
        if deg == 1 {
            // trivial character: quotient is the base line itself
            let xs: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            out.push(QuotientEntry {
                rep_label: format!("({})", xs.join(",")),
                degree: 1,
                full_b: vec![0; d.rows.len()],
                datum: CyclicDatum::new(1, Vec::new()),
                dropped: (0..d.rows.len()).collect(),
                char_map: vec![0],
                trivial: true,
            });
            continue;
        }
        let full_b: Vec<u64> = d
            .rows
            .iter()
            .map(|row| {
                let tk = d.pairing_exponent(t, row);
                debug_assert_eq!(tk % (e / deg), 0, "pairing exponent must lie in the order-deg subgroup");
                tk / (e / deg)
            })
            .collect();
        let kept: Vec<u64> = full_b.iter().copied().filter(|&b| b != 0).collect();
        let dropped: Vec<usize> = (0..full_b.len()).filter(|&k| full_b[k] == 0).collect();
        let datum = CyclicDatum::new(deg, kept);
        let trivial = datum.a.len() < 3 || datum.genus() == 0;
        let char_map: Vec<usize> = (0..deg)
            .map(|j| {
                let jt: Vec<u64> = t.iter().zip(&d.invariant_factors).map(|(&c, &dd)| (c * (j % dd)) % dd).collect();
                index_of(&jt)
            })
            .collect();
        let xs: Vec<String> = t.iter().map(|x| x.to_string()).collect();
        out.push(QuotientEntry {
            rep_label: format!("({})", xs.join(",")),
            degree: deg,
            full_b,
            datum,
            dropped,
            char_map,
            trivial,
        });
    }
    out
}

// --- text format ---

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AnyDatum {
    Cyclic(CyclicDatum),
    Abelian(AbelianDatum),
}

impl AnyDatum {
    pub fn violations(&self) -> Vec<String> {
        match self {
            AnyDatum::Cyclic(d) => d.violations(),
            AnyDatum::Abelian(d) => d.violations(),
        }
    }

    pub fn genus(&self) -> u64 {
        match self {
            AnyDatum::Cyclic(d) => d.genus(),
            AnyDatum::Abelian(d) => d.genus(),
        }
    }

    pub fn character_system(&self, p: u64) -> Result<CharacterSystem, MonodromyError> {
        match self {
            AnyDatum::Cyclic(d) => CharacterSystem::from_cyclic(d, p),
            AnyDatum::Abelian(d) => CharacterSystem::from_abelian(d, p),
        }
    }

    pub fn quotients(&self) -> Vec<QuotientEntry> {
        match self {
            AnyDatum::Cyclic(d) => cyclic_quotients(d),
            AnyDatum::Abelian(d) => abelian_cyclic_quotients(d),
        }
    }
}

impl fmt::Display for AnyDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyDatum::Cyclic(d) => d.fmt(f),
            AnyDatum::Abelian(d) => d.fmt(f),
        }
    }
}

/// Parse `m=23 r=5 a=1,1,1,2,18` (cyclic) or
/// `G=2x6 r=4 a=(1,0);(1,1);(0,2);(0,3)` (abelian). Whitespace between
/// tokens is flexible; `r=` is optional but checked against the entry count
/// when present. Validity of the parsed datum is NOT checked here.
pub fn parse_datum(line: &str) -> Result<AnyDatum, MonodromyError> {
    let mut m: Option<u64> = None;
    let mut g: Option<Vec<u64>> = None;
    let mut r: Option<usize> = None;
    let mut a_txt: Option<String> = None;
    for tok in line.split_whitespace() {
        let Some((key, val)) = tok.split_once('=') else {
            return Err(MonodromyError::Parse(format!("expected key=value, got `{}`", tok)));
        };
        match key {
            "m" => m = Some(parse_u64(val)?),
            "G" => {
                let fs: Result<Vec<u64>, _> = val.split('x').map(parse_u64).collect();
                g = Some(fs?);
            }
            "r" => r = Some(parse_u64(val)? as usize),
            "a" => a_txt = Some(val.to_string()),
            _ => return Err(MonodromyError::Parse(format!("unknown key `{}`", key))),
        }
    }
    let a_txt = a_txt.ok_or_else(|| MonodromyError::Parse("missing a=".to_string()))?;
    let datum = match (m, g) {
        (Some(m), None) => {
            let a: Result<Vec<u64>, _> = a_txt.split(',').map(parse_u64).collect();
            AnyDatum::Cyclic(CyclicDatum::new(m, a?))
        }
        (None, Some(factors)) => {
            let mut rows = Vec::new();
            for part in a_txt.split(';') {
                let inner = part
                    .trim()
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| MonodromyError::Parse(format!("expected (tuple), got `{}`", part)))?;
                let row: Result<Vec<u64>, _> = inner.split(',').map(parse_u64).collect();
                rows.push(row?);
            }
            AnyDatum::Abelian(AbelianDatum::new(factors, rows))
        }
        (Some(_), Some(_)) => return Err(MonodromyError::Parse("give either m= or G=, not both".to_string())),
        (None, None) => return Err(MonodromyError::Parse("missing m= or G=".to_string())),
    };
    if let Some(r) = r {
        let actual = match &datum {
            AnyDatum::Cyclic(d) => d.a.len(),
            AnyDatum::Abelian(d) => d.rows.len(),
        };
        if r != actual {
            return Err(MonodromyError::Parse(format!("r={} but {} inertia entries given", r, actual)));
        }
    }
    Ok(datum)
}

fn parse_u64(s: &str) -> Result<u64, MonodromyError> {
    s.trim().parse::<u64>().map_err(|_| MonodromyError::Parse(format!("not a number: `{}`", s)))
}
