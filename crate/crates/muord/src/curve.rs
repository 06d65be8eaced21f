//! Specialization at chosen branch points: evaluating the symbolic
//! Hasse–Witt blocks (or computing them directly by univariate
//! arithmetic), assembling the mod-p Dieudonne module of the resulting
//! curve, the orbit-by-orbit chain rank criterion for generic
//! (G,f)-ordinariness, the whole-family verdict over all cyclic
//! quotients, and a seeded randomized search for ordinary witnesses.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::arith;
use crate::eo::{DieudonneModule, OrbitBlocks};
use crate::field::{Fq, FqElem};
use crate::hw::{self, Frame, HWSymbolic, HwError};
use crate::linalg::{self, Mat, SemilinearMap};
use crate::monodromy::{AnyDatum, CharacterSystem, CyclicDatum, MonodromyError};
use crate::poly::SparsePoly;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("branch points: {0}")]
    Points(String),
    #[error("module axiom failed: {0}")]
    Axioms(String),
    #[error(transparent)]
    Hw(#[from] HwError),
    #[error(transparent)]
    Datum(#[from] MonodromyError),
    #[error("{0}")]
    Declined(String),
}

// --- branch points ---

/// A tuple of pairwise distinct elements of F_{p^s}, the finite branch
/// points of one member of the family.
#[derive(Clone, Debug)]
pub struct BranchPoints {
    pub fq: Fq,
    pub points: Vec<FqElem>,
}

impl BranchPoints {
    pub fn new(fq: Fq, points: Vec<FqElem>) -> Result<BranchPoints, CurveError> {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(CurveError::Points(format!(
                        "points {} and {} coincide ({})",
                        i,
                        j,
                        fq.fmt_elem(&points[i])
                    )));
                }
            }
        }
        Ok(BranchPoints { fq, points })
    }

    pub fn r(&self) -> usize {
        self.points.len()
    }

    /// The sub-tuple with the listed indices removed (order preserved).
    pub fn without(&self, dropped: &[usize]) -> BranchPoints {
        let points = self
            .points
            .iter()
            .enumerate()
            .filter(|(k, _)| !dropped.contains(k))
            .map(|(_, c)| c.clone())
            .collect();
        BranchPoints { fq: self.fq.clone(), points }
    }

    /// Comma-separated coordinate encoding, parseable by `parse`.
    pub fn record(&self) -> String {
        let parts: Vec<String> = self.points.iter().map(|c| self.fq.fmt_elem(c)).collect();
        parts.join(",")
    }

    pub fn parse(fq: &Fq, text: &str) -> Result<BranchPoints, CurveError> {
        let mut points = Vec::new();
        for part in text.split(',') {
            let part = part.trim();
            let elem = fq
                .parse_elem(part)
                .ok_or_else(|| CurveError::Points(format!("cannot parse field element '{}'", part)))?;
            points.push(elem);
        }
        BranchPoints::new(fq.clone(), points)
    }
}

// --- univariate helpers (ascending coefficient vectors) ---

/// Multiply by (x - c) in place.
fn upoly_mul_linear(fq: &Fq, poly: &mut Vec<FqElem>, c: &FqElem) {
    poly.push(fq.zero());
    for j in (0..poly.len()).rev() {
        let shifted = if j > 0 { poly[j - 1].clone() } else { fq.zero() };
        poly[j] = fq.sub(&shifted, &fq.mul(c, &poly[j]));
    }
}

/// Exact quotient by (x - c); c must be a root.
fn upoly_div_linear(fq: &Fq, poly: &[FqElem], c: &FqElem) -> Vec<FqElem> {
    debug_assert!(poly.len() > 1);
    let n = poly.len() - 1;
    let mut q = vec![fq.zero(); n];
    for j in (0..n).rev() {
        let next = if j + 1 < n { q[j + 1].clone() } else { fq.zero() };
        q[j] = fq.add(&poly[j + 1], &fq.mul(c, &next));
    }
    debug_assert!(
        fq.is_zero(&fq.add(&poly[0], &fq.mul(c, &q[0]))),
        "linear division must be exact"
    );
    q
}

fn coeff_at(fq: &Fq, poly: &[FqElem], e: i64) -> FqElem {
    if e < 0 || e as usize >= poly.len() {
        fq.zero()
    } else {
        poly[e as usize].clone()
    }
}

// --- specialized blocks ---

/// The blocks of one character evaluated at a point tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleBlock {
    pub i: u64,
    pub phi: Mat,
    /// Present exactly when the character generates the full character
    /// group (order equal to the group exponent).
    pub psi_prime: Option<Mat>,
}

/// All specialized blocks of a cyclic datum at one tuple of points.
#[derive(Clone, Debug)]
pub struct TripleAt {
    pub fq: Fq,
    pub p: u64,
    pub m: u64,
    pub points: BranchPoints,
    pub blocks: BTreeMap<u64, TripleBlock>,
}

impl TripleAt {
    /// phi block of character i, with dimensions normalized from the
    /// character system (absent or empty blocks come back as zeros).
    pub fn phi_block(&self, cs: &CharacterSystem, i: usize) -> Mat {
        let rows = cs.f[cs.conj[cs.mul_p[i]]] as usize;
        let cols = cs.f[cs.conj[i]] as usize;
        match self.blocks.get(&(i as u64)) {
            Some(b) if b.phi.rows > 0 && b.phi.cols > 0 => {
                assert_eq!((b.phi.rows, b.phi.cols), (rows, cols));
                b.phi.clone()
            }
            _ => Mat::zero(&self.fq, rows, cols),
        }
    }

    /// psi' block of character i. An error when the block is genuinely
    /// missing (character of non-maximal order) yet has positive size.
    pub fn psi_block(&self, cs: &CharacterSystem, i: usize) -> Result<Mat, CurveError> {
        let rows = cs.f[cs.mul_p[i]] as usize;
        let cols = cs.f[cs.conj[i]] as usize;
        match self.blocks.get(&(i as u64)).and_then(|b| b.psi_prime.as_ref()) {
            Some(m) if m.rows > 0 && m.cols > 0 => {
                assert_eq!((m.rows, m.cols), (rows, cols));
                Ok(m.clone())
            }
            Some(_) => Ok(Mat::zero(&self.fq, rows, cols)),
            None if rows == 0 || cols == 0 => Ok(Mat::zero(&self.fq, rows, cols)),
            None => Err(CurveError::Declined(format!(
                "character {} does not generate the character group, its extension block is undefined",
                i
            ))),
        }
    }
}

/// Evaluate every symbolic block entry at the given points.
pub fn specialize(sym: &HWSymbolic, pts: &BranchPoints) -> Result<TripleAt, CurveError> {
    if pts.fq.p() != sym.p {
        return Err(CurveError::Points(format!(
            "points live in characteristic {} but the blocks are for p = {}",
            pts.fq.p(),
            sym.p
        )));
    }
    if pts.r() != sym.r {
        return Err(CurveError::Points(format!(
            "expected {} branch points, got {}",
            sym.r,
            pts.r()
        )));
    }
    let fq = &pts.fq;
    let eval_table = |table: &Vec<Vec<SparsePoly>>| -> Mat {
        let rows = table.len();
        let cols = table.first().map_or(0, |row| row.len());
        Mat::from_fn(fq, rows, cols, |i, j| table[i][j].eval(fq, &pts.points))
    };
    let mut blocks = BTreeMap::new();
    for (&i, b) in &sym.blocks {
        blocks.insert(
            i,
            TripleBlock {
                i,
                phi: eval_table(&b.phi),
                psi_prime: b.psi_prime.as_ref().map(|t| eval_table(t)),
            },
        );
    }
    Ok(TripleAt { fq: fq.clone(), p: sym.p, m: sym.m, points: pts.clone(), blocks })
}

/// Compute the specialized blocks directly: phi entries are coefficients
/// of prod_k (x - x_k)^{beta_k}, psi' entries combine residues of that
/// product with coefficients of prod_l (x - x_l) / (x - x_k). Quadratic
/// in the degree, with no detour through multivariate polynomials.
pub fn triple_at_point(d: &CyclicDatum, p: u64, pts: &BranchPoints) -> Result<TripleAt, CurveError> {
    d.validate()?;
    if p < 2 || arith::gcd(p, d.m) != 1 {
        return Err(CurveError::Hw(HwError::BadPrime { p, m: d.m }));
    }
    if pts.fq.p() != p {
        return Err(CurveError::Points(format!(
            "points live in characteristic {} but p = {}",
            pts.fq.p(),
            p
        )));
    }
    if pts.r() != d.r() {
        return Err(CurveError::Points(format!(
            "expected {} branch points, got {}",
            d.r(),
            pts.r()
        )));
    }
    let fq = &pts.fq;
    let m = d.m;
    let f = d.signature();
    // Z = prod_l (x - x_l) and its per-root quotients, shared by all psi'.
    let mut z = vec![fq.one()];
    for c in &pts.points {
        upoly_mul_linear(fq, &mut z, c);
    }
    let z_quot: Vec<Vec<FqElem>> =
        pts.points.iter().map(|c| upoly_div_linear(fq, &z, c)).collect();
    let mut blocks = BTreeMap::new();
    for i in 1..m {
        let cols = f[(m - i) as usize] as usize;
        if cols == 0 {
            continue;
        }
        let fr = Frame::new(d, p, i)?;
        let pi = arith::mul_mod(p % m, i, m);
        let phi_rows = f[((m - pi) % m) as usize] as usize;
        let psi_rows = f[pi as usize] as usize;
        let mut u = vec![fq.one()];
        for (k, c) in pts.points.iter().enumerate() {
            for _ in 0..fr.betas[k] {
                upoly_mul_linear(fq, &mut u, c);
            }
        }
        debug_assert_eq!(u.len() as u64, fr.s + 1);
        let phi = Mat::from_fn(fq, phi_rows, cols, |jp0, j0| {
            coeff_at(fq, &u, p as i64 * (j0 as i64 + 1) - (jp0 as i64 + 1))
        });
        let psi_prime = if arith::gcd(i, m) == 1 {
            let mut mat = Mat::zero(fq, psi_rows, cols);
            for (k, c) in pts.points.iter().enumerate() {
                if fr.betas[k] == 0 {
                    continue;
                }
                let w = upoly_div_linear(fq, &u, c);
                for j0 in 0..cols {
                    let residue = coeff_at(fq, &w, p as i64 * (j0 as i64 + 1) - 1);
                    if fq.is_zero(&residue) {
                        continue;
                    }
                    for jp0 in 0..psi_rows {
                        let q_coeff = coeff_at(fq, &z_quot[k], jp0 as i64);
                        let term = fq.scalar_mul(fr.betas[k] % p, &fq.mul(&residue, &q_coeff));
                        let cur = mat.at(jp0, j0).clone();
                        *mat.at_mut(jp0, j0) = fq.sub(&cur, &term);
                    }
                }
            }
            Some(mat)
        } else {
            None
        };
        blocks.insert(i, TripleBlock { i, phi, psi_prime });
    }
    Ok(TripleAt { fq: fq.clone(), p, m, points: pts.clone(), blocks })
}

// --- extension of psi' to all of Q ---

/// How to pick the complement of ker(phi) inside the source space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplementChoice {
    /// Standard basis vectors at the pivot columns of row-reduced phi.
    PivotColumns,
    /// Standard basis vectors collected greedily from the last
    /// coordinate downwards.
    TrailingColumns,
}

impl Default for ComplementChoice {
    fn default() -> Self {
        ComplementChoice::PivotColumns
    }
}

/// The projection onto ker(phi) along a complement spanned by standard
/// basis vectors. Identity when phi = 0, zero when phi is injective.
fn project_onto_kernel(fq: &Fq, phi: &Mat, choice: ComplementChoice) -> Mat {
    let n = phi.cols;
    let kb = linalg::kernel_basis(fq, phi); // rows form a kernel basis
    let t = kb.rows;
    if t == n {
        return Mat::identity(fq, n);
    }
    if t == 0 {
        return Mat::zero(fq, n, n);
    }
    let comp: Vec<usize> = match choice {
        ComplementChoice::PivotColumns => linalg::rref(fq, phi).1,
        ComplementChoice::TrailingColumns => {
            let mut rows = kb.rows_vec();
            let mut comp = Vec::new();
            for c in (0..n).rev() {
                if comp.len() == n - t {
                    break;
                }
                let mut e = vec![fq.zero(); n];
                e[c] = fq.one();
                let current = linalg::span(fq, &Mat::from_rows(fq, &rows, n));
                if !linalg::space_contains(fq, &current, &e) {
                    comp.push(c);
                    rows.push(e);
                }
            }
            comp.reverse();
            comp
        }
    };
    assert_eq!(comp.len(), n - t, "complement must fill the space");
    // Change of basis: kernel vectors first, then complement unit vectors.
    let basis = Mat::from_fn(fq, n, n, |row, col| {
        if col < t {
            kb.at(col, row).clone()
        } else if row == comp[col - t] {
            fq.one()
        } else {
            fq.zero()
        }
    });
    let inv = linalg::inverse(fq, &basis).expect("kernel plus complement spans the space");
    let kernel_cols = Mat::from_fn(fq, n, t, |row, col| kb.at(col, row).clone());
    kernel_cols.mul(fq, &inv.row_slice(fq, 0, t))
}

/// psi' defined on all of the source space: the raw block when it is
/// already a valid extension, otherwise psi' composed with the
/// projection onto ker(phi) along the chosen complement (extension by
/// zero off the kernel; on the kernel psi' agrees with psi).
pub fn extend_psi(
    cs: &CharacterSystem,
    triple: &TripleAt,
    i: usize,
    choice: ComplementChoice,
) -> Result<Mat, CurveError> {
    let psi = triple.psi_block(cs, i)?;
    if hw::valid_extension_applicable(cs, i) {
        return Ok(psi);
    }
    let phi = triple.phi_block(cs, i);
    Ok(psi.mul(&triple.fq, &project_onto_kernel(&triple.fq, &phi, choice)))
}

// --- module assembly ---

/// Assemble the mod-p Dieudonne module of the specialized curve on one
/// Frobenius orbit (its conjugate orbit is pulled in automatically).
///
/// Every block M_tau = Q_tau (+) dual(Q_tau*) stores the dual basis in
/// reversed order; F_tau = [[phi, 0], [psi_ext, 0]] and the pairing is
/// the signed antidiagonal (+1 on the Q rows, -1 after), which is
/// alternating and determines V. Structural axioms are enforced:
/// violations signal inconsistent input.
pub fn build_dieudonne(
    cs: &CharacterSystem,
    triple: &TripleAt,
    orbit: &[usize],
    choice: ComplementChoice,
) -> Result<DieudonneModule, CurveError> {
    let fq = &triple.fq;
    let blocks = OrbitBlocks::new(cs, orbit);
    let g = blocks.g;
    let mut frob = BTreeMap::new();
    let mut pair = BTreeMap::new();
    for &tau in &blocks.chars {
        let phi = triple.phi_block(cs, tau);
        let psi_raw = triple.psi_block(cs, tau)?;
        if linalg::rank(fq, &Mat::vstack(fq, &phi, &psi_raw)) != phi.cols {
            return Err(CurveError::Axioms(format!(
                "character {}: phi and psi' share a nonzero kernel vector",
                cs.labels[tau]
            )));
        }
        let psi_ext = extend_psi(cs, triple, tau, choice)?;
        let succ = blocks.succ[&tau];
        let fs = blocks.fstar(tau) as usize;
        let fs_succ = blocks.fstar(succ) as usize;
        debug_assert_eq!(phi.cols, fs);
        debug_assert_eq!(phi.rows, fs_succ);
        debug_assert_eq!(psi_ext.rows, g - fs_succ);
        let fmat = Mat::block2x2(
            fq,
            &phi,
            &Mat::zero(fq, fs_succ, g - fs),
            &psi_ext.flip_rows(fq),
            &Mat::zero(fq, g - fs_succ, g - fs),
        );
        frob.insert(tau, fmat);
        let pmat = Mat::from_fn(fq, g, g, |row, col| {
            if row + col + 1 == g {
                if row < fs {
                    fq.one()
                } else {
                    fq.neg(&fq.one())
                }
            } else {
                fq.zero()
            }
        });
        pair.insert(tau, pmat);
    }
    let md = DieudonneModule { fq: fq.clone(), blocks, frob, pair };
    if !md.kernels_match_images() {
        return Err(CurveError::Axioms(
            "kernel of F and image of V disagree on some block".to_string(),
        ));
    }
    Ok(md)
}

/// The partner map V' on M_tau (twist +1): the conjugate block of F read
/// through the coordinate reversal that identifies a basis with its
/// dual. Its kernel is the Q block, and its image meets the image of F
/// trivially.
pub fn v_prime_map(md: &DieudonneModule, tau: usize) -> SemilinearMap {
    let fq = &md.fq;
    let star = md.blocks.conj[&tau];
    SemilinearMap::new(md.frob[&star].flip_rows(fq).flip_cols(fq), 1)
}

/// Walk the full orbit chain starting at tau_u, applying at each
/// character F alone when its f(tau*) is at least the base value
/// f(tau_u*) and F + V' otherwise, then return the dimension of the
/// image projected onto the Q block of M_{tau_u}.
pub fn h_chain_rank(md: &DieudonneModule, tau_u: usize) -> usize {
    let fq = &md.fq;
    let f_base = md.blocks.fstar(tau_u);
    let mut space = linalg::full_space(fq, md.blocks.g);
    let mut cur = tau_u;
    loop {
        let h = if md.blocks.fstar(cur) >= f_base {
            md.f_map(cur)
        } else {
            md.f_map(cur).add(fq, &v_prime_map(md, cur))
        };
        space = linalg::image_of_subspace(fq, &h, &space);
        cur = md.blocks.succ[&cur];
        if cur == tau_u {
            break;
        }
    }
    let keep = f_base as usize;
    linalg::rank(fq, &Mat::from_fn(fq, space.rows, keep, |i, j| space.at(i, j).clone()))
}

// --- ordinariness checks ---

/// Chain ranks for one orbit: for every distinct value f_u of f(tau*)
/// over the orbit (ascending), the chain image at the smallest-index
/// representative must have dimension exactly f_u. All passing is
/// equivalent to every word on the orbit being maximal.
#[derive(Clone, Debug)]
pub struct OrbitCheck {
    pub orbit: Vec<usize>,
    pub labels: Vec<String>,
    pub g: u64,
    pub f_values: Vec<u64>,
    pub representatives: Vec<usize>,
    pub ranks: Vec<usize>,
    pub pass: bool,
}

pub fn check_orbit_ordinary(md: &DieudonneModule, orbit: &[usize]) -> OrbitCheck {
    let mut f_values: Vec<u64> = orbit.iter().map(|&t| md.blocks.fstar(t)).collect();
    f_values.sort_unstable();
    f_values.dedup();
    let representatives: Vec<usize> = f_values
        .iter()
        .map(|&v| orbit.iter().copied().filter(|&t| md.blocks.fstar(t) == v).min().unwrap())
        .collect();
    let ranks: Vec<usize> = representatives.iter().map(|&t| h_chain_rank(md, t)).collect();
    let pass = ranks.iter().zip(&f_values).all(|(&rk, &fv)| rk as u64 == fv);
    let labels = orbit.iter().map(|&t| md.blocks.labels[&t].clone()).collect();
    OrbitCheck {
        orbit: orbit.to_vec(),
        labels,
        g: md.blocks.g as u64,
        f_values,
        representatives,
        ranks,
        pass,
    }
}

/// Verdict for one cyclic quotient of the datum.
#[derive(Clone, Debug)]
pub struct QuotientCheck {
    pub rep_label: String,
    pub degree: u64,
    /// True when the quotient curve has genus 0 or fewer than 3 branch
    /// points: nothing to check.
    pub vacuous: bool,
    pub orbits: Vec<OrbitCheck>,
    pub pass: bool,
}

/// Whole-family verdict at one point tuple: the conjunction over all
/// cyclic quotients of the per-orbit chain criteria on new characters.
/// A true verdict at a single point certifies generic (G,f)-ordinariness
/// of the family, since ordinariness is an open condition.
#[derive(Clone, Debug)]
pub struct CurveCheck {
    pub quotients: Vec<QuotientCheck>,
    pub ordinary: bool,
}

fn branch_count(datum: &AnyDatum) -> usize {
    match datum {
        AnyDatum::Cyclic(d) => d.r(),
        AnyDatum::Abelian(d) => d.r(),
    }
}

/// Orbit checks for the characters that generate the full character
/// group of a cyclic datum; other orbits belong to proper quotients and
/// are checked there.
fn check_datum_new_part(
    d: &CyclicDatum,
    p: u64,
    pts: &BranchPoints,
    choice: ComplementChoice,
) -> Result<Vec<OrbitCheck>, CurveError> {
    let cs = CharacterSystem::from_cyclic(d, p)?;
    let triple = triple_at_point(d, p, pts)?;
    let orbit_set = cs.orbits();
    let mut out = Vec::new();
    for orbit in &orbit_set.orbits {
        if arith::gcd(orbit[0] as u64, d.m) != 1 {
            continue;
        }
        let md = build_dieudonne(&cs, &triple, orbit, choice)?;
        out.push(check_orbit_ordinary(&md, orbit));
    }
    Ok(out)
}

pub fn check_curve_ordinary_with(
    datum: &AnyDatum,
    p: u64,
    pts: &BranchPoints,
    choice: ComplementChoice,
) -> Result<CurveCheck, CurveError> {
    datum.character_system(p)?; // validates the datum and the prime
    if pts.fq.p() != p {
        return Err(CurveError::Points(format!(
            "points live in characteristic {} but p = {}",
            pts.fq.p(),
            p
        )));
    }
    if pts.r() != branch_count(datum) {
        return Err(CurveError::Points(format!(
            "expected {} branch points, got {}",
            branch_count(datum),
            pts.r()
        )));
    }
    let mut quotients = Vec::new();
    for q in datum.quotients() {
        if q.trivial {
            quotients.push(QuotientCheck {
                rep_label: q.rep_label.clone(),
                degree: q.degree,
                vacuous: true,
                orbits: Vec::new(),
                pass: true,
            });
            continue;
        }
        let sub = pts.without(&q.dropped);
        let orbits = check_datum_new_part(&q.datum, p, &sub, choice)?;
        let pass = orbits.iter().all(|o| o.pass);
        quotients.push(QuotientCheck {
            rep_label: q.rep_label.clone(),
            degree: q.degree,
            vacuous: false,
            orbits,
            pass,
        });
    }
    let ordinary = quotients.iter().all(|qc| qc.pass);
    Ok(CurveCheck { quotients, ordinary })
}

pub fn check_curve_ordinary(
    datum: &AnyDatum,
    p: u64,
    pts: &BranchPoints,
) -> Result<CurveCheck, CurveError> {
    check_curve_ordinary_with(datum, p, pts, ComplementChoice::PivotColumns)
}

// --- witness search ---

#[derive(Clone, Debug)]
pub struct LevelStats {
    pub s: usize,
    pub trials: u64,
    /// True when the field was too small to hold r distinct points; no
    /// samples are drawn at a skipped level.
    pub skipped: bool,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub seed: u64,
    pub s: usize,
    pub trial: u64,
    /// Comma-separated points, parseable over F_{p^s}.
    pub points: String,
    pub check: CurveCheck,
}

impl Witness {
    /// Replay record: seed, extension degree, 1-based trial index and
    /// the points themselves.
    pub fn record(&self) -> String {
        format!("seed={} s={} trial={} points={}", self.seed, self.s, self.trial, self.points)
    }
}

#[derive(Clone, Debug)]
pub struct WitnessOutcome {
    pub seed: u64,
    pub witness: Option<Witness>,
    pub attempts: Vec<LevelStats>,
}

/// Seeded search for a point tuple where the whole-family check passes.
/// Samples uniform distinct r-tuples over F_{p^s} for s = 1..=max_ext,
/// escalating after `trials` failures per level. Exhaustion is reported
/// with statistics and is never a disproof.
pub fn witness_search(
    datum: &AnyDatum,
    p: u64,
    seed: u64,
    max_ext: usize,
    trials: u64,
) -> Result<WitnessOutcome, CurveError> {
    datum.character_system(p)?;
    let r = branch_count(datum);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut attempts = Vec::new();
    for s in 1..=max_ext {
        let fq = Fq::new(p, s).map_err(|e| CurveError::Declined(e.to_string()))?;
        let q = fq.size();
        if q < r as u128 {
            attempts.push(LevelStats { s, trials: 0, skipped: true });
            continue;
        }
        for trial in 1..=trials {
            let mut points: Vec<FqElem> = Vec::with_capacity(r);
            while points.len() < r {
                let cand = fq.from_index(rng.gen_range(0..q));
                if !points.contains(&cand) {
                    points.push(cand);
                }
            }
            let bp = BranchPoints { fq: fq.clone(), points };
            let check = check_curve_ordinary(datum, p, &bp)?;
            if check.ordinary {
                attempts.push(LevelStats { s, trials: trial, skipped: false });
                let witness =
                    Witness { seed, s, trial, points: bp.record(), check };
                return Ok(WitnessOutcome { seed, witness: Some(witness), attempts });
            }
        }
        attempts.push(LevelStats { s, trials, skipped: false });
    }
    Ok(WitnessOutcome { seed, witness: None, attempts })
}
