//! Ekedahl-Oort machinery: the generic (ordinary) Dieudonne module template
//! of an orbit, canonical filtrations of concrete modules, and the
//! associated permutation words with their length and maximality tests.
//!
//! A module here is a tuple of blocks M_tau, one per character of an orbit
//! pair O and O*, each of dimension g(O). F acts tau -> p tau with twist +1,
//! V acts p tau -> tau with twist -1 and is always solved from F through the
//! pairing b, so that b(F(x), y) = b(x, V(y))^p holds by construction.

use crate::field::{Fq, FqElem};
use crate::linalg::{
    self, image_of_subspace, preimage_of_subspace, semilinear_kernel, space_contains, space_dim,
    space_eq, space_intersect, space_is_subspace, space_sum, Mat, SemilinearMap,
};
use crate::monodromy::{CharacterSystem, OrbitSet};
use std::collections::BTreeMap;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum EoError {
    #[error("canonical filtration did not stabilize within {0} rounds; input is not a Dieudonne module")]
    NonStabilizing(usize),
    #[error("projected filtration steps at character {0} are not nested; input is not a Dieudonne module")]
    NotNested(usize),
}

/// The characters of an orbit together with its conjugate orbit, and the
/// maps between them. Block dimension is g = f(tau) + f(tau*), constant.
#[derive(Clone, Debug)]
pub struct OrbitBlocks {
    /// Every character of O and O* exactly once, in orbit-cycle order
    /// (O first, then O* when distinct).
    pub chars: Vec<usize>,
    pub g: usize,
    pub succ: BTreeMap<usize, usize>,
    pub conj: BTreeMap<usize, usize>,
    pub f: BTreeMap<usize, u64>,
    pub labels: BTreeMap<usize, String>,
}

impl OrbitBlocks {
    /// Blocks for the orbit containing `orbit[0]` in the given character
    /// system; pulls in the conjugate orbit automatically.
    pub fn new(cs: &CharacterSystem, orbit: &[usize]) -> OrbitBlocks {
        let mut chars: Vec<usize> = orbit.to_vec();
        if !orbit.contains(&cs.conj[orbit[0]]) {
            let mut cur = cs.conj[orbit[0]];
            // walk the conjugate cycle in the same cycle order
            for _ in 0..orbit.len() {
                chars.push(cur);
                cur = cs.mul_p[cur];
            }
        }
        let g = (cs.f[orbit[0]] + cs.f[cs.conj[orbit[0]]]) as usize;
        let mut succ = BTreeMap::new();
        let mut conj = BTreeMap::new();
        let mut f = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for &t in &chars {
            succ.insert(t, cs.mul_p[t]);
            conj.insert(t, cs.conj[t]);
            f.insert(t, cs.f[t]);
            labels.insert(t, cs.labels[t].clone());
        }
        OrbitBlocks { chars, g, succ, conj, f, labels }
    }

    /// Blocks for every orbit of the system, paired with conjugates
    /// (each orbit pair appears once, keyed by the smaller orbit id).
    pub fn all(cs: &CharacterSystem, orbits: &OrbitSet) -> Vec<OrbitBlocks> {
        let mut out = Vec::new();
        for (i, o) in orbits.orbits.iter().enumerate() {
            if orbits.conj_orbit[i] >= i {
                out.push(OrbitBlocks::new(cs, o));
            }
        }
        out
    }

    pub fn fstar(&self, tau: usize) -> u64 {
        self.f[&self.conj[&tau]]
    }

    pub fn pred(&self, tau: usize) -> usize {
        *self.succ.iter().find(|&(_, &s)| s == tau).map(|(k, _)| k).unwrap()
    }
}

/// Blockwise mod-p Dieudonne module over the characters of an orbit pair.
/// Stores F and the pairing; V is derived.
#[derive(Clone, Debug)]
pub struct DieudonneModule {
    pub fq: Fq,
    pub blocks: OrbitBlocks,
    /// F_tau : M_tau -> M_{p tau}, applied as x -> F_tau . sigma(x).
    pub frob: BTreeMap<usize, Mat>,
    /// Pairing matrix B_tau of b : M_tau x M_{tau*} -> k, b(x,y) = x^T B_tau y.
    pub pair: BTreeMap<usize, Mat>,
}

impl DieudonneModule {
    pub fn f_map(&self, tau: usize) -> SemilinearMap {
        SemilinearMap::new(self.frob[&tau].clone(), 1)
    }

    /// V restricted to M_tau, landing in M_{tau/p}: solved from
    /// b(F(x), y) = b(x, V(y))^p, which gives
    /// Vhat = B_{sig*}^{-1} . sigma^{-1}(F_{sig*}^T . B_{tau*})
    /// where sig = pred(tau).
    pub fn v_map(&self, tau: usize) -> SemilinearMap {
        let fq = &self.fq;
        let sig = self.blocks.pred(tau);
        let sig_star = self.blocks.conj[&sig];
        let tau_star = self.blocks.conj[&tau];
        let rhs = self.frob[&sig_star].transpose(fq).mul(fq, &self.pair[&tau_star]);
        let b_inv = linalg::inverse(fq, &self.pair[&sig_star]).expect("pairing must be nondegenerate");
        let vhat = b_inv.mul(fq, &rhs.map_frobenius(fq, -1));
        SemilinearMap::new(vhat, -1)
    }

    pub fn b_eval(&self, tau: usize, x: &[FqElem], y: &[FqElem]) -> FqElem {
        let fq = &self.fq;
        let by = self.pair[&tau].matvec(fq, y);
        let mut acc = fq.zero();
        for (a, b) in x.iter().zip(&by) {
            acc = fq.add(&acc, &fq.mul(a, b));
        }
        acc
    }

    /// ker F = Im V and ker V = Im F, block by block.
    pub fn kernels_match_images(&self) -> bool {
        let fq = &self.fq;
        let full = linalg::full_space(fq, self.blocks.g);
        self.blocks.chars.iter().all(|&tau| {
            let succ = self.blocks.succ[&tau];
            // Im(V on M_succ) vs ker(F on M_tau), both inside M_tau
            let imv = image_of_subspace(fq, &self.v_map(succ), &full);
            let kerf = semilinear_kernel(fq, &self.f_map(tau));
            // Im(F on M_tau) vs ker(V on M_succ), both inside M_succ
            let imf = image_of_subspace(fq, &self.f_map(tau), &full);
            let kerv = semilinear_kernel(fq, &self.v_map(succ));
            space_eq(&imv, &kerf) && space_eq(&imf, &kerv)
        })
    }
}

/// The (G,f)-ordinary template: F(e_{tau,j}) = e_{p tau, j} for
/// j <= f(tau*), else 0, and the pairing e-check_{tau,j} -> e_{tau*, g+1-j},
/// i.e. B_tau is the antidiagonal identity. V then comes out as
/// V(e_{p tau, j}) = e_{tau,j} exactly for j > f(tau*).
pub fn build_ordinary_module(fq: &Fq, blocks: &OrbitBlocks) -> DieudonneModule {
    let g = blocks.g;
    let mut frob = BTreeMap::new();
    let mut pair = BTreeMap::new();
    for &tau in &blocks.chars {
        let cut = blocks.fstar(tau) as usize;
        frob.insert(
            tau,
            Mat::from_fn(fq, g, g, |i, j| if i == j && j < cut { fq.one() } else { fq.zero() }),
        );
        pair.insert(
            tau,
            Mat::from_fn(fq, g, g, |i, j| if i + j == g - 1 { fq.one() } else { fq.zero() }),
        );
    }
    DieudonneModule { fq: fq.clone(), blocks: blocks.clone(), frob, pair }
}

/// One character's worth of Ekedahl-Oort data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharWord {
    pub char_index: usize,
    /// w as 1-based images: w[k-1] = w(k), a permutation of 1..=g.
    pub w: Vec<usize>,
    /// Positions where dim(ker F /\ M_{tau,j}) jumps.
    pub jumps: Vec<usize>,
    /// The remaining positions.
    pub nonjumps: Vec<usize>,
    /// dim(ker F /\ M_tau) as measured on the module.
    pub f_actual: u64,
    /// True when the projected filtration had a gap whose completion was
    /// genuinely ambiguous (the kernel dimension rises by strictly less than
    /// the gap width, but by more than zero), so the kernel-first rule made
    /// a choice.  Gaps whose completion is forced do not set this flag.
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EOWord {
    pub words: BTreeMap<usize, CharWord>,
}

type Flag = BTreeMap<usize, Mat>;

/// Ekedahl-Oort word of a concrete module: closes {0, M} under F-images and
/// V-preimages, projects the resulting canonical filtration to each block,
/// and reads the jump positions of eta_{tau,j} = dim(ker F /\ M_{tau,j}).
pub fn eo_word_from_module(m: &DieudonneModule) -> Result<EOWord, EoError> {
    let fq = &m.fq;
    let g = m.blocks.g;
    let chars = &m.blocks.chars;
    let total_dim = g * chars.len();
    let zero: Flag = chars.iter().map(|&t| (t, linalg::zero_space(fq, g))).collect();
    let full: Flag = chars.iter().map(|&t| (t, linalg::full_space(fq, g))).collect();

    let mut set: Vec<Flag> = vec![zero, full];
    let bound = 4 * total_dim + 8;
    let mut frontier: Vec<usize> = vec![0, 1];
    let mut rounds = 0;
    while !frontier.is_empty() {
        rounds += 1;
        if rounds > bound || set.len() > bound {
            return Err(EoError::NonStabilizing(bound));
        }
        let mut next_frontier = Vec::new();
        for idx in frontier {
            let x = set[idx].clone();
            // F-image: (F X)_{succ tau} = F_tau (X_tau)
            let mut fx: Flag = BTreeMap::new();
            for &tau in chars {
                let img = image_of_subspace(fq, &m.f_map(tau), &x[&tau]);
                fx.insert(m.blocks.succ[&tau], img);
            }
            // V-preimage: (V^{-1} X)_tau = {y in M_tau : V y in X_{pred tau}}
            let mut vx: Flag = BTreeMap::new();
            for &tau in chars {
                let pre = preimage_of_subspace(fq, &m.v_map(tau), &x[&m.blocks.pred(tau)]);
                vx.insert(tau, pre);
            }
            for cand in [fx, vx] {
                if !set.contains(&cand) {
                    set.push(cand);
                    next_frontier.push(set.len() - 1);
                }
            }
        }
        frontier = next_frontier;
    }

    let mut words = BTreeMap::new();
    for &tau in chars {
        // distinct projections, sorted by dimension, must form a chain
        let mut steps: Vec<Mat> = Vec::new();
        for flag in &set {
            if !steps.iter().any(|s| space_eq(s, &flag[&tau])) {
                steps.push(flag[&tau].clone());
            }
        }
        steps.sort_by_key(space_dim);
        for w in steps.windows(2) {
            if !space_is_subspace(fq, &w[0], &w[1]) {
                return Err(EoError::NotNested(tau));
            }
        }

        let kerf = semilinear_kernel(fq, &m.f_map(tau));
        let mut refined = false;
        // complete to a full flag 0 = C_0 < C_1 < ... < C_g, inserting
        // kernel directions first inside each gap. A gap only makes the
        // word ambiguous when the kernel dimension rises by strictly less
        // than the gap width; only then is the result marked refined.
        let mut flagc: Vec<Mat> = vec![steps[0].clone()];
        for next in steps.iter().skip(1) {
            let gap_start = flagc.last().unwrap();
            let dd = space_dim(next) - space_dim(gap_start);
            if dd > 1 {
                let de = space_dim(&space_intersect(fq, &kerf, next))
                    - space_dim(&space_intersect(fq, &kerf, gap_start));
                if 0 < de && de < dd {
                    refined = true;
                }
            }
            loop {
                let cur = flagc.last().unwrap().clone();
                if space_dim(&cur) == space_dim(next) {
                    break;
                }
                if space_dim(&cur) + 1 == space_dim(next) {
                    flagc.push(next.clone());
                    break;
                }
                let reach = space_intersect(fq, next, &space_sum(fq, &cur, &kerf));
                let pick = (0..reach.rows)
                    .map(|i| reach.row(i))
                    .find(|v| !space_contains(fq, &cur, v))
                    .or_else(|| (0..next.rows).map(|i| next.row(i)).find(|v| !space_contains(fq, &cur, v)))
                    .expect("a proper subspace always misses some basis vector");
                let mut ext = cur.rows_vec();
                ext.push(pick);
                flagc.push(linalg::span(fq, &Mat::from_rows(fq, &ext, g)));
            }
        }
        debug_assert_eq!(flagc.len(), g + 1);

        let eta: Vec<usize> = flagc.iter().map(|w| space_dim(&space_intersect(fq, &kerf, w))).collect();
        let mut jumps = Vec::new();
        let mut nonjumps = Vec::new();
        for j in 1..=g {
            if eta[j] > eta[j - 1] {
                jumps.push(j);
            } else {
                nonjumps.push(j);
            }
        }
        let f_actual = jumps.len() as u64;
        let mut w = vec![0usize; g];
        for (k, &j) in jumps.iter().enumerate() {
            w[j - 1] = k + 1;
        }
        for (k, &i) in nonjumps.iter().enumerate() {
            w[i - 1] = f_actual as usize + k + 1;
        }
        words.insert(tau, CharWord { char_index: tau, w, jumps, nonjumps, f_actual, refined });
    }
    Ok(EOWord { words })
}

/// Length of the permutation: sum over jump positions of j_{tau,k} - k.
pub fn word_length(word: &CharWord) -> u64 {
    word.jumps.iter().enumerate().map(|(k, &j)| (j - (k + 1)) as u64).sum()
}

/// The word of the generic stratum: w(k) = f + k for k <= g - f,
/// w(k) = k - (g - f) for k > g - f.
pub fn maximal_word(f: u64, g: usize) -> Vec<usize> {
    let fstar = g - f as usize;
    (1..=g).map(|k| if k <= fstar { f as usize + k } else { k - fstar }).collect()
}

pub fn is_maximal(w: &[usize], f: u64) -> bool {
    w == maximal_word(f, w.len())
}

/// if j' < j and w(j') > w(j) then w(j) <= f < w(j').
pub fn word_property_holds(w: &[usize], f: u64) -> bool {
    let g = w.len();
    for jp in 0..g {
        for j in jp + 1..g {
            if w[jp] > w[j] && !(w[j] as u64 <= f && f < w[jp] as u64) {
                return false;
            }
        }
    }
    true
}

/// w*(j) = g + 1 - w(g + 1 - j).
pub fn dual_word(w: &[usize]) -> Vec<usize> {
    let g = w.len();
    (1..=g).map(|j| g + 1 - w[g - j]).collect()
}

/// One-line serialization: `tau: w(1) w(2) ... w(g)`.
pub fn word_line(label: &str, word: &CharWord) -> String {
    let xs: Vec<String> = word.w.iter().map(|x| x.to_string()).collect();
    let mark = if word.refined { " (refined)" } else { "" };
    format!("{}: {}{}", label, xs.join(" "), mark)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use crate::monodromy::CyclicDatum;

    fn blocks_for(m: u64, a: Vec<u64>, p: u64) -> Vec<(CharacterSystem, OrbitBlocks)> {
        let cs = CharacterSystem::from_cyclic(&CyclicDatum::new(m, a), p).unwrap();
        let orbits = cs.orbits();
        OrbitBlocks::all(&cs, &orbits).into_iter().map(|b| (cs.clone(), b)).collect()
    }

    #[test]
    fn template_satisfies_module_axioms() {
        for (m, a, p) in [
            (5u64, vec![1u64, 1, 1, 2], 13u64),
            (3, vec![1, 1, 1], 2),
            (7, vec![1, 2, 2, 2], 2),
            (9, vec![1, 2, 3, 3], 5),
        ] {
            let fq = Fq::new(p, 1).unwrap();
            for (_cs, b) in blocks_for(m, a.clone(), p) {
                let md = build_ordinary_module(&fq, &b);
                assert!(md.kernels_match_images(), "m={} p={}", m, p);
                // V comes out exactly as the template: V(e_{p tau, j}) = e_{tau, j}
                // for j > f(tau*), else 0
                for &tau in &b.chars {
                    let succ = b.succ[&tau];
                    let v = md.v_map(succ);
                    let cut = b.fstar(tau) as usize;
                    let expect = Mat::from_fn(&fq, b.g, b.g, |i, j| {
                        if i == j && j >= cut {
                            fq.one()
                        } else {
                            fq.zero()
                        }
                    });
                    assert_eq!(v.mat, expect);
                    assert_eq!(v.twist, -1);
                }
            }
        }
    }

    #[test]
    fn template_pairing_adjunction() {
        // b(F(x), y) = b(x, V(y))^p on random vectors, over an extension so
        // the twist matters
        let p = 13;
        let fq = Fq::new(p, 2).unwrap();
        for (_cs, b) in blocks_for(5, vec![1, 1, 1, 2], p) {
            let md = build_ordinary_module(&fq, &b);
            let mut seed = 7u128;
            let mut rnd = || {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                fq.from_index(seed % fq.size())
            };
            for &tau in &b.chars {
                let succ_tau = b.succ[&tau];
                let succ_tau_star = b.conj[&succ_tau];
                let x: Vector = (0..b.g).map(|_| rnd()).collect();
                let y: Vector = (0..b.g).map(|_| rnd()).collect();
                let lhs = md.b_eval(succ_tau, &md.f_map(tau).apply(&fq, &x), &y);
                let vy = md.v_map(succ_tau_star).apply(&fq, &y);
                let rhs = fq.frobenius(&md.b_eval(tau, &x, &vy), 1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn template_word_is_maximal_everywhere() {
        for (m, a, p) in [
            (5u64, vec![1u64, 1, 1, 2], 13u64),
            (3, vec![1, 1, 1], 2),
            (3, vec![1, 1, 1], 7),
            (7, vec![1, 2, 2, 2], 2),
            (6, vec![1, 1, 1, 3], 5),
        ] {
            let fq = Fq::new(p, 1).unwrap();
            for (cs, b) in blocks_for(m, a.clone(), p) {
                let md = build_ordinary_module(&fq, &b);
                let eo = eo_word_from_module(&md).unwrap();
                for &tau in &b.chars {
                    let word = &eo.words[&tau];
                    assert!(!word.refined);
                    assert_eq!(word.f_actual, cs.f[tau]);
                    assert_eq!(word.w, maximal_word(cs.f[tau], b.g), "m={} p={} tau={}", m, p, tau);
                    assert!(is_maximal(&word.w, cs.f[tau]));
                    assert!(word_property_holds(&word.w, cs.f[tau]));
                    assert_eq!(word_length(word), cs.f[tau] * (b.g as u64 - cs.f[tau]));
                }
            }
        }
    }

    #[test]
    fn dimension_one_blocks_are_trivially_maximal() {
        let fq = Fq::new(7, 1).unwrap();
        for (cs, b) in blocks_for(3, vec![1, 1, 1], 7) {
            assert_eq!(b.g, 1);
            let md = build_ordinary_module(&fq, &b);
            let eo = eo_word_from_module(&md).unwrap();
            for &tau in &b.chars {
                assert_eq!(eo.words[&tau].w, vec![1]);
                assert!(is_maximal(&eo.words[&tau].w, cs.f[tau]));
            }
        }
    }

    #[test]
    fn zero_frobenius_gives_non_maximal_word() {
        // 4-dimensional example: orbit (1,2) of m=3 with multiplicity-2
        // branches, g(O) = 2; kill F entirely
        let p = 2;
        let fq = Fq::new(p, 1).unwrap();
        let cs = CharacterSystem::from_cyclic(&CyclicDatum::new(3, vec![1, 1, 2, 2]), p).unwrap();
        let orbits = cs.orbits();
        let b = OrbitBlocks::new(&cs, &orbits.orbits[0]);
        assert_eq!(b.g, 2);
        assert_eq!(b.chars.len(), 2);
        let mut md = build_ordinary_module(&fq, &b);
        for (_, m) in md.frob.iter_mut() {
            *m = Mat::zero(&fq, 2, 2);
        }
        let eo = eo_word_from_module(&md).unwrap();
        for &tau in &b.chars {
            let word = &eo.words[&tau];
            assert_eq!(word.w, vec![1, 2], "closure collapses, kernel fills everything");
            // the projected filtration has a width-2 gap, but the kernel
            // grows by the full gap width, so the completion is forced
            assert!(!word.refined);
            assert_eq!(word.f_actual, 2);
            assert!(!is_maximal(&word.w, cs.f[tau]));
        }
    }

    #[test]
    fn non_nested_input_is_rejected() {
        // a single self-paired block whose F-images and V-preimages are not
        // comparable: closure contains <e1> and <e2,e3>, which do not nest
        let fq = Fq::new(5, 1).unwrap();
        let blocks = OrbitBlocks {
            chars: vec![1],
            g: 3,
            succ: BTreeMap::from([(1, 1)]),
            conj: BTreeMap::from([(1, 1)]),
            f: BTreeMap::from([(1, 1)]),
            labels: BTreeMap::from([(1, "1".to_string())]),
        };
        let mut frob = BTreeMap::new();
        frob.insert(
            1,
            Mat::from_fn(&fq, 3, 3, |i, j| if (i, j) == (0, 2) { fq.one() } else { fq.zero() }),
        );
        let mut pair = BTreeMap::new();
        pair.insert(1, Mat::identity(&fq, 3));
        let md = DieudonneModule { fq: fq.clone(), blocks, frob, pair };
        assert_eq!(eo_word_from_module(&md), Err(EoError::NotNested(1)));
    }

    #[test]
    fn closed_form_examples() {
        // f = 2, g = 3: maximal word is (3,1,2)
        assert_eq!(maximal_word(2, 3), vec![3, 1, 2]);
        assert!(is_maximal(&[3, 1, 2], 2));
        // f = 1, g = 2: (1,2) is not maximal, (2,1) is
        assert!(!is_maximal(&[1, 2], 1));
        assert!(is_maximal(&[2, 1], 1));
        // the maximal word always satisfies the defining property
        for g in 1..=6usize {
            for f in 0..=g as u64 {
                let w = maximal_word(f, g);
                assert!(word_property_holds(&w, f));
                // duality: the maximal word for f* is the dual of the one for f
                assert_eq!(dual_word(&w), maximal_word(g as u64 - f, g));
            }
        }
    }

    #[test]
    fn computed_words_satisfy_duality() {
        let p = 13;
        let fq = Fq::new(p, 1).unwrap();
        for (_cs, b) in blocks_for(5, vec![1, 1, 1, 2], p) {
            let md = build_ordinary_module(&fq, &b);
            let eo = eo_word_from_module(&md).unwrap();
            for &tau in &b.chars {
                let ws = &eo.words[&b.conj[&tau]].w;
                assert_eq!(*ws, dual_word(&eo.words[&tau].w));
            }
        }
    }

    #[test]
    fn word_serialization() {
        let word = CharWord {
            char_index: 2,
            w: vec![3, 1, 2],
            jumps: vec![2, 3],
            nonjumps: vec![1],
            f_actual: 2,
            refined: false,
        };
        assert_eq!(word_line("2", &word), "2: 3 1 2");
    }
}
