//! mu-ordinary Newton polygons: the generic polygon of an orbit from its
//! signature values, and the total polygon of a datum as the direct sum
//! over its cyclic quotients' new parts.

use crate::arith;
use crate::monodromy::{AnyDatum, CharacterSystem, CyclicDatum, MonodromyError};
use std::fmt;

/// A multiset of slopes in [0,1] with multiplicities, sorted by slope and
/// stored in lowest terms.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NewtonPolygon {
    /// (numerator, denominator, multiplicity), reduced, merged, ascending.
    parts: Vec<(u64, u64, u64)>,
}

impl NewtonPolygon {
    pub fn empty() -> NewtonPolygon {
        NewtonPolygon { parts: Vec::new() }
    }

    pub fn from_parts(raw: &[(u64, u64, u64)]) -> NewtonPolygon {
        let mut parts: Vec<(u64, u64, u64)> = Vec::new();
        for &(num, den, mult) in raw {
            assert!(den > 0 && num <= den, "slope must be a rational in [0,1]");
            if mult == 0 {
                continue;
            }
            let (n, d) = arith::reduce_fraction(num, den);
            parts.push((n, d, mult));
        }
        parts.sort_by(|a, b| cmp_slope(*a, *b).then(a.1.cmp(&b.1)));
        // merge equal slopes
        let mut merged: Vec<(u64, u64, u64)> = Vec::new();
        for (n, d, m) in parts {
            if let Some(last) = merged.last_mut() {
                if last.0 == n && last.1 == d {
                    last.2 += m;
                    continue;
                }
            }
            merged.push((n, d, m));
        }
        NewtonPolygon { parts: merged }
    }

    pub fn parts(&self) -> &[(u64, u64, u64)] {
        &self.parts
    }

    /// Total multiplicity.
    pub fn height(&self) -> u64 {
        self.parts.iter().map(|&(_, _, m)| m).sum()
    }

    /// Sum of slope times multiplicity, as a reduced fraction.
    pub fn slope_mass(&self) -> (u64, u64) {
        let mut num: u128 = 0;
        let mut den: u128 = 1;
        for &(n, d, m) in &self.parts {
            // num/den + n*m/d
            num = num * d as u128 + n as u128 * m as u128 * den;
            den *= d as u128;
            let g = gcd_u128(num, den);
            num /= g;
            den /= g;
        }
        (num as u64, den as u64)
    }

    pub fn direct_sum(&self, other: &NewtonPolygon) -> NewtonPolygon {
        let mut raw = self.parts.clone();
        raw.extend_from_slice(&other.parts);
        NewtonPolygon::from_parts(&raw)
    }

    /// Every slope lambda appears with the same multiplicity as 1 - lambda.
    pub fn is_symmetric(&self) -> bool {
        self.parts.iter().all(|&(n, d, m)| {
            let mirrored = (d - n, d);
            self.parts
                .iter()
                .any(|&(n2, d2, m2)| (n2, d2) == mirrored && m2 == m)
        })
    }

    /// True when the only slopes are 0 and 1 (or the polygon is empty).
    pub fn is_ordinary(&self) -> bool {
        self.parts.iter().all(|&(n, d, _)| n == 0 || n == d)
    }
}

fn cmp_slope(a: (u64, u64, u64), b: (u64, u64, u64)) -> std::cmp::Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a.max(1)
    } else {
        gcd_u128(b, a % b)
    }
}

impl fmt::Display for NewtonPolygon {
    /// One `num/den x mult` line per distinct slope, ascending.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "(empty)");
        }
        let lines: Vec<String> =
            self.parts.iter().map(|&(n, d, m)| format!("{}/{} x {}", n, d, m)).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

/// Generic (mu-ordinary) polygon of one Frobenius orbit from the signature
/// values along the orbit: for j = 1..g(O), the slope
/// lambda_j = #{tau in O : f(tau) >= j} / l appears with multiplicity l.
pub fn polygon_from_orbit_f(fs: &[u64], g: u64) -> NewtonPolygon {
    let l = fs.len() as u64;
    if l == 0 || g == 0 {
        return NewtonPolygon::empty();
    }
    let raw: Vec<(u64, u64, u64)> = (1..=g)
        .map(|j| {
            let count = fs.iter().filter(|&&f| f >= j).count() as u64;
            (count, l, l)
        })
        .collect();
    NewtonPolygon::from_parts(&raw)
}

/// Generic polygon of one orbit of a character system.
pub fn orbit_polygon(cs: &CharacterSystem, orbit: &[usize]) -> NewtonPolygon {
    let fs: Vec<u64> = orbit.iter().map(|&t| cs.f[t]).collect();
    let g = cs.f[orbit[0]] + cs.f[cs.conj[orbit[0]]];
    polygon_from_orbit_f(&fs, g)
}

/// Direct sum of the orbit polygons over the new characters (those of exact
/// order m) of a cyclic datum. Works for degenerate data with fewer than 3
/// branch points, which arise as quotients; such data contribute nothing.
pub fn new_part_polygon(d: &CyclicDatum, p: u64) -> Result<NewtonPolygon, MonodromyError> {
    let m = d.m;
    if m < 2 {
        return Ok(NewtonPolygon::empty());
    }
    if p < 2 || arith::gcd(p, m) != 1 {
        return Err(MonodromyError::BadPrime { p, exponent: m });
    }
    let f = d.signature();
    let mut seen = vec![false; m as usize];
    let mut total = NewtonPolygon::empty();
    for start in 1..m {
        if seen[start as usize] || arith::gcd(start, m) != 1 {
            continue;
        }
        let mut orbit_f = Vec::new();
        let mut cur = start;
        loop {
            seen[cur as usize] = true;
            orbit_f.push(f[cur as usize]);
            cur = (cur * p) % m;
            if cur == start {
                break;
            }
        }
        let g = f[start as usize] + f[(m - start) as usize];
        total = total.direct_sum(&polygon_from_orbit_f(&orbit_f, g));
    }
    Ok(total)
}

/// The mu-ordinary polygon of the whole datum: direct sum over all cyclic
/// quotients of their new parts. Symmetric, of height 2 * genus.
pub fn mu_ordinary_total(datum: &AnyDatum, p: u64) -> Result<NewtonPolygon, MonodromyError> {
    let mut total = NewtonPolygon::empty();
    for q in datum.quotients() {
        if q.degree < 2 {
            continue;
        }
        total = total.direct_sum(&new_part_polygon(&q.datum, p)?);
    }
    Ok(total)
}
