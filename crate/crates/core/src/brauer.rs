//! Quaternion symbols over Q at all places: Hilbert symbols, sums of symbols
//! through their local invariant vectors, splitting over quadratic fields,
//! and small-rank quadratic-form isotropy by Hasse-Minkowski.
//!
//! The relevant place set of any computation is `{2, infinity}` together
//! with the primes dividing the square classes of the entries; invariants
//! provably vanish elsewhere.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor, legendre, val_unit, Q, Z};
use crate::etale::square_class;

/// A place of Q: the archimedean place or a finite prime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Infinity,
    Prime(#[serde(with = "crate::arith::bigint_string")] Z),
}

impl Place {
    pub fn prime(p: i64) -> Place {
        Place::Prime(Z::from(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "infinity"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn two() -> Z {
    Z::from(2)
}

/// Hilbert symbol `(u, v)_place` in `{1, -1}`. Depends only on the square
/// classes of `u` and `v`; computed by the standard odd-p / p=2 / real
/// formulas on valuations and unit parts, with no Hensel lifting at runtime.
pub fn hilbert(u: &Q, v: &Q, place: &Place) -> i32 {
    assert!(!u.is_zero() && !v.is_zero());
    match place {
        Place::Infinity => {
            if u.is_negative() && v.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => {
            let (alpha, u1) = val_unit(u, p);
            let (beta, v1) = val_unit(v, p);
            let alpha = alpha.rem_euclid(2) as u32;
            let beta = beta.rem_euclid(2) as u32;
            if *p == two() {
                // unit classes mod 8: eps(x) = (x-1)/2, omega(x) = (x^2-1)/8
                let eps = |x: &Q| -> u32 { (mod8(&(x.numer() * x.denom())) - 1) / 2 % 2 };
                let omega = |x: &Q| -> u32 {
                    let r = mod8(&(x.numer() * x.denom()));
                    (r * r - 1) / 8 % 2
                };
                let e = eps(&u1) * eps(&v1) + alpha * omega(&v1) + beta * omega(&u1);
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let mut sign = 1i32;
                if alpha * beta == 1 && legendre(&(p - Z::one()), p) == -1 {
                    // (-1|p) = -1 exactly when p = 3 mod 4
                    sign = -sign;
                }
                if beta == 1 {
                    let un = u1.numer() * u1.denom();
                    sign *= legendre(&un, p);
                }
                if alpha == 1 {
                    let vn = v1.numer() * v1.denom();
                    sign *= legendre(&vn, p);
                }
                sign
            }
        }
    }
}

fn mod8(x: &Z) -> u32 {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    x.mod_floor(&Z::from(8)).to_u32().unwrap()
}

/// True iff `u` is a square in the completion at `place`.
pub fn is_local_square(u: &Q, place: &Place) -> bool {
    assert!(!u.is_zero());
    match place {
        Place::Infinity => u.is_positive(),
        Place::Prime(p) => {
            let (v, u1) = val_unit(u, p);
            if v.rem_euclid(2) != 0 {
                return false;
            }
            let un = u1.numer() * u1.denom();
            if *p == two() {
                mod8(&un) == 1
            } else {
                legendre(&un, p) == 1
            }
        }
    }
}

/// A formal sum of quaternion symbols `sum (u_i, v_i)` in `Br(Q)[2]`.
/// The empty list is the zero class; the class depends only on the square
/// classes of the entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SymbolExpr {
    pub pairs: Vec<(String, String)>,
}

impl SymbolExpr {
    pub fn new(pairs: Vec<(Q, Q)>) -> Self {
        assert!(pairs.iter().all(|(u, v)| !u.is_zero() && !v.is_zero()));
        SymbolExpr {
            pairs: pairs
                .iter()
                .map(|(u, v)| (crate::arith::q_to_string(u), crate::arith::q_to_string(v)))
                .collect(),
        }
    }

    pub fn single(u: &Q, v: &Q) -> Self {
        SymbolExpr::new(vec![(u.clone(), v.clone())])
    }

    pub fn empty() -> Self {
        SymbolExpr { pairs: vec![] }
    }

    pub fn entries(&self) -> Vec<(Q, Q)> {
        self.pairs
            .iter()
            .map(|(u, v)| {
                (
                    crate::arith::q_from_str(u).expect("stored rational"),
                    crate::arith::q_from_str(v).expect("stored rational"),
                )
            })
            .collect()
    }

    /// `{2, infinity}` plus the primes of the square classes of all entries.
    pub fn relevant_places(&self) -> Vec<Place> {
        let mut primes = std::collections::BTreeSet::new();
        primes.insert(two());
        for (u, v) in self.entries() {
            for x in [u, v] {
                let c = square_class(&x);
                for (p, _) in factor(c.value()).iter() {
                    primes.insert(p.clone());
                }
            }
        }
        let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
        out.push(Place::Infinity);
        out
    }
}

/// Finitely supported map `Place -> Z/2`; total sum is asserted to be zero
/// (Hilbert reciprocity), which doubles as a self-check of the symbol code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct LocalInvariantVector {
    pub entries: BTreeMap<Place, u8>,
}

impl LocalInvariantVector {
    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|&b| b == 0)
    }

    pub fn support(&self) -> Vec<Place> {
        self.entries
            .iter()
            .filter(|(_, &b)| b == 1)
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn at(&self, place: &Place) -> u8 {
        *self.entries.get(place).unwrap_or(&0)
    }
}

/// Componentwise sum of Hilbert invariants over the relevant places.
pub fn local_invariants(e: &SymbolExpr) -> LocalInvariantVector {
    let entries = e.entries();
    let mut map = BTreeMap::new();
    let mut total = 0u8;
    for place in e.relevant_places() {
        let mut bit = 0u8;
        for (u, v) in &entries {
            if hilbert(u, v, &place) == -1 {
                bit ^= 1;
            }
        }
        total ^= bit;
        if bit == 1 {
            map.insert(place, 1);
        }
    }
    assert_eq!(total, 0, "Hilbert reciprocity violated: symbol code is wrong");
    LocalInvariantVector { entries: map }
}

/// True iff the class of `e` is zero in `Br(Q)`.
pub fn is_zero_class(e: &SymbolExpr) -> bool {
    local_invariants(e).is_zero()
}

/// True iff `e` becomes zero over `Q(sqrt d)`: at every place where `d` is a
/// local square the local invariant must vanish; everywhere else the local
/// quadratic extension kills the class. For `d` a square this is `is_zero`.
pub fn splits_over_quadratic(e: &SymbolExpr, d: &Q) -> bool {
    let inv = local_invariants(e);
    for place in inv.support() {
        if is_local_square(d, &place) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BrauerError {
    #[error("no rational point: obstruction at place {0}")]
    NotSplit(Place),
    #[error("the two symbols define different Brauer classes")]
    ClassesDiffer,
}

/// A nondegenerate diagonal quadratic form over Q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub coeffs: Vec<String>,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<Q>) -> Self {
        assert!(coeffs.iter().all(|c| !c.is_zero()), "coefficients must be nonzero");
        DiagonalForm {
            coeffs: coeffs.iter().map(crate::arith::q_to_string).collect(),
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        DiagonalForm::new(coeffs.iter().map(|&c| Q::from_integer(Z::from(c))).collect())
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn entries(&self) -> Vec<Q> {
        self.coeffs
            .iter()
            .map(|c| crate::arith::q_from_str(c).expect("stored rational"))
            .collect()
    }

    pub fn evaluate(&self, v: &[Q]) -> Q {
        self.entries()
            .iter()
            .zip(v)
            .map(|(c, x)| c * x * x)
            .fold(Q::zero(), |a, b| a + b)
    }
}

fn relevant_places_of(values: &[Q]) -> Vec<Place> {
    let mut primes = std::collections::BTreeSet::new();
    primes.insert(two());
    for x in values {
        for (p, _) in factor(square_class(x).value()).iter() {
            primes.insert(p.clone());
        }
    }
    let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    out
}

/// Hasse invariant `prod_{i<j} (a_i, a_j)_v` of a diagonal form.
fn hasse_invariant(coeffs: &[Q], place: &Place) -> i32 {
    let mut s = 1;
    for i in 0..coeffs.len() {
        for j in (i + 1)..coeffs.len() {
            s *= hilbert(&coeffs[i], &coeffs[j], place);
        }
    }
    s
}

fn locally_isotropic(coeffs: &[Q], place: &Place) -> bool {
    let n = coeffs.len();
    match n {
        0 | 1 => false,
        2 => {
            let ratio = -(&coeffs[0] / &coeffs[1]);
            is_local_square(&ratio, place)
        }
        3 => {
            // <a,b,c> isotropic over Q_v iff (-a/c, -b/c)_v = 1
            let a = -(&coeffs[0] * &coeffs[2]);
            let b = -(&coeffs[1] * &coeffs[2]);
            hilbert(&a, &b, place) == 1
        }
        4 => {
            // anisotropic iff det is a local square and the Hasse invariant
            // is -(-1,-1)_v
            let det = coeffs.iter().fold(Q::one(), |a, c| a * c);
            if !is_local_square(&det, place) {
                return true;
            }
            let m1 = -Q::one();
            hasse_invariant(coeffs, place) != -hilbert(&m1, &m1, place)
        }
        _ => {
            // rank >= 5 is isotropic over every p-adic field
            match place {
                Place::Infinity => {
                    coeffs.iter().any(|c| c.is_positive()) && coeffs.iter().any(|c| c.is_negative())
                }
                _ => true,
            }
        }
    }
}

/// Exact rational isotropy test (Hasse-Minkowski over the relevant places).
pub fn form_isotropic(q: &DiagonalForm) -> bool {
    let coeffs = q.entries();
    match coeffs.len() {
        0 | 1 => false,
        2 => crate::arith::is_rational_square(&-(&coeffs[0] / &coeffs[1])),
        n => {
            if n >= 5 {
                // indefinite over R suffices once every finite place is automatic
                return coeffs.iter().any(|c| c.is_positive())
                    && coeffs.iter().any(|c| c.is_negative());
            }
            relevant_places_of(&coeffs)
                .iter()
                .all(|v| locally_isotropic(&coeffs, v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q_int, q_ratio};

    #[test]
    fn hilbert_split_pair_everywhere() {
        // 2*4^2 + 17*1^2 = 7^2, so (2,17) = 1 at every place
        let e = SymbolExpr::single(&q_int(2), &q_int(17));
        for place in e.relevant_places() {
            assert_eq!(hilbert(&q_int(2), &q_int(17), &place), 1, "at {place}");
        }
        assert!(is_zero_class(&e));
    }

    #[test]
    fn hilbert_obstruction_at_17() {
        // 3 is not a square mod 17
        assert_eq!(hilbert(&q_int(17), &q_int(3), &Place::prime(17)), -1);
        assert_eq!(hilbert(&q_int(1), &q_int(17), &Place::prime(17)), 1);
        assert_eq!(hilbert(&q_int(1), &q_int(-5), &Place::Infinity), 1);
    }

    #[test]
    fn hilbert_at_two() {
        // (2,3)_2 = -1: 2 has odd valuation, omega(3) = 1
        assert_eq!(hilbert(&q_int(2), &q_int(3), &Place::prime(2)), -1);
        // (-1,-1)_2 = -1
        assert_eq!(hilbert(&q_int(-1), &q_int(-1), &Place::prime(2)), -1);
        assert_eq!(hilbert(&q_int(-1), &q_int(-1), &Place::Infinity), -1);
    }

    #[test]
    fn local_squares() {
        // 17 = 1 mod 8 is a 2-adic square
        assert!(is_local_square(&q_int(17), &Place::prime(2)));
        // Legendre(2|3) = -1
        assert!(!is_local_square(&q_int(2), &Place::prime(3)));
        assert!(is_local_square(&q_ratio(49, 4), &Place::prime(7)));
        assert!(is_local_square(&q_int(2), &Place::prime(17)));
        assert!(!is_local_square(&q_int(-4), &Place::Infinity));
    }

    #[test]
    fn invariants_examples() {
        assert!(local_invariants(&SymbolExpr::empty()).is_zero());
        let e = SymbolExpr::single(&q_int(2), &q_int(3));
        let inv = local_invariants(&e);
        assert_eq!(inv.at(&Place::prime(2)), 1);
        assert_eq!(inv.at(&Place::prime(3)), 1);
        assert!(!inv.is_zero());
        // the r,s,t instance for b=2, c=-1, v=(2,1), u=(1,1): r=12, s=12, t=18
        let e = SymbolExpr::new(vec![
            (q_int(12), q_int(2)),
            (q_int(12), q_int(2)),
            (q_int(18), q_int(-1)),
        ]);
        assert!(local_invariants(&e).is_zero());
    }

    #[test]
    fn reciprocity_on_many_pairs() {
        // exercised via the assert inside local_invariants
        for u in [-30i64, -17, -5, -2, -1, 2, 3, 5, 6, 7, 10, 15, 34, 210] {
            for v in [-21i64, -3, -1, 2, 5, 11, 30, 170] {
                let _ = local_invariants(&SymbolExpr::single(&q_int(u), &q_int(v)));
            }
        }
    }

    #[test]
    fn splitting_over_quadratic_fields() {
        // (2,3) has an obstruction at p=2 where 17 is a square
        let e = SymbolExpr::single(&q_int(2), &q_int(3));
        assert!(!splits_over_quadratic(&e, &q_int(17)));
        // the zero class splits everywhere
        let z = SymbolExpr::single(&q_int(2), &q_int(17));
        assert!(splits_over_quadratic(&z, &q_int(-30)));
        // (a,b) splits over Q(sqrt a)
        let e = SymbolExpr::single(&q_int(5), &q_int(3));
        assert!(splits_over_quadratic(&e, &q_int(5)));
        // d = 1 reduces to is_zero
        assert!(!splits_over_quadratic(&e, &q_int(1)));
        assert!(splits_over_quadratic(&z, &q_int(1)));
    }

    #[test]
    fn isotropy_small_ranks() {
        assert!(form_isotropic(&DiagonalForm::from_ints(&[1, 1, -2])));
        assert!(form_isotropic(&DiagonalForm::from_ints(&[1, 1, -1, -2])));
        assert!(!form_isotropic(&DiagonalForm::from_ints(&[1, 1, 1, 1])));
        assert!(!form_isotropic(&DiagonalForm::from_ints(&[1, 1])));
        assert!(form_isotropic(&DiagonalForm::from_ints(&[2, -18])));
        // rank 3 anisotropic over Q_2: <1,1,1> (x^2+y^2+z^2 = 0 has no 2-adic solution)
        assert!(!form_isotropic(&DiagonalForm::from_ints(&[1, 1, 1])));
        // rank 5 indefinite is isotropic
        assert!(form_isotropic(&DiagonalForm::from_ints(&[1, 3, 5, 7, -11])));
        assert!(!form_isotropic(&DiagonalForm::from_ints(&[-1, -3, -5, -7, -11])));
    }

    #[test]
    fn albert_form_instance() {
        // <l, -lc, -lx, lbcx> for l=1, c=-1, x=1, b=2 is <1,1,-1,-2>
        assert!(form_isotropic(&DiagonalForm::from_ints(&[1, 1, -1, -2])));
    }
}
