//! Constructive rational points on conics `a X^2 + b Y^2 = Z^2` by the
//! classical Legendre descent, plus the norm representations, common slots
//! and the bounded Albert-form witness search built on top of them.
//!
//! The descent reduces by square classes and then shrinks `|b|` using a
//! square root of `a` modulo `|b|`; every step is deterministic (the
//! square-root-mod-p subroutine sweeps nonresidues in order), so output
//! points are reproducible.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{exact_sqrt, squarefree_part, sqrt_mod_squarefree, Q, Z};
use crate::brauer::{is_zero_class, local_invariants, BrauerError, SymbolExpr};
#[cfg(test)]
use crate::brauer::Place;
use crate::etale::{EtaleAlgebra, EtaleElement};

/// Verified rational point on `a X^2 + b Y^2 = Z^2`, scaled to coprime
/// integers, or the obstructing place.
pub fn conic_point(a: &Q, b: &Q) -> Result<(Z, Z, Z), BrauerError> {
    assert!(!a.is_zero() && !b.is_zero());
    let e = SymbolExpr::single(a, b);
    let inv = local_invariants(&e);
    if let Some(place) = inv.support().into_iter().next() {
        return Err(BrauerError::NotSplit(place));
    }
    // reduce to squarefree integer classes: a = A sa^2, b = B sb^2
    let aa = squarefree_part(a);
    let bb = squarefree_part(b);
    let sa = exact_sqrt(&(a / Q::from_integer(aa.clone()))).expect("class scale");
    let sb = exact_sqrt(&(b / Q::from_integer(bb.clone()))).expect("class scale");
    let (x, y, z) = descend(&aa, &bb);
    debug_assert_eq!(&aa * &x * &x + &bb * &y * &y, &z * &z);
    // a (x/sa)^2 + b (y/sb)^2 = z^2; clear denominators
    let xr = Q::from_integer(x) / sa;
    let yr = Q::from_integer(y) / sb;
    let zr = Q::from_integer(z);
    let lcm = xr.denom().lcm(yr.denom()).lcm(zr.denom());
    let (xi, yi, zi) = (
        (xr * Q::from_integer(lcm.clone())).to_integer(),
        (yr * Q::from_integer(lcm.clone())).to_integer(),
        (zr * Q::from_integer(lcm)).to_integer(),
    );
    let g = xi.gcd(&yi).gcd(&zi);
    let (xi, yi, zi) = (xi.abs() / &g, yi.abs() / &g, zi.abs() / &g);
    assert_eq!(
        a * Q::from_integer(&xi * &xi) + b * Q::from_integer(&yi * &yi),
        Q::from_integer(&zi * &zi),
        "conic point verification failed"
    );
    Ok((xi, yi, zi))
}

/// Legendre descent on squarefree integers; assumes solvability (checked by
/// the caller via Hilbert symbols).
fn descend(a: &Z, b: &Z) -> (Z, Z, Z) {
    if a.is_one() {
        return (Z::one(), Z::zero(), Z::one());
    }
    if b.is_one() {
        return (Z::zero(), Z::one(), Z::one());
    }
    if (a + b).is_zero() {
        return (Z::one(), Z::one(), Z::zero());
    }
    if a.abs() > b.abs() {
        let (y, x, z) = descend(b, a);
        return (x, y, z);
    }
    debug_assert!(
        !(*a == Z::from(-1) && *b == Z::from(-1)),
        "unsolvable instance reached the descent"
    );
    let m = b.abs();
    let t0 = sqrt_mod_squarefree(&a.mod_floor(&m), &m)
        .expect("solvability guarantees a to be a residue modulo b");
    // centered representative |t| <= |b|/2
    let t = if &t0 + &t0 > m { &t0 - &m } else { t0 };
    let bb1 = (&t * &t - a) / b;
    debug_assert!(!bb1.is_zero(), "t^2 = a impossible for squarefree a != 1");
    let b2 = squarefree_part(&Q::from_integer(bb1.clone()));
    let s = exact_sqrt(&Q::from_integer(&bb1 / &b2)).expect("square part").to_integer();
    let (x0, y0, z0) = descend(a, &b2);
    // N((t + sqrt a)(z0 - x0 sqrt a)) = b (b2 s y0)^2
    let x = &z0 - &t * &x0;
    let y = &b2 * &s * &y0;
    let z = &t * &z0 - a * &x0;
    (x, y, z)
}

/// An element `alpha` of `F_a` with `N_a(alpha) = b` exactly, built from a
/// conic point, or the obstructing place.
pub fn norm_rep(a: &Q, b: &Q) -> Result<EtaleElement, BrauerError> {
    let (x, y, z) = conic_point(a, b)?;
    let alg = EtaleAlgebra::quadratic(a.clone());
    let alpha = if !y.is_zero() {
        // alpha = (z + x sqrt a) / y
        let yq = Q::from_integer(y);
        alg.element(vec![Q::from_integer(z) / &yq, Q::from_integer(x) / yq])
    } else {
        // y = 0 forces a = (z/x)^2; use the split-algebra representative
        let m = Q::from_integer(z) / Q::from_integer(x);
        debug_assert_eq!(&m * &m, *a);
        let half = Q::new(Z::one(), Z::from(2));
        alg.element(vec![(b + Q::one()) * &half, (b - Q::one()) * half / m])
    };
    debug_assert_eq!(alpha.full_norm(), *b);
    Ok(alpha)
}

/// Norm-one elements of `F_d`: `1`, then the line parametrization
/// `(l^2 + d)/(l^2 - d) + (2l/(l^2 - d)) sqrt(d)` for `l = 1, 2, ...`.
pub fn norm_one_sweep(d: Q) -> impl Iterator<Item = EtaleElement> {
    let alg = EtaleAlgebra::quadratic(d.clone());
    let first = std::iter::once(alg.one());
    let rest = (1i64..).filter_map(move |l| {
        let l = Q::from_integer(Z::from(l));
        let den = &l * &l - &d;
        if den.is_zero() {
            return None;
        }
        let eps = alg.element(vec![(&l * &l + &d) / &den, (&l + &l) / den]);
        debug_assert!(eps.full_norm().is_one());
        Some(eps)
    });
    first.chain(rest)
}

/// Elements of `F_d` with exact norm `target`, swept along the norm-one line
/// through a base conic point (including the sign and conjugate variants).
pub fn norm_values_sweep(d: &Q, target: &Q) -> Result<impl Iterator<Item = EtaleElement>, BrauerError> {
    let base = norm_rep(d, target)?;
    Ok(norm_one_sweep(d.clone())
        .map(move |eps| base.mul(&eps))
        .flat_map(|x| [x.clone(), x.neg(), x.sigma(0), x.sigma(0).neg()]))
}

/// Common slot data for two equal symbols `(a,u) = (b,v)`:
/// `w` with `(a,u) = (a,w) = (b,w) = (b,v)`, together with the
/// chain-lemma decomposition `u = n_a * n_ab`, `v = n_b * n_ab`.
#[derive(Debug, Clone)]
pub struct CommonSlot {
    pub w: Q,
    /// eta in F_{ab} with N(eta) = n_ab = w
    pub eta_ab: EtaleElement,
    /// alpha in F_a with N(alpha) = u / w
    pub alpha_a: EtaleElement,
    /// beta in F_b with N(beta) = v / w
    pub beta_b: EtaleElement,
}

/// Constructs a common slot from conic points: sweep `n_ab = N_{ab}(eta)`
/// over integer-coordinate elements until `u / n_ab` lands in `N_a`; the
/// second decomposition `v / n_ab` in `N_b` is then automatic.
pub fn common_slot(a: &Q, u: &Q, b: &Q, v: &Q) -> Result<CommonSlot, BrauerError> {
    let e = SymbolExpr::new(vec![(a.clone(), u.clone()), (b.clone(), v.clone())]);
    if !is_zero_class(&e) {
        return Err(BrauerError::ClassesDiffer);
    }
    let ab = a * b;
    for eta in integer_coord_sweep(&ab) {
        let w = eta.full_norm();
        if w.is_zero() {
            continue;
        }
        let residual = u / &w;
        if is_zero_class(&SymbolExpr::single(a, &residual)) {
            let alpha_a = norm_rep(a, &residual).expect("class checked");
            let beta_b = norm_rep(b, &(v / &w)).expect("guaranteed by the chain identity");
            return Ok(CommonSlot {
                w,
                eta_ab: eta,
                alpha_a,
                beta_b,
            });
        }
    }
    unreachable!("chain-lemma witness exists at some finite height")
}

/// Integer-coordinate elements `s + t sqrt(d)` in height order.
pub fn integer_coord_sweep(d: &Q) -> impl Iterator<Item = EtaleElement> {
    let alg = EtaleAlgebra::quadratic(d.clone());
    (1i64..).flat_map(move |h| {
        let alg = alg.clone();
        let mut batch = Vec::new();
        for s in 0..=h {
            for t in -h..=h {
                if s.max(t.abs()) != h && !(s == 0 && t.abs() != h) {
                    continue; // only new pairs at this height
                }
                if s == 0 && t == 0 {
                    continue;
                }
                batch.push(alg.element_ints(&[s, t]));
            }
        }
        batch
    })
}

/// Outcome of the bounded Albert witness search.
#[derive(Debug, Clone)]
pub enum AlbertOutcome {
    /// `z` with `(pi, mu z) = 0` in `Br(F_a)`, witnessed by
    /// `mu z = xi1^2 - pi xi2^2`.
    Found { z: Q, xi1: EtaleElement, xi2: EtaleElement },
    /// no witness within the height bound; never a claim of nonexistence
    Unknown { bound: i64 },
}

/// Searches for `z` in `Q^x` with `(pi, mu z) = 0` in `Br(F_a)` by
/// representing a rational value by `<mu, -pi mu>` over `F_a`: enumerate
/// `xi1, xi2` with integer coordinates and keep `(xi1^2 - pi xi2^2)/mu`
/// when it is a nonzero rational. This is a semi-decision; the default
/// height bound is 10^4.
pub fn albert_z_search(pi: &EtaleElement, mu: &EtaleElement, bound: i64) -> AlbertOutcome {
    let alg = pi.algebra().clone();
    assert_eq!(alg.n(), 1, "albert_z_search works over a quadratic algebra");
    assert_eq!(mu.algebra(), &alg);
    let mu_inv = mu.inv().expect("mu must be a unit");
    // pi a square: (pi, anything) = 0, take z = 1
    if let Some(rho) = pi.all_sqrts().into_iter().find(|r| r.is_unit()) {
        let half = Q::new(Z::one(), Z::from(2));
        let xi1 = alg.one().add(mu).scale(&half);
        let xi2 = mu.sub(&alg.one()).scale(&half).mul(&rho.inv().expect("unit root"));
        debug_assert_eq!(xi1.square().sub(&pi.mul(&xi2.square())), *mu);
        return AlbertOutcome::Found { z: Q::one(), xi1, xi2 };
    }
    let mut h = 1i64;
    while h <= bound {
        for p1 in -h..=h {
            for q1 in -h..=h {
                let xi1 = alg.element_ints(&[p1, q1]);
                let xi1sq = xi1.square();
                for p2 in -h..=h {
                    for q2 in -h..=h {
                        if p1 == 0 && q1 == 0 && p2 == 0 && q2 == 0 {
                            continue;
                        }
                        let xi2 = alg.element_ints(&[p2, q2]);
                        let val = xi1sq.sub(&pi.mul(&xi2.square()));
                        let ratio = val.mul(&mu_inv);
                        if let Some(z) = ratio.as_rational() {
                            if !z.is_zero() {
                                return AlbertOutcome::Found { z, xi1, xi2 };
                            }
                        }
                    }
                }
            }
        }
        h *= 4;
    }
    AlbertOutcome::Unknown { bound }
}
