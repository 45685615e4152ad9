//! Tiered, certificate-producing membership deciders for products of norm
//! groups: `N_a`, `N_x N_y`, the symmetric triple `N_x N_y N_{xy}` (via the
//! Serre-Tate product), the biquadratic norm group `N_{b,c}`, and a bounded
//! search fallback for general triple products.
//!
//! Conventions: `N_1 = Q^x` (norms from the split algebra), so degenerate
//! inputs flow through the same code paths. Member certificates re-verify
//! exactly: the product of the factors' full norms equals the queried value,
//! not just its square class.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{q_from_str, q_to_string, Q};
use crate::brauer::{hilbert, is_local_square, is_zero_class, splits_over_quadratic, Place, SymbolExpr};
use crate::conic::{integer_coord_sweep, norm_one_sweep, norm_rep};
use crate::etale::{EtaleAlgebra, EtaleElement, IdempotentSplit, SquareClass};

/// A membership query `u in N_{g_1} ... N_{g_k}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormProductQuery {
    pub u: String,
    pub groups: Vec<String>,
}

impl NormProductQuery {
    pub fn new(u: &Q, groups: &[Q]) -> Self {
        NormProductQuery {
            u: q_to_string(u),
            groups: groups.iter().map(q_to_string).collect(),
        }
    }
}

/// A machine-checkable reason for non-membership.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Obstruction {
    /// `hilbert(symbol.0, symbol.1, place) = -1` where membership requires it
    /// to be trivial.
    Local { place: Place, symbol: (String, String) },
    /// The Serre-Tate product `omega(u) = prod_{v: x square in Q_v} (y,u)_v`
    /// evaluates to -1; the contributing places are recorded.
    Omega {
        x: String,
        y: String,
        u: String,
        contributing: Vec<Place>,
    },
}

impl Obstruction {
    /// Re-evaluates the obstruction from scratch.
    pub fn reverify(&self) -> bool {
        match self {
            Obstruction::Local { place, symbol } => {
                let u = q_from_str(&symbol.0).expect("stored rational");
                let v = q_from_str(&symbol.1).expect("stored rational");
                hilbert(&u, &v, place) == -1
            }
            Obstruction::Omega { x, y, u, .. } => {
                let x = q_from_str(x).expect("stored rational");
                let y = q_from_str(y).expect("stored rational");
                let u = q_from_str(u).expect("stored rational");
                omega_product(&u, &x, &y).0 == -1
            }
        }
    }
}

/// Three-valued result of a norm-product membership query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Verdict {
    /// Certificate factors: étale elements whose full norms multiply to the
    /// queried value exactly.
    Member { certificate: Vec<EtaleElement> },
    NonMember { obstruction: Obstruction },
    Unknown { bound: i64 },
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member { .. })
    }

    pub fn is_non_member(&self) -> bool {
        matches!(self, Verdict::NonMember { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown { .. })
    }

    /// Exact re-verification of a Member certificate against the value.
    pub fn verify_member(&self, u: &Q) -> bool {
        match self {
            Verdict::Member { certificate } => {
                let prod = certificate
                    .iter()
                    .map(|f| f.full_norm())
                    .fold(Q::one(), |a, b| a * b);
                prod == *u
            }
            _ => false,
        }
    }
}

/// Decides `u in N_a` exactly via Hilbert symbols; Member carries a norm
/// representation with `N_a(alpha) = u`.
pub fn member_single(u: &Q, a: &Q) -> Verdict {
    let e = SymbolExpr::single(a, u);
    let inv = crate::brauer::local_invariants(&e);
    match inv.support().into_iter().next() {
        None => {
            let alpha = norm_rep(a, u).expect("zero class has a norm representation");
            Verdict::Member {
                certificate: vec![alpha],
            }
        }
        Some(place) => Verdict::NonMember {
            obstruction: Obstruction::Local {
                place,
                symbol: (q_to_string(a), q_to_string(u)),
            },
        },
    }
}

/// Decides `u in N_x N_y` exactly: membership holds iff the symbol `(x, u)`
/// splits over `Q(sqrt(xy))`. Member certificates are assembled from a
/// bounded factor sweep plus conic points and always terminate.
pub fn member_double(u: &Q, x: &Q, y: &Q) -> Verdict {
    let xy = x * y;
    let e = SymbolExpr::single(x, u);
    let inv = crate::brauer::local_invariants(&e);
    if let Some(place) = inv.support().iter().find(|v| is_local_square(&xy, v)) {
        return Verdict::NonMember {
            obstruction: Obstruction::Local {
                place: place.clone(),
                symbol: (q_to_string(x), q_to_string(u)),
            },
        };
    }
    let (fx, fy) = certificate_double(u, x, y);
    Verdict::Member {
        certificate: vec![fx, fy],
    }
}

/// Explicit factors for a decided `u in N_x N_y`.
fn certificate_double(u: &Q, x: &Q, y: &Q) -> (EtaleElement, EtaleElement) {
    let one_x = EtaleAlgebra::quadratic(x.clone()).one();
    let one_y = EtaleAlgebra::quadratic(y.clone()).one();
    if is_zero_class(&SymbolExpr::single(x, u)) {
        return (norm_rep(x, u).expect("checked"), one_y);
    }
    if is_zero_class(&SymbolExpr::single(y, u)) {
        return (one_x, norm_rep(y, u).expect("checked"));
    }
    for eta in integer_coord_sweep(y) {
        let n = eta.full_norm();
        if n.is_zero() {
            continue;
        }
        let residual = u / &n;
        if is_zero_class(&SymbolExpr::single(x, &residual)) {
            return (norm_rep(x, &residual).expect("checked"), eta);
        }
    }
    unreachable!("integer-coordinate witness exists for a true double membership")
}

/// The Serre-Tate product `omega(u) = prod (y, u)_v` over the places `v`
/// where `x` is a local square, together with the contributing places.
pub fn omega_product(u: &Q, x: &Q, y: &Q) -> (i32, Vec<Place>) {
    let mut relevant = SymbolExpr::new(vec![(y.clone(), u.clone())]).relevant_places();
    // membership of a place in S_1 is tested on x; its primes matter too
    for p in SymbolExpr::single(x, &Q::one()).relevant_places() {
        if !relevant.contains(&p) {
            relevant.push(p);
        }
    }
    let mut omega = 1i32;
    let mut contributing = Vec::new();
    for v in relevant {
        if !is_local_square(x, &v) {
            continue;
        }
        if hilbert(y, u, &v) == -1 {
            omega = -omega;
            contributing.push(v);
        }
    }
    (omega, contributing)
}

/// Decides `u in N_x N_y N_{xy}` exactly via the Serre-Tate criterion:
/// membership iff `omega(u) = 1`. Member certificates come from a growing
/// factor search (a witness is guaranteed to exist).
pub fn member_triple_sym(u: &Q, x: &Q, y: &Q) -> Verdict {
    let (omega, contributing) = omega_product(u, x, y);
    if omega == -1 {
        return Verdict::NonMember {
            obstruction: Obstruction::Omega {
                x: q_to_string(x),
                y: q_to_string(y),
                u: q_to_string(u),
                contributing,
            },
        };
    }
    let xy = x * y;
    let certificate = certificate_triple(u, x, y, &xy);
    Verdict::Member { certificate }
}

/// Explicit factors for a decided `u in N_{g1} N_{g2} N_{g3}`: sweep the
/// first factor in height order and decide the residual double membership
/// exactly.
fn certificate_triple(u: &Q, g1: &Q, g2: &Q, g3: &Q) -> Vec<EtaleElement> {
    let one_g1 = EtaleAlgebra::quadratic(g1.clone()).one();
    // try the trivial first factor before sweeping
    for eta in std::iter::once(one_g1).chain(integer_coord_sweep(g1)) {
        let n = eta.full_norm();
        if n.is_zero() {
            continue;
        }
        let residual = u / &n;
        if !splits_over_quadratic(&SymbolExpr::single(g2, &residual), &(g2 * g3)) {
            continue;
        }
        let (f2, f3) = certificate_double(&residual, g2, g3);
        return vec![eta, f2, f3];
    }
    unreachable!("triple membership certificate exists at some finite height")
}

/// Decides `u in N_{b,c}` exactly. Degenerate classes reduce through the
/// idempotent splitting; otherwise the trace construction produces
/// `xi_0 = rho + mu` with `N_{b,c}(xi_0) = u d^2` and the verdict reduces to
/// `d in N_b N_c N_{bc}`, decided by the Serre-Tate product. The Member
/// certificate is an explicit `xi` with `N_{b,c}(xi) = u`.
pub fn member_biquadratic(u: &Q, b: &Q, c: &Q) -> Verdict {
    assert!(!u.is_zero() && !b.is_zero() && !c.is_zero());
    let algebra = EtaleAlgebra::biquadratic(b.clone(), c.clone());
    // Degenerate classes: some subset product is a square, the algebra
    // splits and N_{b,c} collapses onto a single quadratic norm group.
    if let Some((mask, _)) = algebra.relations().first() {
        let single = match mask {
            0b01 => c, // b square: N_{b,c} = N_c
            0b10 => b, // c square: N_{b,c} = N_b
            _ => b,    // bc square: N_{b,c} = N_b
        };
        return match member_single(u, single) {
            Verdict::Member { certificate } => {
                let eta = certificate.into_iter().next().expect("one factor");
                let split = IdempotentSplit::along(
                    &algebra,
                    *mask,
                    crate::arith::exact_sqrt(&algebra.subset_product(*mask)).expect("relation"),
                );
                // component algebras are F_{single}; lift (eta, 1)
                let xi = split.lift(&eta, &split.component_algebra().one());
                debug_assert_eq!(xi.full_norm(), *u);
                Verdict::Member {
                    certificate: vec![xi],
                }
            }
            other => other,
        };
    }
    // u must lie in N_b and N_c
    for g in [b, c] {
        if let Verdict::NonMember { obstruction } = member_single(u, g) {
            return Verdict::NonMember { obstruction };
        }
    }
    let rho = nonzero_trace_rep(b, u);
    let mu = norm_rep(c, u).expect("membership checked");
    let tb = rho.full_trace();
    let tc = mu.full_trace();
    debug_assert!(!tb.is_zero());
    // replacing rho by -rho if necessary to get d != 0
    let (rho, d) = if (&tb + &tc).is_zero() {
        (rho.neg(), &tc - &tb)
    } else {
        (rho, &tb + &tc)
    };
    let xi0 = rho.embed(&algebra, &[0]).add(&mu.embed(&algebra, &[1]));
    debug_assert_eq!(xi0.full_norm(), u * &d * &d);
    match member_triple_sym(&d, b, c) {
        Verdict::Member { certificate } => {
            // N_{b,c}(eta_b eta_c eta_bc) = d^2: divide it out of xi0
            let fb = certificate[0].embed(&algebra, &[0]);
            let fc = certificate[1].embed(&algebra, &[1]);
            let fbc = certificate[2].embed_diagonal(&algebra, 0, 1);
            let divisor = fb.mul(&fc).mul(&fbc);
            let xi = xi0.mul(&divisor.inv().expect("norm factors are units"));
            assert_eq!(xi.full_norm(), *u, "biquadratic certificate must verify");
            Verdict::Member {
                certificate: vec![xi],
            }
        }
        Verdict::NonMember { obstruction } => Verdict::NonMember { obstruction },
        unknown => unknown,
    }
}

/// A norm representation of `u` in `F_b` with nonzero trace, obtained by
/// twisting along the norm-one line when necessary.
fn nonzero_trace_rep(b: &Q, u: &Q) -> EtaleElement {
    let base = norm_rep(b, u).expect("membership checked by caller");
    for eps in norm_one_sweep(b.clone()) {
        let cand = base.mul(&eps);
        if !cand.full_trace().is_zero() {
            return cand;
        }
    }
    unreachable!("the norm-one line meets the nonzero-trace locus")
}

/// Decides `u in N_{g1} N_{g2} N_{g3}` with exact fast paths (a trivial
/// class, a repeated class, or the symmetric shape `{x, y, xy}`), a local
/// screening that can certify NonMember, and a bounded certificate search
/// that otherwise returns an honest Unknown.
pub fn member_triple_general(u: &Q, g1: &Q, g2: &Q, g3: &Q, bound: i64) -> Verdict {
    let gs = [g1.clone(), g2.clone(), g3.clone()];
    let cls: Vec<SquareClass> = gs.iter().map(|g| SquareClass::new(g)).collect();
    // a trivial group: N_1 = Q^x swallows everything
    if let Some(i) = cls.iter().position(|c| c.is_one()) {
        let mut certificate: Vec<EtaleElement> = gs
            .iter()
            .map(|g| EtaleAlgebra::quadratic(g.clone()).one())
            .collect();
        certificate[i] = norm_rep(&gs[i], u).expect("split algebra norms are everything");
        debug_assert!(Verdict::Member {
            certificate: certificate.clone()
        }
        .verify_member(u));
        return Verdict::Member { certificate };
    }
    // repeated class: N_x N_x = N_x
    for i in 0..3 {
        for j in (i + 1)..3 {
            if cls[i] == cls[j] {
                let k = 3 - i - j;
                return match member_double(u, &gs[i], &gs[k]) {
                    Verdict::Member { certificate } => {
                        let mut full = vec![
                            EtaleAlgebra::quadratic(gs[0].clone()).one(),
                            EtaleAlgebra::quadratic(gs[1].clone()).one(),
                            EtaleAlgebra::quadratic(gs[2].clone()).one(),
                        ];
                        full[i] = certificate[0].clone();
                        full[k] = certificate[1].clone();
                        Verdict::Member { certificate: full }
                    }
                    other => other,
                };
            }
        }
    }
    // symmetric shape {x, y, xy} up to squares
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        if cls[i].mul(&cls[j]) == cls[k] {
            return match member_triple_sym(u, &gs[i], &gs[j]) {
                Verdict::Member { .. } => {
                    let certificate = certificate_triple(u, &gs[0], &gs[1], &gs[2]);
                    Verdict::Member { certificate }
                }
                other => other,
            };
        }
    }
    // necessary local screening for three independent classes: at a place
    // where all three are equal nonsquares the product of the local norm
    // groups is the kernel of (g1, .)_v
    let mut places = SymbolExpr::new(vec![
        (gs[0].clone(), u.clone()),
        (gs[1].clone(), u.clone()),
        (gs[2].clone(), u.clone()),
    ])
    .relevant_places();
    places.sort();
    places.dedup();
    for v in &places {
        let squares: Vec<bool> = gs.iter().map(|g| is_local_square(g, v)).collect();
        if squares.iter().any(|&s| s) {
            continue;
        }
        let pairwise_equal = is_local_square(&(&gs[0] * &gs[1]), v) && is_local_square(&(&gs[0] * &gs[2]), v);
        if pairwise_equal && hilbert(&gs[0], u, v) == -1 {
            return Verdict::NonMember {
                obstruction: Obstruction::Local {
                    place: v.clone(),
                    symbol: (q_to_string(&gs[0]), q_to_string(u)),
                },
            };
        }
    }
    // bounded certificate search over first-factor heights
    for eta in integer_coord_sweep(g1) {
        if eta.coords().iter().any(|c| {
            c.numer().magnitude() > &num_bigint::BigUint::from(bound.unsigned_abs())
        }) {
            break;
        }
        let n = eta.full_norm();
        if n.is_zero() {
            continue;
        }
        let residual = u / &n;
        if splits_over_quadratic(&SymbolExpr::single(g2, &residual), &(g2 * g3)) {
            let (f2, f3) = certificate_double(&residual, g2, g3);
            return Verdict::Member {
                certificate: vec![eta, f2, f3],
            };
        }
    }
    Verdict::Unknown { bound }
}

/// Dispatch for CLI-style queries over one, two or three groups.
pub fn member_query(u: &Q, groups: &[Q], bound: i64) -> Verdict {
    match groups {
        [a] => member_single(u, a),
        [x, y] => member_double(u, x, y),
        [x, y, z] => member_triple_general(u, x, y, z, bound),
        _ => panic!("member queries support 1..=3 groups"),
    }
}

/// Brute-force oracle for `u in N_x N_y N_{xy}`, independent of the Hilbert
/// symbol machinery: enumerate square classes of integer-coordinate norms
/// from the three quadratic algebras up to a height bound and scan the class
/// products. The tables are query-independent, so build once and reuse.
pub struct TripleSymOracle {
    xs: Vec<(i64, EtaleElement)>,
    ys: Vec<(i64, EtaleElement)>,
    z_index: std::collections::HashMap<i64, EtaleElement>,
    pub height: i64,
}

fn mul_cls_i64(a: i64, b: i64) -> i64 {
    let g = num_integer::Integer::gcd(&a, &b);
    (a / g) * (b / g)
}

impl TripleSymOracle {
    pub fn build(x: &Q, y: &Q, height: i64) -> Self {
        let xy = x * y;
        let collect = |g: &Q| -> Vec<(i64, EtaleElement)> {
            use num_traits::ToPrimitive;
            let alg = EtaleAlgebra::quadratic(g.clone());
            let mut out = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for s in 0..=height {
                for t in -height..=height {
                    if s == 0 && t == 0 {
                        continue;
                    }
                    let e = alg.element_ints(&[s, t]);
                    let n = e.full_norm();
                    if n.is_zero() {
                        continue;
                    }
                    let c = SquareClass::new(&n)
                        .value()
                        .to_i64()
                        .expect("oracle class fits i64");
                    if seen.insert(c) {
                        out.push((c, e));
                    }
                }
            }
            out
        };
        let zs = collect(&xy);
        TripleSymOracle {
            xs: collect(x),
            ys: collect(y),
            z_index: zs.into_iter().collect(),
            height,
        }
    }

    /// Finds a witness triple with norm product exactly `u`, or reports that
    /// no certificate exists up to the table height.
    pub fn search(&self, u: &Q) -> Option<(EtaleElement, EtaleElement, EtaleElement)> {
        use num_traits::ToPrimitive;
        let t_small = SquareClass::new(u).value().to_i64()?;
        for (cx, ex) in &self.xs {
            let partial = mul_cls_i64(t_small, *cx);
            for (cy, ey) in &self.ys {
                let need = mul_cls_i64(partial, *cy);
                if let Some(ez) = self.z_index.get(&need) {
                    // rescale the third factor so the product is exactly u
                    let n3 = u / (ex.full_norm() * ey.full_norm());
                    let scale = crate::arith::exact_sqrt(&(&n3 / ez.full_norm()))
                        .expect("classes match, ratio is a square");
                    let ez = ez.scale(&scale);
                    debug_assert_eq!(ex.full_norm() * ey.full_norm() * ez.full_norm(), *u);
                    return Some((ex.clone(), ey.clone(), ez));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q_int, q_ratio};

    #[test]
    fn single_membership() {
        let v = member_single(&q_int(17), &q_int(2));
        assert!(v.verify_member(&q_int(17)));
        let v = member_single(&q_int(-1), &q_int(17));
        assert!(v.verify_member(&q_int(-1)));
        match member_single(&q_int(3), &q_int(5)) {
            Verdict::NonMember { obstruction } => assert!(obstruction.reverify()),
            other => panic!("expected NonMember, got {other:?}"),
        }
    }

    #[test]
    fn double_membership() {
        // 3 not in N_2 N_34: obstruction at p=2 where 17 is a square
        match member_double(&q_int(3), &q_int(2), &q_int(34)) {
            Verdict::NonMember { obstruction } => {
                assert!(obstruction.reverify());
                match obstruction {
                    Obstruction::Local { place, .. } => assert_eq!(place, Place::prime(2)),
                    _ => panic!("expected local obstruction"),
                }
            }
            other => panic!("expected NonMember, got {other:?}"),
        }
        // 17 in N_2 N_34 with a direct factor
        let v = member_double(&q_int(17), &q_int(2), &q_int(34));
        assert!(v.verify_member(&q_int(17)));
        // u an exact single norm: certificate (n_x, 1)
        let v = member_double(&q_int(17), &q_int(2), &q_int(5));
        assert!(v.verify_member(&q_int(17)));
    }

    #[test]
    fn serre_tate_paper_instance() {
        // 3 not in N_2 N_17 N_34: omega(3) = (17,3)_17 = -1
        match member_triple_sym(&q_int(3), &q_int(2), &q_int(17)) {
            Verdict::NonMember { obstruction } => {
                assert!(obstruction.reverify());
                match &obstruction {
                    Obstruction::Omega { contributing, .. } => {
                        assert_eq!(contributing, &vec![Place::prime(17)]);
                    }
                    _ => panic!("expected omega obstruction"),
                }
            }
            other => panic!("expected NonMember, got {other:?}"),
        }
        // 6 = N_10(4 + sqrt10): member with the trivial-first-factor certificate
        match member_triple_sym(&q_int(6), &q_int(2), &q_int(5)) {
            Verdict::Member { certificate } => {
                assert_eq!(certificate[0], certificate[0].algebra().one());
                assert_eq!(certificate[1], certificate[1].algebra().one());
                assert_eq!(certificate[2], certificate[2].algebra().element_ints(&[4, 1]));
            }
            other => panic!("expected Member, got {other:?}"),
        }
        // an exact norm from the first group is always a member
        let v = member_triple_sym(&q_int(7), &q_int(2), &q_int(17));
        assert!(v.verify_member(&q_int(7)));
    }

    #[test]
    fn biquadratic_paper_values() {
        // -1 not in N_{2,17}
        match member_biquadratic(&q_int(-1), &q_int(2), &q_int(17)) {
            Verdict::NonMember { obstruction } => assert!(obstruction.reverify()),
            other => panic!("expected NonMember, got {other:?}"),
        }
        // -9 = N_{2,17}(1 - 3/2 sqrt2 - 1/2 sqrt34)
        match member_biquadratic(&q_int(-9), &q_int(2), &q_int(17)) {
            Verdict::Member { certificate } => {
                assert_eq!(certificate.len(), 1);
                assert_eq!(certificate[0].full_norm(), q_int(-9));
            }
            other => panic!("expected Member, got {other:?}"),
        }
        // split algebra: -1 in N_{2,2}
        match member_biquadratic(&q_int(-1), &q_int(2), &q_int(2)) {
            Verdict::Member { certificate } => {
                assert_eq!(certificate[0].full_norm(), q_int(-1));
            }
            other => panic!("expected Member, got {other:?}"),
        }
    }

    #[test]
    fn triple_general_shapes() {
        // a trivial class: always a member
        let v = member_triple_general(&q_int(12), &q_int(2), &q_int(1), &q_int(-2), 100);
        assert!(v.verify_member(&q_int(12)));
        // theorem-1.3 shape delegates to the symmetric decider
        let v = member_triple_general(&q_int(3), &q_int(2), &q_int(17), &q_int(34), 100);
        assert!(v.is_non_member());
        // tiny bound on独 independent classes with no local obstruction: Unknown
        let v = member_triple_general(&q_ratio(104729, 1), &q_int(5), &q_int(13), &q_int(17), 1);
        assert!(matches!(v, Verdict::Unknown { bound: 1 } | Verdict::Member { .. }));
    }

    #[test]
    fn oracle_agrees_on_small_values() {
        let oracle = TripleSymOracle::build(&q_int(2), &q_int(17), 30);
        for u in [-10i64, -3, -1, 2, 3, 6, 17, 19, 34] {
            let u = q_int(u);
            let verdict = member_triple_sym(&u, &q_int(2), &q_int(17));
            let witness = oracle.search(&u);
            match (&verdict, &witness) {
                (Verdict::Member { .. }, Some((a, b, c))) => {
                    assert_eq!(a.full_norm() * b.full_norm() * c.full_norm(), u);
                }
                (Verdict::NonMember { .. }, None) => {}
                other => panic!("omega and oracle disagree on {u}: {other:?}"),
            }
        }
    }

    #[test]
    fn square_scaling_invariance() {
        let pairs = [(3i64, 4i64), (17, 9), (-1, 25)];
        for (u, s) in pairs {
            let u1 = q_int(u);
            let u2 = q_int(u * s);
            assert_eq!(
                member_single(&u1, &q_int(2)).is_member(),
                member_single(&u2, &q_int(2)).is_member()
            );
            assert_eq!(
                member_triple_sym(&u1, &q_int(2), &q_int(17)).is_member(),
                member_triple_sym(&u2, &q_int(2), &q_int(17)).is_member()
            );
        }
        // biquadratic: invariance under fourth powers
        let v1 = member_biquadratic(&q_int(-9), &q_int(2), &q_int(17));
        let v2 = member_biquadratic(&q_ratio(-9 * 16, 1), &q_int(2), &q_int(17));
        assert_eq!(v1.is_member(), v2.is_member());
    }

    #[test]
    fn monotonicity() {
        // member of N_2 N_5 implies member of N_2 N_5 N_13
        let u = q_int(41); // 41 = N_5? try: just use a u in N_2: 7^2-2*4^2=17... use 17
        let _ = u;
        let u = q_int(17);
        assert!(member_double(&u, &q_int(2), &q_int(5)).is_member());
        assert!(member_triple_general(&u, &q_int(2), &q_int(5), &q_int(13), 100).is_member());
    }
}
