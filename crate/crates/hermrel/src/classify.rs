//! Classification of curves with at least two rational inflexions.
//!
//! Moving the two smallest rational inflexions to (1, 0, 0) and (0, 1, 0)
//! and their tangent lines to {y = 0} and {x = 0} forces the matrix into the
//! shape of  x^r y + ω x y^r + z^(r+1) = 0  for a single parameter ω ∈ F_q^*.
//! The value of Nm(ω) splits the curves into three families:
//!
//! * type A: ω = 1 — the Hermitian curve, N = r^3 + 1, every point an
//!   inflexion, one class;
//! * type B: Nm(ω) = 1, ω ≠ 1 — N = r + 1 (all inflexions, all on z = 0),
//!   congruent to diag(1, 1, η) with η ∈ F_q^* \ F_r^*, classes in
//!   bijection with the cosets η·F_r^* (r classes);
//! * type C: Nm(ω) ≠ 1 — N = q + 1, exactly the two inflexions used in the
//!   normalization, C_ω ≅ C_ω' iff ω' ∈ {ω, ω^(−r)}
//!   ((r + 1)(r − 2)/2 classes).
//!
//! Curves with fewer than two rational inflexions fall outside this scheme
//! and are reported as such, with no equivalence claim.

use crate::curve::{Curve, Plane};
use crate::field::{FieldCtx, FieldElem};
use crate::projective::{
    congruence_transform, frame_to_triangle, line_through, mat3_codes, Mat3, PglElem, ProjPoint,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("need at least two rational inflexions, found {0}")]
    TooFewInflexions(u64),
    #[error("normalization did not reach the expected matrix shape: {0}")]
    ShapeAssertionFailed(String),
    #[error("omega does not define a type B curve (need Nm(omega) = 1, omega != 1)")]
    NotTypeB,
    #[error("no canonical invariant for this class")]
    NotApplicable,
    #[error("method unavailable: {0}")]
    MethodUnavailable(String),
    #[error("brute-force search over {needed} transforms exceeds budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
}

/// Result of moving a curve to the ω-form, with the provenance data.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub omega: FieldElem,
    /// T with T* A T = A_ω in PGL.
    pub transform: PglElem,
    /// The two inflexions used (smallest in canonical point order); they map
    /// to (1, 0, 0) and (0, 1, 0).
    pub inflexions: (ProjPoint, ProjPoint),
}

/// Projective equivalence class of a curve with ≥ 2 rational inflexions;
/// invariants are stored canonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveClass {
    TypeA,
    /// η up to F_r^*-multiples; stored as the smallest code in its coset.
    TypeB { eta: FieldElem },
    /// ω up to the pairing ω ↔ ω^(−r); stored as the smaller of the two.
    TypeC { omega: FieldElem },
    OutOfTheoremScope { inflexions: u64 },
}

/// Full classification output for one curve.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: CurveClass,
    /// Present exactly when the curve is in scope (≥ 2 rational inflexions).
    pub normal_form: Option<NormalForm>,
    pub n_points: u64,
    pub n_inflexions: u64,
}

/// The matrix A_ω of  x^r y + ω x y^r + z^(r+1) = 0.
pub fn omega_matrix(omega: FieldElem) -> Mat3 {
    let mut m = Mat3::new([FieldElem::ZERO; 9]);
    m.set(0, 1, FieldElem::ONE);
    m.set(1, 0, omega);
    m.set(2, 2, FieldElem::ONE);
    m
}

/// The curve C_ω over `ctx`; ω must be nonzero (A_ω is singular otherwise).
pub fn omega_curve(ctx: &FieldCtx, omega: FieldElem) -> Curve<'_> {
    Curve::new(ctx, omega_matrix(omega)).expect("omega != 0 gives an invertible matrix")
}

/// Rational inflexions in canonical point order.
pub fn rational_inflexions(curve: &Curve) -> Vec<ProjPoint> {
    let plane = Plane::with_exponent(curve.ctx(), curve.r());
    rational_inflexions_on(curve, &plane)
}

/// Same, using a shared plane cache.
pub fn rational_inflexions_on(curve: &Curve, plane: &Plane) -> Vec<ProjPoint> {
    curve
        .points_on(plane)
        .into_iter()
        .filter(|p| curve.is_inflexion(p).expect("rational points are on the curve"))
        .collect()
}

/// Normalizes a curve with ≥ 2 rational inflexions to its ω-form.
pub fn normalize_two_inflexions(curve: &Curve) -> Result<NormalForm, ClassifyError> {
    let inflexions = rational_inflexions(curve);
    normalize_from_inflexions(curve, &inflexions)
}

fn normalize_from_inflexions(
    curve: &Curve,
    inflexions: &[ProjPoint],
) -> Result<NormalForm, ClassifyError> {
    if inflexions.len() < 2 {
        return Err(ClassifyError::TooFewInflexions(inflexions.len() as u64));
    }
    let ctx = curve.ctx();
    let r = curve.r() as i64;
    let p = inflexions[0];
    let q = inflexions[1];
    let tp = curve.tangent_line(&p).expect("inflexion is on the curve");
    let tq = curve.tangent_line(&q).expect("inflexion is on the curve");
    let chord = line_through(ctx, &p, &q).expect("inflexions are distinct");
    // tangent at P -> {y = 0}, tangent at Q -> {x = 0}, chord -> {z = 0}:
    // afterwards P sits at (1,0,0) and Q at (0,1,0)
    let t1 = frame_to_triangle(ctx, &tp, &tq, &chord).map_err(|e| {
        ClassifyError::ShapeAssertionFailed(format!("tangent/chord frame degenerate: {e}"))
    })?;
    let b = congruence_transform(ctx, curve.matrix(), &t1);
    let bm = b.mat();
    let zero_positions = [(0, 0), (0, 2), (1, 1), (1, 2), (2, 0), (2, 1)];
    for (i, j) in zero_positions {
        if !bm.at(i, j).is_zero() {
            return Err(ClassifyError::ShapeAssertionFailed(format!(
                "entry ({i},{j}) = {} after frame transform",
                bm.at(i, j)
            )));
        }
    }
    let b12 = bm.at(0, 1);
    let b21 = bm.at(1, 0);
    let b33 = bm.at(2, 2);
    if b12.is_zero() || b21.is_zero() || b33.is_zero() {
        return Err(ClassifyError::ShapeAssertionFailed(
            "antidiagonal or corner entry vanished".into(),
        ));
    }
    // rescale y so that the (1,2) entry matches the (3,3) entry, then read ω
    // off the normalized matrix
    let d = ctx.div(b33, b12).unwrap();
    let t2 = PglElem::new(ctx, Mat3::diag(FieldElem::ONE, d, FieldElem::ONE))
        .expect("diagonal with nonzero entries");
    let transform = t1.compose(ctx, &t2);
    let omega = ctx.mul(b21, ctx.mul(ctx.pow(b33, r - 1), ctx.pow(b12, -r)));
    let target = PglElem::new(ctx, omega_matrix(omega)).expect("omega is nonzero");
    let reached = congruence_transform(ctx, curve.matrix(), &transform);
    if reached != target {
        return Err(ClassifyError::ShapeAssertionFailed(format!(
            "expected A_omega with omega = {omega}, reached {:?}",
            reached.mat()
        )));
    }
    debug_assert_eq!(
        PglElem::pull_point(&transform.inverse(ctx), ctx, &p).coords,
        [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]
    );
    debug_assert_eq!(
        PglElem::pull_point(&transform.inverse(ctx), ctx, &q).coords,
        [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]
    );
    Ok(NormalForm { omega, transform, inflexions: (p, q) })
}

/// Classifies a curve, building its own plane cache.
pub fn classify(curve: &Curve) -> Classification {
    let plane = Plane::with_exponent(curve.ctx(), curve.r());
    classify_on(curve, &plane)
}

/// Classifies a curve using a shared plane cache.
pub fn classify_on(curve: &Curve, plane: &Plane) -> Classification {
    let ctx = curve.ctx();
    let points = curve.points_on(plane);
    let inflexions: Vec<ProjPoint> = points
        .iter()
        .filter(|p| curve.is_inflexion(p).expect("rational points are on the curve"))
        .copied()
        .collect();
    let n_points = points.len() as u64;
    let n_inflexions = inflexions.len() as u64;
    if n_inflexions < 2 {
        return Classification {
            class: CurveClass::OutOfTheoremScope { inflexions: n_inflexions },
            normal_form: None,
            n_points,
            n_inflexions,
        };
    }
    let nf = normalize_from_inflexions(curve, &inflexions)
        .expect("curves with two inflexions normalize");
    let omega = nf.omega;
    let class = if omega == FieldElem::ONE {
        debug_assert!(curve.is_hermitian(), "omega = 1 must coincide with A* = A");
        CurveClass::TypeA
    } else if ctx.norm(omega) == FieldElem::ONE {
        let diag = type_b_diagonalize(ctx, omega).expect("norm-1 omega != 1 is type B");
        CurveClass::TypeB { eta: canonical_eta(ctx, diag.eta) }
    } else {
        CurveClass::TypeC { omega: canonical_omega(ctx, omega) }
    };
    Classification { class, normal_form: Some(nf), n_points, n_inflexions }
}

/// Smallest code in η·F_r^*.
fn canonical_eta(ctx: &FieldCtx, eta: FieldElem) -> FieldElem {
    ctx.subfield_elements()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|&c| ctx.mul(eta, c))
        .min()
        .expect("subfield has nonzero elements")
}

/// Smaller of ω and ω^(−r).
fn canonical_omega(ctx: &FieldCtx, omega: FieldElem) -> FieldElem {
    omega.min(ctx.pow(omega, -(ctx.sqrt_q() as i64)))
}

/// The canonical equivalence invariant: η for type B, ω for type C.
pub fn canonical_invariant(class: &CurveClass) -> Result<FieldElem, ClassifyError> {
    match class {
        CurveClass::TypeB { eta } => Ok(*eta),
        CurveClass::TypeC { omega } => Ok(*omega),
        _ => Err(ClassifyError::NotApplicable),
    }
}

/// Explicit congruence from a type B ω-form to a diagonal curve.
#[derive(Debug, Clone)]
pub struct TypeBDiagonalization {
    /// η = β^r for the smallest β with β^(1−r) = ω; lies outside F_r.
    pub eta: FieldElem,
    /// U with U* A_ω U = diag(1, 1, η) in PGL.
    pub transform: PglElem,
}

/// Builds the congruence A_ω → diag(1, 1, η) for Nm(ω) = 1, ω ≠ 1.
///
/// Two steps: scaling x by β (with β^(1−r) = ω) moves A_ω to the symmetric
/// antidiagonal form with η = β^r in the corner; then the unitriangular-like
/// block T0 = [[u, αu^r, 0], [1, −α, 0], [0, 0, 1]] with Tr(u) = 1 and
/// Nm(α) = −1 takes that to diag(1, 1, η).
pub fn type_b_diagonalize(
    ctx: &FieldCtx,
    omega: FieldElem,
) -> Result<TypeBDiagonalization, ClassifyError> {
    if omega.is_zero() || omega == FieldElem::ONE || ctx.norm(omega) != FieldElem::ONE {
        return Err(ClassifyError::NotTypeB);
    }
    let r = ctx.sqrt_q() as i64;
    // β^(1−r) = ω  ⟺  β^(r−1) = ω^{-1}; take the smallest root
    let beta = *ctx
        .solve_kummer(ctx.inv(omega).unwrap())
        .expect("omega is nonzero")
        .first()
        .expect("Nm(omega) = 1 makes the equation solvable");
    let eta = ctx.pow(beta, r);
    debug_assert!(!ctx.is_in_subfield(eta), "eta must fall outside F_r");
    let ta = PglElem::new(
        ctx,
        Mat3::diag(ctx.inv(beta).unwrap(), FieldElem::ONE, FieldElem::ONE),
    )
    .expect("diagonal with nonzero entries");
    let u = ctx.special_trace_one();
    let alpha = ctx.special_norm_minus_one();
    let mut t0 = Mat3::new([FieldElem::ZERO; 9]);
    t0.set(0, 0, u);
    t0.set(0, 1, ctx.mul(alpha, ctx.frobenius_sqrt(u)));
    t0.set(1, 0, FieldElem::ONE);
    t0.set(1, 1, ctx.neg(alpha));
    t0.set(2, 2, FieldElem::ONE);
    let t0 = PglElem::new(ctx, t0)
        .map_err(|_| ClassifyError::ShapeAssertionFailed("T0 degenerate".into()))?;
    let transform = ta.compose(ctx, &t0);
    let reached = congruence_transform(
        ctx,
        &PglElem::new(ctx, omega_matrix(omega)).expect("omega nonzero"),
        &transform,
    );
    let target = PglElem::new(ctx, Mat3::diag(FieldElem::ONE, FieldElem::ONE, eta))
        .expect("diagonal with nonzero entries");
    if reached != target {
        return Err(ClassifyError::ShapeAssertionFailed(format!(
            "expected diag(1,1,{eta}), reached {:?}",
            reached.mat()
        )));
    }
    Ok(TypeBDiagonalization { eta, transform })
}

// ---------------------------------------------------------------------------
// Equivalence
// ---------------------------------------------------------------------------

pub const DEFAULT_BRUTEFORCE_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivMethod {
    /// Compare canonical invariants, then assemble a witness from the
    /// normalization transforms.
    Theorem,
    /// Search all of PGL(3, q), refusing when the group is larger than the
    /// budget.
    BruteForce { budget: u64 },
}

/// |PGL(3, q)| = (q^3 − 1)(q^3 − q)(q^3 − q^2) / (q − 1).
pub fn pgl_order(q: u64) -> u64 {
    let q3 = q * q * q;
    (q3 - 1) * (q3 - q) / (q - 1) * (q3 - q * q)
}

/// Decides projective equivalence of two curves over the same field.
/// `Some(T)` means T* A1 T = A2 in PGL — always verified by direct
/// congruence before being returned.
pub fn equivalent(
    c1: &Curve,
    c2: &Curve,
    method: EquivMethod,
) -> Result<Option<PglElem>, ClassifyError> {
    assert_eq!(c1.ctx().q(), c2.ctx().q(), "curves must live over the same field");
    let ctx = c1.ctx();
    match method {
        EquivMethod::BruteForce { budget } => {
            let needed = pgl_order(ctx.q() as u64);
            if needed > budget {
                return Err(ClassifyError::BudgetExceeded { needed, budget });
            }
            for t in crate::projective::enumerate_pgl(ctx) {
                if congruence_transform(ctx, c1.matrix(), &t) == *c2.matrix() {
                    return Ok(Some(t));
                }
            }
            Ok(None)
        }
        EquivMethod::Theorem => {
            let k1 = classify(c1);
            let k2 = classify(c2);
            let scope = |k: &Classification| match k.class {
                CurveClass::OutOfTheoremScope { inflexions } => Err(
                    ClassifyError::MethodUnavailable(format!(
                        "curve with {inflexions} rational inflexions is outside the \
                         two-inflexion classification"
                    )),
                ),
                _ => Ok(()),
            };
            scope(&k1)?;
            scope(&k2)?;
            if k1.class != k2.class {
                return Ok(None);
            }
            let nf1 = k1.normal_form.as_ref().unwrap();
            let nf2 = k2.normal_form.as_ref().unwrap();
            let bridge = bridge_between_omega_forms(ctx, nf1.omega, nf2.omega)?;
            let witness =
                nf1.transform.compose(ctx, &bridge).compose(ctx, &nf2.transform.inverse(ctx));
            let reached = congruence_transform(ctx, c1.matrix(), &witness);
            assert_eq!(reached, *c2.matrix(), "theorem witness failed direct verification");
            Ok(Some(witness))
        }
    }
}

/// W with W* A_ω1 W = A_ω2, for two ω-forms already known equivalent.
fn bridge_between_omega_forms(
    ctx: &FieldCtx,
    omega1: FieldElem,
    omega2: FieldElem,
) -> Result<PglElem, ClassifyError> {
    if omega1 == omega2 {
        return Ok(PglElem::identity());
    }
    let r = ctx.sqrt_q() as i64;
    if ctx.norm(omega1) != FieldElem::ONE {
        // type C partner: ω2 = ω1^(−r); swap x and y
        debug_assert_eq!(omega2, ctx.pow(omega1, -r));
        let mut w = Mat3::new([FieldElem::ZERO; 9]);
        w.set(0, 1, FieldElem::ONE);
        w.set(1, 0, ctx.pow(omega1, -r));
        w.set(2, 2, FieldElem::ONE);
        return PglElem::new(ctx, w)
            .map_err(|_| ClassifyError::ShapeAssertionFailed("bridge degenerate".into()));
    }
    // type B: route through the diagonal forms
    let d1 = type_b_diagonalize(ctx, omega1)?;
    let d2 = type_b_diagonalize(ctx, omega2)?;
    let ratio = ctx.div(d2.eta, d1.eta).unwrap();
    // same class ⟹ η2/η1 ∈ F_r^*, which is exactly the image of the norm
    let alpha = *ctx
        .norm_preimages(ratio)
        .first()
        .ok_or_else(|| ClassifyError::ShapeAssertionFailed("eta ratio outside F_r^*".into()))?;
    let d = PglElem::new(ctx, Mat3::diag(FieldElem::ONE, FieldElem::ONE, alpha))
        .expect("diagonal with nonzero entries");
    Ok(d1.transform.compose(ctx, &d).compose(ctx, &d2.transform.inverse(ctx)))
}

// ---------------------------------------------------------------------------
// Census over all ω and reports
// ---------------------------------------------------------------------------

/// Equivalence-class table for the ω-family over one field.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Table1Report {
    pub q: u32,
    pub rows: Vec<Table1Row>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Table1Row {
    #[serde(rename = "type")]
    pub label: String,
    pub classes: u64,
    /// Rational point count shared by every curve of the type; absent when
    /// the type is empty over this field.
    pub n_points: Option<u64>,
    pub n_inflexions: Option<u64>,
}

/// Classifies C_ω for every ω ∈ F_q^* and tabulates classes per type.
pub fn class_census(ctx: &FieldCtx) -> Table1Report {
    let plane = Plane::new(ctx);
    let mut per_type: std::collections::BTreeMap<&'static str, ClassBucket> =
        std::collections::BTreeMap::new();
    for omega in ctx.nonzero_elements() {
        let curve = omega_curve(ctx, omega);
        let k = classify_on(&curve, &plane);
        let (label, key) = match k.class {
            CurveClass::TypeA => ("A", FieldElem::ONE),
            CurveClass::TypeB { eta } => ("B", eta),
            CurveClass::TypeC { omega } => ("C", omega),
            CurveClass::OutOfTheoremScope { .. } => {
                unreachable!("every C_omega has the two corner inflexions")
            }
        };
        let bucket = per_type.entry(label).or_default();
        bucket.invariants.insert(key);
        bucket.check_counts(label, k.n_points, k.n_inflexions);
    }
    let mut rows = Vec::new();
    for label in ["A", "B", "C"] {
        let row = match per_type.get(label) {
            None => Table1Row {
                label: label.to_string(),
                classes: 0,
                n_points: None,
                n_inflexions: None,
            },
            Some(bucket) => Table1Row {
                label: label.to_string(),
                classes: bucket.invariants.len() as u64,
                n_points: bucket.n_points,
                n_inflexions: bucket.n_inflexions,
            },
        };
        rows.push(row);
    }
    let mut notes = Vec::new();
    if !per_type.contains_key("C") {
        notes.push(format!(
            "no omega with Nm(omega) != 1 exists over F_{}: type C is empty",
            ctx.q()
        ));
    }
    Table1Report { q: ctx.q(), rows, notes }
}

#[derive(Default)]
struct ClassBucket {
    invariants: std::collections::BTreeSet<FieldElem>,
    n_points: Option<u64>,
    n_inflexions: Option<u64>,
}

impl ClassBucket {
    fn check_counts(&mut self, label: &str, n_points: u64, n_inflexions: u64) {
        match self.n_points {
            None => self.n_points = Some(n_points),
            Some(prev) => assert_eq!(prev, n_points, "type {label} point count varies"),
        }
        match self.n_inflexions {
            None => self.n_inflexions = Some(n_inflexions),
            Some(prev) => assert_eq!(prev, n_inflexions, "type {label} inflexion count varies"),
        }
    }
}

/// CSV rendering: header `type,classes,N_q,inflexions`, one row per type,
/// empty cells for types with no curves.
pub fn table1_csv(report: &Table1Report) -> String {
    let mut out = String::from("type,classes,N_q,inflexions\n");
    for row in &report.rows {
        let fmt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.label,
            row.classes,
            fmt(row.n_points),
            fmt(row.n_inflexions)
        ));
    }
    out
}

/// JSON-facing classification record for one curve.
#[derive(Debug, Serialize)]
pub struct ClassificationReport {
    pub q: u32,
    #[serde(rename = "A")]
    pub a: [u32; 9],
    #[serde(rename = "type")]
    pub label: String,
    pub invariant: Option<u32>,
    pub omega: Option<u32>,
    pub transform: Option<[u32; 9]>,
    pub n_points: u64,
    pub n_inflexions: u64,
}

pub fn classification_report(curve: &Curve, k: &Classification) -> ClassificationReport {
    let label = match k.class {
        CurveClass::TypeA => "A",
        CurveClass::TypeB { .. } => "B",
        CurveClass::TypeC { .. } => "C",
        CurveClass::OutOfTheoremScope { .. } => "out_of_scope",
    };
    ClassificationReport {
        q: curve.ctx().q(),
        a: mat3_codes(curve.matrix().mat()),
        label: label.to_string(),
        invariant: canonical_invariant(&k.class).ok().map(|e| e.code()),
        omega: k.normal_form.as_ref().map(|nf| nf.omega.code()),
        transform: k.normal_form.as_ref().map(|nf| mat3_codes(nf.transform.mat())),
        n_points: k.n_points,
        n_inflexions: k.n_inflexions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f4() -> FieldCtx {
        build_field(2, 1).unwrap()
    }

    fn f9() -> FieldCtx {
        build_field(3, 1).unwrap()
    }

    fn fields_4_9_16_25() -> Vec<FieldCtx> {
        vec![f4(), f9(), build_field(2, 2).unwrap(), build_field(5, 1).unwrap()]
    }

    #[test]
    fn omega_curves_normalize_back_to_their_own_omega() {
        for ctx in fields_4_9_16_25() {
            for omega in ctx.nonzero_elements() {
                let c = omega_curve(&ctx, omega);
                let nf = normalize_two_inflexions(&c).unwrap();
                assert_eq!(nf.omega, omega, "q = {}", ctx.q());
                // the chosen pair maps onto the two corner points
                let back = nf.transform.inverse(&ctx);
                assert_eq!(
                    PglElem::pull_point(&back, &ctx, &nf.inflexions.0).coords,
                    [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]
                );
                assert_eq!(
                    PglElem::pull_point(&back, &ctx, &nf.inflexions.1).coords,
                    [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]
                );
            }
        }
    }

    #[test]
    fn classification_by_norm_of_omega() {
        let ctx = f9();
        // Nm(2) = 2^4 = 1 (2 ∈ F_3), Nm(4) = 2 ≠ 1
        let hermitian = classify(&omega_curve(&ctx, FieldElem(1)));
        assert_eq!(hermitian.class, CurveClass::TypeA);
        assert_eq!(hermitian.n_points, 28);
        assert_eq!(hermitian.n_inflexions, 28);

        let b = classify(&omega_curve(&ctx, FieldElem(2)));
        assert_eq!(b.class, CurveClass::TypeB { eta: FieldElem(3) });
        assert_eq!(b.n_points, 4);
        assert_eq!(b.n_inflexions, 4);

        let c = classify(&omega_curve(&ctx, FieldElem(4)));
        assert_eq!(c.class, CurveClass::TypeC { omega: FieldElem(4) });
        assert_eq!(c.n_points, 10);
        assert_eq!(c.n_inflexions, 2);
        // the two inflexions are exactly the corners
        let infl = rational_inflexions(&omega_curve(&ctx, FieldElem(4)));
        assert_eq!(infl.len(), 2);
        assert_eq!(infl[0].coords, [FieldElem(1), FieldElem(0), FieldElem(0)]);
        assert_eq!(infl[1].coords, [FieldElem(0), FieldElem(1), FieldElem(0)]);
    }

    #[test]
    fn type_c_partners_share_their_invariant() {
        let ctx = f9();
        // 4^(−3) has code 8: the partner value of ω = 4
        let k1 = classify(&omega_curve(&ctx, FieldElem(4)));
        let k2 = classify(&omega_curve(&ctx, FieldElem(8)));
        assert_eq!(k1.class, k2.class);
        assert_eq!(canonical_invariant(&k1.class).unwrap(), FieldElem(4));
        assert_eq!(canonical_invariant(&k2.class).unwrap(), FieldElem(4));
        assert_eq!(
            canonical_invariant(&CurveClass::TypeA).unwrap_err(),
            ClassifyError::NotApplicable
        );
    }

    #[test]
    fn type_b_diagonalization_end_to_end() {
        for ctx in fields_4_9_16_25() {
            for omega in ctx.nonzero_elements() {
                if omega == FieldElem::ONE || ctx.norm(omega) != FieldElem::ONE {
                    assert_eq!(
                        type_b_diagonalize(&ctx, omega).unwrap_err(),
                        ClassifyError::NotTypeB
                    );
                    continue;
                }
                let d = type_b_diagonalize(&ctx, omega).unwrap();
                assert!(!ctx.is_in_subfield(d.eta));
                // ω recovers as η^(r−1)
                assert_eq!(ctx.pow(d.eta, ctx.sqrt_q() as i64 - 1), omega);
                // the diagonal curve has r + 1 points, all on z = 0
                let diag = Curve::new(
                    &ctx,
                    Mat3::diag(FieldElem::ONE, FieldElem::ONE, d.eta),
                )
                .unwrap();
                let pts = diag.rational_points();
                assert_eq!(pts.len(), ctx.sqrt_q() as usize + 1);
                assert!(pts.iter().all(|p| p.coords[2].is_zero()));
            }
        }
    }

    #[test]
    fn type_b_eta_example_f9() {
        let ctx = f9();
        // ω = 2: smallest β with β^2 = 2^{-1} = 2 is 3 (= t), η = t^3 = 6,
        // canonical coset representative min{6, 3} = 3
        let d = type_b_diagonalize(&ctx, FieldElem(2)).unwrap();
        assert_eq!(d.eta, FieldElem(6));
        let k = classify(&omega_curve(&ctx, FieldElem(2)));
        assert_eq!(canonical_invariant(&k.class).unwrap(), FieldElem(3));
    }

    #[test]
    fn diag_curves_classify_as_type_b_with_matching_invariant() {
        let ctx = f9();
        // diag(1,1,3) with η = 3 = t ∉ F_3
        let diag = Curve::new(&ctx, Mat3::diag(FieldElem(1), FieldElem(1), FieldElem(3))).unwrap();
        let k = classify(&diag);
        assert_eq!(k.class, CurveClass::TypeB { eta: FieldElem(3) });
        // equivalent to C_ω with ω = η^(r−1) = 3^2 = 2
        let w = equivalent(&diag, &omega_curve(&ctx, FieldElem(2)), EquivMethod::Theorem)
            .unwrap()
            .expect("same type B class");
        let moved = congruence_transform(&ctx, diag.matrix(), &w);
        assert_eq!(moved, *omega_curve(&ctx, FieldElem(2)).matrix());
    }

    #[test]
    fn equivalence_theorem_examples() {
        let ctx = f9();
        let c4 = omega_curve(&ctx, FieldElem(4));
        let c8 = omega_curve(&ctx, FieldElem(8));
        let c5 = omega_curve(&ctx, FieldElem(5));
        // self-equivalence with the identity-free witness path
        assert!(equivalent(&c4, &c4, EquivMethod::Theorem).unwrap().is_some());
        // partner pair
        let w = equivalent(&c4, &c8, EquivMethod::Theorem).unwrap().expect("partners");
        assert_eq!(congruence_transform(&ctx, c4.matrix(), &w), *c8.matrix());
        // 5 = 2 + t: Nm(5)? distinct class from ω = 4 unless partnered
        let k4 = classify(&c4);
        let k5 = classify(&c5);
        if k4.class != k5.class {
            assert!(equivalent(&c4, &c5, EquivMethod::Theorem).unwrap().is_none());
        }
        // Hermitian vs identity matrix: both type A
        let a1 = omega_curve(&ctx, FieldElem::ONE);
        let id = Curve::new(&ctx, Mat3::identity()).unwrap();
        let w = equivalent(&a1, &id, EquivMethod::Theorem).unwrap().expect("both Hermitian");
        assert_eq!(congruence_transform(&ctx, a1.matrix(), &w), *id.matrix());
    }

    #[test]
    fn equivalence_out_of_scope_and_budget() {
        let f4ctx = f4();
        // diag(1, ω, ω^2) over F_4 has no inflexions: theorem method refuses
        let special =
            Curve::new(&f4ctx, Mat3::diag(FieldElem(1), FieldElem(2), FieldElem(3))).unwrap();
        let herm = Curve::new(&f4ctx, Mat3::identity()).unwrap();
        assert!(matches!(
            equivalent(&special, &herm, EquivMethod::Theorem).unwrap_err(),
            ClassifyError::MethodUnavailable(_)
        ));
        // brute force over F_9 exceeds the default budget
        let ctx = f9();
        let c4 = omega_curve(&ctx, FieldElem(4));
        assert!(matches!(
            equivalent(
                &c4,
                &c4,
                EquivMethod::BruteForce { budget: DEFAULT_BRUTEFORCE_BUDGET }
            )
            .unwrap_err(),
            ClassifyError::BudgetExceeded { .. }
        ));
        assert_eq!(pgl_order(4), 60480);
        assert_eq!(pgl_order(9), 42_456_960);
    }

    #[test]
    fn brute_force_agrees_on_f4_diag_pair() {
        let ctx = f4();
        let d2 = Curve::new(&ctx, Mat3::diag(FieldElem(1), FieldElem(1), FieldElem(2))).unwrap();
        let d3 = Curve::new(&ctx, Mat3::diag(FieldElem(1), FieldElem(1), FieldElem(3))).unwrap();
        let budget = EquivMethod::BruteForce { budget: DEFAULT_BRUTEFORCE_BUDGET };
        // η ratio 3/2 ∉ F_2^*: inequivalent by both methods
        assert!(equivalent(&d2, &d3, EquivMethod::Theorem).unwrap().is_none());
        assert!(equivalent(&d2, &d3, budget).unwrap().is_none());
        let w = equivalent(&d2, &d2, budget).unwrap().expect("self-equivalent");
        assert_eq!(congruence_transform(&ctx, d2.matrix(), &w), *d2.matrix());
    }

    #[test]
    fn classification_is_a_pgl_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for ctx in fields_4_9_16_25() {
            let plane = Plane::new(&ctx);
            for _ in 0..1000 {
                let omega = FieldElem(rng.gen_range(1..ctx.q()));
                let t = loop {
                    let e: [FieldElem; 9] =
                        std::array::from_fn(|_| FieldElem(rng.gen_range(0..ctx.q())));
                    if let Ok(t) = PglElem::new(&ctx, Mat3::new(e)) {
                        break t;
                    }
                };
                let base = omega_curve(&ctx, omega);
                let moved = Curve::from_pgl(
                    &ctx,
                    congruence_transform(&ctx, base.matrix(), &t),
                );
                let k1 = classify_on(&base, &plane);
                let k2 = classify_on(&moved, &plane);
                assert_eq!(k1.class, k2.class, "q = {} omega = {}", ctx.q(), omega);
                assert_eq!(k1.n_points, k2.n_points);
                assert_eq!(k1.n_inflexions, k2.n_inflexions);
            }
        }
    }

    #[test]
    fn census_matches_the_expected_tables() {
        let expected = [
            (f4(), [(1, Some(9), Some(9)), (2, Some(3), Some(3)), (0, None, None)]),
            (f9(), [(1, Some(28), Some(28)), (3, Some(4), Some(4)), (2, Some(10), Some(2))]),
        ];
        for (ctx, rows) in expected {
            let report = class_census(&ctx);
            assert_eq!(report.q, ctx.q());
            for (row, (classes, n_points, n_inflexions)) in report.rows.iter().zip(rows) {
                assert_eq!(row.classes, classes, "q = {} type {}", ctx.q(), row.label);
                assert_eq!(row.n_points, n_points);
                assert_eq!(row.n_inflexions, n_inflexions);
            }
            if ctx.q() == 4 {
                assert_eq!(report.notes.len(), 1, "type C emptiness is flagged");
            } else {
                assert!(report.notes.is_empty());
            }
        }
    }

    #[test]
    fn table1_csv_layout() {
        let csv = table1_csv(&class_census(&f9()));
        assert_eq!(csv, "type,classes,N_q,inflexions\nA,1,28,28\nB,3,4,4\nC,2,10,2\n");
        let csv4 = table1_csv(&class_census(&f4()));
        assert_eq!(csv4, "type,classes,N_q,inflexions\nA,1,9,9\nB,2,3,3\nC,0,,\n");
    }

    #[test]
    fn line_and_affine_point_counts_by_type() {
        for ctx in fields_4_9_16_25() {
            let r = ctx.sqrt_q() as usize;
            for omega in ctx.nonzero_elements() {
                let c = omega_curve(&ctx, omega);
                let pts = c.rational_points();
                let on_line = pts.iter().filter(|p| p.coords[2].is_zero()).count();
                let affine = pts.len() - on_line;
                if ctx.norm(omega) == FieldElem::ONE {
                    assert_eq!(on_line, r + 1);
                    assert_eq!(affine, if omega == FieldElem::ONE { r * r * r - r } else { 0 });
                } else {
                    assert_eq!(on_line, 2);
                    assert_eq!(affine, ctx.q() as usize - 1);
                }
            }
        }
    }

    #[test]
    fn type_c_residual_points_obey_the_x_over_omega_law() {
        for ctx in [f9(), build_field(5, 1).unwrap()] {
            for omega in ctx.nonzero_elements() {
                if ctx.norm(omega) == FieldElem::ONE {
                    continue;
                }
                let c = omega_curve(&ctx, omega);
                for p in c.rational_points() {
                    if p.coords[2].is_zero() {
                        continue;
                    }
                    let x0 = ctx.div(p.coords[0], p.coords[2]).unwrap();
                    let d = c.tangent_divisor(&p).unwrap();
                    assert_eq!(d.multiplicity, ctx.sqrt_q());
                    assert!(!d.residual.coords[2].is_zero(), "residual stays affine");
                    let x1 = ctx.div(d.residual.coords[0], d.residual.coords[2]).unwrap();
                    assert_eq!(x1, ctx.div(x0, omega).unwrap(), "q = {}", ctx.q());
                }
            }
        }
    }

    #[test]
    fn classification_report_shape() {
        let ctx = f9();
        let c = omega_curve(&ctx, FieldElem(4));
        let k = classify(&c);
        let rep = classification_report(&c, &k);
        assert_eq!(rep.label, "C");
        assert_eq!(rep.invariant, Some(4));
        assert_eq!(rep.omega, Some(4));
        assert_eq!(rep.q, 9);
        assert!(rep.transform.is_some());
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["type"], "C");
        assert_eq!(json["A"].as_array().unwrap().len(), 9);

        let f4ctx = f4();
        let special =
            Curve::new(&f4ctx, Mat3::diag(FieldElem(1), FieldElem(2), FieldElem(3))).unwrap();
        let k = classify(&special);
        assert_eq!(k.class, CurveClass::OutOfTheoremScope { inflexions: 0 });
        assert_eq!(k.n_points, 9);
    }
}
