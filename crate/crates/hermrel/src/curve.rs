//! The curves C_A: (x^r, y^r, z^r) · A · (x, y, z)^t = 0.
//!
//! For invertible A the curve is nonsingular of degree r + 1 and genus
//! r(r − 1)/2.  In characteristic p the partial derivatives collapse to
//! (x^r, y^r, z^r) · A, so the tangent line at P is the covector P^(r) · A.
//! Restricting the defining form to the tangent line at a point P of the
//! curve, in coordinates s·P + t·Q0, leaves
//!
//!   c0·s^(r+1) + c1·s^r·t + c2·s·t^r + c3·t^(r+1),   with c0 = c1 = 0,
//!
//! so the tangent meets the curve with multiplicity r at P plus a residual
//! point P' (when c2 ≠ 0), or with full multiplicity r + 1 (when c2 = 0 —
//! that is what being an inflexion means here).
//!
//! A curve keeps its own exponent r even when evaluated over an extension
//! field: embedding C_A into F_{q^2} changes where the points live, not the
//! defining form.  The companion curves are the mirror C_{A*} (same rational
//! points, reciprocal tangency) and the dual C_{transpose(A^{-1})} (incident
//! with every tangent line).

use crate::field::{Embedding, FieldCtx, FieldElem};
use crate::projective::{
    mat3_codes, Mat3, PglElem, ProjLine, ProjPoint, ProjectiveError,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("matrix is singular, the equation does not define a nonsingular curve")]
    SingularMatrix,
    #[error("point does not lie on the curve")]
    PointNotOnCurve,
    #[error("second point must lie on the tangent line and differ from the base point")]
    SecondPointNotOnTangent,
    #[error("no embedding available: {0}")]
    EmbeddingUnavailable(String),
    #[error("curve is not Hermitian (A* differs from A in PGL)")]
    NotHermitian,
}

/// C_A over the field `ctx`, with its own Frobenius exponent `r`.
#[derive(Clone)]
pub struct Curve<'a> {
    ctx: &'a FieldCtx,
    a: PglElem,
    r: u32,
}

impl std::fmt::Debug for Curve<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve(r = {}, A = {:?})", self.r, self.a.mat())
    }
}

/// Intersection of a curve with the tangent line at one of its points:
/// multiplicity r or r + 1 at the base point, plus the residual point
/// (equal to the base point in the r + 1 case).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangentDivisor {
    pub base: ProjPoint,
    pub multiplicity: u32,
    pub residual: ProjPoint,
    /// Restriction coefficients (c0, c1, c2, c3) for the canonical second
    /// point; c0 = c1 = 0 always.
    pub coeffs: [FieldElem; 4],
}

/// Plane enumeration with precomputed r-th-power rows, shared across curves
/// to make point counting a pure table walk.
pub struct Plane {
    exponent: u32,
    points: Vec<ProjPoint>,
    rows: Vec<[FieldElem; 3]>,
}

impl Plane {
    /// The plane over `ctx` with the field's own exponent r = sqrt(q).
    pub fn new(ctx: &FieldCtx) -> Plane {
        Plane::with_exponent(ctx, ctx.sqrt_q())
    }

    /// The plane over `ctx` powered by a foreign exponent (used when a base
    /// curve is evaluated over an extension field).
    pub fn with_exponent(ctx: &FieldCtx, exponent: u32) -> Plane {
        let points = crate::projective::enumerate_plane_points(ctx);
        let rows = points
            .iter()
            .map(|p| p.coords.map(|c| ctx.pow(c, exponent as i64)))
            .collect();
        Plane { exponent, points, rows }
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }
}

impl<'a> Curve<'a> {
    /// Builds C_A; the matrix must be invertible.
    pub fn new(ctx: &'a FieldCtx, a: Mat3) -> Result<Curve<'a>, CurveError> {
        let a = PglElem::new(ctx, a).map_err(|_| CurveError::SingularMatrix)?;
        Ok(Curve { ctx, a, r: ctx.sqrt_q() })
    }

    pub fn from_pgl(ctx: &'a FieldCtx, a: PglElem) -> Curve<'a> {
        Curve { ctx, a, r: ctx.sqrt_q() }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn matrix(&self) -> &PglElem {
        &self.a
    }

    /// The curve's Frobenius exponent r (sqrt of the base field order).
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn degree(&self) -> u32 {
        self.r + 1
    }

    pub fn genus(&self) -> u64 {
        self.r as u64 * (self.r as u64 - 1) / 2
    }

    #[inline]
    fn rpow(&self, c: FieldElem) -> FieldElem {
        if self.r == self.ctx.sqrt_q() {
            self.ctx.frobenius_sqrt(c)
        } else {
            self.ctx.pow(c, self.r as i64)
        }
    }

    fn rpow_coords(&self, p: &ProjPoint) -> [FieldElem; 3] {
        p.coords.map(|c| self.rpow(c))
    }

    /// left · A · right for a row vector (already r-powered) and a column.
    fn form(&self, left: [FieldElem; 3], right: [FieldElem; 3]) -> FieldElem {
        let col = self.a.mat().apply(self.ctx, right);
        let mut acc = FieldElem::ZERO;
        for i in 0..3 {
            acc = self.ctx.add(acc, self.ctx.mul(left[i], col[i]));
        }
        acc
    }

    /// Value of the defining form at a point of the plane over `ctx`.
    pub fn evaluate(&self, p: &ProjPoint) -> FieldElem {
        self.form(self.rpow_coords(p), p.coords)
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.evaluate(p).is_zero()
    }

    /// Rational points in canonical plane order.
    pub fn rational_points(&self) -> Vec<ProjPoint> {
        self.points_on(&Plane::with_exponent(self.ctx, self.r))
    }

    pub fn point_count(&self) -> u64 {
        self.count_on(&Plane::with_exponent(self.ctx, self.r))
    }

    /// Rational points using a shared plane cache.
    pub fn points_on(&self, plane: &Plane) -> Vec<ProjPoint> {
        assert_eq!(plane.exponent, self.r, "plane exponent must match the curve");
        let ctx = self.ctx;
        let a = self.a.mat();
        plane
            .points
            .iter()
            .zip(&plane.rows)
            .filter(|(p, row)| {
                let col = a.apply(ctx, p.coords);
                let mut acc = FieldElem::ZERO;
                for i in 0..3 {
                    acc = ctx.add(acc, ctx.mul(row[i], col[i]));
                }
                acc.is_zero()
            })
            .map(|(p, _)| *p)
            .collect()
    }

    pub fn count_on(&self, plane: &Plane) -> u64 {
        assert_eq!(plane.exponent, self.r, "plane exponent must match the curve");
        let ctx = self.ctx;
        let a = self.a.mat();
        let mut n = 0u64;
        for (p, row) in plane.points.iter().zip(&plane.rows) {
            let col = a.apply(ctx, p.coords);
            let mut acc = FieldElem::ZERO;
            for i in 0..3 {
                acc = ctx.add(acc, ctx.mul(row[i], col[i]));
            }
            if acc.is_zero() {
                n += 1;
            }
        }
        n
    }

    /// m = (N − 1)/r where N is the rational point count; always an integer.
    pub fn m_invariant(&self) -> u64 {
        let n = self.point_count();
        debug_assert_eq!((n - 1) % self.r as u64, 0);
        (n - 1) / self.r as u64
    }

    /// Tangent line at a point of the curve: the covector P^(r) · A.
    pub fn tangent_line(&self, p: &ProjPoint) -> Result<ProjLine, CurveError> {
        let row = self.rpow_coords(p);
        let covector = self.a.mat().apply_row(self.ctx, row);
        let mut on_line = FieldElem::ZERO;
        for i in 0..3 {
            on_line = self.ctx.add(on_line, self.ctx.mul(covector[i], p.coords[i]));
        }
        if !on_line.is_zero() {
            return Err(CurveError::PointNotOnCurve);
        }
        Ok(ProjLine::new(self.ctx, covector).expect("gradient of a nonsingular curve is nonzero"))
    }

    /// Tangent divisor with the canonical second point: the first point of
    /// the tangent line (in canonical line order) different from P.
    pub fn tangent_divisor(&self, p: &ProjPoint) -> Result<TangentDivisor, CurveError> {
        let line = self.tangent_line(p)?;
        let q0 = *line
            .points(self.ctx)
            .iter()
            .find(|&q| q != p)
            .expect("a line has more than one point");
        self.divisor_from(p, &q0)
    }

    /// Same divisor computed from an explicit second point on the tangent
    /// line; multiplicity and residual do not depend on the choice.
    pub fn tangent_divisor_with_second_point(
        &self,
        p: &ProjPoint,
        q0: &ProjPoint,
    ) -> Result<TangentDivisor, CurveError> {
        let line = self.tangent_line(p)?;
        if q0 == p || !line.contains(self.ctx, q0) {
            return Err(CurveError::SecondPointNotOnTangent);
        }
        self.divisor_from(p, q0)
    }

    fn divisor_from(&self, p: &ProjPoint, q0: &ProjPoint) -> Result<TangentDivisor, CurveError> {
        let ctx = self.ctx;
        let pr = self.rpow_coords(p);
        let qr = self.rpow_coords(q0);
        let c0 = self.form(pr, p.coords);
        let c1 = self.form(pr, q0.coords);
        let c2 = self.form(qr, p.coords);
        let c3 = self.form(qr, q0.coords);
        debug_assert!(c0.is_zero(), "base point lies on the curve");
        debug_assert!(c1.is_zero(), "second point lies on the tangent line");
        debug_assert!(!(c2.is_zero() && c3.is_zero()), "curve contains no line");
        let (multiplicity, residual) = if c2.is_zero() {
            (self.r + 1, *p)
        } else {
            // remaining zero of c2·s + c3·t at (s, t) = (c3, −c2)
            let coords = [
                ctx.sub(ctx.mul(c3, p.coords[0]), ctx.mul(c2, q0.coords[0])),
                ctx.sub(ctx.mul(c3, p.coords[1]), ctx.mul(c2, q0.coords[1])),
                ctx.sub(ctx.mul(c3, p.coords[2]), ctx.mul(c2, q0.coords[2])),
            ];
            let residual = ProjPoint::new(ctx, coords).expect("residual point is well defined");
            debug_assert!(self.contains(&residual));
            (self.r, residual)
        };
        Ok(TangentDivisor { base: *p, multiplicity, residual, coeffs: [c0, c1, c2, c3] })
    }

    /// Whether the tangent at P meets the curve with full multiplicity r + 1.
    pub fn is_inflexion(&self, p: &ProjPoint) -> Result<bool, CurveError> {
        let line = self.tangent_line(p)?;
        let q0 = cheap_second_point(self.ctx, &line, p);
        let c2 = self.form(self.rpow_coords(&q0), p.coords);
        Ok(c2.is_zero())
    }

    /// Number of inflexions among the rational points, via the shared plane.
    pub fn inflexion_count_on(&self, plane: &Plane) -> u64 {
        self.points_on(plane)
            .iter()
            .filter(|p| self.is_inflexion(p).expect("points are on the curve"))
            .count() as u64
    }

    /// Transpose of the entry-wise r-th power, using the curve's own r.
    fn star_mat(&self) -> Mat3 {
        Mat3 { e: self.a.mat().e.map(|c| self.rpow(c)) }.transpose()
    }

    /// The mirror curve C_{A*}: same rational points over the base field,
    /// same inflexions, reciprocal tangency.
    pub fn mirror(&self) -> Curve<'a> {
        let star = PglElem::new(self.ctx, self.star_mat()).expect("star preserves invertibility");
        Curve { ctx: self.ctx, a: star, r: self.r }
    }

    /// The dual curve C_{transpose(A^{-1})}: every tangent line of C_A,
    /// read as a point, lies on it.
    pub fn dual(&self) -> Curve<'a> {
        let inv = self.a.mat().inverse(self.ctx).expect("curve matrix is invertible");
        let b = PglElem::new(self.ctx, inv.transpose()).expect("invertible");
        Curve { ctx: self.ctx, a: b, r: self.r }
    }

    /// Whether A* = A in PGL — the Hermitian case, N = r^3 + 1.
    pub fn is_hermitian(&self) -> bool {
        PglElem::new(self.ctx, self.star_mat()).expect("invertible") == self.a
    }

    /// A GL representative H of the class of A with H* = H entry-wise.
    /// Exists exactly when the curve is Hermitian: scaling by ρ with
    /// ρ^(1−r) = λ kills the scalar λ in A* = λA.
    pub fn hermitian_lift(&self) -> Result<Mat3, CurveError> {
        let star = self.star_mat();
        let a = self.a.mat();
        let lead = a.e.iter().position(|c| !c.is_zero()).expect("nonzero matrix");
        // normalized A has leading entry 1, so λ reads off directly
        let lambda = star.e[lead];
        if lambda.is_zero() {
            return Err(CurveError::NotHermitian);
        }
        let scaled = a.scale(self.ctx, lambda);
        if star != scaled {
            return Err(CurveError::NotHermitian);
        }
        let rho = self.ctx.solve_rho(lambda).map_err(|_| CurveError::NotHermitian)?;
        let h = a.scale(self.ctx, rho);
        debug_assert_eq!(Mat3 { e: h.e.map(|c| self.rpow(c)) }.transpose(), h);
        Ok(h)
    }

    /// The same curve over the extension field `big` along `emb`.  The
    /// matrix entries move; the exponent r stays.
    pub fn embed<'b>(
        &self,
        big: &'b FieldCtx,
        emb: &Embedding,
    ) -> Result<Curve<'b>, CurveError> {
        if emb.base_q() != self.ctx.q() || emb.target_q() != big.q() {
            return Err(CurveError::EmbeddingUnavailable(format!(
                "embedding maps F_{} to F_{}, wanted F_{} to F_{}",
                emb.base_q(),
                emb.target_q(),
                self.ctx.q(),
                big.q()
            )));
        }
        let e = self.a.mat().e.map(|c| emb.apply(c));
        let a = PglElem::new(big, Mat3 { e }).expect("embedding preserves invertibility");
        Ok(Curve { ctx: big, a, r: self.r })
    }
}

/// Any point of the line other than `p`, in O(1): the line has at least two
/// of the three canonical chart representatives.
fn cheap_second_point(ctx: &FieldCtx, line: &ProjLine, p: &ProjPoint) -> ProjPoint {
    let [u, v, w] = line.coords;
    let mk = |coords: [FieldElem; 3]| ProjPoint::new(ctx, coords).ok();
    let candidates = if !w.is_zero() {
        let wi = ctx.inv(w).unwrap();
        [
            mk([FieldElem::ONE, FieldElem::ZERO, ctx.neg(ctx.mul(u, wi))]),
            mk([FieldElem::ZERO, FieldElem::ONE, ctx.neg(ctx.mul(v, wi))]),
        ]
    } else if !v.is_zero() {
        let vi = ctx.inv(v).unwrap();
        [
            mk([FieldElem::ONE, ctx.neg(ctx.mul(u, vi)), FieldElem::ZERO]),
            mk([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]),
        ]
    } else {
        [
            mk([FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]),
            mk([FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]),
        ]
    };
    let q0 = candidates
        .into_iter()
        .flatten()
        .find(|q| q != p)
        .expect("two distinct canonical points on a line");
    debug_assert!(line.contains(ctx, &q0));
    q0
}

/// Connects the congruence action with points: P lies on C_{T*AT} iff T·P
/// lies on C_A.  Returns the image point T^{-1}·P used in tests and sweeps.
pub fn push_point_through(
    ctx: &FieldCtx,
    t_inverse: &PglElem,
    p: &ProjPoint,
) -> ProjPoint {
    PglElem::pull_point(t_inverse, ctx, p)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// JSON-facing summary of a curve's rational points and inflexions.
#[derive(Debug, Serialize)]
pub struct PointReport {
    #[serde(rename = "A")]
    pub a: [u32; 9],
    pub q: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub points: Vec<[u32; 3]>,
    pub inflexions: Vec<[u32; 3]>,
}

/// Builds the point/inflexion report for a curve over its base field.
pub fn point_report(curve: &Curve) -> PointReport {
    let points = curve.rational_points();
    let inflexions: Vec<[u32; 3]> = points
        .iter()
        .filter(|p| curve.is_inflexion(p).expect("rational points are on the curve"))
        .map(|p| p.coords.map(|c| c.code()))
        .collect();
    PointReport {
        a: mat3_codes(curve.matrix().mat()),
        q: curve.ctx().q(),
        n: points.len() as u64,
        points: points.iter().map(|p| p.coords.map(|c| c.code())).collect(),
        inflexions,
    }
}

impl From<ProjectiveError> for CurveError {
    fn from(e: ProjectiveError) -> Self {
        match e {
            ProjectiveError::Singular => CurveError::SingularMatrix,
            _ => CurveError::PointNotOnCurve,
        }
    }
}
