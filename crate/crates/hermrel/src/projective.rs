//! The projective plane PG(2, q) and the congruence action of PGL(3, q).
//!
//! Points and lines are triples of element codes normalized so the first
//! nonzero coordinate is 1; equality of the normalized representatives is
//! literal.  Lines are covectors: the line (u, v, w) consists of the points
//! (x, y, z) with ux + vy + wz = 0.
//!
//! The star of a matrix A is the transpose of its entry-wise r-th power
//! (r = sqrt q); T acts on curve matrices by A ↦ T* A T.  Under the point
//! substitution P ↦ T·P' this is exactly how the defining form transforms,
//! so point sets map by T^{-1} and tangent-line covectors map by ℓ ↦ ℓ·T.

use crate::field::{FieldCtx, FieldElem};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjectiveError {
    #[error("matrix is singular")]
    Singular,
    #[error("points are equal, no unique line through them")]
    EqualPoints,
    #[error("lines are concurrent (or not pairwise distinct), no frame")]
    ConcurrentLines,
    #[error("coordinates must not all be zero")]
    ZeroVector,
}

/// A point of PG(2, q): normalized so the first nonzero coordinate is 1.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ProjPoint {
    pub coords: [FieldElem; 3],
}

/// A line of PG(2, q), same normalization as points.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ProjLine {
    pub coords: [FieldElem; 3],
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {} : {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {}]", self.coords[0], self.coords[1], self.coords[2])
    }
}

fn normalize_triple(
    ctx: &FieldCtx,
    coords: [FieldElem; 3],
) -> Result<[FieldElem; 3], ProjectiveError> {
    let lead = coords.iter().find(|c| !c.is_zero()).ok_or(ProjectiveError::ZeroVector)?;
    let s = ctx.inv(*lead).unwrap();
    Ok(coords.map(|c| ctx.mul(s, c)))
}

impl ProjPoint {
    pub fn new(ctx: &FieldCtx, coords: [FieldElem; 3]) -> Result<Self, ProjectiveError> {
        Ok(ProjPoint { coords: normalize_triple(ctx, coords)? })
    }

    /// Position in the canonical plane enumeration (sorting key).
    pub fn order_key(&self) -> (u8, u32, u32) {
        let [x, y, z] = self.coords;
        if x == FieldElem::ONE {
            (0, y.code(), z.code())
        } else if y == FieldElem::ONE {
            (1, z.code(), 0)
        } else {
            (2, 0, 0)
        }
    }
}

impl ProjLine {
    pub fn new(ctx: &FieldCtx, coords: [FieldElem; 3]) -> Result<Self, ProjectiveError> {
        Ok(ProjLine { coords: normalize_triple(ctx, coords)? })
    }

    /// Whether the point lies on the line: u·x + v·y + w·z = 0.
    pub fn contains(&self, ctx: &FieldCtx, p: &ProjPoint) -> bool {
        let mut acc = FieldElem::ZERO;
        for i in 0..3 {
            acc = ctx.add(acc, ctx.mul(self.coords[i], p.coords[i]));
        }
        acc.is_zero()
    }

    /// The q + 1 points of the line, in canonical plane order.
    pub fn points(&self, ctx: &FieldCtx) -> Vec<ProjPoint> {
        let [u, v, w] = self.coords;
        let mut out = Vec::with_capacity(ctx.q() as usize + 1);
        // chart (1, y, z): u + v y + w z = 0
        if !w.is_zero() {
            let wi = ctx.inv(w).unwrap();
            for y in ctx.elements() {
                let z = ctx.neg(ctx.mul(ctx.add(u, ctx.mul(v, y)), wi));
                out.push(ProjPoint { coords: [FieldElem::ONE, y, z] });
            }
        } else if !v.is_zero() {
            let y0 = ctx.neg(ctx.div(u, v).unwrap());
            for z in ctx.elements() {
                out.push(ProjPoint { coords: [FieldElem::ONE, y0, z] });
            }
        }
        // chart (0, 1, z): v + w z = 0
        if !w.is_zero() {
            let z = ctx.neg(ctx.div(v, w).unwrap());
            out.push(ProjPoint { coords: [FieldElem::ZERO, FieldElem::ONE, z] });
        } else if v.is_zero() {
            for z in ctx.elements() {
                out.push(ProjPoint { coords: [FieldElem::ZERO, FieldElem::ONE, z] });
            }
        }
        // (0, 0, 1)
        if w.is_zero() {
            out.push(ProjPoint { coords: [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE] });
        }
        debug_assert_eq!(out.len(), ctx.q() as usize + 1);
        debug_assert!(out.iter().all(|p| self.contains(ctx, p)));
        out
    }
}

/// All q^2 + q + 1 points: first (1, y, z) ascending by (y, z) codes, then
/// (0, 1, z) ascending, then (0, 0, 1).
pub fn enumerate_plane_points(ctx: &FieldCtx) -> Vec<ProjPoint> {
    let q = ctx.q() as usize;
    let mut out = Vec::with_capacity(q * q + q + 1);
    for y in ctx.elements() {
        for z in ctx.elements() {
            out.push(ProjPoint { coords: [FieldElem::ONE, y, z] });
        }
    }
    for z in ctx.elements() {
        out.push(ProjPoint { coords: [FieldElem::ZERO, FieldElem::ONE, z] });
    }
    out.push(ProjPoint { coords: [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE] });
    out
}

/// The unique line through two distinct points (cross product of coordinate
/// vectors).
pub fn line_through(
    ctx: &FieldCtx,
    p: &ProjPoint,
    q: &ProjPoint,
) -> Result<ProjLine, ProjectiveError> {
    if p == q {
        return Err(ProjectiveError::EqualPoints);
    }
    let [a, b, c] = p.coords;
    let [d, e, f] = q.coords;
    let coords = [
        ctx.sub(ctx.mul(b, f), ctx.mul(c, e)),
        ctx.sub(ctx.mul(c, d), ctx.mul(a, f)),
        ctx.sub(ctx.mul(a, e), ctx.mul(b, d)),
    ];
    let line = ProjLine::new(ctx, coords).expect("distinct points span a line");
    debug_assert!(line.contains(ctx, p) && line.contains(ctx, q));
    Ok(line)
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// 3×3 matrix over F_q, row-major.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Mat3 {
    pub e: [FieldElem; 9],
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} {} {}; {} {} {}; {} {} {}]",
            self.e[0], self.e[1], self.e[2], self.e[3], self.e[4], self.e[5], self.e[6], self.e[7],
            self.e[8]
        )
    }
}

impl Mat3 {
    pub fn new(e: [FieldElem; 9]) -> Self {
        Mat3 { e }
    }

    pub fn identity() -> Self {
        let mut e = [FieldElem::ZERO; 9];
        e[0] = FieldElem::ONE;
        e[4] = FieldElem::ONE;
        e[8] = FieldElem::ONE;
        Mat3 { e }
    }

    pub fn diag(a: FieldElem, b: FieldElem, c: FieldElem) -> Self {
        let mut e = [FieldElem::ZERO; 9];
        e[0] = a;
        e[4] = b;
        e[8] = c;
        Mat3 { e }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> FieldElem {
        self.e[3 * r + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElem) {
        self.e[3 * r + c] = v;
    }

    pub fn row(&self, r: usize) -> [FieldElem; 3] {
        [self.e[3 * r], self.e[3 * r + 1], self.e[3 * r + 2]]
    }

    pub fn det(&self, ctx: &FieldCtx) -> FieldElem {
        let m = |r: usize, c: usize| self.at(r, c);
        let mut acc = FieldElem::ZERO;
        acc = ctx.add(
            acc,
            ctx.mul(m(0, 0), ctx.sub(ctx.mul(m(1, 1), m(2, 2)), ctx.mul(m(1, 2), m(2, 1)))),
        );
        acc = ctx.sub(
            acc,
            ctx.mul(m(0, 1), ctx.sub(ctx.mul(m(1, 0), m(2, 2)), ctx.mul(m(1, 2), m(2, 0)))),
        );
        ctx.add(
            acc,
            ctx.mul(m(0, 2), ctx.sub(ctx.mul(m(1, 0), m(2, 1)), ctx.mul(m(1, 1), m(2, 0)))),
        )
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Mat3) -> Mat3 {
        let mut e = [FieldElem::ZERO; 9];
        for r in 0..3 {
            for c in 0..3 {
                let mut acc = FieldElem::ZERO;
                for k in 0..3 {
                    acc = ctx.add(acc, ctx.mul(self.at(r, k), other.at(k, c)));
                }
                e[3 * r + c] = acc;
            }
        }
        Mat3 { e }
    }

    pub fn transpose(&self) -> Mat3 {
        let mut e = [FieldElem::ZERO; 9];
        for r in 0..3 {
            for c in 0..3 {
                e[3 * c + r] = self.at(r, c);
            }
        }
        Mat3 { e }
    }

    pub fn scale(&self, ctx: &FieldCtx, s: FieldElem) -> Mat3 {
        Mat3 { e: self.e.map(|x| ctx.mul(s, x)) }
    }

    /// Inverse via the adjugate; errors on singular input.
    pub fn inverse(&self, ctx: &FieldCtx) -> Result<Mat3, ProjectiveError> {
        let d = self.det(ctx);
        if d.is_zero() {
            return Err(ProjectiveError::Singular);
        }
        let di = ctx.inv(d).unwrap();
        let m = |r: usize, c: usize| self.at(r, c);
        let cof = |r0: usize, c0: usize, r1: usize, c1: usize| {
            ctx.sub(ctx.mul(m(r0, c0), m(r1, c1)), ctx.mul(m(r0, c1), m(r1, c0)))
        };
        // adjugate = transpose of cofactor matrix
        let adj = [
            cof(1, 1, 2, 2),
            ctx.neg(cof(0, 1, 2, 2)),
            cof(0, 1, 1, 2),
            ctx.neg(cof(1, 0, 2, 2)),
            cof(0, 0, 2, 2),
            ctx.neg(cof(0, 0, 1, 2)),
            cof(1, 0, 2, 1),
            ctx.neg(cof(0, 0, 2, 1)),
            cof(0, 0, 1, 1),
        ];
        Ok(Mat3 { e: adj.map(|x| ctx.mul(di, x)) })
    }

    /// Matrix–column-vector product.
    pub fn apply(&self, ctx: &FieldCtx, v: [FieldElem; 3]) -> [FieldElem; 3] {
        let mut out = [FieldElem::ZERO; 3];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = FieldElem::ZERO;
            for (c, x) in v.iter().enumerate() {
                acc = ctx.add(acc, ctx.mul(self.at(r, c), *x));
            }
            *slot = acc;
        }
        out
    }

    /// Row-vector–matrix product (how line covectors transform).
    pub fn apply_row(&self, ctx: &FieldCtx, v: [FieldElem; 3]) -> [FieldElem; 3] {
        let mut out = [FieldElem::ZERO; 3];
        for (c, slot) in out.iter_mut().enumerate() {
            let mut acc = FieldElem::ZERO;
            for (r, x) in v.iter().enumerate() {
                acc = ctx.add(acc, ctx.mul(*x, self.at(r, c)));
            }
            *slot = acc;
        }
        out
    }
}

/// A* = transpose of the entry-wise r-th power.  (A*)* = A, and
/// (T* A T)* = T* A* T, which is why the congruence action plays well with
/// the mirror curve.
pub fn star(ctx: &FieldCtx, a: &Mat3) -> Mat3 {
    Mat3 { e: a.e.map(|x| ctx.frobenius_sqrt(x)) }.transpose()
}

/// An element of PGL(3, q): an invertible matrix normalized so its first
/// nonzero entry (row-major) is 1.  Equality of representatives is literal.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct PglElem {
    mat: Mat3,
}

impl fmt::Debug for PglElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PglElem{:?}", self.mat)
    }
}

impl PglElem {
    /// Normalizes an invertible matrix to its canonical scalar multiple.
    pub fn new(ctx: &FieldCtx, mat: Mat3) -> Result<Self, ProjectiveError> {
        if mat.det(ctx).is_zero() {
            return Err(ProjectiveError::Singular);
        }
        Ok(Self::normalize_unchecked(ctx, mat))
    }

    /// Normalization without the determinant check: for matrices already
    /// known invertible (e.g. products of invertible matrices).
    pub(crate) fn normalize_unchecked(ctx: &FieldCtx, mat: Mat3) -> Self {
        let lead = mat.e.iter().find(|x| !x.is_zero()).expect("nonzero matrix");
        let s = ctx.inv(*lead).unwrap();
        PglElem { mat: Mat3 { e: mat.e.map(|x| ctx.mul(s, x)) } }
    }

    pub fn mat(&self) -> &Mat3 {
        &self.mat
    }

    pub fn identity() -> Self {
        PglElem { mat: Mat3::identity() }
    }

    pub fn compose(&self, ctx: &FieldCtx, other: &PglElem) -> PglElem {
        PglElem::normalize_unchecked(ctx, self.mat.mul(ctx, &other.mat))
    }

    pub fn inverse(&self, ctx: &FieldCtx) -> PglElem {
        let inv = self.mat.inverse(ctx).expect("PglElem is invertible");
        PglElem::normalize_unchecked(ctx, inv)
    }

    /// Image of a point under T^{-1} — where the point goes when the curve
    /// matrix moves by A ↦ T* A T.  Pass the precomputed inverse.
    pub fn pull_point(inv: &PglElem, ctx: &FieldCtx, p: &ProjPoint) -> ProjPoint {
        let v = inv.mat.apply(ctx, p.coords);
        ProjPoint::new(ctx, v).expect("invertible image of a point")
    }
}

/// The congruence action A ↦ T* A T on curve matrices.  Well defined on
/// PGL classes: scaling T by λ scales the result by λ^(r+1).
pub fn congruence_transform(ctx: &FieldCtx, a: &PglElem, t: &PglElem) -> PglElem {
    let product = star(ctx, t.mat()).mul(ctx, a.mat()).mul(ctx, t.mat());
    PglElem::normalize_unchecked(ctx, product)
}

/// Same action on a raw invertible matrix (no normalization of the result).
pub fn congruence_transform_mat(ctx: &FieldCtx, a: &Mat3, t: &Mat3) -> Mat3 {
    star(ctx, t).mul(ctx, a).mul(ctx, t)
}

/// Iterates PGL(3, q): every matrix whose first nonzero entry is 1, with
/// det ≠ 0, in ascending row-major code order.  |PGL(3, q)| elements.
pub fn enumerate_pgl(ctx: &FieldCtx) -> impl Iterator<Item = PglElem> + '_ {
    PglEnum { ctx, lead: 0, rest: 0, done: false }.filter(|m| !m.mat.det(ctx).is_zero()).map(|m| {
        debug_assert_eq!(
            m.mat,
            PglElem::normalize_unchecked(ctx, m.mat).mat,
            "enumeration yields normalized representatives"
        );
        m
    })
}

/// Number of projective matrix candidates the PGL enumeration walks through
/// (singular ones included): (q^9 − 1)/(q − 1).
pub fn pgl_candidate_count(ctx: &FieldCtx) -> u64 {
    let q = ctx.q() as u128;
    ((q.pow(9) - 1) / (q - 1)) as u64
}

struct PglEnum<'a> {
    ctx: &'a FieldCtx,
    /// index of the leading 1
    lead: usize,
    /// counter over the q^(8−lead) free entries after the leading 1
    rest: u64,
    done: bool,
}

impl Iterator for PglEnum<'_> {
    type Item = PglElem;

    fn next(&mut self) -> Option<PglElem> {
        if self.done {
            return None;
        }
        let q = self.ctx.q() as u64;
        let free = 8 - self.lead;
        let mut e = [FieldElem::ZERO; 9];
        e[self.lead] = FieldElem::ONE;
        let mut c = self.rest;
        for slot in e.iter_mut().skip(self.lead + 1) {
            *slot = FieldElem((c % q) as u32);
            c /= q;
        }
        self.rest += 1;
        if self.rest >= q.pow(free as u32) {
            self.rest = 0;
            self.lead += 1;
            if self.lead == 9 {
                self.done = true;
            }
        }
        Some(PglElem { mat: Mat3 { e } })
    }
}

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// A change of coordinates T sending line l1 to {y = 0}, l2 to {x = 0} and
/// l3 to {z = 0}.  Exists iff the three lines are pairwise distinct and not
/// concurrent; the remaining diagonal freedom is fixed only by the scalar
/// normalization of `PglElem`.
///
/// Covectors transform by ℓ ↦ ℓ·T, so T = M^{-1}·N where M stacks the
/// given lines as rows and N stacks the target lines.
pub fn frame_to_triangle(
    ctx: &FieldCtx,
    l1: &ProjLine,
    l2: &ProjLine,
    l3: &ProjLine,
) -> Result<PglElem, ProjectiveError> {
    let mut m = [FieldElem::ZERO; 9];
    m[0..3].copy_from_slice(&l1.coords);
    m[3..6].copy_from_slice(&l2.coords);
    m[6..9].copy_from_slice(&l3.coords);
    let m = Mat3 { e: m };
    let m_inv = m.inverse(ctx).map_err(|_| ProjectiveError::ConcurrentLines)?;
    // targets: y = 0, x = 0, z = 0 as rows
    let mut n = [FieldElem::ZERO; 9];
    n[1] = FieldElem::ONE; // (0,1,0)
    n[3] = FieldElem::ONE; // (1,0,0)
    n[8] = FieldElem::ONE; // (0,0,1)
    let t = m_inv.mul(ctx, &Mat3 { e: n });
    let t = PglElem::normalize_unchecked(ctx, t);
    debug_assert_eq!(
        ProjLine::new(ctx, t.mat().apply_row(ctx, l1.coords)).unwrap().coords,
        [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]
    );
    Ok(t)
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

/// Parses "x y z" (three decimal codes) into a point.
pub fn parse_point(ctx: &FieldCtx, s: &str) -> Result<ProjPoint, String> {
    let codes = parse_codes(ctx, s, 3)?;
    ProjPoint::new(ctx, [codes[0], codes[1], codes[2]]).map_err(|e| e.to_string())
}

/// Parses nine whitespace-separated decimal codes, row-major, into a matrix.
pub fn parse_mat3(ctx: &FieldCtx, s: &str) -> Result<Mat3, String> {
    let codes = parse_codes(ctx, s, 9)?;
    let mut e = [FieldElem::ZERO; 9];
    e.copy_from_slice(&codes);
    Ok(Mat3 { e })
}

fn parse_codes(ctx: &FieldCtx, s: &str, n: usize) -> Result<Vec<FieldElem>, String> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != n {
        return Err(format!("expected {n} element codes, got {}", parts.len()));
    }
    parts
        .iter()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| format!("bad element code {t:?}"))
                .and_then(|c| ctx.elem(c).map_err(|e| e.to_string()))
        })
        .collect()
}

/// Formats a matrix as nine decimal codes, row-major, space-separated.
pub fn format_mat3(m: &Mat3) -> String {
    m.e.iter().map(|x| x.code().to_string()).collect::<Vec<_>>().join(" ")
}

/// Formats a point as three decimal codes, space-separated.
pub fn format_point(p: &ProjPoint) -> String {
    p.coords.iter().map(|x| x.code().to_string()).collect::<Vec<_>>().join(" ")
}

pub fn mat3_codes(m: &Mat3) -> [u32; 9] {
    m.e.map(|x| x.code())
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

    fn random_invertible(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> PglElem {
        loop {
            let e: [FieldElem; 9] =
                std::array::from_fn(|_| FieldElem(rng.gen_range(0..ctx.q())));
            let m = Mat3::new(e);
            if !m.det(ctx).is_zero() {
                return PglElem::new(ctx, m).unwrap();
            }
        }
    }

    #[test]
    fn normalization_is_idempotent_and_scalar_invariant() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let coords: [FieldElem; 3] =
                std::array::from_fn(|_| FieldElem(rng.gen_range(0..9)));
            if coords.iter().all(|c| c.is_zero()) {
                continue;
            }
            let p = ProjPoint::new(&f, coords).unwrap();
            let again = ProjPoint::new(&f, p.coords).unwrap();
            assert_eq!(p, again);
            for s in f.nonzero_elements() {
                let scaled = ProjPoint::new(&f, coords.map(|c| f.mul(s, c))).unwrap();
                assert_eq!(p, scaled);
            }
            let lead = p.coords.iter().find(|c| !c.is_zero()).unwrap();
            assert_eq!(*lead, FieldElem::ONE);
        }
        assert_eq!(
            ProjPoint::new(&f, [FieldElem::ZERO; 3]).unwrap_err(),
            ProjectiveError::ZeroVector
        );
    }

    #[test]
    fn plane_point_counts_and_order() {
        for (p, m, expect) in [(2u64, 1u32, 21usize), (3, 1, 91), (5, 1, 651)] {
            let f = build_field(p, m).unwrap();
            let pts = enumerate_plane_points(&f);
            assert_eq!(pts.len(), expect);
            let mut uniq: Vec<_> = pts.clone();
            uniq.dedup();
            assert_eq!(uniq.len(), expect, "points are distinct");
            let mut keys: Vec<_> = pts.iter().map(|p| p.order_key()).collect();
            let sorted = {
                let mut k = keys.clone();
                k.sort_unstable();
                k
            };
            assert_eq!(keys, sorted, "enumeration is in canonical order");
            keys.dedup();
            assert_eq!(keys.len(), expect);
        }
    }

    #[test]
    fn lines_have_q_plus_one_points_in_plane_order() {
        let f = f9();
        let all = enumerate_plane_points(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let coords: [FieldElem; 3] =
                std::array::from_fn(|_| FieldElem(rng.gen_range(0..9)));
            if coords.iter().all(|c| c.is_zero()) {
                continue;
            }
            let line = ProjLine::new(&f, coords).unwrap();
            let pts = line.points(&f);
            assert_eq!(pts.len(), 10);
            let filtered: Vec<ProjPoint> =
                all.iter().filter(|p| line.contains(&f, p)).copied().collect();
            assert_eq!(pts, filtered, "direct solve matches incidence filter in order");
        }
    }

    #[test]
    fn line_through_examples() {
        let f = f9();
        let p = ProjPoint::new(&f, [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]).unwrap();
        let q = ProjPoint::new(&f, [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]).unwrap();
        let l = line_through(&f, &p, &q).unwrap();
        assert_eq!(l.coords, [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]);
        assert_eq!(line_through(&f, &p, &p).unwrap_err(), ProjectiveError::EqualPoints);
    }

    #[test]
    fn star_is_an_involution_and_twists_scalars() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let e: [FieldElem; 9] = std::array::from_fn(|_| FieldElem(rng.gen_range(0..9)));
            let m = Mat3::new(e);
            assert_eq!(star(&f, &star(&f, &m)), m);
            // (λA)* = λ^r A*
            for s in f.nonzero_elements() {
                let scaled = star(&f, &m.scale(&f, s));
                assert_eq!(scaled, star(&f, &m).scale(&f, f.frobenius_sqrt(s)));
            }
        }
        // single-entry example: a12 = t goes to a21 = t^3 = 2t
        let mut m = Mat3::identity();
        m.set(0, 1, FieldElem(3));
        let s = star(&f, &m);
        assert_eq!(s.at(1, 0), FieldElem(6));
        assert_eq!(s.at(0, 1), FieldElem::ZERO);
    }

    #[test]
    fn congruence_action_composes() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = random_invertible(&f, &mut rng);
            let t1 = random_invertible(&f, &mut rng);
            let t2 = random_invertible(&f, &mut rng);
            let lhs = congruence_transform(&f, &congruence_transform(&f, &a, &t1), &t2);
            let rhs = congruence_transform(&f, &a, &t1.compose(&f, &t2));
            assert_eq!(lhs, rhs);
            // identity acts trivially
            assert_eq!(congruence_transform(&f, &a, &PglElem::identity()), a);
            // star commutes with the action
            let sa = PglElem::new(&f, star(&f, a.mat())).unwrap();
            let lhs2 = congruence_transform(&f, &sa, &t1);
            let rhs2 =
                PglElem::new(&f, star(&f, congruence_transform(&f, &a, &t1).mat())).unwrap();
            assert_eq!(lhs2, rhs2);
        }
    }

    #[test]
    fn congruence_diag_example() {
        let f = f9();
        // T = diag(1,1,α) on A = I gives diag(1,1,α^(r+1)) = diag(1,1,Nm α)
        let alpha = FieldElem(4);
        let t = PglElem::new(&f, Mat3::diag(FieldElem::ONE, FieldElem::ONE, alpha)).unwrap();
        let a = PglElem::identity();
        let out = congruence_transform(&f, &a, &t);
        assert_eq!(
            out.mat(),
            &Mat3::diag(FieldElem::ONE, FieldElem::ONE, f.norm(alpha))
        );
    }

    #[test]
    fn pgl_3_4_has_order_60480() {
        let f = f4();
        assert_eq!(pgl_candidate_count(&f), 87381);
        let mut count = 0u64;
        let mut seen_normalized = true;
        for t in enumerate_pgl(&f) {
            count += 1;
            let lead = t.mat().e.iter().find(|x| !x.is_zero()).unwrap();
            seen_normalized &= *lead == FieldElem::ONE;
        }
        assert_eq!(count, 60480);
        assert!(seen_normalized);
    }

    #[test]
    fn inverse_and_compose() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let t = random_invertible(&f, &mut rng);
            let ti = t.inverse(&f);
            assert_eq!(t.compose(&f, &ti), PglElem::identity());
            assert_eq!(ti.compose(&f, &t), PglElem::identity());
        }
    }

    #[test]
    fn frame_moves_lines_where_promised() {
        let f = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let y0 = ProjLine::new(&f, [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]).unwrap();
        let x0 = ProjLine::new(&f, [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]).unwrap();
        let z0 = ProjLine::new(&f, [FieldElem::ZERO, FieldElem::ZERO, FieldElem::ONE]).unwrap();
        let mut tested = 0;
        while tested < 30 {
            let mk = |rng: &mut ChaCha8Rng| {
                let coords: [FieldElem; 3] =
                    std::array::from_fn(|_| FieldElem(rng.gen_range(0..9)));
                ProjLine::new(&f, coords)
            };
            let (Ok(l1), Ok(l2), Ok(l3)) = (mk(&mut rng), mk(&mut rng), mk(&mut rng)) else {
                continue;
            };
            match frame_to_triangle(&f, &l1, &l2, &l3) {
                Err(_) => {
                    // concurrent: some point on all three lines (or repeats)
                    let all = enumerate_plane_points(&f);
                    assert!(
                        l1 == l2
                            || l2 == l3
                            || l1 == l3
                            || all.iter().any(|p| l1.contains(&f, p)
                                && l2.contains(&f, p)
                                && l3.contains(&f, p))
                    );
                }
                Ok(t) => {
                    tested += 1;
                    let img = |l: &ProjLine| {
                        ProjLine::new(&f, t.mat().apply_row(&f, l.coords)).unwrap()
                    };
                    assert_eq!(img(&l1), y0);
                    assert_eq!(img(&l2), x0);
                    assert_eq!(img(&l3), z0);
                    // incidence is preserved: P on l1 iff T^{-1}P on y = 0
                    let ti = t.inverse(&f);
                    for p in l1.points(&f) {
                        let moved = PglElem::pull_point(&ti, &f, &p);
                        assert!(y0.contains(&f, &moved));
                    }
                }
            }
        }
        // concurrent triple errors: three lines through (0,0,1)
        let l1 = ProjLine::new(&f, [FieldElem::ONE, FieldElem::ZERO, FieldElem::ZERO]).unwrap();
        let l2 = ProjLine::new(&f, [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO]).unwrap();
        let l3 = ProjLine::new(&f, [FieldElem::ONE, FieldElem::ONE, FieldElem::ZERO]).unwrap();
        assert_eq!(
            frame_to_triangle(&f, &l1, &l2, &l3).unwrap_err(),
            ProjectiveError::ConcurrentLines
        );
    }

    #[test]
    fn text_round_trips() {
        let f = f9();
        let m = parse_mat3(&f, "0 1 0 4 0 0 0 0 1").unwrap();
        assert_eq!(m.at(1, 0), FieldElem(4));
        assert_eq!(format_mat3(&m), "0 1 0 4 0 0 0 0 1");
        let p = parse_point(&f, "0 3 6").unwrap();
        // normalized: leading nonzero becomes 1 (divide by 3: t^-1·(t,2t) ...)
        assert_eq!(p.coords[1], FieldElem::ONE);
        assert!(parse_mat3(&f, "1 2 3").is_err());
        assert!(parse_mat3(&f, "0 1 0 4 0 0 0 0 9").is_err());
        assert!(parse_point(&f, "1 x 0").is_err());
    }
}
