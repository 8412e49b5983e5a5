//! Finite fields F_q of square order q = r^2, r = p^m, built as exp/log
//! tables over a polynomial basis.
//!
//! An element is identified with an integer code in [0, q): the base-p digits
//! of the code are the coefficients of the element in the basis
//! 1, t, t^2, ..., t^(2m−1), where t is a root of the modulus polynomial.
//! Codes are what the CLI prints and parses; all arithmetic goes through a
//! [`FieldCtx`].
//!
//! Beyond plain arithmetic the context exposes the structure the curve
//! machinery relies on: the relative Frobenius a ↦ a^r, trace and norm onto
//! the subfield F_r, and solvers for the three equation shapes that drive
//! tangent-line analysis and classification:
//!
//! * `X^r − X = β`        (additive Hilbert 90: solvable iff Tr β = 0),
//! * `X^(r−1) = β`        (multiplicative Hilbert 90: solvable iff Nm β = 1),
//! * `X^r + αX + β = 0`   (semilinear; solved by F_r-linear algebra, not by
//!   scanning the field).

use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Largest field order built by default; raise via `HERMREL_MAX_Q` in the CLI.
pub const DEFAULT_MAX_Q: u64 = 1 << 20;

/// Hard ceiling regardless of configuration: the table layout keeps codes in
/// u32 and allocates a handful of q-length tables.
pub const HARD_MAX_Q: u64 = 1 << 24;

/// Orders up to this get a full q×q addition table (4 MiB at the limit).
const ADD_TABLE_MAX_Q: u64 = 1 << 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    NonPrime(u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("field order {q} exceeds the configured bound {max}")]
    FieldTooLarge { q: u64, max: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero input where a nonzero element is required")]
    ZeroInput,
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("element has norm != 1, no rho with rho^(1-r) = lambda exists")]
    NormNotOne,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("invalid field spec: {0}")]
    BadSpec(String),
}

/// An element of F_q, stored as its integer code in [0, q).
///
/// Codes order elements; "smallest" always means smallest code.  The code is
/// only meaningful relative to the [`FieldCtx`] that produced it.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({})", self.0)
    }
}

/// Construction parameters: characteristic, half-degree and modulus.
///
/// The field is F_p[t] / (modulus) with deg(modulus) = 2m, so q = p^(2m) and
/// r = sqrt(q) = p^m.  `modulus` lists coefficients ascending, monic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldParams {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
}

impl FieldParams {
    /// The modulus as a base-p integer of its coefficient list (ascending).
    pub fn modulus_code(&self) -> u64 {
        let mut code = 0u64;
        for &c in self.modulus.iter().rev() {
            code = code * self.p as u64 + c as u64;
        }
        code
    }

    /// Human-readable polynomial, e.g. "t^2+t+1".
    pub fn modulus_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            let var = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            parts.push(format!("{coeff}{var}"));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

/// Arithmetic context for one field: lookup tables plus derived structure.
///
/// Immutable after construction, safe to share across threads.
pub struct FieldCtx {
    params: FieldParams,
    q: u32,
    sqrt_q: u32,
    generator: FieldElem,
    /// exp[i] = g^i for i in [0, 2(q−1)); doubled so products of two logs
    /// never need a reduction.
    exp: Vec<u32>,
    /// log[exp[i]] = i for i in [0, q−1); log[0] is a sentinel.
    log: Vec<u32>,
    frob: Vec<u32>,
    neg_t: Vec<u32>,
    inv_t: Vec<u32>,
    trace_t: Vec<u32>,
    norm_t: Vec<u32>,
    in_subfield: Vec<bool>,
    subfield: Vec<FieldElem>,
    /// Flat q×q table for small q; larger fields add digit-wise.
    add_t: Option<Vec<u32>>,
    special_u: FieldElem,
    special_alpha: FieldElem,
}

const LOG_ZERO: u32 = u32::MAX;

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(q = {}^{})", self.params.p, 2 * self.params.m)
    }
}

/// Builds F_q, q = p^(2m), with the default modulus and default size bound.
pub fn build_field(p: u64, m: u32) -> Result<FieldCtx, FieldError> {
    build_field_with(p, m, None, DEFAULT_MAX_Q)
}

/// Builds F_q with an explicit modulus (coefficients ascending, monic, degree
/// 2m) and size bound.  `modulus = None` selects the default: the monic
/// irreducible of degree 2m whose coefficient list, read as a base-p integer,
/// is smallest.
pub fn build_field_with(
    p: u64,
    m: u32,
    modulus: Option<&[u32]>,
    max_q: u64,
) -> Result<FieldCtx, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrime(p));
    }
    if m == 0 {
        return Err(FieldError::BadSpec("extension degree must be at least 2".into()));
    }
    let max_q = max_q.min(HARD_MAX_Q);
    let deg = 2 * m as usize;
    let q = (p as u64)
        .checked_pow(deg as u32)
        .filter(|&q| q <= max_q)
        .ok_or_else(|| {
            let q = (p as u64).checked_pow(deg as u32).unwrap_or(u64::MAX);
            FieldError::FieldTooLarge { q, max: max_q }
        })?;
    let p32 = p as u32;

    let modulus: Vec<u32> = match modulus {
        Some(coeffs) => {
            let mut c = coeffs.to_vec();
            while c.last() == Some(&0) {
                c.pop();
            }
            if c.len() != deg + 1 {
                return Err(FieldError::InvalidModulus(format!(
                    "degree {} required, got {}",
                    deg,
                    c.len().saturating_sub(1)
                )));
            }
            if c.iter().any(|&x| x >= p32) {
                return Err(FieldError::InvalidModulus(format!("coefficients must lie in [0, {p})")));
            }
            if *c.last().unwrap() != 1 {
                return Err(FieldError::InvalidModulus("must be monic".into()));
            }
            if !poly_is_irreducible(&c, p32) {
                return Err(FieldError::ReducibleModulus(p));
            }
            c
        }
        None => default_modulus(p32, deg),
    };

    let params = FieldParams { p: p32, m, modulus };
    Ok(build_tables(params, q as u32))
}

fn build_tables(params: FieldParams, q: u32) -> FieldCtx {
    let p = params.p;
    let sqrt_q = (params.p as u64).pow(params.m) as u32;
    let raw = RawField { p, deg: 2 * params.m as usize, modulus: &params.modulus };

    let generator = find_generator(&raw, q);

    let qm1 = (q - 1) as usize;
    let mut exp = vec![0u32; 2 * qm1];
    let mut log = vec![LOG_ZERO; q as usize];
    let mut e = 1u32;
    for (i, slot) in exp.iter_mut().take(qm1).enumerate() {
        *slot = e;
        debug_assert_eq!(log[e as usize], LOG_ZERO, "generator order too small");
        log[e as usize] = i as u32;
        e = raw.mul(e, generator);
    }
    debug_assert_eq!(e, 1, "generator order mismatch");
    for i in qm1..2 * qm1 {
        exp[i] = exp[i - qm1];
    }

    let neg_t: Vec<u32> = (0..q).map(|a| digit_map(a, p, params.m, |d| (p - d) % p)).collect();

    let mut inv_t = vec![0u32; q as usize];
    for a in 1..q {
        inv_t[a as usize] = exp[qm1 - log[a as usize] as usize];
    }

    let mut frob = vec![0u32; q as usize];
    for a in 1..q {
        let l = (log[a as usize] as u64 * sqrt_q as u64) % qm1 as u64;
        frob[a as usize] = exp[l as usize];
    }

    let add_t = if (q as u64) <= ADD_TABLE_MAX_Q {
        let mut t = vec![0u32; q as usize * q as usize];
        for a in 0..q {
            for b in 0..q {
                t[(a * q + b) as usize] = add_digits(a, b, p, params.m);
            }
        }
        Some(t)
    } else {
        None
    };

    let add = |a: u32, b: u32| -> u32 {
        if p == 2 {
            a ^ b
        } else {
            add_digits(a, b, p, params.m)
        }
    };

    let trace_t: Vec<u32> = (0..q).map(|a| add(a, frob[a as usize])).collect();
    let mut norm_t = vec![0u32; q as usize];
    for a in 1..q {
        let l = (log[a as usize] as u64 * (sqrt_q as u64 + 1)) % qm1 as u64;
        norm_t[a as usize] = exp[l as usize];
    }

    let in_subfield: Vec<bool> = (0..q).map(|a| frob[a as usize] == a).collect();
    let subfield: Vec<FieldElem> =
        (0..q).filter(|&a| in_subfield[a as usize]).map(FieldElem).collect();
    debug_assert_eq!(subfield.len(), sqrt_q as usize);

    let special_u = (0..q)
        .find(|&a| trace_t[a as usize] == 1)
        .map(FieldElem)
        .expect("trace is onto F_r");
    let minus_one = neg_t[1];
    let special_alpha = (1..q)
        .find(|&a| norm_t[a as usize] == minus_one)
        .map(FieldElem)
        .expect("norm is onto F_r^*");

    FieldCtx {
        params,
        q,
        sqrt_q,
        generator: FieldElem(generator),
        exp,
        log,
        frob,
        neg_t,
        inv_t,
        trace_t,
        norm_t,
        in_subfield,
        subfield,
        add_t,
        special_u,
        special_alpha,
    }
}

impl FieldCtx {
    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    /// Field order q = p^(2m).
    pub fn q(&self) -> u32 {
        self.q
    }

    /// r = sqrt(q) = p^m, the exponent of the relative Frobenius.
    pub fn sqrt_q(&self) -> u32 {
        self.sqrt_q
    }

    /// Smallest-code element of multiplicative order q − 1.
    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    /// Field spec string "p^2m:modulus-code" that reconstructs this field.
    pub fn spec_string(&self) -> String {
        format!("{}^{}:{}", self.params.p, 2 * self.params.m, self.params.modulus_code())
    }

    /// Bounds-checked element from its integer code.
    pub fn elem(&self, code: u64) -> Result<FieldElem, FieldError> {
        if code < self.q as u64 {
            Ok(FieldElem(code as u32))
        } else {
            Err(FieldError::BadSpec(format!("element code {code} out of range for q = {}", self.q)))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.params.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        if let Some(t) = &self.add_t {
            return FieldElem(t[(a.0 * self.q + b.0) as usize]);
        }
        FieldElem(add_digits(a.0, b.0, self.params.p, self.params.m))
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg_t[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let i = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElem(self.exp[i as usize])
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        if b.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.mul(a, FieldElem(self.inv_t[b.0 as usize])))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(FieldElem(self.inv_t[a.0 as usize]))
    }

    /// a^e with signed exponent; 0^0 = 1.  Panics on 0 raised to a negative
    /// power (a programming error, not a data error).
    pub fn pow(&self, a: FieldElem, e: i64) -> FieldElem {
        if a.0 == 0 {
            return match e {
                0 => FieldElem::ONE,
                _ if e > 0 => FieldElem::ZERO,
                _ => panic!("0 raised to negative power"),
            };
        }
        let qm1 = (self.q - 1) as i128;
        let l = (self.log[a.0 as usize] as i128 * e as i128).rem_euclid(qm1);
        FieldElem(self.exp[l as usize])
    }

    /// The relative Frobenius a ↦ a^r.  An involution: applying it twice is
    /// the identity, since a^(r^2) = a^q = a.
    #[inline]
    pub fn frobenius_sqrt(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.frob[a.0 as usize])
    }

    /// Tr(a) = a + a^r, onto F_r with kernel of size r.
    #[inline]
    pub fn trace(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.trace_t[a.0 as usize])
    }

    /// Nm(a) = a^(r+1), onto F_r^* on nonzero elements; Nm(0) = 0 by
    /// convention.
    #[inline]
    pub fn norm(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.norm_t[a.0 as usize])
    }

    /// Whether a lies in the subfield F_r (fixed by the Frobenius).
    #[inline]
    pub fn is_in_subfield(&self, a: FieldElem) -> bool {
        self.in_subfield[a.0 as usize]
    }

    /// The r elements of F_r, ascending by code.
    pub fn subfield_elements(&self) -> &[FieldElem] {
        &self.subfield
    }

    /// Smallest-code u with Tr(u) = 1.
    pub fn special_trace_one(&self) -> FieldElem {
        self.special_u
    }

    /// Smallest-code α with Nm(α) = −1.
    pub fn special_norm_minus_one(&self) -> FieldElem {
        self.special_alpha
    }

    /// Roots of X^r − X = β, sorted by code.  Nonempty (with exactly r roots,
    /// a coset of F_r) iff Tr(β) = 0; one root is written down directly as
    /// −β·u^r for the stored u with Tr(u) = 1.
    pub fn solve_artin_schreier(&self, beta: FieldElem) -> Vec<FieldElem> {
        if !self.trace(beta).is_zero() {
            return Vec::new();
        }
        let x0 = self.neg(self.mul(beta, self.frobenius_sqrt(self.special_u)));
        debug_assert_eq!(self.sub(self.frobenius_sqrt(x0), x0), beta);
        let mut roots: Vec<FieldElem> =
            self.subfield.iter().map(|&c| self.add(x0, c)).collect();
        roots.sort_unstable();
        roots
    }

    /// Roots of X^(r−1) = β for β ≠ 0, sorted by code.  Nonempty (with
    /// exactly r − 1 roots, a coset of F_r^*) iff Nm(β) = 1; solved as a
    /// linear congruence on discrete logs.
    pub fn solve_kummer(&self, beta: FieldElem) -> Result<Vec<FieldElem>, FieldError> {
        if beta.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        if self.norm(beta) != FieldElem::ONE {
            return Ok(Vec::new());
        }
        let qm1 = (self.q - 1) as u64;
        let d = (self.sqrt_q - 1) as u64;
        let e = (self.sqrt_q + 1) as u64;
        let l = self.log[beta.0 as usize] as u64;
        // Nm(β) = 1 forces d | l, and k·d ≡ l (mod q−1) reduces to
        // k ≡ l/d (mod r+1).
        debug_assert_eq!(l % d, 0);
        let k0 = (l / d) % e;
        let mut roots: Vec<FieldElem> =
            (0..d).map(|j| FieldElem(self.exp[((k0 + j * e) % qm1) as usize])).collect();
        roots.sort_unstable();
        Ok(roots)
    }

    /// Roots of X^r + αX + β = 0 for α ≠ 0, sorted by code.
    ///
    /// The map X ↦ X^r + αX is F_r-linear, so the equation is solved as a
    /// 2×2 linear system over F_r in the coordinates of the basis (1, g),
    /// g the table generator — never by scanning the field.  Root counts:
    /// exactly one when Nm(α) ≠ 1; when Nm(α) = 1, either r roots or none.
    pub fn solve_semilinear(
        &self,
        alpha: FieldElem,
        beta: FieldElem,
    ) -> Result<Vec<FieldElem>, FieldError> {
        if alpha.is_zero() {
            return Err(FieldError::ZeroAlpha);
        }
        let g = self.generator;
        let sg = self.frobenius_sqrt(g);
        let denom_inv = self.inv(self.sub(g, sg)).expect("generator not fixed by Frobenius");
        // x = a + b·g with a, b in F_r:  b = (x − x^r)/(g − g^r), a = x − b·g.
        let coords = |x: FieldElem| -> (FieldElem, FieldElem) {
            let b = self.mul(self.sub(x, self.frobenius_sqrt(x)), denom_inv);
            let a = self.sub(x, self.mul(b, g));
            debug_assert!(self.is_in_subfield(a) && self.is_in_subfield(b));
            (a, b)
        };
        let phi = |z: FieldElem| self.add(self.frobenius_sqrt(z), self.mul(alpha, z));

        let (m11, m21) = coords(phi(FieldElem::ONE));
        let (m12, m22) = coords(phi(g));
        let (t1, t2) = coords(self.neg(beta));

        let from_coords = |v1: FieldElem, v2: FieldElem| self.add(v1, self.mul(v2, g));
        let det = self.sub(self.mul(m11, m22), self.mul(m12, m21));

        let mut roots = if !det.is_zero() {
            let di = self.inv(det).unwrap();
            let v1 = self.mul(self.sub(self.mul(t1, m22), self.mul(t2, m12)), di);
            let v2 = self.mul(self.sub(self.mul(m11, t2), self.mul(m21, t1)), di);
            vec![from_coords(v1, v2)]
        } else {
            // Rank 1 (φ is never the zero map: φ(g) = g^r + αg vanishes only
            // if g were fixed by Frobenius).  Find a particular solution and
            // sweep the kernel line over F_r, or detect inconsistency.
            let particular = if !m11.is_zero() {
                let v1 = self.div(t1, m11).unwrap();
                // consistency: row 2 is (m21/m11)·row 1
                (self.mul(m21, v1) == t2).then_some((v1, FieldElem::ZERO))
            } else if !m12.is_zero() {
                let v2 = self.div(t1, m12).unwrap();
                (self.mul(m22, v2) == t2).then_some((FieldElem::ZERO, v2))
            } else if t1.is_zero() {
                // row 1 vanished entirely; solve row 2 alone
                if !m21.is_zero() {
                    Some((self.div(t2, m21).unwrap(), FieldElem::ZERO))
                } else if !m22.is_zero() {
                    Some((FieldElem::ZERO, self.div(t2, m22).unwrap()))
                } else {
                    None
                }
            } else {
                None
            };
            match particular {
                None => Vec::new(),
                Some((v1, v2)) => {
                    let dir = if !m11.is_zero() || !m12.is_zero() {
                        (m12, self.neg(m11))
                    } else {
                        (m22, self.neg(m21))
                    };
                    self.subfield
                        .iter()
                        .map(|&c| {
                            from_coords(
                                self.add(v1, self.mul(c, dir.0)),
                                self.add(v2, self.mul(c, dir.1)),
                            )
                        })
                        .collect()
                }
            }
        };
        debug_assert!(roots
            .iter()
            .all(|&x| self.add(phi(x), beta).is_zero()));
        roots.sort_unstable();
        roots.dedup();
        roots
            .windows(2)
            .for_each(|w| debug_assert_ne!(w[0], w[1]));
        Ok(roots)
    }

    /// Smallest-code ρ with ρ^(1−r) = λ; exists iff Nm(λ) = 1.
    pub fn solve_rho(&self, lambda: FieldElem) -> Result<FieldElem, FieldError> {
        if lambda.is_zero() || self.norm(lambda) != FieldElem::ONE {
            return Err(FieldError::NormNotOne);
        }
        // ρ^(1−r) = λ  ⟺  (ρ^{-1})^(r−1) = λ
        let sigmas = self.solve_kummer(lambda)?;
        debug_assert!(!sigmas.is_empty());
        let rho = sigmas
            .iter()
            .map(|&s| self.inv(s).unwrap())
            .min()
            .unwrap();
        debug_assert_eq!(self.pow(rho, 1 - self.sqrt_q as i64), lambda);
        Ok(rho)
    }

    /// All α with Nm(α) = λ, sorted by code; empty unless λ ∈ F_r^*.
    pub fn norm_preimages(&self, lambda: FieldElem) -> Vec<FieldElem> {
        if lambda.is_zero() || !self.is_in_subfield(lambda) {
            return Vec::new();
        }
        let qm1 = (self.q - 1) as u64;
        let d = (self.sqrt_q + 1) as u64;
        let e = (self.sqrt_q - 1) as u64;
        let l = self.log[lambda.0 as usize] as u64;
        debug_assert_eq!(l % d, 0, "subfield element log divisible by r+1");
        let k0 = (l / d) % e.max(1);
        let mut out: Vec<FieldElem> =
            (0..d).map(|j| FieldElem(self.exp[((k0 + j * e) % qm1) as usize])).collect();
        out.sort_unstable();
        debug_assert!(out.iter().all(|&a| self.norm(a) == lambda));
        out
    }
}

// ---------------------------------------------------------------------------
// Field spec strings
// ---------------------------------------------------------------------------

/// Parsed form of a field spec string "p^2m[:modulus-code]".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub m: u32,
    pub modulus: Option<Vec<u32>>,
}

/// Parses "p^2m[:modulus-code]", e.g. "3^2", "2^4", "3^2:10".  The modulus
/// code is the coefficient list read as a base-p integer (ascending), so
/// "3^2:10" is t^2 + 1.
pub fn parse_spec(spec: &str) -> Result<FieldSpec, FieldError> {
    let bad = |msg: &str| FieldError::BadSpec(format!("{spec:?}: {msg}"));
    let (field_part, mod_part) = match spec.split_once(':') {
        Some((f, m)) => (f, Some(m)),
        None => (spec, None),
    };
    let (p_str, e_str) = field_part
        .split_once('^')
        .ok_or_else(|| bad("expected p^2m"))?;
    let p: u64 = p_str.trim().parse().map_err(|_| bad("bad characteristic"))?;
    let e: u32 = e_str.trim().parse().map_err(|_| bad("bad exponent"))?;
    if e == 0 || e % 2 != 0 {
        return Err(bad("exponent must be even and positive (q = p^2m)"));
    }
    let m = e / 2;
    let modulus = match mod_part {
        None => None,
        Some(s) => {
            let code: u64 = s.trim().parse().map_err(|_| bad("bad modulus code"))?;
            let mut digits = Vec::new();
            let mut c = code;
            while c > 0 {
                digits.push((c % p) as u32);
                c /= p;
            }
            if digits.len() != e as usize + 1 {
                return Err(FieldError::InvalidModulus(format!(
                    "modulus code {code} does not encode a degree-{e} polynomial over F_{p}"
                )));
            }
            Some(digits)
        }
    };
    Ok(FieldSpec { p, m, modulus })
}

/// Builds a field from its spec string with the given size bound.
pub fn build_from_spec_with(spec: &str, max_q: u64) -> Result<FieldCtx, FieldError> {
    let parsed = parse_spec(spec)?;
    build_field_with(parsed.p, parsed.m, parsed.modulus.as_deref(), max_q)
}

/// Builds a field from its spec string with the default size bound.
pub fn build_from_spec(spec: &str) -> Result<FieldCtx, FieldError> {
    build_from_spec_with(spec, DEFAULT_MAX_Q)
}

// ---------------------------------------------------------------------------
// Subfield embeddings F_q -> F_{q^s}
// ---------------------------------------------------------------------------

/// Code-to-code embedding of a base field into an extension, realized by
/// sending the base polynomial generator t to the smallest-code root of the
/// base modulus in the extension.
pub struct Embedding {
    base_q: u32,
    target_q: u32,
    pub root: FieldElem,
    map: Vec<FieldElem>,
}

impl Embedding {
    pub fn apply(&self, a: FieldElem) -> FieldElem {
        self.map[a.0 as usize]
    }

    pub fn base_q(&self) -> u32 {
        self.base_q
    }

    pub fn target_q(&self) -> u32 {
        self.target_q
    }
}

/// Builds F_{q^s} (default modulus) together with the embedding F_q → F_{q^s}.
/// Fails with `FieldTooLarge` when q^s exceeds the bound.
pub fn extension_with_embedding(
    base: &FieldCtx,
    s: u32,
    max_q: u64,
) -> Result<(FieldCtx, Embedding), FieldError> {
    let big = build_field_with(base.p() as u64, base.params.m * s, None, max_q)?;
    // Smallest-code root of the base modulus in the big field.
    let root = big
        .elements()
        .find(|&c| eval_poly(&big, &base.params.modulus, c).is_zero())
        .expect("extension contains a root of the base modulus");
    let map: Vec<FieldElem> = (0..base.q)
        .map(|code| {
            let digits = code_digits(code, base.params.p, 2 * base.params.m);
            digits
                .iter()
                .rev()
                .fold(FieldElem::ZERO, |acc, &d| big.add(big.mul(acc, root), FieldElem(d)))
        })
        .collect();
    debug_assert!({
        let mut sorted = map.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == map.len()
    });
    let emb = Embedding { base_q: base.q, target_q: big.q, root, map };
    Ok((big, emb))
}

fn eval_poly(ctx: &FieldCtx, coeffs: &[u32], x: FieldElem) -> FieldElem {
    coeffs
        .iter()
        .rev()
        .fold(FieldElem::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), FieldElem(c)))
}

// ---------------------------------------------------------------------------
// Construction helpers: digit vectors and raw polynomial arithmetic
// ---------------------------------------------------------------------------

#[inline]
fn add_digits(a: u32, b: u32, p: u32, m: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..2 * m {
        out += ((a % p + b % p) % p) * place;
        a /= p;
        b /= p;
        place *= p;
    }
    out
}

fn digit_map(a: u32, p: u32, m: u32, f: impl Fn(u32) -> u32) -> u32 {
    let mut a = a;
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..2 * m {
        out += f(a % p) * place;
        a /= p;
        place *= p;
    }
    out
}

fn code_digits(code: u32, p: u32, len: u32) -> Vec<u32> {
    let mut digits = vec![0u32; len as usize];
    let mut c = code;
    for d in digits.iter_mut() {
        *d = c % p;
        c /= p;
    }
    digits
}

/// Plain polynomial-basis arithmetic, used only during construction (finding
/// the generator and filling the exp table); everything after that goes
/// through the tables.
struct RawField<'a> {
    p: u32,
    deg: usize,
    modulus: &'a [u32],
}

impl RawField<'_> {
    fn mul(&self, a: u32, b: u32) -> u32 {
        let pa = code_digits(a, self.p, self.deg as u32);
        let pb = code_digits(b, self.p, self.deg as u32);
        let mut prod = vec![0u64; 2 * self.deg];
        for (i, &ca) in pa.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (j, &cb) in pb.iter().enumerate() {
                prod[i + j] += ca as u64 * cb as u64;
            }
        }
        // reduce degree by degree using t^deg = -(lower part of modulus)
        for i in (self.deg..2 * self.deg).rev() {
            let c = prod[i] % self.p as u64;
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..self.deg {
                let mj = self.modulus[j] as u64;
                if mj != 0 {
                    let sub = c * (self.p as u64 - mj);
                    prod[i - self.deg + j] += sub;
                }
            }
        }
        let mut out = 0u32;
        let mut place = 1u32;
        for &c in prod.iter().take(self.deg) {
            out += (c % self.p as u64) as u32 * place;
            place *= self.p;
        }
        out
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

fn find_generator(raw: &RawField, q: u32) -> u32 {
    let order = (q - 1) as u64;
    let primes = prime_factors(order);
    (2..q)
        .find(|&cand| primes.iter().all(|&r| raw.pow(cand, order / r) != 1))
        .expect("multiplicative group is cyclic")
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of a mod b over F_p, coefficients ascending.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let lead_inv = mod_inverse(b[db] as u64, p as u64);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] % p as u64;
        if c != 0 {
            let f = c * lead_inv % p as u64;
            for j in 0..=db {
                let sub = f * b[j] as u64 % p as u64;
                r[dr - db + j] = (r[dr - db + j] + p as u64 - sub) % p as u64;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r.iter().map(|&c| (c % p as u64) as u32).collect()
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat; p prime and a != 0 mod p
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Trial division by every monic polynomial of degree up to deg/2.
fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for lower in 0..count {
            let mut g = code_digits_u64(lower, p, d as u32);
            g.push(1); // monic of degree d
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn code_digits_u64(code: u64, p: u32, len: u32) -> Vec<u32> {
    let mut digits = vec![0u32; len as usize];
    let mut c = code;
    for d in digits.iter_mut() {
        *d = (c % p as u64) as u32;
        c /= p as u64;
    }
    digits
}

/// Monic irreducible of degree `deg` over F_p whose ascending coefficient
/// list, read as a base-p integer, is smallest.
fn default_modulus(p: u32, deg: usize) -> Vec<u32> {
    let count = (p as u64).pow(deg as u32);
    for lower in 0..count {
        let mut f = code_digits_u64(lower, p, deg as u32);
        f.push(1);
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> FieldCtx {
        build_field(2, 1).unwrap()
    }

    fn f9() -> FieldCtx {
        build_field(3, 1).unwrap()
    }

    // Independent oracle for the default-modulus examples: a quadratic is
    // irreducible over F_p iff it has no root in F_p.
    fn quadratic_irreducible(c0: u32, c1: u32, p: u32) -> bool {
        (0..p).all(|x| (c0 + c1 * x + x * x) % p != 0)
    }

    #[test]
    fn default_moduli_are_smallest_irreducible() {
        assert_eq!(f4().params().modulus, vec![1, 1, 1]); // t^2+t+1
        assert_eq!(f9().params().modulus, vec![1, 0, 1]); // t^2+1
        // scan oracle: nothing smaller works
        for code in 0..3 {
            let d = code_digits(code, 2, 2);
            assert!(!quadratic_irreducible(d[0], d[1], 2), "code {code}");
        }
        assert!(quadratic_irreducible(1, 1, 2));
        // t^2+1 has lower-coefficient code 1; only t^2 (code 0) precedes it
        assert!(!quadratic_irreducible(0, 0, 3));
        assert!(quadratic_irreducible(1, 0, 3));
    }

    #[test]
    fn build_rejects_bad_parameters() {
        assert_eq!(build_field(4, 1).unwrap_err(), FieldError::NonPrime(4));
        assert_eq!(build_field(1, 1).unwrap_err(), FieldError::NonPrime(1));
        // t^2 + 2t + 1 = (t+1)^2 over F_3
        assert_eq!(
            build_field_with(3, 1, Some(&[1, 2, 1]), DEFAULT_MAX_Q).unwrap_err(),
            FieldError::ReducibleModulus(3)
        );
        assert!(matches!(
            build_field_with(2, 11, None, DEFAULT_MAX_Q).unwrap_err(),
            FieldError::FieldTooLarge { .. }
        ));
        assert!(matches!(
            build_field_with(3, 1, Some(&[1, 1]), DEFAULT_MAX_Q).unwrap_err(),
            FieldError::InvalidModulus(_)
        ));
    }

    #[test]
    fn f9_arithmetic_examples() {
        let f = f9();
        assert_eq!(f.q(), 9);
        assert_eq!(f.sqrt_q(), 3);
        // codes: 3 = t, 4 = 1+t, 8 = 2+2t with t^2 = -1
        assert_eq!(f.mul(FieldElem(3), FieldElem(3)), FieldElem(2)); // t*t = -1 = 2
        assert_eq!(f.add(FieldElem(4), FieldElem(8)), FieldElem(0)); // (1+t)+(2+2t) = 0
        assert_eq!(f.pow(FieldElem(4), 8), FieldElem(1)); // full group order
        assert_eq!(f.frobenius_sqrt(FieldElem(3)), FieldElem(6)); // t^3 = -t = 2t
        assert_eq!(f.norm(FieldElem(4)), FieldElem(2)); // (1+t)^4 = -1
        assert_eq!(f.generator(), FieldElem(4));
    }

    #[test]
    fn f4_trace_example() {
        let f = f4();
        // 2 = t: Tr(t) = t + t^2 = t + (t+1) = 1
        assert_eq!(f.trace(FieldElem(2)), FieldElem(1));
        assert_eq!(f.special_trace_one(), FieldElem(2));
        // char 2: -1 = 1, Nm(1) = 1
        assert_eq!(f.special_norm_minus_one(), FieldElem(1));
    }

    #[test]
    fn f9_special_elements() {
        let f = f9();
        let u = f.special_trace_one();
        assert_eq!(f.trace(u), FieldElem::ONE);
        assert!(f.elements().all(|a| f.trace(a) != FieldElem::ONE || a >= u));
        let alpha = f.special_norm_minus_one();
        assert_eq!(alpha, FieldElem(4));
        assert_eq!(f.norm(alpha), f.neg(FieldElem::ONE));
    }

    #[test]
    fn division_and_pow_edge_cases() {
        let f = f9();
        assert_eq!(f.div(FieldElem(5), FieldElem::ZERO).unwrap_err(), FieldError::DivisionByZero);
        assert_eq!(f.inv(FieldElem::ZERO).unwrap_err(), FieldError::DivisionByZero);
        assert_eq!(f.pow(FieldElem::ZERO, 0), FieldElem::ONE);
        assert_eq!(f.pow(FieldElem::ZERO, 5), FieldElem::ZERO);
        for a in f.nonzero_elements() {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
            assert_eq!(f.pow(a, -1), f.inv(a).unwrap());
        }
    }

    fn square_fields_up_to(max_q: u32) -> Vec<FieldCtx> {
        let mut out = Vec::new();
        for (p, max_m) in [(2u64, 3u32), (3, 2), (5, 1), (7, 1)] {
            for m in 1..=max_m {
                let q = (p as u32).pow(2 * m);
                if q <= max_q {
                    out.push(build_field(p, m).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn frobenius_is_involution_and_fixes_subfield() {
        for f in square_fields_up_to(81) {
            for a in f.elements() {
                let fa = f.frobenius_sqrt(a);
                assert_eq!(f.frobenius_sqrt(fa), a);
                assert_eq!(fa, f.pow(a, f.sqrt_q() as i64));
                assert_eq!(f.is_in_subfield(a), fa == a);
            }
            assert_eq!(f.subfield_elements().len(), f.sqrt_q() as usize);
        }
    }

    #[test]
    fn trace_and_norm_hit_every_subfield_value_evenly() {
        for f in square_fields_up_to(81) {
            let r = f.sqrt_q() as usize;
            let mut tr_fibers = std::collections::BTreeMap::new();
            let mut nm_fibers = std::collections::BTreeMap::new();
            for a in f.elements() {
                let t = f.trace(a);
                assert!(f.is_in_subfield(t));
                *tr_fibers.entry(t).or_insert(0usize) += 1;
                if !a.is_zero() {
                    let n = f.norm(a);
                    assert!(f.is_in_subfield(n) && !n.is_zero());
                    *nm_fibers.entry(n).or_insert(0usize) += 1;
                }
            }
            assert_eq!(tr_fibers.len(), r, "trace onto F_r (q = {})", f.q());
            assert!(tr_fibers.values().all(|&c| c == r));
            assert_eq!(tr_fibers[&FieldElem::ZERO], r);
            assert_eq!(nm_fibers.len(), r - 1, "norm onto F_r^* (q = {})", f.q());
            assert!(nm_fibers.values().all(|&c| c == r + 1));
        }
    }

    #[test]
    fn solvers_match_full_scan_oracle() {
        for f in square_fields_up_to(25) {
            let r = f.sqrt_q();
            for beta in f.elements() {
                let scan: Vec<FieldElem> = f
                    .elements()
                    .filter(|&x| f.sub(f.pow(x, r as i64), x) == beta)
                    .collect();
                let got = f.solve_artin_schreier(beta);
                assert_eq!(got, scan, "artin-schreier q={} beta={}", f.q(), beta);
                let expected = if f.trace(beta).is_zero() { r as usize } else { 0 };
                assert_eq!(got.len(), expected);
            }
            for beta in f.nonzero_elements() {
                let scan: Vec<FieldElem> = f
                    .nonzero_elements()
                    .filter(|&x| f.pow(x, r as i64 - 1) == beta)
                    .collect();
                let got = f.solve_kummer(beta).unwrap();
                assert_eq!(got, scan, "kummer q={} beta={}", f.q(), beta);
                let expected = if f.norm(beta) == FieldElem::ONE { r as usize - 1 } else { 0 };
                assert_eq!(got.len(), expected);
            }
            for alpha in f.nonzero_elements() {
                for beta in f.elements() {
                    let scan: Vec<FieldElem> = f
                        .elements()
                        .filter(|&x| {
                            f.add(f.add(f.pow(x, r as i64), f.mul(alpha, x)), beta).is_zero()
                        })
                        .collect();
                    let got = f.solve_semilinear(alpha, beta).unwrap();
                    assert_eq!(got, scan, "semilinear q={} a={} b={}", f.q(), alpha, beta);
                    if f.norm(alpha) != FieldElem::ONE {
                        assert_eq!(got.len(), 1);
                    } else {
                        assert!(got.len() == r as usize || got.is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn solver_examples_f9() {
        let f = f9();
        // X^3 - X = t: Tr(t) = t + 2t = 0, roots are t, t+1, t+2
        assert_eq!(
            f.solve_artin_schreier(FieldElem(3)),
            vec![FieldElem(3), FieldElem(4), FieldElem(5)]
        );
        // X^3 + (1+t)X + 1: Nm(1+t) = 2 != 1, unique root
        assert_eq!(f.solve_semilinear(FieldElem(4), FieldElem(1)).unwrap().len(), 1);
        // X^3 + 2X = 0: kernel case, three roots 0, 1, 2
        assert_eq!(
            f.solve_semilinear(FieldElem(2), FieldElem::ZERO).unwrap(),
            vec![FieldElem(0), FieldElem(1), FieldElem(2)]
        );
        // X^3 + 2X + 1 = 0: Nm(2) = 1 but 1 != 2^(1-3)... no roots
        assert_eq!(f.solve_semilinear(FieldElem(2), FieldElem(1)).unwrap(), vec![]);
        assert_eq!(f.solve_kummer(FieldElem::ZERO).unwrap_err(), FieldError::ZeroInput);
        assert_eq!(
            f.solve_semilinear(FieldElem::ZERO, FieldElem(1)).unwrap_err(),
            FieldError::ZeroAlpha
        );
    }

    #[test]
    fn rho_solver_and_norm_preimages() {
        for f in square_fields_up_to(49) {
            for lambda in f.nonzero_elements() {
                if f.norm(lambda) == FieldElem::ONE {
                    let rho = f.solve_rho(lambda).unwrap();
                    assert_eq!(f.pow(rho, 1 - f.sqrt_q() as i64), lambda);
                } else {
                    assert_eq!(f.solve_rho(lambda).unwrap_err(), FieldError::NormNotOne);
                }
                let pre = f.norm_preimages(lambda);
                let scan: Vec<FieldElem> =
                    f.nonzero_elements().filter(|&a| f.norm(a) == lambda).collect();
                assert_eq!(pre, scan);
            }
        }
    }

    #[test]
    fn deterministic_reconstruction() {
        let a = build_field(3, 1).unwrap();
        let b = build_field(3, 1).unwrap();
        assert_eq!(a.params(), b.params());
        assert_eq!(a.generator(), b.generator());
        assert_eq!(a.exp, b.exp);
        assert_eq!(a.spec_string(), "3^2:10");
        let c = build_from_spec("3^2:10").unwrap();
        assert_eq!(c.params(), a.params());
    }

    #[test]
    fn spec_strings_parse_and_reject() {
        assert_eq!(parse_spec("3^2").unwrap(), FieldSpec { p: 3, m: 1, modulus: None });
        assert_eq!(
            parse_spec("3^2:10").unwrap(),
            FieldSpec { p: 3, m: 1, modulus: Some(vec![1, 0, 1]) }
        );
        assert_eq!(parse_spec("2^4").unwrap().m, 2);
        assert!(parse_spec("3^3").is_err()); // odd exponent: not a square order
        assert!(parse_spec("9").is_err());
        assert!(parse_spec("a^2").is_err());
        // modulus code of wrong degree
        assert!(matches!(parse_spec("3^2:4").unwrap_err(), FieldError::InvalidModulus(_)));
    }

    #[test]
    fn modulus_override_changes_representation_not_structure() {
        // t^2 + t + 2 is also irreducible over F_3 (no roots)
        let alt = build_from_spec("3^2:14").unwrap(); // 2 + 1·3 + 1·9 = 14
        assert_eq!(alt.params().modulus, vec![2, 1, 1]);
        assert_eq!(alt.q(), 9);
        for a in alt.elements() {
            assert_eq!(alt.frobenius_sqrt(alt.frobenius_sqrt(a)), a);
        }
        assert_eq!(alt.subfield_elements().len(), 3);
    }

    #[test]
    fn field_info_strings() {
        let f = f9();
        assert_eq!(f.params().modulus_code(), 10);
        assert_eq!(f.params().modulus_string(), "t^2+1");
        assert_eq!(f4().params().modulus_string(), "t^2+t+1");
    }

    #[test]
    fn embedding_is_a_field_homomorphism() {
        let base = f9();
        let (big, emb) = extension_with_embedding(&base, 2, DEFAULT_MAX_Q).unwrap();
        assert_eq!(big.q(), 81);
        assert_eq!(emb.apply(FieldElem::ZERO), FieldElem::ZERO);
        assert_eq!(emb.apply(FieldElem::ONE), FieldElem::ONE);
        for a in base.elements() {
            for b in base.elements() {
                assert_eq!(emb.apply(base.add(a, b)), big.add(emb.apply(a), emb.apply(b)));
                assert_eq!(emb.apply(base.mul(a, b)), big.mul(emb.apply(a), emb.apply(b)));
            }
        }
        // the image is exactly the fixed field of x -> x^9 in F_81
        for a in base.elements() {
            let img = emb.apply(a);
            assert_eq!(big.pow(img, 9), img);
        }
    }

    #[test]
    fn larger_field_smoke() {
        let f = build_field(2, 3).unwrap(); // F_64
        assert_eq!(f.q(), 64);
        assert_eq!(f.sqrt_q(), 8);
        let g = f.generator();
        let mut seen = std::collections::HashSet::new();
        let mut x = FieldElem::ONE;
        for _ in 0..63 {
            assert!(seen.insert(x));
            x = f.mul(x, g);
        }
        assert_eq!(x, FieldElem::ONE);
    }
}
