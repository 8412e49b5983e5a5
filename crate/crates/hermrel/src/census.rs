//! Verification sweeps over many curves at once.
//!
//! A sweep enumerates (or samples) 3×3 matrices over F_q, keeps the
//! invertible ones, and checks the statements that are supposed to hold for
//! every curve:
//!
//! * `congruence` — N ≡ 1 (mod r);
//! * `m_bounds` — m = (N − 1)/r lies in {q} ∪ [0, r + 2], and m = q only
//!   for Hermitian curves (plus the one exceptional orbit over F_4);
//! * `mirror` — C_{A*} has the same rational points and inflexions, with
//!   coinciding tangents at the inflexions;
//! * `dual` — every tangent covector of C_A is a point of the dual curve
//!   C_B, B = (A^{-1})^t;
//! * `multiplicity` — every tangent meets the curve at its point of
//!   tangency with multiplicity r or r + 1, the residual point is rational
//!   and on the curve, and non-inflexion residuals point back (reciprocity).
//!
//! Reports are bit-stable: the same plan and seed produce byte-identical
//! JSON no matter how many worker threads run the sweep.  Wall-clock timing
//! is kept out of the serialized form for the same reason.

use crate::curve::{Curve, Plane};
use crate::field::{extension_with_embedding, Embedding, FieldCtx, FieldElem};
use crate::projective::{mat3_codes, pgl_candidate_count, Mat3, ProjPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CensusError {
    #[error("exhaustive enumeration of {needed} matrices exceeds budget {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("extension field unavailable: {0}")]
    EmbeddingUnavailable(String),
    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),
}

/// Which per-curve checks a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckSet {
    pub congruence: bool,
    pub m_bounds: bool,
    pub mirror: bool,
    pub dual: bool,
    pub multiplicity: bool,
}

impl CheckSet {
    pub fn all() -> Self {
        CheckSet { congruence: true, m_bounds: true, mirror: true, dual: true, multiplicity: true }
    }

    pub fn congruence_only() -> Self {
        CheckSet {
            congruence: true,
            m_bounds: false,
            mirror: false,
            dual: false,
            multiplicity: false,
        }
    }

    /// Congruence plus the m-range statement.
    pub fn bounds() -> Self {
        CheckSet {
            congruence: true,
            m_bounds: true,
            mirror: false,
            dual: false,
            multiplicity: false,
        }
    }

    /// True when some check walks the individual points of each curve.
    pub fn pointwise(&self) -> bool {
        self.mirror || self.dual || self.multiplicity
    }

    /// The enabled checks, in a fixed order, as plan-file names.
    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.congruence {
            out.push("congruence");
        }
        if self.m_bounds {
            out.push("m_bounds");
        }
        if self.mirror {
            out.push("mirror");
        }
        if self.dual {
            out.push("dual");
        }
        if self.multiplicity {
            out.push("multiplicity");
        }
        out
    }

    /// Parses a comma-separated list of check names, or `all`.
    pub fn from_names(text: &str) -> Result<Self, CensusError> {
        if text.trim() == "all" {
            return Ok(CheckSet::all());
        }
        let mut set = CheckSet {
            congruence: false,
            m_bounds: false,
            mirror: false,
            dual: false,
            multiplicity: false,
        };
        for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "congruence" => set.congruence = true,
                "m_bounds" => set.m_bounds = true,
                "mirror" => set.mirror = true,
                "dual" => set.dual = true,
                "multiplicity" => set.multiplicity = true,
                other => {
                    return Err(CensusError::InvalidPlan(format!("unknown check `{other}`")));
                }
            }
        }
        Ok(set)
    }
}

/// How the matrices are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMode {
    /// All matrices with their first nonzero entry scaled to 1 — one
    /// representative per projective class, (q^9 − 1)/(q − 1) candidates.
    Exhaustive,
    /// `count` matrices drawn uniformly from all of F_q^{3×3}; each sample
    /// index gets its own RNG stream, so results do not depend on how the
    /// work is split.
    Sampled { count: u64, seed: u64 },
}

pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1_000_000;

/// Seed used whenever a caller does not pick one, so sampled sweeps are
/// reproducible by default.
pub const DEFAULT_SEED: u64 = 107;

/// Everything that defines a sweep.  `workers` and the exhaustive budget
/// influence only scheduling and admission, never results, and stay out of
/// the serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepPlan {
    pub field: String,
    pub mode: SweepMode,
    pub checks: CheckSet,
    /// Curves among the first this many enumerated/sampled matrices also get
    /// the multiplicity check over the quadratic extension F_{q^2}.
    pub extension_count: u64,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub exhaustive_budget: u64,
}

impl SweepPlan {
    pub fn new(ctx: &FieldCtx, mode: SweepMode, checks: CheckSet) -> Self {
        SweepPlan {
            field: ctx.spec_string(),
            mode,
            checks,
            extension_count: 0,
            workers: 1,
            exhaustive_budget: DEFAULT_EXHAUSTIVE_BUDGET,
        }
    }

    /// Parses a `key = value` plan file.  `#` starts a comment; `field` is
    /// required; `mode` is `exhaustive` or `sampled` (the latter needs
    /// `count` and an optional `seed`).
    pub fn parse(text: &str) -> Result<Self, CensusError> {
        let mut pairs: BTreeMap<&str, &str> = BTreeMap::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CensusError::InvalidPlan(format!("expected key = value: `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            if pairs.insert(key, value).is_some() {
                return Err(CensusError::InvalidPlan(format!("duplicate key `{key}`")));
            }
        }
        let parse_u64 = |key: &str, value: &str| {
            value
                .parse::<u64>()
                .map_err(|_| CensusError::InvalidPlan(format!("bad number for `{key}`: `{value}`")))
        };
        let mut field = None;
        let mut mode_name = None;
        let mut count = None;
        let mut seed = DEFAULT_SEED;
        let mut checks = CheckSet::all();
        let mut workers = 1usize;
        let mut extension_count = 0;
        let mut budget = DEFAULT_EXHAUSTIVE_BUDGET;
        for (key, value) in pairs {
            match key {
                "field" => field = Some(value.to_string()),
                "mode" => mode_name = Some(value.to_string()),
                "count" => count = Some(parse_u64(key, value)?),
                "seed" => seed = parse_u64(key, value)?,
                "checks" => checks = CheckSet::from_names(value)?,
                "workers" => workers = parse_u64(key, value)?.max(1) as usize,
                "extension_count" => extension_count = parse_u64(key, value)?,
                "budget" => budget = parse_u64(key, value)?,
                other => {
                    return Err(CensusError::InvalidPlan(format!("unknown key `{other}`")));
                }
            }
        }
        let field = field.ok_or_else(|| CensusError::InvalidPlan("missing `field`".into()))?;
        let mode = match mode_name.as_deref() {
            Some("exhaustive") | None => {
                if count.is_some() {
                    return Err(CensusError::InvalidPlan(
                        "`count` only applies to sampled mode".into(),
                    ));
                }
                SweepMode::Exhaustive
            }
            Some("sampled") => SweepMode::Sampled {
                count: count
                    .ok_or_else(|| CensusError::InvalidPlan("sampled mode needs `count`".into()))?,
                seed,
            },
            Some(other) => {
                return Err(CensusError::InvalidPlan(format!("unknown mode `{other}`")));
            }
        };
        Ok(SweepPlan {
            field,
            mode,
            checks,
            extension_count,
            workers,
            exhaustive_budget: budget,
        })
    }

    /// Renders the plan in the same `key = value` format `parse` accepts.
    pub fn to_plan_string(&self) -> String {
        let mut out = format!("field = {}\n", self.field);
        match self.mode {
            SweepMode::Exhaustive => out.push_str("mode = exhaustive\n"),
            SweepMode::Sampled { count, seed } => {
                out.push_str(&format!("mode = sampled\ncount = {count}\nseed = {seed}\n"));
            }
        }
        let names = self.checks.names();
        if self.checks == CheckSet::all() {
            out.push_str("checks = all\n");
        } else {
            out.push_str(&format!("checks = {}\n", names.join(",")));
        }
        out.push_str(&format!("workers = {}\n", self.workers));
        out.push_str(&format!("extension_count = {}\n", self.extension_count));
        out.push_str(&format!("budget = {}\n", self.exhaustive_budget));
        out
    }
}

/// One failed check, identified by the matrix (as entry codes, row-major).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(rename = "A")]
    pub a: [u32; 9],
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    /// Matrices produced by the enumeration or the sampler.
    pub enumerated: u64,
    /// Among those, matrices with det = 0 (no curve).
    pub singular: u64,
    /// Invertible matrices that went through the checks.
    pub checked: u64,
    /// Curves that additionally ran the extension-field multiplicity check.
    pub extension_checked: u64,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SweepReport {
    pub plan: SweepPlan,
    pub totals: Totals,
    /// Rows [m, count] sorted by m, where N = 1 + m·r.
    pub m_histogram: Vec<[u64; 2]>,
    /// Rows [inflexion count, count of curves].
    pub inflexion_histogram: Vec<[u64; 2]>,
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub elapsed: std::time::Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat `section,key,value` table; violations render their matrix codes
    /// joined by spaces in the value column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,key,value\n");
        out.push_str(&format!("total,enumerated,{}\n", self.totals.enumerated));
        out.push_str(&format!("total,singular,{}\n", self.totals.singular));
        out.push_str(&format!("total,checked,{}\n", self.totals.checked));
        out.push_str(&format!("total,extension_checked,{}\n", self.totals.extension_checked));
        out.push_str(&format!("total,violations,{}\n", self.violations.len()));
        for [m, count] in &self.m_histogram {
            out.push_str(&format!("m,{m},{count}\n"));
        }
        for [k, count] in &self.inflexion_histogram {
            out.push_str(&format!("inflexions,{k},{count}\n"));
        }
        for v in &self.violations {
            let codes: Vec<String> = v.a.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("violation,{},{}\n", v.check, codes.join(" ")));
        }
        out
    }
}

/// The exceptional F_4 matrix diag(1, g, g^2), g a generator: the one
/// non-Hermitian curve shape with the maximal point count.
pub fn special_matrix_q4(ctx: &FieldCtx) -> Mat3 {
    assert_eq!(ctx.q(), 4, "the exceptional class only exists over F_4");
    let g = ctx.generator();
    Mat3::diag(FieldElem::ONE, g, ctx.mul(g, g))
}

/// Normalized matrices of the full congruence orbit of `special_matrix_q4`.
pub fn special_orbit_q4(ctx: &FieldCtx) -> BTreeSet<[u32; 9]> {
    let base = crate::projective::PglElem::new(ctx, special_matrix_q4(ctx))
        .expect("diagonal with nonzero entries");
    let mut orbit = BTreeSet::new();
    for t in crate::projective::enumerate_pgl(ctx) {
        let moved = crate::projective::congruence_transform(ctx, &base, &t);
        orbit.insert(mat3_codes(moved.mat()));
    }
    orbit
}

/// Runs a sweep.  The field the curves live over is `ctx`; `plan.field` is
/// replaced by the context's canonical spec string in the report.
pub fn run_sweep(ctx: &FieldCtx, plan: &SweepPlan) -> Result<SweepReport, CensusError> {
    let started = std::time::Instant::now();
    let total = match plan.mode {
        SweepMode::Exhaustive => {
            let needed = pgl_candidate_count(ctx);
            if needed > plan.exhaustive_budget {
                return Err(CensusError::BudgetExceeded {
                    needed,
                    budget: plan.exhaustive_budget,
                });
            }
            needed
        }
        SweepMode::Sampled { count, .. } => count,
    };
    let plane = Plane::new(ctx);
    let orbit = if plan.checks.m_bounds && ctx.q() == 4 {
        Some(special_orbit_q4(ctx))
    } else {
        None
    };
    let extension = if plan.checks.multiplicity && plan.extension_count > 0 {
        let (big, emb) = extension_with_embedding(ctx, 2, crate::field::DEFAULT_MAX_Q)
            .map_err(|e| CensusError::EmbeddingUnavailable(e.to_string()))?;
        let big_plane = Plane::with_exponent(&big, ctx.sqrt_q());
        Some(ExtensionCache { big, emb, plane: big_plane })
    } else {
        None
    };
    let workers = plan.workers.max(1).min(total.max(1) as usize);
    let shared = Shared {
        ctx,
        plan,
        plane: &plane,
        orbit: orbit.as_ref(),
        extension: extension.as_ref(),
    };
    let partials: Vec<Partial> = if workers <= 1 {
        vec![run_range(&shared, 0..total)]
    } else {
        let chunk = total.div_ceil(workers as u64);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let shared = &shared;
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(total);
                    scope.spawn(move || run_range(shared, lo..hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
        })
    };
    let mut totals = Totals::default();
    let mut m_hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut infl_hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut violations = Vec::new();
    for partial in partials {
        totals.enumerated += partial.totals.enumerated;
        totals.singular += partial.totals.singular;
        totals.checked += partial.totals.checked;
        totals.extension_checked += partial.totals.extension_checked;
        for (k, v) in partial.m_hist {
            *m_hist.entry(k).or_default() += v;
        }
        for (k, v) in partial.infl_hist {
            *infl_hist.entry(k).or_default() += v;
        }
        violations.extend(partial.violations);
    }
    violations.sort_by(|x, y| (x.a, &x.check, &x.detail).cmp(&(y.a, &y.check, &y.detail)));
    let mut plan_echo = plan.clone();
    plan_echo.field = ctx.spec_string();
    Ok(SweepReport {
        plan: plan_echo,
        totals,
        m_histogram: m_hist.into_iter().map(|(k, v)| [k, v]).collect(),
        inflexion_histogram: infl_hist.into_iter().map(|(k, v)| [k, v]).collect(),
        violations,
        elapsed: started.elapsed(),
    })
}

struct ExtensionCache {
    big: FieldCtx,
    emb: Embedding,
    plane: Plane,
}

struct Shared<'a> {
    ctx: &'a FieldCtx,
    plan: &'a SweepPlan,
    plane: &'a Plane,
    orbit: Option<&'a BTreeSet<[u32; 9]>>,
    extension: Option<&'a ExtensionCache>,
}

#[derive(Default)]
struct Partial {
    totals: Totals,
    m_hist: BTreeMap<u64, u64>,
    infl_hist: BTreeMap<u64, u64>,
    violations: Vec<Violation>,
}

/// Index `idx` of the exhaustive order: all matrices whose first nonzero
/// entry is 1, grouped by the position of that entry, remaining entries
/// counting up in base q.
pub fn decode_normalized_matrix(ctx: &FieldCtx, idx: u64) -> Mat3 {
    let q = ctx.q() as u64;
    let mut lead = 0usize;
    let mut rem = idx;
    loop {
        assert!(lead < 9, "index out of range");
        let block = q.pow(8 - lead as u32);
        if rem < block {
            break;
        }
        rem -= block;
        lead += 1;
    }
    let mut entries = [FieldElem::ZERO; 9];
    entries[lead] = FieldElem::ONE;
    for pos in (lead + 1..9).rev() {
        entries[pos] = FieldElem((rem % q) as u32);
        rem /= q;
    }
    Mat3::new(entries)
}

fn sample_matrix(ctx: &FieldCtx, seed: u64, idx: u64) -> Mat3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    let mut entries = [FieldElem::ZERO; 9];
    for slot in &mut entries {
        *slot = FieldElem(rng.gen_range(0..ctx.q()));
    }
    Mat3::new(entries)
}

fn run_range(shared: &Shared, range: std::ops::Range<u64>) -> Partial {
    let mut partial = Partial::default();
    for idx in range {
        let mat = match shared.plan.mode {
            SweepMode::Exhaustive => decode_normalized_matrix(shared.ctx, idx),
            SweepMode::Sampled { seed, .. } => sample_matrix(shared.ctx, seed, idx),
        };
        partial.totals.enumerated += 1;
        let curve = match Curve::new(shared.ctx, mat) {
            Ok(curve) => curve,
            Err(_) => {
                partial.totals.singular += 1;
                continue;
            }
        };
        partial.totals.checked += 1;
        let with_extension = idx < shared.plan.extension_count;
        check_curve(shared, &curve, with_extension, &mut partial);
    }
    partial
}

fn check_curve(shared: &Shared, curve: &Curve, with_extension: bool, out: &mut Partial) {
    let ctx = shared.ctx;
    let checks = &shared.plan.checks;
    let r = ctx.sqrt_q() as u64;
    let a = mat3_codes(curve.matrix().mat());
    let mut report = |check: &str, detail: String| {
        out.violations.push(Violation { a, check: check.to_string(), detail });
    };
    let points = curve.points_on(shared.plane);
    let n = points.len() as u64;
    let inflexion_flags: Vec<bool> = points
        .iter()
        .map(|p| curve.is_inflexion(p).expect("rational points are on the curve"))
        .collect();
    let n_inflexions = inflexion_flags.iter().filter(|&&f| f).count() as u64;
    *out.m_hist.entry(if n > 0 { (n - 1) / r } else { 0 }).or_default() += 1;
    *out.infl_hist.entry(n_inflexions).or_default() += 1;

    if checks.congruence && n % r != 1 % r {
        report("congruence", format!("N = {n} is not 1 mod {r}"));
    }
    if checks.m_bounds {
        if n % r == 1 % r {
            let m = (n - 1) / r;
            if m != ctx.q() as u64 && m > r + 2 {
                report("m_bounds", format!("m = {m} outside {{q}} ∪ [0, {}]", r + 2));
            }
            if m == ctx.q() as u64 {
                let known = curve.is_hermitian()
                    || shared.orbit.map_or(false, |orbit| orbit.contains(&a));
                if !known {
                    report(
                        "m_bounds",
                        format!("maximal count N = {n} on an unexpected curve"),
                    );
                }
            }
        } else if !checks.congruence {
            report("m_bounds", format!("N = {n} is not 1 mod {r}, m undefined"));
        }
    }
    if checks.mirror {
        let mirror = curve.mirror();
        let mirror_points = mirror.points_on(shared.plane);
        if mirror_points != points {
            report(
                "mirror",
                format!("point sets differ: {} vs {}", points.len(), mirror_points.len()),
            );
        } else {
            for (p, &flag) in points.iter().zip(&inflexion_flags) {
                let mirror_flag =
                    mirror.is_inflexion(p).expect("shared points are on the mirror");
                if mirror_flag != flag {
                    report("mirror", format!("inflexion status differs at {p:?}"));
                } else if flag {
                    let t1 = curve.tangent_line(p).expect("point is on the curve");
                    let t2 = mirror.tangent_line(p).expect("point is on the mirror");
                    if t1 != t2 {
                        report("mirror", format!("tangents differ at inflexion {p:?}"));
                    }
                }
            }
        }
    }
    if checks.dual {
        let dual = curve.dual();
        for p in &points {
            let line = curve.tangent_line(p).expect("point is on the curve");
            let as_point = ProjPoint { coords: line.coords };
            if !dual.contains(&as_point) {
                report("dual", format!("tangent at {p:?} misses the dual curve"));
            }
        }
    }
    if checks.multiplicity {
        // Reciprocity runs through the mirror: B_A(P, P')^r = B_{A*}(P', P),
        // so a residual P' of C_A points back at P along the mirror's tangent.
        let mirror = curve.mirror();
        for (p, &flag) in points.iter().zip(&inflexion_flags) {
            let d = curve.tangent_divisor(p).expect("point is on the curve");
            let mult = d.multiplicity as u64;
            if mult != r && mult != r + 1 {
                report("multiplicity", format!("multiplicity {mult} at {p:?}"));
                continue;
            }
            if (mult == r + 1) != flag {
                report("multiplicity", format!("multiplicity/inflexion mismatch at {p:?}"));
            }
            if !curve.contains(&d.residual) {
                report("multiplicity", format!("residual of {p:?} is off the curve"));
            } else if mult == r {
                let back =
                    mirror.tangent_divisor(&d.residual).expect("residual is on the mirror");
                if back.multiplicity as u64 != r || back.residual != *p {
                    report("multiplicity", format!("no reciprocity at {p:?}"));
                }
            }
        }
        if with_extension {
            if let Some(cache) = shared.extension {
                out.totals.extension_checked += 1;
                let big_curve = curve
                    .embed(&cache.big, &cache.emb)
                    .expect("extension was built for this field");
                for p in big_curve.points_on(&cache.plane) {
                    let d = big_curve.tangent_divisor(&p).expect("point is on the curve");
                    let mult = d.multiplicity as u64;
                    if mult != r && mult != r + 1 {
                        report(
                            "multiplicity",
                            format!("extension multiplicity {mult} at {p:?}"),
                        );
                    }
                    if !big_curve.contains(&d.residual) {
                        report(
                            "multiplicity",
                            format!("extension residual of {p:?} off the curve"),
                        );
                    }
                }
            }
        }
    }
}
