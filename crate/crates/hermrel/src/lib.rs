//! Plane curves of the shape (x^r, y^r, z^r) · A · (x, y, z)^t = 0 over a
//! finite field F_q of square order q = r^2 (r = p^m).  For A invertible these
//! are nonsingular curves of degree r + 1 that share their tangent-line
//! behaviour with the Hermitian curve (the case A = identity, up to change of
//! coordinates): every tangent meets the curve in at most two points, with
//! intersection multiplicity r or r + 1 at the point of tangency.
//!
//! The crate provides:
//!
//! * [`field`] — F_q arithmetic via exp/log tables, the relative Frobenius
//!   a ↦ a^r, trace/norm onto F_r, and exact solvers for the equation shapes
//!   X^r − X = β, X^(r−1) = β and X^r + αX + β = 0;
//! * [`projective`] — points, lines and PGL(3, q) acting by congruence
//!   T* A T, where * is transpose combined with entry-wise r-th power;
//! * [`curve`] — the curves themselves: rational points, tangent divisors,
//!   inflexions, mirror/dual companions, Hermitian detection;
//! * [`classify`] — normal form x^r y + ω x y^r + z^(r+1) = 0 for curves with
//!   at least two rational inflexions, and the resulting classification into
//!   three projective-equivalence families;
//! * [`census`] — deterministic exhaustive/sampled sweeps over matrix space
//!   checking the point-count congruence N ≡ 1 (mod r), the bound on
//!   m = (N−1)/r, and the mirror/dual/tangency properties;
//! * [`suite`] — the end-to-end verification battery used by the
//!   `verify-all` CLI subcommand and the acceptance tests.

pub mod census;
pub mod classify;
pub mod curve;
pub mod field;
pub mod projective;
pub mod suite;

pub use census::{run_sweep, CheckSet, SweepMode, SweepPlan, SweepReport};
pub use classify::{Classification, CurveClass, EquivMethod, NormalForm};
pub use curve::{Curve, TangentDivisor};

pub use field::{build_field, build_from_spec, FieldCtx, FieldElem, FieldError};
pub use projective::{Mat3, PglElem, ProjLine, ProjPoint};
