//! The README walk-through: build a field, read a matrix, classify the curve.

use hermrel::classify::{classification_report, classify};
use hermrel::projective::parse_mat3;
use hermrel::{build_from_spec, Curve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = build_from_spec("3^2")?;
    let a = parse_mat3(&ctx, "0 1 0 4 0 0 0 0 1")?;
    let curve = Curve::new(&ctx, a)?;
    assert_eq!(curve.point_count(), 10);
    let report = classification_report(&curve, &classify(&curve));
    assert_eq!(report.label, "C");
    println!("type {} curve with {} rational points", report.label, report.n_points);
    Ok(())
}
