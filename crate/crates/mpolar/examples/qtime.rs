use mpolar::experiments::*;
use mpolar::operator::{ResolventSign, SemiclassicalParams};
fn main() {
    let lambda: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(400.0);
    let spec = two_pole_diag_spec();
    let geom = two_pole_diag_geometry();
    let params = SemiclassicalParams::new(lambda, lambda * 1e-6, ResolventSign::Minus).unwrap();
    let t0 = std::time::Instant::now();
    let sec = mpolar::operator::assemble_sector(
        &spec, &params,
        geom.r_max(params.h), geom.dr(params.h), &geom.chi, &geom.layer(params.h),
        mpolar::operator::Parity { x_even: true, y_even: true },
    ).unwrap();
    println!("assembled sector side {} ({} unknowns) in {:?}", sec.side, sec.side*sec.side, t0.elapsed());
    let t0 = std::time::Instant::now();
    let lu = mpolar::linalg::sparse::SparseLu::factor(sec.side*sec.side, &sec.triplets).unwrap();
    println!("factored in {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let b: Vec<_> = (0..sec.side*sec.side).map(|i| num_complex::Complex64::new((i%7) as f64, 1.0)).collect();
    let x = lu.solve(&b);
    println!("solved in {:?}, resid {:.2e}", t0.elapsed(), lu.residual(&x, &b));
}
