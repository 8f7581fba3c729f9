use num_complex::Complex64;

use stripwave::fullwave::{solve_all, TruncationOrder};
use stripwave::quadrature::QuadratureConfig;
use stripwave::{DipoleAxis, Medium, Scenario};

// Raising the truncation order should barely move the leading coefficient.
#[test]
fn leading_coefficient_settles_with_truncation_order() {
    let m = Medium::lossy_vacuum(300e6, 1e-5).unwrap();
    let q = QuadratureConfig::for_geometry(0.5, 1.0, 1e-8).unwrap();
    for axis in [DipoleAxis::X, DipoleAxis::Z] {
        let s = Scenario::new(0.5, 1.0, [0.0, 0.1, 0.5], axis, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let kx = Complex64::new(0.05 + 0.9 * i as f64, -0.006);
            let lo = solve_all(&m, &s, kx, TruncationOrder::new(3).unwrap(), &q).unwrap();
            let hi = solve_all(&m, &s, kx, TruncationOrder::new(4).unwrap(), &q).unwrap();
            worst = worst.max((hi.c[0] - lo.c[0]).norm() / hi.c[0].norm());
        }
        assert!(worst < 1e-2, "{axis:?}: c0 moved by {worst:e}");
    }
}
