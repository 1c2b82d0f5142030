//! Sanity checks on the reference oracles themselves.

mod common;

#[test]
fn airy_series_matches_tabulated_values() {
    assert!((common::airy_ai(0.0) - 0.355_028_053_887_817).abs() < 1e-15);
    // Ai'(0) = -0.258819... from a central difference.
    let h = 1e-5;
    let d = (common::airy_ai(h) - common::airy_ai(-h)) / (2.0 * h);
    assert!((d + 0.258_819_403_792_807).abs() < 1e-9);
    assert!((common::airy_first_root() - 2.338_107_410_459_767).abs() < 1e-12);
    assert!(common::airy_ai(-common::airy_first_root()).abs() < 1e-14);
}

#[test]
fn kratzer_closed_form_values() {
    // D = A = 1, m = 1: Z = 2, L = -1/2 + √3.
    let l0 = common::kratzer_lambda(0, 1.0, 1.0, 1);
    assert!((l0 - (-4.0 / (0.5 + 3f64.sqrt()).powi(2))).abs() < 1e-15);
    assert!((l0 + 0.802_883).abs() < 1e-6);
    // Deeper levels approach zero from below.
    let ls: Vec<f64> = (0..5).map(|n| common::kratzer_lambda(n, 1.0, 1.0, 1)).collect();
    assert!(ls.windows(2).all(|w| w[0] < w[1] && w[1] < 0.0));
}
