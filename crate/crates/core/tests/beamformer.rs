mod support;

use risac_core::beamforming::{correlation, optimal_beamformer, BeamformerCase};
use risac_core::{ComplexVector, Error, SeededRng};
use support::oracles::beamformer_grid;

fn instance(rng: &mut SeededRng, n: usize) -> (ComplexVector, ComplexVector) {
    (rng.sample_cn01(n), rng.sample_cn01(n))
}

#[test]
fn closed_form_matches_grid_search() {
    let mut rng = SeededRng::new(101);
    let (p_t, sigma) = (1.0, 1.0);
    let mut seen = [0usize; 2];
    for _ in 0..20 {
        let (h_t, h_c) = instance(&mut rng, 4);
        let r = 10f64.powf(rng.uniform_in(-1.0, 0.0));
        let gamma0 = r * p_t * h_c.norm2() / sigma;
        let bf = optimal_beamformer(&h_t, &h_c, p_t, gamma0, sigma).unwrap();
        seen[(bf.case == BeamformerCase::Split) as usize] += 1;
        let closed = h_t.hermitian_inner(&bf.w).unwrap().norm_sqr();
        let grid = beamformer_grid(h_t.as_slice(), h_c.as_slice(), p_t, gamma0, sigma, 2e-3).unwrap();
        assert!(grid <= closed * (1.0 + 1e-9), "grid {grid} beats closed form {closed}");
        assert!((closed - grid).abs() <= 1e-3 * closed, "closed {closed}, grid {grid}");
    }
    assert!(seen[0] > 0 && seen[1] > 0, "both cases exercised: {seen:?}");
}

#[test]
fn infeasible_thresholds_have_no_grid_point() {
    let mut rng = SeededRng::new(102);
    for _ in 0..20 {
        let (h_t, h_c) = instance(&mut rng, 4);
        let gamma0 = rng.uniform_in(1.01, 10.0) * h_c.norm2();
        assert!(matches!(
            optimal_beamformer(&h_t, &h_c, 1.0, gamma0, 1.0),
            Err(Error::Infeasible { .. })
        ));
        assert!(beamformer_grid(h_t.as_slice(), h_c.as_slice(), 1.0, gamma0, 1.0, 1e-2).is_none());
    }
}

#[test]
fn colinear_channels_take_the_sensing_branch() {
    let mut rng = SeededRng::new(103);
    let h_t = rng.sample_cn01(4);
    let h_c = h_t.scale(num_complex::Complex64::new(0.0, 2.0));
    assert!((correlation(&h_c, &h_t).unwrap().norm() - 1.0).abs() < 1e-12);
    let bf = optimal_beamformer(&h_t, &h_c, 1.0, 0.5 * 4.0 * h_t.norm2(), 1.0).unwrap();
    assert_eq!(bf.case, BeamformerCase::SensingAligned);
    // above the colinear limit the span degenerates
    assert!(optimal_beamformer(&h_t, &h_c, 1.0, 4.0 * h_t.norm2() * (1.0 + 1e-6), 1.0).is_err());
}
