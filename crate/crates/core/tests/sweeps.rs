use twoway_core::oracle::mc_cond_mi;
use twoway_core::search::{grain_sweep, linear_grid, rotation_sweep};
use twoway_core::{
    cond_mi_discrete, cond_mi_gaussian, ChannelConfig, Constellation, Direction, RatePair,
    UniformQuantizer, DEFAULT_QUAD_ORDER,
};

#[test]
fn refining_the_grain_grid_never_lowers_the_optimum() {
    for snr in [1.0, 4.0, 7.0] {
        let cfg = ChannelConfig::symmetric(snr).unwrap();
        let rate = |q: f64| {
            let qz = UniformQuantizer::one_dim(8, q)?;
            Ok(RatePair::new(cond_mi_gaussian(&cfg, &qz, DEFAULT_QUAD_ORDER)?, 0.0))
        };
        let coarse = grain_sweep(rate, &linear_grid(0.1, 0.1, 3.0).unwrap()).unwrap();
        let fine = grain_sweep(rate, &linear_grid(0.05, 0.05, 3.0).unwrap()).unwrap();
        assert!(fine.best_value() >= coarse.best_value() - 1e-9);
    }
}

#[test]
fn refining_the_angle_grid_never_lowers_the_optimum() {
    let cfg = ChannelConfig::symmetric_db(6.0).unwrap();
    let qz = UniformQuantizer::two_dim(8, 1.0).unwrap();
    let c = Constellation::psk(4, cfg.p1, 45.0).unwrap();
    let coarse = rotation_sweep(&c, &cfg, &qz, &linear_grid(0.0, 2.0, 90.0).unwrap()).unwrap();
    let fine = rotation_sweep(&c, &cfg, &qz, &linear_grid(0.0, 1.0, 90.0).unwrap()).unwrap();
    assert!(fine.best_value() >= coarse.best_value() - 1e-9);
}

#[test]
fn monte_carlo_error_shrinks_with_samples() {
    let cfg = ChannelConfig::symmetric(2.0).unwrap();
    let c = Constellation::pam(4, 2.0).unwrap();
    let qz = UniformQuantizer::one_dim(8, 1.0).unwrap();
    let exact = cond_mi_discrete(Direction::OneToTwo, &c, &c, &cfg, &qz).unwrap();
    let small = mc_cond_mi(Direction::OneToTwo, &c, &c, &cfg, &qz, 40_000, 3).unwrap();
    let large = mc_cond_mi(Direction::OneToTwo, &c, &c, &cfg, &qz, 640_000, 3).unwrap();
    // 16x the samples should cut the standard error by about 4
    let ratio = small.stderr / large.stderr;
    assert!((2.0..8.0).contains(&ratio), "ratio {ratio}");
    assert!(large.agrees_with(exact, 4.0), "{large:?} vs {exact}");
    assert!(large.bias_guard < small.bias_guard);
}
