//! Minimum-power pulse for one entangling pair on a five-ion chain.

use easegate::{
    chi_value, generate_chain_modes, solve_single_xx, ChainParams, QuadratureSettings,
    ToleranceSet, TrapConfig,
};

fn main() -> easegate::Result<()> {
    let tol = ToleranceSet::default();

    // Chain modes from the harmonic model: 3 MHz transverse center of mass,
    // detuning parked midway between the two highest modes.
    let modes = generate_chain_modes(&ChainParams::new(5, 3.0, 0.1))?;
    let file = modes.to_trap_file(modes.default_detuning_mhz(), 200.0, 13);
    let config = TrapConfig::new(file, &tol)?;

    let theta = std::f64::consts::FRAC_PI_4;
    let solution = solve_single_xx(&config, 1, 3, theta, &tol)?;

    println!("shared pulse for ions 1 and 3, target angle {theta:.6}:");
    for (k, a) in solution.omega.iter().enumerate() {
        println!("  segment {k:2}: {a:+.6} rad/us");
    }
    println!("coupling eigenvalue: {:+.6e}", solution.lambda);
    println!("pulse power:         {:.6e}", solution.power);

    // Cross-check through the independent quadrature route.
    let realized = chi_value(
        &config,
        solution.omega.as_slice(),
        solution.omega.as_slice(),
        1,
        3,
        &QuadratureSettings::default(),
    )?;
    println!("realized coupling:   {realized:.12}");
    println!("target:              {theta:.12}");
    println!("difference:          {:.3e}", (realized - theta).abs());
    Ok(())
}
