//! Five entangling pairs driven simultaneously on an eleven-ion chain,
//! with a full quadrature verification of the result.

use easegate::{
    generate_chain_modes, solve_ease, validate_spec, verify_solution, ChainParams,
    CouplingTarget, QuadratureSettings, ToleranceSet, TrapConfig,
};

fn main() -> easegate::Result<()> {
    let tol = ToleranceSet::default();
    let modes = generate_chain_modes(&ChainParams::new(11, 3.0, 0.1))?;
    let file = modes.to_trap_file(modes.default_detuning_mhz(), 816.0, 43);
    let config = TrapConfig::new(file, &tol)?;

    let theta = std::f64::consts::FRAC_PI_4;
    let pairs = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9)]
        .into_iter()
        .map(|(a, b)| CouplingTarget { a, b, theta })
        .collect();
    let spec = validate_spec(pairs, &config)?;

    let start = std::time::Instant::now();
    let solution = solve_ease(&config, &spec, &tol)?;
    println!(
        "solved {} pulses over {} segments in {} ms (power {:.4})",
        solution.amplitudes.len(),
        config.n_segments,
        start.elapsed().as_millis(),
        solution.power
    );
    println!("processing order: {:?}", solution.ordering);

    let start = std::time::Instant::now();
    let report = verify_solution(
        &config,
        &spec,
        &solution,
        &QuadratureSettings::default(),
        &tol,
    )?;
    println!(
        "verified in {} ms: max |alpha| {:.3e}, max chi error {:.3e}",
        start.elapsed().as_millis(),
        report.max_alpha_abs,
        report.max_chi_error
    );

    println!("couplings (all pulsed pairs, driven and spectator):");
    for entry in &report.chi_matrix {
        if entry.target != 0.0 || entry.error > 1e-12 {
            println!(
                "  ({}, {}): realized {:+.9}, target {:+.9}",
                entry.a, entry.b, entry.realized, entry.target
            );
        }
    }
    println!("pass: {}", report.pass());
    Ok(())
}
