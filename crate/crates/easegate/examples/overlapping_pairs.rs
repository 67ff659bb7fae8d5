//! Coupling graphs with shared qubits: a three-qubit chain and a star.
//!
//! Shared qubits are what rule out solving pair by pair. The walk solves the
//! shared qubit's neighbors against it one at a time, each step a linear
//! system inside the common null space.

use easegate::{
    generate_chain_modes, solve_ease, validate_spec, verify_solution, ChainParams,
    CouplingTarget, EntanglementSpec, QuadratureSettings, ToleranceSet, TrapConfig,
};

fn run(config: &TrapConfig, label: &str, spec: &EntanglementSpec) -> easegate::Result<()> {
    let tol = ToleranceSet::default();
    let solution = solve_ease(config, spec, &tol)?;
    let report = verify_solution(
        config,
        spec,
        &solution,
        &QuadratureSettings::default(),
        &tol,
    )?;
    println!("{label}:");
    println!("  order {:?}, power {:.4}", solution.ordering, solution.power);
    for entry in report.chi_matrix.iter().filter(|e| e.target != 0.0) {
        println!(
            "  ({}, {}): realized {:+.9}, target {:+.9}, error {:.2e}",
            entry.a, entry.b, entry.realized, entry.target, entry.error
        );
    }
    println!(
        "  max |alpha| {:.2e}, max chi error {:.2e}, pass {}",
        report.max_alpha_abs,
        report.max_chi_error,
        report.pass()
    );
    Ok(())
}

fn main() -> easegate::Result<()> {
    let tol = ToleranceSet::default();
    let modes = generate_chain_modes(&ChainParams::new(5, 3.0, 0.1))?;
    let file = modes.to_trap_file(modes.default_detuning_mhz(), 300.0, 14);
    let config = TrapConfig::new(file, &tol)?;

    let chain = validate_spec(
        vec![
            CouplingTarget { a: 0, b: 1, theta: 0.6 },
            CouplingTarget { a: 1, b: 2, theta: -0.3 },
        ],
        &config,
    )?;
    run(&config, "chain 0-1-2", &chain)?;

    let star = validate_spec(
        vec![
            CouplingTarget { a: 0, b: 1, theta: 0.4 },
            CouplingTarget { a: 0, b: 2, theta: 0.3 },
            CouplingTarget { a: 0, b: 3, theta: 0.2 },
        ],
        &config,
    )?;
    run(&config, "star centered on 0", &star)?;
    Ok(())
}
