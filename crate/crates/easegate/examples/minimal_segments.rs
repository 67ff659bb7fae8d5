//! How many segments a pulse set needs.
//!
//! Each of the 2N closure constraints eats one degree of freedom, and every
//! participating qubit after the first in its group eats more. Two disjoint
//! pairs on five ions need 2*5 + 4 - 1 = 13 segments; at 10 the null space
//! is already empty.

use easegate::{
    generate_chain_modes, solve_ease, validate_spec, ChainParams, CouplingTarget, ToleranceSet,
    TrapConfig,
};

fn main() -> easegate::Result<()> {
    let tol = ToleranceSet::default();
    let modes = generate_chain_modes(&ChainParams::new(5, 3.0, 0.1))?;
    let theta = std::f64::consts::FRAC_PI_4;

    for n_segments in [10usize, 12, 13] {
        let file = modes.to_trap_file(modes.default_detuning_mhz(), 250.0, n_segments);
        let config = TrapConfig::new(file, &tol)?;
        let spec = validate_spec(
            vec![
                CouplingTarget { a: 0, b: 2, theta },
                CouplingTarget { a: 1, b: 4, theta },
            ],
            &config,
        )?;
        match solve_ease(&config, &spec, &tol) {
            Ok(solution) => println!(
                "{n_segments} segments: solved, power {:.4}",
                solution.power
            ),
            Err(err) => println!("{n_segments} segments: {err}"),
        }
    }
    Ok(())
}
