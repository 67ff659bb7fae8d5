//! Transverse normal modes of a linear chain from the harmonic trap model.

use easegate::{generate_chain_modes, ChainParams};

fn main() -> easegate::Result<()> {
    let modes = generate_chain_modes(&ChainParams::new(7, 3.0, 0.1))?;

    println!("equilibrium positions (axial units):");
    for (i, u) in modes.equilibrium.iter().enumerate() {
        println!("  ion {i}: {u:+.6}");
    }

    println!("mode frequencies (MHz, ascending):");
    for (p, f) in modes.freqs_mhz.iter().enumerate() {
        println!("  mode {p}: {f:.6}");
    }
    println!("default detuning: {:.6} MHz", modes.default_detuning_mhz());

    // The highest mode is the common one: every ion moves identically.
    let top = modes.lamb_dicke.last().expect("at least one mode");
    println!("common-mode couplings: {top:?}");
    Ok(())
}
