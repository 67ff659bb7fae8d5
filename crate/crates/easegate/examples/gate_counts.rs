//! Two-qubit resource comparison across circuit families.

use easegate::counts::{
    counts_bv, counts_heisenberg, counts_hidden_shift, counts_qft, counts_vqe, CountResult,
    VqeVariant,
};

fn row(r: &CountResult) {
    let qubits = r.qubits.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
    let cnot = r.cnot.map(|c| c.to_string()).unwrap_or_else(|| "external".into());
    println!("{:<14} {:>6} {:>10} {:>6}   {}", r.algorithm, qubits, cnot, r.ease, r.notes);
}

fn main() -> easegate::Result<()> {
    println!(
        "{:<14} {:>6} {:>10} {:>6}   notes",
        "algorithm", "qubits", "cnot", "ease"
    );
    for n in [4u64, 10, 20] {
        row(&counts_qft(n)?);
    }
    for n in [3u64, 11] {
        row(&counts_bv(n)?);
    }
    for n in [4u64, 100] {
        row(&counts_hidden_shift(n)?);
    }
    row(&counts_vqe(VqeVariant::Hf7));
    row(&counts_vqe(VqeVariant::Hf21));
    row(&counts_heisenberg(3)?);
    Ok(())
}
