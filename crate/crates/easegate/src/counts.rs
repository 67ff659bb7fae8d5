//! Two-qubit resource comparison: pairwise CNOT implementations against
//! merged simultaneous gates, for a handful of standard circuit families.

use std::fmt;

use crate::error::{Error, Result};

/// Non-negative count that may land on a half-integer (averaged counts do).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    /// 1 or 2.
    den: u64,
}

impl Ratio {
    pub fn int(n: u64) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    /// n/2, reduced.
    pub fn halves(n: u64) -> Ratio {
        if n.is_multiple_of(2) {
            Ratio { num: n / 2, den: 1 }
        } else {
            Ratio { num: n, den: 2 }
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}.5", self.num / 2)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VqeVariant {
    /// Seven-orbital Hartree-Fock ansatz.
    Hf7,
    /// Twenty-one-orbital Hartree-Fock ansatz.
    Hf21,
}

/// Resource tally for one circuit family instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub algorithm: &'static str,
    /// Problem size when the family is parameterized by qubits.
    pub qubits: Option<u64>,
    /// Pairwise CNOT count; absent when the total lives outside this tool.
    pub cnot: Option<Ratio>,
    /// Simultaneous entangling gate count.
    pub ease: u64,
    pub notes: String,
}

/// Quantum Fourier transform on n qubits: every qubit pair interacts once,
/// and all pairs sharing a target merge into one simultaneous gate.
pub fn counts_qft(n: u64) -> Result<CountResult> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "qft needs at least 2 qubits, got {n}"
        )));
    }
    Ok(CountResult {
        algorithm: "qft",
        qubits: Some(n),
        cnot: Some(Ratio::int(n * (n - 1))),
        ease: n - 1,
        notes: "controlled rotations grouped by target qubit".into(),
    })
}

/// Bernstein-Vazirani on n qubits: the oracle touches half the data qubits
/// on average, but one simultaneous gate always covers it.
pub fn counts_bv(n: u64) -> Result<CountResult> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "bv needs at least 2 qubits, got {n}"
        )));
    }
    Ok(CountResult {
        algorithm: "bv",
        qubits: Some(n),
        cnot: Some(Ratio::halves(n - 1)),
        ease: 1,
        notes: "pairwise count averaged over uniformly random oracle strings".into(),
    })
}

/// Hidden-shift on n qubits (n even): the two oracle layers each collapse
/// into one simultaneous gate.
pub fn counts_hidden_shift(n: u64) -> Result<CountResult> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "hidden-shift needs an even qubit count of at least 2, got {n}"
        )));
    }
    Ok(CountResult {
        algorithm: "hidden-shift",
        qubits: Some(n),
        cnot: Some(Ratio::int(n)),
        ease: 2,
        notes: "one gate per oracle layer".into(),
    })
}

/// Hartree-Fock VQE ansatz circuits at two fixed molecule sizes.
pub fn counts_vqe(variant: VqeVariant) -> CountResult {
    match variant {
        VqeVariant::Hf7 => CountResult {
            algorithm: "vqe-hf7",
            qubits: Some(7),
            cnot: Some(Ratio::int(21)),
            ease: 2,
            notes: "fourteen pairwise interactions merge into two gates".into(),
        },
        VqeVariant::Hf21 => CountResult {
            algorithm: "vqe-hf21",
            qubits: Some(21),
            cnot: Some(Ratio::int(185)),
            ease: 81,
            notes: "deeper ansatz keeps most layers sequential".into(),
        },
    }
}

/// Heisenberg-model simulation by Trotter stages. Each stage merges its 30
/// pairwise interactions into 21 simultaneous gates; pairwise CNOT totals
/// are an input from the circuit construction, not recomputed here.
pub fn counts_heisenberg(stages: u64) -> Result<CountResult> {
    if stages < 1 {
        return Err(Error::Domain("stage count must be at least 1".into()));
    }
    Ok(CountResult {
        algorithm: "heisenberg",
        qubits: None,
        cnot: None,
        ease: 21 * stages,
        notes: format!("{stages} stages, 30 - 9 = 21 merged gates each; CNOT total external"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(r: &CountResult) -> (f64, u64) {
        (r.cnot.unwrap().value(), r.ease)
    }

    #[test]
    fn qft_counts() {
        assert_eq!(pair(&counts_qft(2).unwrap()), (2.0, 1));
        assert_eq!(pair(&counts_qft(3).unwrap()), (6.0, 2));
        assert_eq!(pair(&counts_qft(10).unwrap()), (90.0, 9));
        assert!(counts_qft(1).is_err());
    }

    #[test]
    fn qft_advantage_ratio_is_the_qubit_count() {
        for n in 2..40u64 {
            let r = counts_qft(n).unwrap();
            assert_eq!(r.cnot.unwrap(), Ratio::int(n * r.ease));
        }
    }

    #[test]
    fn bv_counts() {
        assert_eq!(pair(&counts_bv(2).unwrap()), (0.5, 1));
        assert_eq!(pair(&counts_bv(3).unwrap()), (1.0, 1));
        assert_eq!(pair(&counts_bv(11).unwrap()), (5.0, 1));
        assert!(counts_bv(1).is_err());
    }

    #[test]
    fn hidden_shift_counts() {
        assert_eq!(pair(&counts_hidden_shift(4).unwrap()), (4.0, 2));
        assert_eq!(pair(&counts_hidden_shift(100).unwrap()), (100.0, 2));
        assert!(counts_hidden_shift(3).is_err());
        assert!(counts_hidden_shift(0).is_err());
    }

    #[test]
    fn vqe_counts() {
        assert_eq!(pair(&counts_vqe(VqeVariant::Hf7)), (21.0, 2));
        assert_eq!(pair(&counts_vqe(VqeVariant::Hf21)), (185.0, 81));
    }

    #[test]
    fn heisenberg_counts() {
        assert_eq!(counts_heisenberg(1).unwrap().ease, 21);
        assert_eq!(counts_heisenberg(4).unwrap().ease, 84);
        assert!(counts_heisenberg(1).unwrap().cnot.is_none());
        assert!(counts_heisenberg(0).is_err());
    }

    #[test]
    fn counts_grow_with_problem_size() {
        let mut last_qft = 0.0;
        let mut last_bv = 0.0;
        for n in 2..30u64 {
            let q = counts_qft(n).unwrap().cnot.unwrap().value();
            let b = counts_bv(n).unwrap().cnot.unwrap().value();
            assert!(q >= last_qft && b >= last_bv);
            last_qft = q;
            last_bv = b;
        }
        let mut last_hs = 0.0;
        for n in (2..30u64).filter(|n| n % 2 == 0) {
            let h = counts_hidden_shift(n).unwrap().cnot.unwrap().value();
            assert!(h >= last_hs);
            last_hs = h;
        }
        let mut last_heis = 0;
        for s in 1..20u64 {
            let h = counts_heisenberg(s).unwrap().ease;
            assert!(h >= last_heis);
            last_heis = h;
        }
    }

    #[test]
    fn half_integers_render_with_a_point_five() {
        assert_eq!(Ratio::halves(1).to_string(), "0.5");
        assert_eq!(Ratio::halves(4).to_string(), "2");
        assert_eq!(Ratio::halves(5).to_string(), "2.5");
        assert_eq!(Ratio::int(90).to_string(), "90");
    }
}
