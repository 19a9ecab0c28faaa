//! Spectrum of a periodic ring of three distinct agents repeated five times,
//! checked against the dense eigensolver.

use nnflock::lattice::{assemble, build_config, Boundary, WeightDistribution};
use nnflock::spectral::{dense_eigenvalues, match_multisets, spectrum};

pub fn main() {
    let gx = WeightDistribution::Uniform { lo: 1.0, hi: 4.0 };
    let gv = WeightDistribution::Uniform { lo: 0.5, hi: 1.5 };
    let config = build_config(3, 5, &gx, &gv, Boundary::Periodic, 0.0, 11).unwrap();

    let result = spectrum(&config).unwrap();
    for mode in &result.modes {
        let slowest = mode
            .roots
            .iter()
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .unwrap();
        println!("m = {}  phi = {:.4}  slowest root {:.6}", mode.m, mode.phi, slowest);
    }

    let dense = dense_eigenvalues(&assemble(&config).unwrap().a).unwrap();
    let dist = match_multisets(&result.merged, &dense).unwrap();
    println!(
        "{} roots, max distance to dense eigenvalues {:.2e} (spectral radius {:.3})",
        result.merged.len(),
        dist,
        result.spectral_radius()
    );
}
