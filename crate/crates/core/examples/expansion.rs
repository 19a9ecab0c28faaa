//! Signal velocity, dispersion and first-response time of a random flock,
//! compared with the exact slow eigenvalues of a few low modes.

use nnflock::expansion::{expand, mode_locus};
use nnflock::lattice::{build_config, Boundary, WeightDistribution};
use nnflock::spectral::spectrum;

pub fn main() {
    let gx = WeightDistribution::Uniform { lo: 0.5, hi: 10.5 };
    let gv = WeightDistribution::Uniform { lo: 0.5, hi: 1.5 };
    let config = build_config(4, 50, &gx, &gv, Boundary::Periodic, 0.0, 2).unwrap();

    let e = expand(&config).unwrap();
    println!("c1 = {:.6}  c2 = {:.6}  T1 = {:.4}", e.c1, e.c2, e.t1);
    println!("a02 = {:?}  a12 = {:?}  a20 = {:?}  a30 = {:?}", e.a02, e.a12, e.a20, e.a30);

    let exact = spectrum(&config).unwrap();
    for m in 1..=4 {
        let (approx, _) = mode_locus(&config, m as i64).unwrap();
        let nearest = exact.modes[m]
            .roots
            .iter()
            .min_by(|a, b| (*a - approx).norm().total_cmp(&(*b - approx).norm()))
            .unwrap();
        println!("m = {m}: approx {approx:.6}  exact {nearest:.6}");
    }
}
