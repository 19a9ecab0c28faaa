//! Follow the two slow roots away from the origin and compare with the
//! second-order expansion.

use nnflock::expansion::expand;
use nnflock::lattice::{build_config, Boundary, WeightDistribution};
use nnflock::spectral::locus_trace;

pub fn main() {
    let gx = WeightDistribution::Uniform { lo: 1.0, hi: 12.0 };
    let config = build_config(3, 1, &gx, &gx, Boundary::Periodic, 0.0, 4).unwrap();
    let e = expand(&config).unwrap();
    let p = config.p as f64;

    for pt in locus_trace(&config, 0.6, 12).unwrap() {
        let theta = pt.phi / p;
        println!(
            "phi {:.3}  nu+ = {:+.6} {:+.6}i   expansion {:+.6} {:+.6}i",
            pt.phi,
            pt.nu_plus.re,
            pt.nu_plus.im,
            -0.5 * e.c2 * theta * theta,
            e.c1 * theta
        );
    }
}
