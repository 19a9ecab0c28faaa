//! The product condition and the numeric verdict for three small rings.

use nnflock::lattice::{build_config, Boundary, CouplingField, WeightDistribution};
use nnflock::stability::{classify, DEFAULT_TOL};

pub fn main() {
    let gx = WeightDistribution::Uniform { lo: 1.0, hi: 3.0 };
    let gv = WeightDistribution::Uniform { lo: 0.5, hi: 1.5 };
    let base = build_config(8, 4, &gx, &gv, Boundary::Periodic, 0.0, 5).unwrap();
    let proportional = base.clone().with_proportional_damping(2.0);
    let flipped = base.perturbed(3, CouplingField::RhoXPlus, -0.25).unwrap();
    let negative = base.perturbed(3, CouplingField::GX, -0.5).unwrap();

    for (name, config) in [
        ("random", &base),
        ("g_v = 2 g_x", &proportional),
        ("one rho_x+ = -0.25", &flipped),
        ("one g_x < 0", &negative),
    ] {
        let r = classify(config, DEFAULT_TOL).unwrap();
        println!(
            "{name:>20}: products equal {:5}  guarantee {:5}  verdict {:?}  max Re {:+.3e}",
            r.necessary_condition_holds,
            r.symmetric_guarantee_applies,
            r.numeric_verdict.unwrap(),
            r.max_real_part.unwrap()
        );
    }
}
