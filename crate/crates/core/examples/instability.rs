//! Two ways to destabilise a line: one negative position gain, and a block
//! of agents whose forward position coupling is flipped.

use nnflock::expansion::expand;
use nnflock::lattice::{build_config, Boundary, CouplingField, WeightDistribution};
use nnflock::simulate::{block_flip_growth, integrate, Scenario};

fn main() {
    let w = WeightDistribution::Uniform { lo: 1.0, hi: 12.0 };
    let base = build_config(200, 1, &w, &w, Boundary::OpenLine, 0.0, 1).unwrap();
    let t1 = expand(&base).unwrap().t1;
    let scenario = Scenario::velocity_step(&base, 1.0, 2.0 * t1);

    let negative = base.perturbed(100, CouplingField::GX, -0.5).unwrap();
    for (name, config) in [("all positive", &base), ("g_x(100) = -0.5", &negative)] {
        let sim = integrate(config, &scenario, None).unwrap();
        println!("{name:>16}: diverged at {:?}", sim.diverged_at);
    }

    for rho in [0.25, -0.25] {
        println!("rho_x+ = {rho} on a centred block:");
        for run in block_flip_growth(&base, &(0..=8).collect::<Vec<_>>(), rho, &scenario).unwrap() {
            println!(
                "  L = {:2}  growth rate {:+.4}  diverged at {:?}",
                run.block_len, run.growth_rate, run.diverged_at
            );
        }
    }
}
