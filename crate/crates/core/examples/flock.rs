//! A leader on a 200-agent line steps to unit speed; the first peak of the
//! leader-to-tail gap is compared with the predicted first-response time.

use nnflock::expansion::expand;
use nnflock::lattice::{build_config, Boundary, WeightDistribution};
use nnflock::simulate::{integrate, Scenario};

fn main() {
    let gx = WeightDistribution::Uniform { lo: 0.5, hi: 10.5 };
    let gv = WeightDistribution::Uniform { lo: 0.5, hi: 1.5 };
    for seed in 0..5 {
        let config = build_config(200, 1, &gx, &gv, Boundary::OpenLine, 0.0, seed).unwrap();
        let t1 = expand(&config).unwrap().t1;
        let scenario = Scenario::velocity_step(&config, 1.0, 2.0 * t1).with_stride(100);
        let sim = integrate(&config, &scenario, None).unwrap();
        let measured = sim.t1_measured.unwrap();
        println!(
            "seed {seed}: T1 predicted {t1:8.3}  measured {measured:8.3}  ratio {:.4}  peaks {}",
            measured / t1,
            sim.peaks.len()
        );
    }
}
