//! Measured against predicted first-response time as the mean position gain
//! grows, for uniform and ramp distributions.

use nnflock::lattice::WeightDistribution;
use nnflock::simulate::{sweep_t1, SweepKind, SweepParam, SweepTemplate};

fn main() {
    for kind in [SweepKind::Uniform, SweepKind::Ramp] {
        let template = SweepTemplate {
            n: 100,
            kind,
            gx_width: 2.0,
            gv: WeightDistribution::Uniform { lo: 0.5, hi: 1.5 },
            v_step: 1.0,
            t_end_factor: 2.0,
            base_seed: 0,
        };
        let table = sweep_t1(&template, SweepParam::MeanGx, &[2.0, 4.0, 8.0, 16.0], 4).unwrap();
        println!("{kind:?}");
        for a in &table.aggregates {
            println!(
                "  mean g_x {:5.1}: measured {:8.3} ± {:.3}  predicted {:8.3}  ratio {:.4}",
                a.value, a.mean_measured, a.std_measured, a.mean_predicted, a.mean_ratio
            );
        }
    }
}
