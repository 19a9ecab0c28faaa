//! 400 vehicles, 10% of them cars, 69 m apart; the leader speeds up by 10 m/s.

use nnflock::simulate::{run_convoy, ConvoyParams};

fn main() {
    for seed in 0..3 {
        let (report, _) = run_convoy(&ConvoyParams { seed, ..Default::default() }).unwrap();
        println!(
            "seed {seed}: tail reacts after {:.0} s (T1 = {:.0} s), length peaks at {:.1} km, \
             then contracts to {:.1} km",
            report.tail_arrival_time.unwrap(),
            report.t1_predicted,
            report.max_length.unwrap() / 1e3,
            report.min_length.unwrap() / 1e3
        );
    }
}
