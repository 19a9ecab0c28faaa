//! Nearest-neighbour flocks of distinct double-integrator agents.
//!
//! A flock is a 1-D chain of `N = p q` agents, `p` distinct ones repeated `q`
//! times, each obeying
//!
//! ```text
//! z_k'' = -g_x(k) (z_k + rho_x+ z_{k+1} + rho_x- z_{k-1})
//!         -g_v(k) (z_k' + rho_v+ z_{k+1}' + rho_v- z_{k-1}')
//! ```
//!
//! with `rho_- + 1 + rho_+ = 0`. The crate covers:
//!
//! - [`lattice`]: configurations, weight distributions and the assembled
//!   system matrix;
//! - [`spectral`]: the degree-`2p` mode polynomials of a periodic ring, their
//!   roots and eigenvectors, a dense oracle, and continuation of the slow
//!   branches;
//! - [`expansion`]: the low-frequency expansion giving signal velocity `c1`,
//!   dispersion `c2` and first-response time `T1 = p / c1`;
//! - [`stability`]: the product condition, the symmetric-Laplacian
//!   guarantee and a numeric classifier;
//! - [`simulate`]: RK4 integration of a leader-driven open line, peak and
//!   amplitude measurement, sweeps, the convoy and instability experiments;
//! - [`cli`]: the `nnflock` command line.
//!
//! ```
//! use nnflock::lattice::{build_config, Boundary, WeightDistribution};
//! use nnflock::expansion::expand;
//!
//! let gx = WeightDistribution::Constant { value: 2.0 };
//! let gv = WeightDistribution::Constant { value: 1.0 };
//! let config = build_config(5, 4, &gx, &gv, Boundary::Periodic, 0.0, 0).unwrap();
//! let e = expand(&config).unwrap();
//! assert!((e.c1 - 1.0).abs() < 1e-12);
//! assert!((e.t1 - 5.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod error;
pub mod expansion;
pub mod lattice;
pub mod numeric;
pub mod simulate;
pub mod spectral;
pub mod stability;

pub use error::{FlockError, Result};
pub use expansion::{expand, ExpansionResult};
pub use lattice::{build_config, AgentCoupling, Boundary, FlockConfig, WeightDistribution};
pub use simulate::{integrate, Scenario, SimResult};
pub use spectral::{spectrum, SpectrumResult};
pub use stability::{classify, StabilityReport, Verdict};
