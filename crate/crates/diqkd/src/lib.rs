//! Key rates for device-independent quantum key distribution under
//! eavesdropping attacks that trade Bell violation against information
//! gain.
//!
//! The crate models a two-party CHSH-based protocol in which Eve either
//! holds a purification of a noisy entangled source (collective attack)
//! or intercepts each flying qubit with a biased, unsharp measurement and
//! forwards the disturbed state (sequential attack), possibly storing her
//! ancillas for a delayed collective readout. For each attack family it
//! provides closed-form CHSH values, error rates, Holevo quantities, and
//! one-way key-rate bounds, together with an independent density-matrix
//! pipeline that every closed form is tested against.
//!
//! Start with the runnable examples, one per capability:
//!
//! ```text
//! cargo run --example collective_attack    # noisy-source family: S, Q, key rate
//! cargo run --example sequential_attack    # interception: spectrum, optimal CHSH
//! cargo run --example attack_regions       # parameter windows and band regions
//! cargo run --example key_rates            # the three rate bounds side by side
//! cargo run --example holevo_check         # closed-form Holevo vs purification
//! cargo run --example protocol_rounds      # seeded Monte Carlo with z-scores
//! cargo run --example figure_data          # CSV datasets for the four figures
//! ```
//!
//! The same functionality is scriptable through the `diqkd` binary
//! (subcommands `keyrate`, `figure`, `region`, `simulate`, `sweep`).

pub mod attack;
pub mod cli;
pub mod error;
pub mod figures;
pub mod keyrate;
pub mod linalg;
pub mod measurement;
pub mod output;
pub mod sim;
pub mod tol;

pub use error::{Error, Result};
