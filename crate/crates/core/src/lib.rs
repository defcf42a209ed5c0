//! Channel models, closed-form beamforming and RIS phase optimizers for
//! RIS-assisted integrated sensing and communication.

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod gain_max;
pub mod linalg;
pub mod rng;
pub mod scenario;
pub mod solve;
pub mod sre;

pub use beamforming::{optimal_beamformer, Beamformer, BeamformerCase, Metrics};
pub use channel::{assemble_h, build_channels, ChannelSet, EffectiveChannels, PhaseConfig};
pub use error::{Error, Result};
pub use gain_max::{run_gain_max, solve_gain_max, AoParams};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
pub use rng::SeededRng;
pub use scenario::{LinkBudget, Scenario};
pub use solve::{solve_no_ris, Scheme, SolveReport};
pub use sre::{solve_sre, sre_solve_full, SreParams};
