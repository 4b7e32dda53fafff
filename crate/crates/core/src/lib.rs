//! Stackelberg detection rules for adversarial tampering with
//! error-correction-coded road sign markers.

pub mod channel;
pub mod error;
pub mod evaluate;
pub mod galois_rs;
pub mod game;
pub mod lp;
pub mod pipeline;

pub use channel::{ChannelModel, RhoMatrix, RhoMethod};
pub use error::{Error, Result};
pub use evaluate::{FigureId, SimulationReport, TableId, TableReport};
pub use galois_rs::{CodeParams, Codeword, DecodeResult};
pub use game::{ExactQuotient, GameWeights, RelaxedGame, SignPrior};
pub use lp::Equilibrium;
pub use pipeline::{solve_instance, Instance, SolvedInstance};
