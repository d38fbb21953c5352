//! Quantum Fisher information, Cramér-Rao bounds and detection-scheme phase
//! sensitivities of a Mach-Zehnder interferometer whose second input port
//! carries an SU(1,1) coherent state (Perelomov or Barut-Girardello) while
//! the first port is in the vacuum.
//!
//! Every closed-form expression in [`qfi`] and [`detection`] has an
//! independent counterpart in [`oracle`], which propagates the two-mode
//! state through exact beam-splitter and phase unitaries on a truncated
//! Fock grid.

pub mod detection;
pub mod mzi;
pub mod oracle;
pub mod qfi;
pub mod specfun;
pub mod states;

pub use states::{BargmannIndex, FockAmplitudes, PhotonStatistics, StateSpec};
