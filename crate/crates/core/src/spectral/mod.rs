//! Singular-value data, diagonal observables and spectral zeta functions.

pub mod blocks;
pub mod law;
pub mod observable;
pub mod sequence;
pub mod zeta;

pub use blocks::BlockLayout;
pub use law::{Law, LogBlocks};
pub use observable::{DiagonalObservable, DiagonalTail};
pub use sequence::{EigenvalueSequence, TailDescriptor};
pub use zeta::{zeta, zeta_samples, ZetaPoint, ZetaSamples, ZetaValue};
