//! Exact-arithmetic toolkit for a finite, deterministic model of quantum
//! experiments.
//!
//! State-space points are p-adic integers (equivalently points of a Cantor
//! set), Hilbert vectors are read as uncertain selections from bit strings
//! of length `2^N`, and whether a measurement configuration is admissible is
//! decided number-theoretically: a quantity counts as finitely describable
//! when it is a dyadic rational.
//!
//! Modules, bottom-up:
//!
//! * [`exactnum`]: rationals, dyadics, quadratic extensions, fixed point.
//! * [`padic`]: valuations, the p-adic norm and metric, Cantor embedding.
//! * [`numbertheory`]: rational cosines of rational angles and the
//!   describability classification of phase angles.
//! * [`hilbertbits`]: bit-string realisations of one- and two-qubit states.
//! * [`experiments`]: Mach-Zehnder, CHSH, Tsirelson scan and PBR drivers.
//! * [`dynamics`]: shift-map selection, digit frequencies, discrete Dirac
//!   evolution.

pub mod dynamics;
pub mod exactnum;
pub mod experiments;
pub mod hilbertbits;
pub mod numbertheory;
pub mod padic;

pub use exactnum::{Dyadic, QuadExtElement, Rational};
