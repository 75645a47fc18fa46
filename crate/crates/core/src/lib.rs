//! Exact crossed homomorphisms and Euler cocycles for piecewise-linear circle actions
//! of free groups with a finite quotient.
//!
//! The building blocks are exact PL lifts ([`pl`]), certified translation numbers
//! ([`rotation`]), free group words and Schreier rewriting ([`words`], [`quotient`],
//! [`schreier`]), cochains on the finite quotient ([`cohomology`]) and the constructions
//! built from them ([`pipeline`], [`verify`]).

pub mod cohomology;
pub mod intlin;
pub mod pipeline;
pub mod pl;
pub mod quotient;
pub mod rational;
pub mod report;
pub mod rotation;
pub mod scenario;
pub mod schreier;
pub mod verify;
pub mod words;
