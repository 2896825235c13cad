//! Finite Brane Calculus: syntax, linear types, structural congruence, a
//! labelled transition system, stochastic semantics and Markov analyses.

pub mod bisim;
pub mod cli;
pub mod congruence;
pub mod corpus;
pub mod lts;
pub mod markov;
pub mod stochastic;
pub mod syntax;
pub mod typing;
