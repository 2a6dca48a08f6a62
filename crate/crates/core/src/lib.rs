//! Mutation testing over the Mini-App language with two mutant deployment
//! strategies: one materialized project tree per mutant (traditional), or
//! every mutant woven into a single tree behind run-time `dispatch`
//! statements selected by a mutant id (schemata).

pub mod executor;
pub mod lang;
pub mod metrics;
pub mod mutagen;
pub mod operators;
pub mod runtime;
pub mod strategies;
