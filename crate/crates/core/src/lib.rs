pub mod syntax;
pub mod terms;
pub mod unify;
pub mod engine;
pub mod fpclib;
pub mod kernel;
pub mod harness;
pub mod corpus;
pub mod cli;
