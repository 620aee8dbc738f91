pub mod freegroup;
pub mod presentation;
pub mod knot;
pub mod derivation;
pub mod surgery;
pub mod orderability;
pub mod exec;
pub mod cli;
