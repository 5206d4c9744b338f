//! Batch commands and the HTTP session service behind the `vocmorph` binary.

pub mod commands;
pub mod service;
