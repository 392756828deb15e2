#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod checker;
pub mod generators;
pub mod hdl;
pub mod mine;
pub mod prompting;
pub mod sat;
pub mod ts;
