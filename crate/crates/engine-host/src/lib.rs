//! Host for the two bytecode runtime modes. Both load the same module
//! bytecode; they differ only in how it executes (in-place interpretation
//! versus precompiled native code), which is exactly the axis the harness
//! measures.

pub mod aot;
pub mod guest;
pub mod interp;

pub use aot::{load_from_bytes, load_precompiled, precompile, AotKernels};
pub use guest::{GuestKernels, GuestVal, GuestVm};
pub use interp::{load_interpreted, InterpKernels};
