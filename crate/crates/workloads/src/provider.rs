//! The kernel execution surface the serve loop drives.
//!
//! `prepare` stages input bytes into the kernel's execution space (a copy
//! into linear memory for bytecode providers, a buffer handoff for the
//! native one), `run` performs pure compute, and `take_output` extracts the
//! produced bytes. The serve loop times each step into its probe phase.

use thiserror::Error;

use crate::kernels;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("kernel input not staged")]
    NotStaged,
    #[error("no kernel output available")]
    NoOutput,
    #[error("workload not present in this module: {0}")]
    MissingKernel(String),
    #[error("kernel memory exhausted")]
    OutOfMemory,
    #[error("engine trap: {0}")]
    Trap(String),
}

/// One compute request against a provider. Inputs staged via `prepare` are
/// implicit; everything else rides along here.
#[derive(Debug, Clone)]
pub enum KernelOp {
    Fib { n: u64 },
    PrimeCount { limit: u64 },
    Mandelbrot { side: u32 },
    Xcrypt { key: Vec<u8> },
    FuzzyCount { query: Vec<u8>, max_dist: u32 },
    LangDetect,
    Audio { total_len: u32 },
}

/// What a kernel produced: a scalar, a staged output buffer, or a language
/// profile index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunResult {
    Scalar(u64),
    Buffer { len: u64 },
    LangIndex(Option<usize>),
}

pub trait KernelProvider {
    /// Stage input bytes for the next `run`.
    fn prepare(&mut self, input: &[u8]) -> Result<(), KernelError>;

    /// Execute one kernel. Pure compute only; uses whatever `prepare` staged.
    fn run(&mut self, op: &KernelOp) -> Result<RunResult, KernelError>;

    /// Extract the output buffer of the last `run` and release staging space.
    fn take_output(&mut self) -> Result<Vec<u8>, KernelError>;

    /// The embedded sample text behind a language profile.
    fn lang_sample(&mut self, idx: usize) -> Result<Vec<u8>, KernelError>;
}

/// Directly linked kernels for the native-process runtime mode.
#[derive(Default)]
pub struct NativeKernels {
    input: Option<Vec<u8>>,
    output: Option<Vec<u8>>,
}

impl NativeKernels {
    pub fn new() -> Self {
        Self::default()
    }
}

impl KernelProvider for NativeKernels {
    fn prepare(&mut self, input: &[u8]) -> Result<(), KernelError> {
        self.input = Some(input.to_vec());
        Ok(())
    }

    fn run(&mut self, op: &KernelOp) -> Result<RunResult, KernelError> {
        match op {
            KernelOp::Fib { n } => Ok(RunResult::Scalar(kernels::fib(*n))),
            KernelOp::PrimeCount { limit } => Ok(RunResult::Scalar(kernels::prime_count(*limit))),
            KernelOp::Mandelbrot { side } => {
                let out = kernels::mandelbrot(*side);
                let len = out.len() as u64;
                self.output = Some(out);
                Ok(RunResult::Buffer { len })
            }
            KernelOp::Xcrypt { key } => {
                let mut buf = self.input.take().ok_or(KernelError::NotStaged)?;
                kernels::xcrypt_in_place(key, &mut buf);
                let len = buf.len() as u64;
                self.output = Some(buf);
                Ok(RunResult::Buffer { len })
            }
            KernelOp::FuzzyCount { query, max_dist } => {
                let corpus = self.input.as_deref().ok_or(KernelError::NotStaged)?;
                Ok(RunResult::Scalar(kernels::fuzzy_count(
                    corpus, query, *max_dist,
                )))
            }
            KernelOp::LangDetect => {
                let text = self.input.as_deref().ok_or(KernelError::NotStaged)?;
                Ok(RunResult::LangIndex(kernels::lang_detect(text)))
            }
            KernelOp::Audio { total_len } => {
                let out = kernels::audio(*total_len);
                let len = out.len() as u64;
                self.output = Some(out);
                Ok(RunResult::Buffer { len })
            }
        }
    }

    fn take_output(&mut self) -> Result<Vec<u8>, KernelError> {
        self.input = None;
        self.output.take().ok_or(KernelError::NoOutput)
    }

    fn lang_sample(&mut self, idx: usize) -> Result<Vec<u8>, KernelError> {
        kernels::lang_sample(idx).ok_or(KernelError::MissingKernel(format!("lang sample {idx}")))
    }
}
