//! Engine-independent provider logic over a minimal guest VM surface.
//!
//! Kernel modules export a bump arena (`ka_alloc`/`ka_reset`) alongside the
//! kernels; the host stages inputs into the arena, calls the kernel, and
//! copies outputs back out of linear memory. Those copies happen in
//! `prepare` and `take_output`, so they land in the probe's deserialize and
//! serialize phases.

use lumos_workloads::provider::{KernelError, KernelOp, KernelProvider, RunResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GuestVal {
    I32(i32),
    I64(i64),
}

impl GuestVal {
    fn as_u32(self) -> Result<u32, KernelError> {
        match self {
            GuestVal::I32(v) => Ok(v as u32),
            other => Err(KernelError::Trap(format!("expected i32, got {other:?}"))),
        }
    }

    fn as_u64(self) -> Result<u64, KernelError> {
        match self {
            GuestVal::I64(v) => Ok(v as u64),
            other => Err(KernelError::Trap(format!("expected i64, got {other:?}"))),
        }
    }

    fn as_i32(self) -> Result<i32, KernelError> {
        match self {
            GuestVal::I32(v) => Ok(v),
            other => Err(KernelError::Trap(format!("expected i32, got {other:?}"))),
        }
    }
}

/// What a bytecode engine has to offer: call an export, touch memory.
pub trait GuestVm {
    /// Calls an exported function, returning its results.
    /// A missing export maps to [`KernelError::MissingKernel`].
    fn call(&mut self, name: &str, args: &[GuestVal]) -> Result<Vec<GuestVal>, KernelError>;

    fn read_memory(&mut self, ptr: u32, len: u32) -> Result<Vec<u8>, KernelError>;

    fn write_memory(&mut self, ptr: u32, bytes: &[u8]) -> Result<(), KernelError>;
}

/// A staged or produced region of guest memory.
#[derive(Debug, Clone, Copy)]
struct Region {
    ptr: u32,
    len: u32,
}

/// [`KernelProvider`] over any [`GuestVm`].
pub struct GuestKernels<V: GuestVm> {
    vm: V,
    input: Option<Region>,
    output: Option<Region>,
}

impl<V: GuestVm> GuestKernels<V> {
    pub fn new(vm: V) -> Self {
        GuestKernels {
            vm,
            input: None,
            output: None,
        }
    }

    fn alloc(&mut self, len: u32) -> Result<u32, KernelError> {
        let results = self.vm.call("ka_alloc", &[GuestVal::I32(len as i32)])?;
        let ptr = results
            .first()
            .copied()
            .ok_or_else(|| KernelError::Trap("ka_alloc returned nothing".into()))?
            .as_u32()?;
        if ptr == 0 {
            return Err(KernelError::OutOfMemory);
        }
        Ok(ptr)
    }

    fn reset(&mut self) -> Result<(), KernelError> {
        self.vm.call("ka_reset", &[])?;
        self.input = None;
        self.output = None;
        Ok(())
    }

    fn stage(&mut self, bytes: &[u8]) -> Result<Region, KernelError> {
        // The arena rejects zero-sized allocations gracefully but a kernel
        // still needs a valid base pointer for an empty buffer.
        let len = bytes.len() as u32;
        let ptr = self.alloc(len.max(1))?;
        self.vm.write_memory(ptr, bytes)?;
        Ok(Region { ptr, len })
    }

    fn staged_input(&self) -> Result<Region, KernelError> {
        self.input.ok_or(KernelError::NotStaged)
    }

    fn call_scalar_u64(&mut self, name: &str, args: &[GuestVal]) -> Result<u64, KernelError> {
        let results = self.vm.call(name, args)?;
        results
            .first()
            .copied()
            .ok_or_else(|| KernelError::Trap(format!("{name} returned nothing")))?
            .as_u64()
    }
}

impl<V: GuestVm> KernelProvider for GuestKernels<V> {
    fn prepare(&mut self, input: &[u8]) -> Result<(), KernelError> {
        self.reset()?;
        let region = self.stage(input)?;
        self.input = Some(region);
        Ok(())
    }

    fn run(&mut self, op: &KernelOp) -> Result<RunResult, KernelError> {
        match op {
            KernelOp::Fib { n } => Ok(RunResult::Scalar(
                self.call_scalar_u64("lumos_fib", &[GuestVal::I64(*n as i64)])?,
            )),
            KernelOp::PrimeCount { limit } => {
                let scratch_len = self.call_scalar_u64(
                    "lumos_prime_scratch_bytes",
                    &[GuestVal::I64(*limit as i64)],
                )?;
                let scratch = self.alloc(scratch_len as u32)?;
                let count = self.call_scalar_u64(
                    "lumos_prime_count",
                    &[GuestVal::I64(*limit as i64), GuestVal::I32(scratch as i32)],
                )?;
                Ok(RunResult::Scalar(count))
            }
            KernelOp::Mandelbrot { side } => {
                let len = side * side;
                let out = self.alloc(len.max(1))?;
                self.vm.call(
                    "lumos_mandelbrot",
                    &[GuestVal::I32(out as i32), GuestVal::I32(*side as i32)],
                )?;
                self.output = Some(Region { ptr: out, len });
                Ok(RunResult::Buffer { len: len as u64 })
            }
            KernelOp::Xcrypt { key } => {
                let input = self.staged_input()?;
                let key = self.stage(key)?;
                self.vm.call(
                    "lumos_xcrypt",
                    &[
                        GuestVal::I32(key.ptr as i32),
                        GuestVal::I32(key.len as i32),
                        GuestVal::I32(input.ptr as i32),
                        GuestVal::I32(input.len as i32),
                    ],
                )?;
                // Transformed in place: the input region is the output.
                self.output = Some(input);
                Ok(RunResult::Buffer {
                    len: input.len as u64,
                })
            }
            KernelOp::FuzzyCount { query, max_dist } => {
                let input = self.staged_input()?;
                let query = self.stage(query)?;
                let count = self.call_scalar_u64(
                    "lumos_fuzzy_count",
                    &[
                        GuestVal::I32(input.ptr as i32),
                        GuestVal::I32(input.len as i32),
                        GuestVal::I32(query.ptr as i32),
                        GuestVal::I32(query.len as i32),
                        GuestVal::I32(*max_dist as i32),
                    ],
                )?;
                Ok(RunResult::Scalar(count))
            }
            KernelOp::LangDetect => {
                let input = self.staged_input()?;
                let results = self.vm.call(
                    "lumos_lang_detect",
                    &[
                        GuestVal::I32(input.ptr as i32),
                        GuestVal::I32(input.len as i32),
                    ],
                )?;
                let idx = results
                    .first()
                    .copied()
                    .ok_or_else(|| KernelError::Trap("lumos_lang_detect returned nothing".into()))?
                    .as_i32()?;
                Ok(RunResult::LangIndex((idx >= 0).then_some(idx as usize)))
            }
            KernelOp::Audio { total_len } => {
                let out = self.alloc(*total_len)?;
                self.vm.call(
                    "lumos_audio",
                    &[GuestVal::I32(out as i32), GuestVal::I32(*total_len as i32)],
                )?;
                self.output = Some(Region {
                    ptr: out,
                    len: *total_len,
                });
                Ok(RunResult::Buffer {
                    len: *total_len as u64,
                })
            }
        }
    }

    fn take_output(&mut self) -> Result<Vec<u8>, KernelError> {
        let region = self.output.take().ok_or(KernelError::NoOutput)?;
        let bytes = self.vm.read_memory(region.ptr, region.len)?;
        self.reset()?;
        Ok(bytes)
    }

    fn lang_sample(&mut self, idx: usize) -> Result<Vec<u8>, KernelError> {
        let len = self
            .vm
            .call("lumos_lang_sample_len", &[GuestVal::I32(idx as i32)])?
            .first()
            .copied()
            .ok_or_else(|| KernelError::Trap("lumos_lang_sample_len returned nothing".into()))?
            .as_u32()?;
        if len == 0 {
            return Err(KernelError::MissingKernel(format!("lang sample {idx}")));
        }
        let ptr = self
            .vm
            .call("lumos_lang_sample_ptr", &[GuestVal::I32(idx as i32)])?
            .first()
            .copied()
            .ok_or_else(|| KernelError::Trap("lumos_lang_sample_ptr returned nothing".into()))?
            .as_u32()?;
        self.vm.read_memory(ptr, len)
    }
}
