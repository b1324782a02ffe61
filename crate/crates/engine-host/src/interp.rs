//! Interpreted runtime mode: kernels execute inside an in-process bytecode
//! interpreter with no compilation step beyond validation.

use lumos_workloads::provider::KernelError;

use crate::guest::{GuestKernels, GuestVal, GuestVm};

pub struct WasmiVm {
    store: wasmi::Store<()>,
    instance: wasmi::Instance,
    memory: wasmi::Memory,
}

impl WasmiVm {
    pub fn from_module_bytes(bytes: &[u8]) -> Result<WasmiVm, KernelError> {
        let engine = wasmi::Engine::default();
        let module = wasmi::Module::new(&engine, bytes)
            .map_err(|e| KernelError::Trap(format!("module load: {e}")))?;
        let mut store = wasmi::Store::new(&engine, ());
        let linker = wasmi::Linker::<()>::new(&engine);
        let instance = linker
            .instantiate_and_start(&mut store, &module)
            .map_err(|e| KernelError::Trap(format!("instantiate: {e}")))?;
        let memory = instance
            .get_memory(&store, "memory")
            .ok_or_else(|| KernelError::Trap("module exports no memory".into()))?;
        Ok(WasmiVm {
            store,
            instance,
            memory,
        })
    }
}

impl GuestVm for WasmiVm {
    fn call(&mut self, name: &str, args: &[GuestVal]) -> Result<Vec<GuestVal>, KernelError> {
        let func = self
            .instance
            .get_func(&self.store, name)
            .ok_or_else(|| KernelError::MissingKernel(name.to_string()))?;
        let params: Vec<wasmi::Val> = args
            .iter()
            .map(|a| match a {
                GuestVal::I32(v) => wasmi::Val::I32(*v),
                GuestVal::I64(v) => wasmi::Val::I64(*v),
            })
            .collect();
        let mut results: Vec<wasmi::Val> = func
            .ty(&self.store)
            .results()
            .iter()
            .map(|ty| wasmi::Val::default(*ty))
            .collect();
        func.call(&mut self.store, &params, &mut results)
            .map_err(|e| KernelError::Trap(format!("{name}: {e}")))?;
        results
            .iter()
            .map(|v| match v {
                wasmi::Val::I32(v) => Ok(GuestVal::I32(*v)),
                wasmi::Val::I64(v) => Ok(GuestVal::I64(*v)),
                other => Err(KernelError::Trap(format!("{name}: result {other:?}"))),
            })
            .collect()
    }

    fn read_memory(&mut self, ptr: u32, len: u32) -> Result<Vec<u8>, KernelError> {
        let mut buf = vec![0u8; len as usize];
        self.memory
            .read(&self.store, ptr as usize, &mut buf)
            .map_err(|e| KernelError::Trap(format!("memory read: {e}")))?;
        Ok(buf)
    }

    fn write_memory(&mut self, ptr: u32, bytes: &[u8]) -> Result<(), KernelError> {
        self.memory
            .write(&mut self.store, ptr as usize, bytes)
            .map_err(|e| KernelError::Trap(format!("memory write: {e}")))
    }
}

pub type InterpKernels = GuestKernels<WasmiVm>;

/// Loads a bytecode module into a fresh interpreter instance.
pub fn load_interpreted(module_bytes: &[u8]) -> Result<InterpKernels, KernelError> {
    Ok(GuestKernels::new(WasmiVm::from_module_bytes(
        module_bytes,
    )?))
}
