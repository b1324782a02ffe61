//! Ahead-of-time runtime mode: modules are compiled to native code once at
//! build time and deserialized straight into an instance at spawn.

use std::path::Path;

use lumos_workloads::provider::KernelError;

use crate::guest::{GuestKernels, GuestVal, GuestVm};

fn engine() -> Result<wasmtime::Engine, KernelError> {
    // One fixed configuration for precompilation and execution; serialized
    // modules are only compatible with the engine that produced them.
    wasmtime::Engine::new(&wasmtime::Config::new())
        .map_err(|e| KernelError::Trap(format!("engine: {e}")))
}

/// Compiles module bytecode to the serialized native form.
pub fn precompile(module_bytes: &[u8]) -> Result<Vec<u8>, KernelError> {
    engine()?
        .precompile_module(module_bytes)
        .map_err(|e| KernelError::Trap(format!("precompile: {e}")))
}

pub struct WasmtimeVm {
    store: wasmtime::Store<()>,
    instance: wasmtime::Instance,
    memory: wasmtime::Memory,
}

impl WasmtimeVm {
    /// Compiles and instantiates from bytecode.
    pub fn from_module_bytes(bytes: &[u8]) -> Result<WasmtimeVm, KernelError> {
        let engine = engine()?;
        let module = wasmtime::Module::new(&engine, bytes)
            .map_err(|e| KernelError::Trap(format!("module load: {e}")))?;
        Self::instantiate(engine, module)
    }

    /// Instantiates a precompiled module file produced by [`precompile`].
    pub fn from_precompiled(path: &Path) -> Result<WasmtimeVm, KernelError> {
        let engine = engine()?;
        // Safety: the file is an artifact this host serialized itself; the
        // build pipeline never hands over foreign precompiled images.
        let module = unsafe { wasmtime::Module::deserialize_file(&engine, path) }
            .map_err(|e| KernelError::Trap(format!("deserialize {}: {e}", path.display())))?;
        Self::instantiate(engine, module)
    }

    fn instantiate(
        engine: wasmtime::Engine,
        module: wasmtime::Module,
    ) -> Result<WasmtimeVm, KernelError> {
        let mut store = wasmtime::Store::new(&engine, ());
        let instance = wasmtime::Instance::new(&mut store, &module, &[])
            .map_err(|e| KernelError::Trap(format!("instantiate: {e}")))?;
        let memory = instance
            .get_memory(&mut store, "memory")
            .ok_or_else(|| KernelError::Trap("module exports no memory".into()))?;
        Ok(WasmtimeVm {
            store,
            instance,
            memory,
        })
    }
}

impl GuestVm for WasmtimeVm {
    fn call(&mut self, name: &str, args: &[GuestVal]) -> Result<Vec<GuestVal>, KernelError> {
        let func = self
            .instance
            .get_func(&mut self.store, name)
            .ok_or_else(|| KernelError::MissingKernel(name.to_string()))?;
        let params: Vec<wasmtime::Val> = args
            .iter()
            .map(|a| match a {
                GuestVal::I32(v) => wasmtime::Val::I32(*v),
                GuestVal::I64(v) => wasmtime::Val::I64(*v),
            })
            .collect();
        let mut results: Vec<wasmtime::Val> = func
            .ty(&self.store)
            .results()
            .map(|ty| match ty {
                wasmtime::ValType::I64 => wasmtime::Val::I64(0),
                _ => wasmtime::Val::I32(0),
            })
            .collect();
        func.call(&mut self.store, &params, &mut results)
            .map_err(|e| KernelError::Trap(format!("{name}: {e}")))?;
        results
            .iter()
            .map(|v| match v {
                wasmtime::Val::I32(v) => Ok(GuestVal::I32(*v)),
                wasmtime::Val::I64(v) => Ok(GuestVal::I64(*v)),
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

pub type AotKernels = GuestKernels<WasmtimeVm>;

/// Instantiates a precompiled artifact for serving.
pub fn load_precompiled(path: &Path) -> Result<AotKernels, KernelError> {
    Ok(GuestKernels::new(WasmtimeVm::from_precompiled(path)?))
}

/// Compiles and instantiates bytecode directly, bypassing the artifact
/// cache; used by tests and one-off runs.
pub fn load_from_bytes(module_bytes: &[u8]) -> Result<AotKernels, KernelError> {
    Ok(GuestKernels::new(WasmtimeVm::from_module_bytes(
        module_bytes,
    )?))
}
