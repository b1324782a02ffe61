//! The kernel C sources, embedded so the build pipeline can compile the
//! per-workload bytecode modules at experiment time without a source
//! checkout next to the installed binaries.

use lumos_core::WorkloadId;

pub const HEADER: (&str, &str) = ("lumos_kernels.h", include_str!("../kernels/lumos_kernels.h"));
pub const COMMON: (&str, &str) = ("common.c", include_str!("../kernels/common.c"));

const FIB: (&str, &str) = ("fib.c", include_str!("../kernels/fib.c"));
const PRIMES: (&str, &str) = ("primes.c", include_str!("../kernels/primes.c"));
const MANDELBROT: (&str, &str) = ("mandelbrot.c", include_str!("../kernels/mandelbrot.c"));
const XCRYPT: (&str, &str) = ("xcrypt.c", include_str!("../kernels/xcrypt.c"));
const FUZZY: (&str, &str) = ("fuzzy.c", include_str!("../kernels/fuzzy.c"));
const LANGDETECT: (&str, &str) = ("langdetect.c", include_str!("../kernels/langdetect.c"));
const AUDIO: (&str, &str) = ("audio.c", include_str!("../kernels/audio.c"));

/// Source files needed for one workload's bytecode module, header and
/// common runtime included.
pub fn module_sources(workload: WorkloadId) -> Vec<(&'static str, &'static str)> {
    let kernel = match workload {
        WorkloadId::Fibonacci => FIB,
        WorkloadId::PrimeNumbers => PRIMES,
        WorkloadId::MandelbrotBitmap => MANDELBROT,
        WorkloadId::EncryptMessage | WorkloadId::DecryptMessage => XCRYPT,
        WorkloadId::FuzzySearch => FUZZY,
        WorkloadId::LanguageDetection => LANGDETECT,
        WorkloadId::AudioGeneration => AUDIO,
    };
    vec![HEADER, COMMON, kernel]
}
