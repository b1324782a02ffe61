fn main() {
    let sources = [
        "kernels/common.c",
        "kernels/fib.c",
        "kernels/primes.c",
        "kernels/mandelbrot.c",
        "kernels/xcrypt.c",
        "kernels/fuzzy.c",
        "kernels/langdetect.c",
        "kernels/audio.c",
    ];
    let mut build = cc::Build::new();
    for src in sources {
        println!("cargo:rerun-if-changed={src}");
        build.file(src);
    }
    println!("cargo:rerun-if-changed=kernels/lumos_kernels.h");
    build
        .include("kernels")
        .opt_level(2)
        // No FMA contraction: keeps float results bit-identical with the
        // wasm32 build of the same sources.
        .flag("-ffp-contract=off")
        .warnings(true)
        .compile("lumos_kernels");
}
