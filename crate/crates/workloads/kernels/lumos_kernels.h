/* Shared declarations for the Lumos workload kernels.
 *
 * Every kernel is written against plain C11 with no libc dependency so the
 * same sources compile to the native target and to a freestanding wasm32
 * module. Floating point uses only IEEE-754 add/sub/mul/div/compare, and
 * both targets build with -ffp-contract=off, so outputs are bit-identical
 * across native, interpreted, and AoT execution.
 */
#ifndef LUMOS_KERNELS_H
#define LUMOS_KERNELS_H

typedef unsigned char u8;
typedef unsigned int u32;
typedef int i32;
typedef unsigned long long u64;
typedef long long i64;

/* Bump arena inside the module's memory. Hosts embedding the bytecode
 * module stage inputs and outputs through it; the native build links these
 * too but the Rust host passes its own buffers instead. */
u8 *ka_alloc(u32 n);
void ka_reset(void);

u64 lumos_fnv1a64(const u8 *bytes, u32 len);

u64 lumos_fib(u64 n);

u64 lumos_prime_scratch_bytes(u64 limit);
u64 lumos_prime_count(u64 limit, u8 *scratch);

void lumos_mandelbrot(u8 *out, u32 side);
u32 lumos_mandelbrot_escape(double cr, double ci);

void lumos_xcrypt(const u8 *key, u32 key_len, u8 *buf, u32 len);

u32 lumos_levenshtein(const u8 *a, u32 alen, const u8 *b, u32 blen);
u64 lumos_fuzzy_count(const u8 *corpus, u32 clen, const u8 *query, u32 qlen,
                      u32 max_dist);

i32 lumos_lang_detect(const u8 *text, u32 len);
i32 lumos_lang_count(void);
const u8 *lumos_lang_sample_ptr(i32 idx);
u32 lumos_lang_sample_len(i32 idx);

void lumos_audio(u8 *out, u32 total_len);
double lumos_sin(double x);

#endif /* LUMOS_KERNELS_H */
