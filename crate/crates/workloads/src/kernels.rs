//! Safe wrappers over the natively linked C kernels.

use std::os::raw::{c_int, c_uchar, c_uint, c_ulonglong};

extern "C" {
    fn lumos_fib(n: c_ulonglong) -> c_ulonglong;
    fn lumos_prime_scratch_bytes(limit: c_ulonglong) -> c_ulonglong;
    fn lumos_prime_count(limit: c_ulonglong, scratch: *mut c_uchar) -> c_ulonglong;
    fn lumos_mandelbrot(out: *mut c_uchar, side: c_uint);
    fn lumos_mandelbrot_escape(cr: f64, ci: f64) -> c_uint;
    fn lumos_xcrypt(key: *const c_uchar, key_len: c_uint, buf: *mut c_uchar, len: c_uint);
    fn lumos_levenshtein(a: *const c_uchar, alen: c_uint, b: *const c_uchar, blen: c_uint)
        -> c_uint;
    fn lumos_fuzzy_count(
        corpus: *const c_uchar,
        clen: c_uint,
        query: *const c_uchar,
        qlen: c_uint,
        max_dist: c_uint,
    ) -> c_ulonglong;
    fn lumos_lang_detect(text: *const c_uchar, len: c_uint) -> c_int;
    fn lumos_lang_count() -> c_int;
    fn lumos_lang_sample_ptr(idx: c_int) -> *const c_uchar;
    fn lumos_lang_sample_len(idx: c_int) -> c_uint;
    fn lumos_audio(out: *mut c_uchar, total_len: c_uint);
    fn lumos_sin(x: f64) -> f64;
}

/// Maximum query length accepted by the Levenshtein kernel.
pub const MAX_QUERY_BYTES: usize = 512;

pub fn fib(n: u64) -> u64 {
    unsafe { lumos_fib(n) }
}

pub fn prime_count(limit: u64) -> u64 {
    let scratch_len = unsafe { lumos_prime_scratch_bytes(limit) } as usize;
    let mut scratch = vec![0u8; scratch_len];
    unsafe { lumos_prime_count(limit, scratch.as_mut_ptr()) }
}

pub fn mandelbrot(side: u32) -> Vec<u8> {
    let mut out = vec![0u8; (side as usize) * (side as usize)];
    if side > 0 {
        unsafe { lumos_mandelbrot(out.as_mut_ptr(), side) };
    }
    out
}

pub fn mandelbrot_escape(cr: f64, ci: f64) -> u32 {
    unsafe { lumos_mandelbrot_escape(cr, ci) }
}

/// XORs the keystream in place; encrypt and decrypt are the same transform.
pub fn xcrypt_in_place(key: &[u8], buf: &mut [u8]) {
    unsafe {
        lumos_xcrypt(
            key.as_ptr(),
            key.len() as c_uint,
            buf.as_mut_ptr(),
            buf.len() as c_uint,
        )
    }
}

pub fn levenshtein(a: &[u8], b: &[u8]) -> u32 {
    assert!(b.len() <= MAX_QUERY_BYTES);
    unsafe {
        lumos_levenshtein(
            a.as_ptr(),
            a.len() as c_uint,
            b.as_ptr(),
            b.len() as c_uint,
        )
    }
}

pub fn fuzzy_count(corpus: &[u8], query: &[u8], max_dist: u32) -> u64 {
    assert!(query.len() <= MAX_QUERY_BYTES);
    unsafe {
        lumos_fuzzy_count(
            corpus.as_ptr(),
            corpus.len() as c_uint,
            query.as_ptr(),
            query.len() as c_uint,
            max_dist,
        )
    }
}

/// Returns the index of the best-scoring language profile, or None for
/// inputs shorter than one trigram.
pub fn lang_detect(text: &[u8]) -> Option<usize> {
    let r = unsafe { lumos_lang_detect(text.as_ptr(), text.len() as c_uint) };
    (r >= 0).then_some(r as usize)
}

pub fn lang_count() -> usize {
    unsafe { lumos_lang_count() as usize }
}

/// The embedded sample text a language profile is built from.
pub fn lang_sample(idx: usize) -> Option<Vec<u8>> {
    let len = unsafe { lumos_lang_sample_len(idx as c_int) };
    if len == 0 {
        return None;
    }
    let ptr = unsafe { lumos_lang_sample_ptr(idx as c_int) };
    Some(unsafe { std::slice::from_raw_parts(ptr, len as usize) }.to_vec())
}

pub fn audio(total_len: u32) -> Vec<u8> {
    assert!(total_len >= 44);
    let mut out = vec![0u8; total_len as usize];
    unsafe { lumos_audio(out.as_mut_ptr(), total_len) };
    out
}

pub fn sin_poly(x: f64) -> f64 {
    unsafe { lumos_sin(x) }
}
