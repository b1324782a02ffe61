/* Fibonacci: iterative, 64-bit wrapping arithmetic. */
#include "lumos_kernels.h"

u64 lumos_fib(u64 n) {
    u64 a = 0, b = 1;
    for (u64 i = 0; i < n; i++) {
        u64 t = a + b; /* wraps mod 2^64 */
        a = b;
        b = t;
    }
    return a;
}
