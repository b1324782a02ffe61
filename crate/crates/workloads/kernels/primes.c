/* Prime counting via an odds-only sieve of Eratosthenes.
 * The caller provides scratch of lumos_prime_scratch_bytes(limit) bytes. */
#include "lumos_kernels.h"

u64 lumos_prime_scratch_bytes(u64 limit) {
    if (limit < 3) return 1;
    u64 n_odds = (limit - 1) / 2; /* odds 3,5,...,<=limit */
    return n_odds / 8 + 1;
}

static inline int get_bit(const u8 *bits, u64 i) {
    return (bits[i >> 3] >> (i & 7)) & 1;
}

static inline void set_bit(u8 *bits, u64 i) { bits[i >> 3] |= (u8)(1u << (i & 7)); }

u64 lumos_prime_count(u64 limit, u8 *scratch) {
    if (limit < 2) return 0;
    if (limit < 3) return 1;
    u64 n_odds = (limit - 1) / 2; /* index i represents 2*i + 3 */
    u64 bytes = n_odds / 8 + 1;
    for (u64 i = 0; i < bytes; i++) scratch[i] = 0;
    for (u64 i = 0;; i++) {
        u64 p = 2 * i + 3;
        if (p * p > limit) break;
        if (get_bit(scratch, i)) continue;
        for (u64 j = p * p; j <= limit; j += 2 * p) set_bit(scratch, (j - 3) / 2);
    }
    u64 count = 1; /* the prime 2 */
    for (u64 i = 0; i < n_odds; i++)
        if (!get_bit(scratch, i)) count++;
    return count;
}
