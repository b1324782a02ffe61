/* Symmetric keystream cipher: splitmix64 stream seeded by an FNV-1a hash
 * of the key, XORed bytewise. XOR makes decrypt its own inverse. Not a
 * real cipher; it exists to give encryption-shaped CPU work with
 * reproducible output. */
#include "lumos_kernels.h"

static inline u64 splitmix64_next(u64 *state) {
    *state += 0x9e3779b97f4a7c15ULL;
    u64 z = *state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void lumos_xcrypt(const u8 *key, u32 key_len, u8 *buf, u32 len) {
    u64 state = lumos_fnv1a64(key, key_len);
    u32 i = 0;
    while (i + 8 <= len) {
        u64 ks = splitmix64_next(&state);
        for (u32 b = 0; b < 8; b++) buf[i + b] ^= (u8)(ks >> (8 * b));
        i += 8;
    }
    if (i < len) {
        u64 ks = splitmix64_next(&state);
        for (u32 b = 0; i + b < len; b++) buf[i + b] ^= (u8)(ks >> (8 * b));
    }
}
