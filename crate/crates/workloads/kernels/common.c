/* Arena allocator, checksum, and freestanding memory intrinsics. */
#include "lumos_kernels.h"

/* Large enough for a 2 MiB input plus a 2 MiB output with headroom. */
#define KA_ARENA_BYTES (9u * 1024u * 1024u)

static u8 ka_arena[KA_ARENA_BYTES];
static u32 ka_off;

u8 *ka_alloc(u32 n) {
    u32 aligned = (n + 15u) & ~15u;
    if (aligned < n || ka_off + aligned > KA_ARENA_BYTES || ka_off + aligned < ka_off)
        return 0;
    u8 *p = ka_arena + ka_off;
    ka_off += aligned;
    return p;
}

void ka_reset(void) { ka_off = 0; }

u64 lumos_fnv1a64(const u8 *bytes, u32 len) {
    u64 h = 0xcbf29ce484222325ULL;
    for (u32 i = 0; i < len; i++) {
        h ^= (u64)bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

#ifdef __wasm__
/* clang lowers struct copies and loop idioms to these even in
 * freestanding mode; provide minimal definitions for the wasm target. */
void *memcpy(void *dst, const void *src, unsigned long n) {
    u8 *d = (u8 *)dst;
    const u8 *s = (const u8 *)src;
    for (unsigned long i = 0; i < n; i++) d[i] = s[i];
    return dst;
}

void *memset(void *dst, int c, unsigned long n) {
    u8 *d = (u8 *)dst;
    for (unsigned long i = 0; i < n; i++) d[i] = (u8)c;
    return dst;
}
#endif
