/* Fuzzy text search: whitespace tokenization + Levenshtein distance.
 * Query length is capped at 512 bytes (enforced by the host). */
#include "lumos_kernels.h"

#define MAX_QUERY 512

static inline u32 min3(u32 a, u32 b, u32 c) {
    u32 m = a < b ? a : b;
    return m < c ? m : c;
}

u32 lumos_levenshtein(const u8 *a, u32 alen, const u8 *b, u32 blen) {
    if (blen > MAX_QUERY) return 0xffffffffu;
    u32 prev[MAX_QUERY + 1];
    u32 curr[MAX_QUERY + 1];
    for (u32 j = 0; j <= blen; j++) prev[j] = j;
    for (u32 i = 1; i <= alen; i++) {
        curr[0] = i;
        for (u32 j = 1; j <= blen; j++) {
            u32 cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            curr[j] = min3(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost);
        }
        for (u32 j = 0; j <= blen; j++) prev[j] = curr[j];
    }
    return prev[blen];
}

static inline int is_space(u8 c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

u64 lumos_fuzzy_count(const u8 *corpus, u32 clen, const u8 *query, u32 qlen,
                      u32 max_dist) {
    u64 matches = 0;
    u32 i = 0;
    while (i < clen) {
        while (i < clen && is_space(corpus[i])) i++;
        u32 start = i;
        while (i < clen && !is_space(corpus[i])) i++;
        if (i > start) {
            if (lumos_levenshtein(corpus + start, i - start, query, qlen) <= max_dist)
                matches++;
        }
    }
    return matches;
}
