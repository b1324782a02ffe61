/* Language detection by trigram rank profiles (out-of-place distance).
 *
 * Characters map to a 27-symbol alphabet (a-z plus a catch-all space
 * class), so a trigram id fits in 27^3 = 19683 buckets. A profile is the
 * top 300 trigrams of a text ordered by descending count (ties broken by
 * lowest trigram id). The input is scored against each embedded language
 * profile by summing rank displacements; absent trigrams cost the full
 * profile depth. Lowest total distance wins, ties to the lowest index.
 * Everything is integer arithmetic, so results are target-independent.
 */
#include "lumos_kernels.h"

#define ALPHA 27
#define TRI_SPACE (ALPHA * ALPHA * ALPHA)
#define PROFILE_K 300

static const char EN_SAMPLE[] =
    "The quick brown fox jumps over the lazy dog while the evening sun "
    "settles behind the hills. Every morning the people of the town walk "
    "to the market and talk about the weather, the harvest, and the news "
    "from the city. There is a small library near the river where children "
    "read stories about ships, distant islands, and the strange machines "
    "of the future. When winter comes, the water freezes and the streets "
    "become quiet, but the bakery still opens early and the smell of warm "
    "bread drifts through the cold air. Nobody remembers exactly when the "
    "old clock tower stopped, yet everyone agrees that the town feels "
    "slower and friendlier because of it.";

static const char DE_SAMPLE[] =
    "Der schnelle braune Fuchs springt ueber den faulen Hund, waehrend die "
    "Abendsonne hinter den Huegeln versinkt. Jeden Morgen gehen die "
    "Menschen der kleinen Stadt zum Markt und sprechen ueber das Wetter, "
    "die Ernte und die Nachrichten aus der grossen Stadt. Es gibt eine "
    "kleine Bibliothek am Fluss, in der Kinder Geschichten ueber Schiffe, "
    "ferne Inseln und die seltsamen Maschinen der Zukunft lesen. Wenn der "
    "Winter kommt, gefriert das Wasser und die Strassen werden still, aber "
    "die Baeckerei oeffnet weiterhin frueh und der Duft von warmem Brot "
    "zieht durch die kalte Luft. Niemand weiss mehr genau, wann die alte "
    "Turmuhr stehen geblieben ist, doch alle sind sich einig, dass die "
    "Stadt dadurch langsamer und freundlicher wirkt.";

static const char ES_SAMPLE[] =
    "El rapido zorro marron salta sobre el perro perezoso mientras el sol "
    "de la tarde se esconde detras de las colinas. Cada manana la gente "
    "del pueblo camina hacia el mercado y habla del tiempo, de la cosecha "
    "y de las noticias de la ciudad. Hay una pequena biblioteca cerca del "
    "rio donde los ninos leen historias sobre barcos, islas lejanas y las "
    "extranas maquinas del futuro. Cuando llega el invierno, el agua se "
    "congela y las calles quedan en silencio, pero la panaderia sigue "
    "abriendo temprano y el olor del pan caliente flota por el aire frio. "
    "Nadie recuerda exactamente cuando se detuvo el viejo reloj de la "
    "torre, pero todos estan de acuerdo en que el pueblo parece mas lento "
    "y mas amable gracias a eso.";

#define NUM_LANGS 3

static const char *const SAMPLES[NUM_LANGS] = {EN_SAMPLE, DE_SAMPLE, ES_SAMPLE};

static u32 sample_len(i32 idx) {
    const char *s = SAMPLES[idx];
    u32 n = 0;
    while (s[n] != '\0') n++;
    return n;
}

i32 lumos_lang_count(void) { return NUM_LANGS; }

const u8 *lumos_lang_sample_ptr(i32 idx) {
    if (idx < 0 || idx >= NUM_LANGS) return 0;
    return (const u8 *)SAMPLES[idx];
}

u32 lumos_lang_sample_len(i32 idx) {
    if (idx < 0 || idx >= NUM_LANGS) return 0;
    return sample_len(idx);
}

static inline u32 sym(u8 c) {
    if (c >= 'a' && c <= 'z') return (u32)(c - 'a');
    if (c >= 'A' && c <= 'Z') return (u32)(c - 'A');
    return 26; /* space class */
}

static void count_trigrams(const u8 *text, u32 len, u32 *counts) {
    for (u32 i = 0; i < TRI_SPACE; i++) counts[i] = 0;
    if (len < 3) return;
    u32 a = sym(text[0]), b = sym(text[1]);
    for (u32 i = 2; i < len; i++) {
        u32 c = sym(text[i]);
        counts[a * ALPHA * ALPHA + b * ALPHA + c]++;
        a = b;
        b = c;
    }
}

/* Extract the top-K trigram ids by count; ties resolve to the lowest id
 * because the linear scan keeps the first maximum. Slots beyond the number
 * of distinct trigrams are set to -1. Counts are consumed. */
static void top_k(u32 *counts, i32 *ids) {
    for (u32 k = 0; k < PROFILE_K; k++) {
        u32 best = 0;
        i32 best_id = -1;
        for (u32 t = 0; t < TRI_SPACE; t++) {
            if (counts[t] > best) {
                best = counts[t];
                best_id = (i32)t;
            }
        }
        ids[k] = best_id;
        if (best_id >= 0) counts[best_id] = 0;
    }
}

static u64 profile_distance(const i32 *input_ids, const i32 *rank_of) {
    u64 dist = 0;
    for (u32 i = 0; i < PROFILE_K; i++) {
        i32 id = input_ids[i];
        if (id < 0) break;
        i32 r = rank_of[id];
        if (r < 0)
            dist += PROFILE_K;
        else
            dist += (u64)(r > (i32)i ? r - (i32)i : (i32)i - r);
    }
    return dist;
}

/* The embedded samples are constants, so their rank tables are built once
 * on the first call (part of the instance's first invocation) and reused;
 * rebuilding them per call dominated the kernel under interpretation. */
static i32 PROF_RANK[NUM_LANGS][TRI_SPACE];
static int prof_ready = 0;

static void init_profiles(u32 *counts) {
    i32 prof_ids[PROFILE_K];
    for (i32 lang = 0; lang < NUM_LANGS; lang++) {
        count_trigrams((const u8 *)SAMPLES[lang], sample_len(lang), counts);
        top_k(counts, prof_ids);
        for (u32 t = 0; t < TRI_SPACE; t++) PROF_RANK[lang][t] = -1;
        for (u32 k = 0; k < PROFILE_K; k++)
            if (prof_ids[k] >= 0) PROF_RANK[lang][prof_ids[k]] = (i32)k;
    }
    prof_ready = 1;
}

i32 lumos_lang_detect(const u8 *text, u32 len) {
    if (len < 3) return -1;
    /* Stack-allocated (~80 KiB) to keep the kernel reentrant; the wasm
     * build raises the shadow stack size accordingly. */
    u32 counts[TRI_SPACE];
    i32 input_ids[PROFILE_K];

    if (!prof_ready) init_profiles(counts);
    count_trigrams(text, len, counts);
    top_k(counts, input_ids);

    i32 best_lang = 0;
    u64 best_dist = 0;
    for (i32 lang = 0; lang < NUM_LANGS; lang++) {
        u64 d = profile_distance(input_ids, PROF_RANK[lang]);
        if (lang == 0 || d < best_dist) {
            best_dist = d;
            best_lang = lang;
        }
    }
    return best_lang;
}
