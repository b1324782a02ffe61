/* 440 Hz sine synthesis: 16-bit mono PCM at 44100 Hz behind a 44-byte
 * RIFF-style header. The phase index advances as an integer modulo 44100
 * so the waveform repeats exactly every 4410 samples, and the sine is a
 * fixed odd polynomial so both compilation targets produce identical bits. */
#include "lumos_kernels.h"

#define SAMPLE_RATE 44100
#define TONE_HZ 440
#define AMPLITUDE 30000.0

static const double PI = 3.141592653589793;
static const double TWO_PI = 6.283185307179586;

/* Odd Taylor polynomial on [-pi/2, pi/2] after quadrant reduction. */
double lumos_sin(double x) {
    while (x > PI) x -= TWO_PI;
    while (x < -PI) x += TWO_PI;
    if (x > PI / 2.0) x = PI - x;
    if (x < -PI / 2.0) x = -PI - x;
    double x2 = x * x;
    double r = 1.0 / 6227020800.0; /* 1/13! */
    r = r * x2 - 1.0 / 39916800.0;
    r = r * x2 + 1.0 / 362880.0;
    r = r * x2 - 1.0 / 5040.0;
    r = r * x2 + 1.0 / 120.0;
    r = r * x2 - 1.0 / 6.0;
    r = r * x2 + 1.0;
    return r * x;
}

static void put_u32le(u8 *p, u32 v) {
    p[0] = (u8)v;
    p[1] = (u8)(v >> 8);
    p[2] = (u8)(v >> 16);
    p[3] = (u8)(v >> 24);
}

static void put_u16le(u8 *p, u32 v) {
    p[0] = (u8)v;
    p[1] = (u8)(v >> 8);
}

void lumos_audio(u8 *out, u32 total_len) {
    if (total_len < 44) return;
    u32 data_len = total_len - 44;

    out[0] = 'R'; out[1] = 'I'; out[2] = 'F'; out[3] = 'F';
    put_u32le(out + 4, total_len - 8);
    out[8] = 'W'; out[9] = 'A'; out[10] = 'V'; out[11] = 'E';
    out[12] = 'f'; out[13] = 'm'; out[14] = 't'; out[15] = ' ';
    put_u32le(out + 16, 16);       /* fmt chunk size */
    put_u16le(out + 20, 1);        /* PCM */
    put_u16le(out + 22, 1);        /* mono */
    put_u32le(out + 24, SAMPLE_RATE);
    put_u32le(out + 28, SAMPLE_RATE * 2); /* byte rate */
    put_u16le(out + 32, 2);        /* block align */
    put_u16le(out + 34, 16);       /* bits per sample */
    out[36] = 'd'; out[37] = 'a'; out[38] = 't'; out[39] = 'a';
    put_u32le(out + 40, data_len);

    u8 *pcm = out + 44;
    u32 n_samples = data_len / 2;
    u32 phase = 0;
    for (u32 k = 0; k < n_samples; k++) {
        double angle = TWO_PI * (double)phase / (double)SAMPLE_RATE;
        double s = lumos_sin(angle);
        i32 v = (i32)(s * AMPLITUDE);
        pcm[2 * k] = (u8)(v & 0xff);
        pcm[2 * k + 1] = (u8)((v >> 8) & 0xff);
        phase += TONE_HZ;
        if (phase >= SAMPLE_RATE) phase -= SAMPLE_RATE;
    }
    if (data_len & 1) out[total_len - 1] = 0;
}
