/* Escape-time Mandelbrot bitmap, one byte per pixel, max 255 iterations,
 * over re in [-2,1], im in [-1.5,1.5]. */
#include "lumos_kernels.h"

u32 lumos_mandelbrot_escape(double cr, double ci) {
    double zr = 0.0, zi = 0.0;
    u32 iter = 0;
    while (iter < 255) {
        double zr2 = zr * zr;
        double zi2 = zi * zi;
        if (zr2 + zi2 > 4.0) break;
        double t = zr2 - zi2 + cr;
        zi = 2.0 * zr * zi + ci;
        zr = t;
        iter++;
    }
    return iter;
}

void lumos_mandelbrot(u8 *out, u32 side) {
    double inv = 1.0 / (double)side;
    for (u32 y = 0; y < side; y++) {
        double ci = -1.5 + 3.0 * (((double)y + 0.5) * inv);
        for (u32 x = 0; x < side; x++) {
            double cr = -2.0 + 3.0 * (((double)x + 0.5) * inv);
            out[(u64)y * side + x] = (u8)lumos_mandelbrot_escape(cr, ci);
        }
    }
}
