/* Minimal tour of the C API: build a generator, certify a candidate
 * divergence against it, and print the verdict.
 *
 * Build (from the repository root):
 *   cargo build --release -p bregman-ffi
 *   cc crates/ffi/examples/demo.c -Icrates/ffi/include \
 *      target/release/libbregman_ffi.a -lm -o demo
 */
#include <stdio.h>
#include <stddef.h>
#include "bregman_ffi.h"

int main(void) {
    BgGenerator *gen = NULL;
    BgDivergence *abs_d = NULL;
    BgReport *report = NULL;
    int verdict = -1;
    size_t n = 0, dim = 0;

    if (bg_generator_squared_norm(1, &gen) != BgStatus_Ok) {
        fprintf(stderr, "generator: %s\n", bg_last_error_message());
        return 1;
    }
    bg_divergence_abs_distance(&abs_d);
    if (bg_certify(gen, abs_d, 42, 100, 1, 8, 1e-6, &report) != BgStatus_Ok) {
        fprintf(stderr, "certify: %s\n", bg_last_error_message());
        return 1;
    }
    bg_report_verdict(report, &verdict);
    bg_report_counterexample_shape(report, &n, &dim);
    printf("verdict=%d counterexample_points=%zu\n", verdict, n);

    bg_report_free(report);
    bg_divergence_free(abs_d);
    bg_generator_free(gen);
    return verdict == BG_VERDICT_REFUTED ? 0 : 2;
}
