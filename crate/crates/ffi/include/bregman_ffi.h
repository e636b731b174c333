/* C interface to the bregman library. Generated by cbindgen; do not edit. */

#ifndef BREGMAN_FFI_H
#define BREGMAN_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Certification verdict codes.
#define BG_VERDICT_CONSISTENT 0

#define BG_VERDICT_REFUTED 1

// Status code returned by every fallible call.
typedef enum BgStatus {
  BgStatus_Ok = 0,
  BgStatus_NullPointer = 1,
  BgStatus_InvalidArgument = 2,
  BgStatus_NonSymmetric = 3,
  BgStatus_NotPositiveDefinite = 4,
  BgStatus_DomainViolation = 5,
  BgStatus_NotInterior = 6,
  BgStatus_NumericalFailure = 7,
  BgStatus_Panic = 8,
} BgStatus;

// Domain selector for dataset construction.
typedef enum BgDomainKind {
  BgDomainKind_FullSpace = 0,
  BgDomainKind_PositiveOrthant = 1,
  BgDomainKind_Simplex = 2,
} BgDomainKind;

// Opaque weighted-dataset handle.
typedef struct BgDataset BgDataset;

// Opaque divergence handle.
typedef struct BgDivergence BgDivergence;

// Opaque convex-generator handle.
typedef struct BgGenerator BgGenerator;

// Opaque certification-report handle.
typedef struct BgReport BgReport;

// Worst-case structural-check residuals from a certification run.
typedef struct BgDiagnostics {
  size_t points_checked;
  double oddness;
  double homogeneity;
  double affine_fit;
  double h2_consistency;
  double grad_recovery;
  // 1 when every check passed at its default tolerance, else 0.
  int32_t all_pass;
} BgDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread. The pointer stays valid
// until the next failing call on the same thread.
const char *bg_last_error_message(void);

// `phi(x) = ||x||^2 / 2` on R^dim.
//
// # Safety
// `out` must be a valid pointer to a generator-handle slot.
enum BgStatus bg_generator_squared_norm(size_t dim, struct BgGenerator **out);

// Negative entropy on the probability simplex of dimension `dim`.
//
// # Safety
// `out` must be a valid pointer to a generator-handle slot.
enum BgStatus bg_generator_negative_entropy(size_t dim, struct BgGenerator **out);

// `phi(x) = x^T W x / 2` with `w` a row-major `dim * dim` symmetric
// positive-definite matrix.
//
// # Safety
// `w` must point to `dim * dim` readable doubles; `out` must be valid.
enum BgStatus bg_generator_mahalanobis(size_t dim, const double *w, struct BgGenerator **out);

// Dimension of the generator domain.
//
// # Safety
// `gen` must be a live generator handle; `out` must be valid.
enum BgStatus bg_generator_dim(const struct BgGenerator *gen, size_t *out);

// Evaluate `phi(x)` for `x` of length `len`.
//
// # Safety
// `gen` must be live; `x` must point to `len` doubles; `out` must be valid.
enum BgStatus bg_generator_value(const struct BgGenerator *gen,
                                 const double *x,
                                 size_t len,
                                 double *out);

// Evaluate `grad phi(x)` into `out` (length `len`).
//
// # Safety
// `gen` must be live; `x` and `out` must point to `len` doubles.
enum BgStatus bg_generator_gradient(const struct BgGenerator *gen,
                                    const double *x,
                                    size_t len,
                                    double *out);

// Release a generator handle.
//
// # Safety
// `gen` must be null or a handle returned by a `bg_generator_*` constructor,
// not yet freed.
void bg_generator_free(struct BgGenerator *gen);

// The Bregman divergence induced by `gen`.
//
// # Safety
// `gen` must be live; `out` must be valid.
enum BgStatus bg_divergence_bregman(const struct BgGenerator *gen, struct BgDivergence **out);

// Closed-form KL divergence on the simplex of dimension `dim`.
//
// # Safety
// `out` must be valid.
enum BgStatus bg_divergence_kl(size_t dim, struct BgDivergence **out);

// Closed-form `||x - y||^2 / 2` on R^dim.
//
// # Safety
// `out` must be valid.
enum BgStatus bg_divergence_squared_euclidean(size_t dim, struct BgDivergence **out);

// `|x - y|` on the line; a divergence that is not Bregman.
//
// # Safety
// `out` must be valid.
enum BgStatus bg_divergence_abs_distance(struct BgDivergence **out);

// Evaluate `d(x, y)`.
//
// # Safety
// `d` must be live; `x` and `y` must point to `len` doubles; `out` valid.
enum BgStatus bg_divergence_eval(const struct BgDivergence *d,
                                 const double *x,
                                 const double *y,
                                 size_t len,
                                 double *out);

// Release a divergence handle.
//
// # Safety
// `d` must be null or a handle from a `bg_divergence_*` constructor, not yet
// freed.
void bg_divergence_free(struct BgDivergence *d);

// Build a weighted dataset of `n` rows of dimension `dim`. `weights` may be
// null for uniform `1/n`; otherwise it must sum to one within 1e-12.
// `points` is row-major `n * dim`.
//
// # Safety
// `points` must point to `n * dim` doubles; `weights` to `n` doubles when
// non-null; `out` must be valid.
enum BgStatus bg_dataset_new(enum BgDomainKind kind,
                             size_t dim,
                             size_t n,
                             const double *weights,
                             const double *points,
                             struct BgDataset **out);

// Release a dataset handle.
//
// # Safety
// `ds` must be null or a handle from [`bg_dataset_new`], not yet freed.
void bg_dataset_free(struct BgDataset *ds);

// Jensen-gap information of the dataset under the generator.
//
// # Safety
// Handles must be live; `out` must be valid.
enum BgStatus bg_jensen_gap_information(const struct BgGenerator *gen,
                                        const struct BgDataset *ds,
                                        double *out);

// Divergence information of the dataset under `d`.
//
// # Safety
// Handles must be live; `out` must be valid.
enum BgStatus bg_divergence_information(const struct BgDivergence *d,
                                        const struct BgDataset *ds,
                                        double *out);

// Signed gap `I_phi - I_d` on one dataset.
//
// # Safety
// Handles must be live; `out` must be valid.
enum BgStatus bg_equivalence_gap(const struct BgGenerator *gen,
                                 const struct BgDivergence *d,
                                 const struct BgDataset *ds,
                                 double *out);

// Mutual information (nats) in the entropy-reduction form for the joint
// `p(a_i, b_j) = mu_i x_ij`, with `conditionals` row-major `k * l`.
//
// # Safety
// `mu` must point to `k` doubles, `conditionals` to `k * l`; `out` valid.
enum BgStatus bg_mutual_information_entropy_form(const double *mu,
                                                 size_t k,
                                                 const double *conditionals,
                                                 size_t l,
                                                 double *out);

// Mutual information (nats) as the weighted sum of KL divergences of the
// conditional rows from the column marginal.
//
// # Safety
// `mu` must point to `k` doubles, `conditionals` to `k * l`; `out` valid.
enum BgStatus bg_mutual_information_divergence_form(const double *mu,
                                                    size_t k,
                                                    const double *conditionals,
                                                    size_t l,
                                                    double *out);

// KL divergence of two simplex vectors of length `len`.
//
// # Safety
// `x` and `y` must point to `len` doubles; `out` must be valid.
enum BgStatus bg_kl_divergence(const double *x, const double *y, size_t len, double *out);

// Run the sampled information-equivalence certification of `d` against
// `gen`: `trials` seeded datasets with sizes in `[n_min, n_max]`, compared
// at normalized tolerance `tol`. The returned report must be freed with
// [`bg_report_free`].
//
// # Safety
// Handles must be live; `out` must be valid.
enum BgStatus bg_certify(const struct BgGenerator *gen,
                         const struct BgDivergence *d,
                         uint64_t seed,
                         size_t trials,
                         size_t n_min,
                         size_t n_max,
                         double tol,
                         struct BgReport **out);

// Verdict of a certification report: 0 consistent, 1 refuted.
//
// # Safety
// `r` must be a live report handle; `out` must be valid.
enum BgStatus bg_report_verdict(const struct BgReport *r, int32_t *out);

// Trials run, max normalized gap, and tolerance of a report. Null
// out-pointers are skipped.
//
// # Safety
// `r` must be live; non-null out-pointers must be valid.
enum BgStatus bg_report_stats(const struct BgReport *r,
                              size_t *trials_out,
                              double *max_abs_gap_out,
                              double *tolerance_out);

// Shape of the stored counterexample; zero rows when there is none.
//
// # Safety
// `r` must be live; `n_out` and `dim_out` must be valid.
enum BgStatus bg_report_counterexample_shape(const struct BgReport *r,
                                             size_t *n_out,
                                             size_t *dim_out);

// Copy the counterexample out: weights into `mu_out` (n doubles), points
// into `points_out` (n * dim, row-major), informations into the scalar
// slots. Fails with `InvalidArgument` when the report has no counterexample.
//
// # Safety
// Buffers must match the shape reported by
// [`bg_report_counterexample_shape`]; `r` must be live.
enum BgStatus bg_report_counterexample(const struct BgReport *r,
                                       double *mu_out,
                                       double *points_out,
                                       double *i_phi_out,
                                       double *i_d_out);

// Structural-diagnostic residuals of a report.
//
// # Safety
// `r` must be live; `out` must be valid.
enum BgStatus bg_report_diagnostics(const struct BgReport *r, struct BgDiagnostics *out);

// Release a report handle.
//
// # Safety
// `r` must be null or a handle from [`bg_certify`], not yet freed.
void bg_report_free(struct BgReport *r);

// Lloyd-style Bregman hard clustering of `ds` into `k` clusters.
// `assignments_out` receives `n` cluster indices; `centroids_out` receives
// `k * dim` row-major centroids.
//
// # Safety
// Handles must be live; `assignments_out` must hold `n` entries and
// `centroids_out` `k * dim` doubles; scalar out-pointers may be null.
enum BgStatus bg_cluster(const struct BgGenerator *gen,
                         const struct BgDataset *ds,
                         size_t k,
                         uint64_t seed,
                         size_t max_iters,
                         double rel_tol,
                         size_t *assignments_out,
                         double *centroids_out,
                         double *loss_out,
                         size_t *iterations_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BREGMAN_FFI_H */
