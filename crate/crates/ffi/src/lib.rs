//! C ABI for the bregman library.
//!
//! Handles are opaque pointers created by `bg_*`-style constructors and
//! released by the matching `bg_*_free`. Every fallible call returns a
//! [`BgStatus`]; out-parameters are written only on `Ok`. A human-readable
//! message for the most recent error on the calling thread is available via
//! [`bg_last_error_message`].
//!
//! The C header is generated into `include/bregman_ffi.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bregman::certifier::{self, Verdict};
use bregman::clustering;
use bregman::dataset::WeightedDataset;
use bregman::divergence::{self, DivergenceFn};
use bregman::domain::ConvexDomain;
use bregman::error::Error;
use bregman::generator::ConvexGenerator;
use bregman::information::{
    divergence_information, equivalence_gap, jensen_gap_information,
    mutual_information_divergence_form, mutual_information_entropy_reduction, JointDistribution,
};
use bregman::linalg::Matrix;
use bregman::sampler::TrialSampler;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonSymmetric = 3,
    NotPositiveDefinite = 4,
    DomainViolation = 5,
    NotInterior = 6,
    NumericalFailure = 7,
    Panic = 8,
}

/// Domain selector for dataset construction.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BgDomainKind {
    FullSpace = 0,
    PositiveOrthant = 1,
    Simplex = 2,
}

/// Certification verdict codes.
pub const BG_VERDICT_CONSISTENT: i32 = 0;
pub const BG_VERDICT_REFUTED: i32 = 1;

/// Worst-case structural-check residuals from a certification run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BgDiagnostics {
    pub points_checked: usize,
    pub oddness: f64,
    pub homogeneity: f64,
    pub affine_fit: f64,
    pub h2_consistency: f64,
    pub grad_recovery: f64,
    /// 1 when every check passed at its default tolerance, else 0.
    pub all_pass: i32,
}

/// Opaque convex-generator handle.
pub struct BgGenerator {
    inner: ConvexGenerator,
}

/// Opaque divergence handle.
pub struct BgDivergence {
    inner: DivergenceFn,
}

/// Opaque weighted-dataset handle.
pub struct BgDataset {
    inner: WeightedDataset,
}

/// Opaque certification-report handle.
pub struct BgReport {
    inner: certifier::CertificationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = clean);
}

fn status_of(e: &Error) -> BgStatus {
    match e {
        Error::NonSymmetric { .. } => BgStatus::NonSymmetric,
        Error::NotPositiveDefinite => BgStatus::NotPositiveDefinite,
        Error::DomainViolation(_) => BgStatus::DomainViolation,
        Error::CentroidNotInterior
        | Error::SecondArgumentNotInterior
        | Error::SecondArgumentHasZero
        | Error::GradientAtBoundary { .. } => BgStatus::NotInterior,
        Error::StepLeavesDomain
        | Error::HessianUnavailable
        | Error::RankDeficientProbes { .. }
        | Error::NotAffine { .. }
        | Error::EmptyCluster(_) => BgStatus::NumericalFailure,
        _ => BgStatus::InvalidArgument,
    }
}

fn fail(e: &Error) -> BgStatus {
    set_last_error(&e.to_string());
    status_of(e)
}

fn invalid(msg: &str) -> BgStatus {
    set_last_error(msg);
    BgStatus::InvalidArgument
}

fn null_pointer() -> BgStatus {
    set_last_error("null pointer argument");
    BgStatus::NullPointer
}

fn guarded(f: impl FnOnce() -> BgStatus) -> BgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            BgStatus::Panic
        }
    }
}

/// Message for the most recent error on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

unsafe fn write_generator(
    out: *mut *mut BgGenerator,
    gen: Result<ConvexGenerator, Error>,
) -> BgStatus {
    match gen {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(BgGenerator { inner }));
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// `phi(x) = ||x||^2 / 2` on R^dim.
///
/// # Safety
/// `out` must be a valid pointer to a generator-handle slot.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_squared_norm(
    dim: usize,
    out: *mut *mut BgGenerator,
) -> BgStatus {
    if out.is_null() {
        return null_pointer();
    }
    guarded(|| write_generator(out, ConvexGenerator::squared_norm(dim)))
}

/// Negative entropy on the probability simplex of dimension `dim`.
///
/// # Safety
/// `out` must be a valid pointer to a generator-handle slot.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_negative_entropy(
    dim: usize,
    out: *mut *mut BgGenerator,
) -> BgStatus {
    if out.is_null() {
        return null_pointer();
    }
    guarded(|| write_generator(out, ConvexGenerator::negative_entropy(dim)))
}

/// `phi(x) = x^T W x / 2` with `w` a row-major `dim * dim` symmetric
/// positive-definite matrix.
///
/// # Safety
/// `w` must point to `dim * dim` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_mahalanobis(
    dim: usize,
    w: *const f64,
    out: *mut *mut BgGenerator,
) -> BgStatus {
    if out.is_null() || w.is_null() {
        return null_pointer();
    }
    let data = std::slice::from_raw_parts(w, dim * dim).to_vec();
    guarded(move || {
        let gen =
            Matrix::new(dim, dim, data).and_then(ConvexGenerator::squared_mahalanobis);
        write_generator(out, gen)
    })
}

/// Dimension of the generator domain.
///
/// # Safety
/// `gen` must be a live generator handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_dim(gen: *const BgGenerator, out: *mut usize) -> BgStatus {
    if gen.is_null() || out.is_null() {
        return null_pointer();
    }
    *out = (*gen).inner.dim();
    BgStatus::Ok
}

/// Evaluate `phi(x)` for `x` of length `len`.
///
/// # Safety
/// `gen` must be live; `x` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_value(
    gen: *const BgGenerator,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> BgStatus {
    if gen.is_null() || x.is_null() || out.is_null() {
        return null_pointer();
    }
    let gen = &(*gen).inner;
    if len != gen.dim() {
        return invalid("point length does not match the generator dimension");
    }
    let x = std::slice::from_raw_parts(x, len);
    guarded(|| {
        *out = gen.value(x);
        BgStatus::Ok
    })
}

/// Evaluate `grad phi(x)` into `out` (length `len`).
///
/// # Safety
/// `gen` must be live; `x` and `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_gradient(
    gen: *const BgGenerator,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> BgStatus {
    if gen.is_null() || x.is_null() || out.is_null() {
        return null_pointer();
    }
    let gen = &(*gen).inner;
    if len != gen.dim() {
        return invalid("point length does not match the generator dimension");
    }
    let x = std::slice::from_raw_parts(x, len);
    let out = std::slice::from_raw_parts_mut(out, len);
    guarded(|| match gen.gradient(x) {
        Ok(g) => {
            out.copy_from_slice(&g);
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Release a generator handle.
///
/// # Safety
/// `gen` must be null or a handle returned by a `bg_generator_*` constructor,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_generator_free(gen: *mut BgGenerator) {
    if !gen.is_null() {
        drop(Box::from_raw(gen));
    }
}

// ---------------------------------------------------------------------------
// Divergences
// ---------------------------------------------------------------------------

unsafe fn write_divergence(
    out: *mut *mut BgDivergence,
    d: Result<DivergenceFn, Error>,
) -> BgStatus {
    match d {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(BgDivergence { inner }));
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// The Bregman divergence induced by `gen`.
///
/// # Safety
/// `gen` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_bregman(
    gen: *const BgGenerator,
    out: *mut *mut BgDivergence,
) -> BgStatus {
    if gen.is_null() || out.is_null() {
        return null_pointer();
    }
    let gen = &(*gen).inner;
    guarded(|| write_divergence(out, Ok(DivergenceFn::bregman(gen))))
}

/// Closed-form KL divergence on the simplex of dimension `dim`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_kl(dim: usize, out: *mut *mut BgDivergence) -> BgStatus {
    if out.is_null() {
        return null_pointer();
    }
    guarded(|| write_divergence(out, DivergenceFn::kl(dim)))
}

/// Closed-form `||x - y||^2 / 2` on R^dim.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_squared_euclidean(
    dim: usize,
    out: *mut *mut BgDivergence,
) -> BgStatus {
    if out.is_null() {
        return null_pointer();
    }
    guarded(|| write_divergence(out, DivergenceFn::squared_euclidean(dim)))
}

/// `|x - y|` on the line; a divergence that is not Bregman.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_abs_distance(out: *mut *mut BgDivergence) -> BgStatus {
    if out.is_null() {
        return null_pointer();
    }
    guarded(|| write_divergence(out, Ok(DivergenceFn::abs_distance())))
}

/// Evaluate `d(x, y)`.
///
/// # Safety
/// `d` must be live; `x` and `y` must point to `len` doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_eval(
    d: *const BgDivergence,
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> BgStatus {
    if d.is_null() || x.is_null() || y.is_null() || out.is_null() {
        return null_pointer();
    }
    let d = &(*d).inner;
    if len != d.dim() {
        return invalid("point length does not match the divergence dimension");
    }
    let x = std::slice::from_raw_parts(x, len);
    let y = std::slice::from_raw_parts(y, len);
    guarded(|| match d.evaluate(x, y) {
        Ok(v) => {
            *out = v;
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Release a divergence handle.
///
/// # Safety
/// `d` must be null or a handle from a `bg_divergence_*` constructor, not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_free(d: *mut BgDivergence) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

// ---------------------------------------------------------------------------
// Datasets and informations
// ---------------------------------------------------------------------------

/// Build a weighted dataset of `n` rows of dimension `dim`. `weights` may be
/// null for uniform `1/n`; otherwise it must sum to one within 1e-12.
/// `points` is row-major `n * dim`.
///
/// # Safety
/// `points` must point to `n * dim` doubles; `weights` to `n` doubles when
/// non-null; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_dataset_new(
    kind: BgDomainKind,
    dim: usize,
    n: usize,
    weights: *const f64,
    points: *const f64,
    out: *mut *mut BgDataset,
) -> BgStatus {
    if points.is_null() || out.is_null() {
        return null_pointer();
    }
    let point_data = std::slice::from_raw_parts(points, n.saturating_mul(dim)).to_vec();
    let weight_data = if weights.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(weights, n).to_vec())
    };
    guarded(move || {
        let domain = match kind {
            BgDomainKind::FullSpace => ConvexDomain::full_space(dim),
            BgDomainKind::PositiveOrthant => ConvexDomain::positive_orthant(dim),
            BgDomainKind::Simplex => ConvexDomain::simplex(dim),
        };
        let ds = domain
            .and_then(|dom| Matrix::new(n, dim, point_data).map(|m| (dom, m)))
            .and_then(|(dom, m)| match weight_data {
                Some(w) => WeightedDataset::new(dom, w, m),
                None => WeightedDataset::with_uniform_weights(dom, m),
            });
        match ds {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(BgDataset { inner }));
                BgStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a dataset handle.
///
/// # Safety
/// `ds` must be null or a handle from [`bg_dataset_new`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_dataset_free(ds: *mut BgDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Jensen-gap information of the dataset under the generator.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_jensen_gap_information(
    gen: *const BgGenerator,
    ds: *const BgDataset,
    out: *mut f64,
) -> BgStatus {
    if gen.is_null() || ds.is_null() || out.is_null() {
        return null_pointer();
    }
    let gen = &(*gen).inner;
    let ds = &(*ds).inner;
    guarded(|| match jensen_gap_information(gen, ds) {
        Ok(v) => {
            *out = v;
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Divergence information of the dataset under `d`.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_divergence_information(
    d: *const BgDivergence,
    ds: *const BgDataset,
    out: *mut f64,
) -> BgStatus {
    if d.is_null() || ds.is_null() || out.is_null() {
        return null_pointer();
    }
    let d = &(*d).inner;
    let ds = &(*ds).inner;
    guarded(|| match divergence_information(d, ds) {
        Ok(v) => {
            *out = v;
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

/// Signed gap `I_phi - I_d` on one dataset.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_equivalence_gap(
    gen: *const BgGenerator,
    d: *const BgDivergence,
    ds: *const BgDataset,
    out: *mut f64,
) -> BgStatus {
    if gen.is_null() || d.is_null() || ds.is_null() || out.is_null() {
        return null_pointer();
    }
    let gen = &(*gen).inner;
    let d = &(*d).inner;
    let ds = &(*ds).inner;
    guarded(|| match equivalence_gap(gen, d, ds) {
        Ok(v) => {
            *out = v;
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

unsafe fn joint_from_raw(
    mu: *const f64,
    k: usize,
    conditionals: *const f64,
    l: usize,
) -> Result<JointDistribution, Error> {
    let mu = std::slice::from_raw_parts(mu, k).to_vec();
    let x = std::slice::from_raw_parts(conditionals, k.saturating_mul(l)).to_vec();
    JointDistribution::new(mu, Matrix::new(k, l, x)?)
}

/// Mutual information (nats) in the entropy-reduction form for the joint
/// `p(a_i, b_j) = mu_i x_ij`, with `conditionals` row-major `k * l`.
///
/// # Safety
/// `mu` must point to `k` doubles, `conditionals` to `k * l`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bg_mutual_information_entropy_form(
    mu: *const f64,
    k: usize,
    conditionals: *const f64,
    l: usize,
    out: *mut f64,
) -> BgStatus {
    if mu.is_null() || conditionals.is_null() || out.is_null() {
        return null_pointer();
    }
    let joint = joint_from_raw(mu, k, conditionals, l);
    guarded(|| match joint {
        Ok(j) => {
            *out = mutual_information_entropy_reduction(&j);
            BgStatus::Ok
        }
        Err(ref e) => fail(e),
    })
}

/// Mutual information (nats) as the weighted sum of KL divergences of the
/// conditional rows from the column marginal.
///
/// # Safety
/// `mu` must point to `k` doubles, `conditionals` to `k * l`; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bg_mutual_information_divergence_form(
    mu: *const f64,
    k: usize,
    conditionals: *const f64,
    l: usize,
    out: *mut f64,
) -> BgStatus {
    if mu.is_null() || conditionals.is_null() || out.is_null() {
        return null_pointer();
    }
    let joint = joint_from_raw(mu, k, conditionals, l);
    guarded(|| match joint {
        Ok(j) => {
            *out = mutual_information_divergence_form(&j);
            BgStatus::Ok
        }
        Err(ref e) => fail(e),
    })
}

/// KL divergence of two simplex vectors of length `len`.
///
/// # Safety
/// `x` and `y` must point to `len` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_kl_divergence(
    x: *const f64,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> BgStatus {
    if x.is_null() || y.is_null() || out.is_null() {
        return null_pointer();
    }
    let x = std::slice::from_raw_parts(x, len);
    let y = std::slice::from_raw_parts(y, len);
    guarded(|| match divergence::kl_divergence(x, y) {
        Ok(v) => {
            *out = v;
            BgStatus::Ok
        }
        Err(e) => fail(&e),
    })
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

/// Run the sampled information-equivalence certification of `d` against
/// `gen`: `trials` seeded datasets with sizes in `[n_min, n_max]`, compared
/// at normalized tolerance `tol`. The returned report must be freed with
/// [`bg_report_free`].
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_certify(
    gen: *const BgGenerator,
    d: *const BgDivergence,
    seed: u64,
    trials: usize,
    n_min: usize,
    n_max: usize,
    tol: f64,
    out: *mut *mut BgReport,
) -> BgStatus {
    if gen.is_null() || d.is_null() || out.is_null() {
        return null_pointer();
    }
    if trials == 0 || n_min == 0 || n_min > n_max || !tol.is_finite() || tol <= 0.0 {
        return invalid("trials >= 1, 1 <= n_min <= n_max, tol > 0 required");
    }
    let gen = &(*gen).inner;
    let d = &(*d).inner;
    guarded(|| {
        let sampler = TrialSampler::new(gen.domain().clone(), seed)
            .with_trials(trials)
            .with_n_range(n_min, n_max);
        match certifier::certify(gen, d, &sampler, tol) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(BgReport { inner }));
                BgStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Verdict of a certification report: 0 consistent, 1 refuted.
///
/// # Safety
/// `r` must be a live report handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_report_verdict(r: *const BgReport, out: *mut i32) -> BgStatus {
    if r.is_null() || out.is_null() {
        return null_pointer();
    }
    *out = match (*r).inner.verdict {
        Verdict::ConsistentWithBregman => BG_VERDICT_CONSISTENT,
        Verdict::RefutedWithCounterexample => BG_VERDICT_REFUTED,
    };
    BgStatus::Ok
}

/// Trials run, max normalized gap, and tolerance of a report. Null
/// out-pointers are skipped.
///
/// # Safety
/// `r` must be live; non-null out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_report_stats(
    r: *const BgReport,
    trials_out: *mut usize,
    max_abs_gap_out: *mut f64,
    tolerance_out: *mut f64,
) -> BgStatus {
    if r.is_null() {
        return null_pointer();
    }
    let rep = &(*r).inner;
    if !trials_out.is_null() {
        *trials_out = rep.trials_run;
    }
    if !max_abs_gap_out.is_null() {
        *max_abs_gap_out = rep.max_abs_gap;
    }
    if !tolerance_out.is_null() {
        *tolerance_out = rep.tolerance_used;
    }
    BgStatus::Ok
}

/// Shape of the stored counterexample; zero rows when there is none.
///
/// # Safety
/// `r` must be live; `n_out` and `dim_out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_report_counterexample_shape(
    r: *const BgReport,
    n_out: *mut usize,
    dim_out: *mut usize,
) -> BgStatus {
    if r.is_null() || n_out.is_null() || dim_out.is_null() {
        return null_pointer();
    }
    match &(*r).inner.counterexample {
        Some(ce) => {
            *n_out = ce.dataset.len();
            *dim_out = ce.dataset.dim();
        }
        None => {
            *n_out = 0;
            *dim_out = 0;
        }
    }
    BgStatus::Ok
}

/// Copy the counterexample out: weights into `mu_out` (n doubles), points
/// into `points_out` (n * dim, row-major), informations into the scalar
/// slots. Fails with `InvalidArgument` when the report has no counterexample.
///
/// # Safety
/// Buffers must match the shape reported by
/// [`bg_report_counterexample_shape`]; `r` must be live.
#[no_mangle]
pub unsafe extern "C" fn bg_report_counterexample(
    r: *const BgReport,
    mu_out: *mut f64,
    points_out: *mut f64,
    i_phi_out: *mut f64,
    i_d_out: *mut f64,
) -> BgStatus {
    if r.is_null() || mu_out.is_null() || points_out.is_null() {
        return null_pointer();
    }
    let Some(ce) = &(*r).inner.counterexample else {
        return invalid("report has no counterexample");
    };
    let n = ce.dataset.len();
    let dim = ce.dataset.dim();
    std::slice::from_raw_parts_mut(mu_out, n).copy_from_slice(ce.dataset.weights());
    let points = std::slice::from_raw_parts_mut(points_out, n * dim);
    for i in 0..n {
        points[i * dim..(i + 1) * dim].copy_from_slice(ce.dataset.row(i));
    }
    if !i_phi_out.is_null() {
        *i_phi_out = ce.i_phi;
    }
    if !i_d_out.is_null() {
        *i_d_out = ce.i_d;
    }
    BgStatus::Ok
}

/// Structural-diagnostic residuals of a report.
///
/// # Safety
/// `r` must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bg_report_diagnostics(
    r: *const BgReport,
    out: *mut BgDiagnostics,
) -> BgStatus {
    if r.is_null() || out.is_null() {
        return null_pointer();
    }
    let d = &(*r).inner.diagnostics;
    *out = BgDiagnostics {
        points_checked: d.points_checked,
        oddness: d.oddness,
        homogeneity: d.homogeneity,
        affine_fit: d.affine_fit,
        h2_consistency: d.h2_consistency,
        grad_recovery: d.grad_recovery,
        all_pass: i32::from(d.all_pass),
    };
    BgStatus::Ok
}

/// Release a report handle.
///
/// # Safety
/// `r` must be null or a handle from [`bg_certify`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bg_report_free(r: *mut BgReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

/// Lloyd-style Bregman hard clustering of `ds` into `k` clusters.
/// `assignments_out` receives `n` cluster indices; `centroids_out` receives
/// `k * dim` row-major centroids.
///
/// # Safety
/// Handles must be live; `assignments_out` must hold `n` entries and
/// `centroids_out` `k * dim` doubles; scalar out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn bg_cluster(
    gen: *const BgGenerator,
    ds: *const BgDataset,
    k: usize,
    seed: u64,
    max_iters: usize,
    rel_tol: f64,
    assignments_out: *mut usize,
    centroids_out: *mut f64,
    loss_out: *mut f64,
    iterations_out: *mut usize,
) -> BgStatus {
    if gen.is_null() || ds.is_null() || assignments_out.is_null() || centroids_out.is_null() {
        return null_pointer();
    }
    let gen = &(*gen).inner;
    let ds = &(*ds).inner;
    guarded(
        || match clustering::bregman_lloyd(gen, ds, k, seed, max_iters, rel_tol) {
            Ok(state) => {
                let n = ds.len();
                let dim = ds.dim();
                std::slice::from_raw_parts_mut(assignments_out, n)
                    .copy_from_slice(&state.assignments);
                let centroids = std::slice::from_raw_parts_mut(centroids_out, k * dim);
                for j in 0..k {
                    centroids[j * dim..(j + 1) * dim].copy_from_slice(state.centroids.row(j));
                }
                if !loss_out.is_null() {
                    *loss_out = state.loss;
                }
                if !iterations_out.is_null() {
                    *iterations_out = state.iteration;
                }
                BgStatus::Ok
            }
            Err(e) => fail(&e),
        },
    )
}
