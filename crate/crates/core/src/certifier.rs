//! Sampled decision procedure for the question "is `d` the Bregman divergence
//! of `phi`?".
//!
//! Information equivalence — the Jensen-gap and divergence informations
//! agreeing on every weighted dataset — holds exactly when `d` is the Bregman
//! divergence of the generator. The certifier samples seeded datasets and
//! compares the two informations per trial: any gap beyond tolerance refutes
//! the candidate and ships a counterexample, minimized to a two-point
//! instance when possible. A clean pass is reported as consistency, never as
//! proof.
//!
//! The structural diagnostics probe the residual
//! `f(x, y) = d(x, y) - phi(x) + phi(y)` directly: when equivalence holds,
//! the shifted residual `g_y(v) = f(y + v, y)` is odd and degree-one
//! homogeneous, `f` is affine in `x` with slope recovering `-grad phi(y)`,
//! and its constant term satisfies `h2 = -h1 . y`. Each of those facts is
//! checked numerically at sampled interior points.

use crate::dataset::WeightedDataset;
use crate::divergence::DivergenceFn;
use crate::domain::{ConvexDomain, DomainKind};
use crate::error::{Error, Result};
use crate::generator::ConvexGenerator;
use crate::information::{divergence_information, jensen_gap_information};
use crate::linalg::{self, Matrix};
use crate::sampler::{self, TrialSampler};

/// Fit residuals above this gate mean "not affine"; gradient recovery is
/// meaningless past it.
pub const AFFINE_GATE: f64 = 1e-6;

/// Default number of interior points probed by the residual diagnostics.
pub const DEFAULT_DIAGNOSTIC_POINTS: usize = 50;

/// Homogeneity multipliers exercised by the diagnostics.
pub const HOMOGENEITY_MULTIPLIERS: [f64; 5] = [-2.0, -0.5, 0.0, 0.5, 2.5];

const DIAGNOSTIC_STREAM: u64 = 0xD1A6;
const PROBE_STREAM: u64 = 0x50524F42;

/// The residual `f(x, y) = d(x, y) - phi(x) + phi(y)`. For the true Bregman
/// divergence this equals `-grad phi(y) . (x - y)`, affine in `x`.
pub fn residual(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    Ok(d.evaluate(x, y)? - gen.value(x) + gen.value(y))
}

/// Weighted mean residual `sum_i mu_i f(x_i, y)` at the dataset centroid.
/// Identically `I_d - I_phi`, so it vanishes exactly when the equivalence gap
/// does.
pub fn check_mean_zero_residual(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    ds: &WeightedDataset,
) -> Result<f64> {
    let centroid = ds.centroid();
    if !d.domain().contains_interior(&centroid.point) {
        return Err(Error::CentroidNotInterior);
    }
    let mut total = 0.0;
    for (i, &w) in ds.weights().iter().enumerate() {
        if w > 0.0 {
            total += w * residual(gen, d, ds.row(i), &centroid.point)?;
        }
    }
    Ok(total)
}

/// Shifted residual `g_y(v) = f(y + v, y)`.
pub fn g_shifted(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    y: &[f64],
    v: &[f64],
) -> Result<f64> {
    let x = linalg::axpy(1.0, v, y);
    residual(gen, d, &x, y)
}

/// Outcome of the oddness check on `g_y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddnessCheck {
    pub residual: f64,
    pub pass: bool,
}

/// Check `g_y(-v) = -g_y(v)`: reports `|g_y(v) + g_y(-v)|`. Both `y + v` and
/// `y - v` must lie in the domain.
pub fn check_g_oddness(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    y: &[f64],
    v: &[f64],
    tol: f64,
) -> Result<OddnessCheck> {
    let plus = linalg::axpy(1.0, v, y);
    let minus = linalg::axpy(-1.0, v, y);
    if !d.domain().contains(&plus) || !d.domain().contains(&minus) {
        return Err(Error::StepLeavesDomain);
    }
    let r = (g_shifted(gen, d, y, v)? + g_shifted(gen, d, y, &linalg::scale(-1.0, v))?).abs();
    Ok(OddnessCheck {
        residual: r,
        pass: r <= tol,
    })
}

/// Check degree-one homogeneity `g_y(c v) = c g_y(v)`: reports the residual
/// `|g_y(c v) - c g_y(v)|`. Both `y + v` and `y + c v` must lie in the domain.
pub fn check_g_homogeneity(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    y: &[f64],
    v: &[f64],
    c: f64,
) -> Result<f64> {
    let base = linalg::axpy(1.0, v, y);
    let scaled = linalg::axpy(c, v, y);
    if !d.domain().contains(&base) || !d.domain().contains(&scaled) {
        return Err(Error::StepLeavesDomain);
    }
    Ok((g_shifted(gen, d, y, &linalg::scale(c, v))? - c * g_shifted(gen, d, y, v)?).abs())
}

/// Result of the affine least-squares fit of `x -> f(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFit {
    pub h1: Vec<f64>,
    pub h2: f64,
    pub max_fit_residual: f64,
    pub condition: f64,
}

/// Probe set for the affine fit: `y ± r e_i` projected back onto the domain
/// plus two random interior points, with `r` a tenth of the domain scale.
pub fn default_affine_probes(domain: &ConvexDomain, y: &[f64], seed: u64) -> Vec<Vec<f64>> {
    let l = domain.dim();
    let scale = match domain.kind() {
        DomainKind::Simplex => 1.0,
        _ => 1.0f64.max(linalg::norm_inf(y)),
    };
    let r = 0.1 * scale;
    let mut probes = Vec::with_capacity(2 * l + 2);
    for i in 0..l {
        for sign in [1.0, -1.0] {
            let mut p = y.to_vec();
            p[i] += sign * r;
            probes.push(domain.project(&p));
        }
    }
    let mut rng = sampler::stream_rng(seed, PROBE_STREAM);
    for _ in 0..2 {
        probes.push(sampler::sample_interior_point(
            &mut rng,
            domain,
            sampler::DEFAULT_BOX_RADIUS,
        ));
    }
    probes
}

/// Least-squares affine fit `f(x, y) ~ h1 . x + h2` over the probe points.
/// `max_fit_residual` measures how far `f` is from affine; for the true
/// Bregman divergence it sits at rounding level.
///
/// On the simplex every probe satisfies `sum_j x_j = 1`, so the design
/// `[x 1]` has a one-dimensional null space by construction; the fit is the
/// minimum-norm solution and the checks downstream (`h2 = -h1 . y`, tangent
/// gradient recovery) are invariant under that null direction.
pub fn fit_affine_residual(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    y: &[f64],
    probes: &[Vec<f64>],
) -> Result<AffineFit> {
    let l = gen.dim();
    if probes.len() < l + 1 {
        return Err(Error::RankDeficientProbes {
            condition: f64::INFINITY,
        });
    }
    let mut rows = Vec::with_capacity(probes.len());
    let mut b = Vec::with_capacity(probes.len());
    for p in probes {
        let mut row = p.clone();
        row.push(1.0);
        rows.push(row);
        b.push(residual(gen, d, p, y)?);
    }
    let design = Matrix::from_rows(&rows)?;
    let ls = linalg::least_squares_min_norm(&design, &b, 1e-12);
    let expected_rank = match gen.domain().kind() {
        DomainKind::Simplex => l,
        _ => l + 1,
    };
    if ls.effective_rank < expected_rank {
        return Err(Error::RankDeficientProbes {
            condition: ls.condition,
        });
    }
    let h1 = ls.solution[..l].to_vec();
    let h2 = ls.solution[l];
    let mut max_fit_residual = 0.0f64;
    for (p, &bi) in probes.iter().zip(&b) {
        let fitted = linalg::dot(&h1, p) + h2;
        max_fit_residual = max_fit_residual.max((bi - fitted).abs());
    }
    Ok(AffineFit {
        h1,
        h2,
        max_fit_residual,
        condition: ls.condition,
    })
}

/// Recover the generator gradient from the affine fit: reports
/// `||grad phi(y) + h1||_inf`, projected onto the simplex tangent space
/// (centering by the coordinate mean) when the domain is the simplex, since
/// orthogonality is only required against differences `x - y`, which sum to
/// zero there. Gated behind the affine fit: a non-affine residual yields
/// [`Error::NotAffine`].
pub fn check_gradient_recovery(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    y: &[f64],
    probes: &[Vec<f64>],
) -> Result<f64> {
    let fit = fit_affine_residual(gen, d, y, probes)?;
    if fit.max_fit_residual > AFFINE_GATE {
        return Err(Error::NotAffine {
            residual: fit.max_fit_residual,
        });
    }
    let grad = gen.gradient(y)?;
    let mut s = linalg::axpy(1.0, &grad, &fit.h1);
    if gen.domain().kind() == DomainKind::Simplex {
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        for v in &mut s {
            *v -= mean;
        }
    }
    Ok(linalg::norm_inf(&s))
}

/// Outcome of the centroid-minimizer probe sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentroidMinimizerCheck {
    pub pass: bool,
    /// Smallest observed `sum_i mu_i d(x_i, z) - sum_i mu_i d(x_i, y)` over
    /// the probes; a clearly negative value certifies `d` is not Bregman.
    pub min_excess: f64,
    pub probes_run: usize,
}

/// Verify on sampled interior probes `z` that the weighted centroid minimizes
/// `z -> sum_i mu_i d(x_i, z)`. Requires `d` to claim a generator, since the
/// property characterizes Bregman divergences.
pub fn check_centroid_minimizer(
    d: &DivergenceFn,
    ds: &WeightedDataset,
    probe_count: usize,
    seed: u64,
) -> Result<CentroidMinimizerCheck> {
    if d.claims_bregman_of().is_none() {
        return Err(Error::NoBregmanClaim);
    }
    let centroid = ds.centroid();
    if !d.domain().contains_interior(&centroid.point) {
        return Err(Error::CentroidNotInterior);
    }
    let weighted_sum = |z: &[f64]| -> Result<f64> {
        let mut total = 0.0;
        for (i, &w) in ds.weights().iter().enumerate() {
            if w > 0.0 {
                total += w * d.evaluate(ds.row(i), z)?;
            }
        }
        Ok(total)
    };
    let base = weighted_sum(&centroid.point)?;
    let mut min_excess = f64::INFINITY;
    let mut pass = true;
    for p in 0..probe_count {
        let mut rng = sampler::stream_rng(seed, p as u64);
        let z = sampler::sample_interior_point(&mut rng, d.domain(), sampler::DEFAULT_BOX_RADIUS);
        let excess = weighted_sum(&z)? - base;
        min_excess = min_excess.min(excess);
        if excess < -1e-12 {
            pass = false;
        }
    }
    Ok(CentroidMinimizerCheck {
        pass,
        min_excess,
        probes_run: probe_count,
    })
}

/// Pass thresholds for the structural diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticTolerances {
    pub oddness: f64,
    pub homogeneity: f64,
    pub affine_fit: f64,
    pub h2_consistency: f64,
    pub grad_recovery: f64,
}

impl Default for DiagnosticTolerances {
    fn default() -> Self {
        Self {
            oddness: 1e-9,
            homogeneity: 1e-9,
            affine_fit: 1e-8,
            h2_consistency: 1e-8,
            grad_recovery: 1e-7,
        }
    }
}

/// Aggregated worst-case residuals of the structural checks over sampled
/// interior points. Failures of gated checks record infinity rather than
/// erroring, so diagnostics on a refuted candidate stay informative.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualDiagnostics {
    pub points_checked: usize,
    pub oddness: f64,
    pub homogeneity: f64,
    pub affine_fit: f64,
    pub h2_consistency: f64,
    pub grad_recovery: f64,
    pub all_pass: bool,
}

/// Run oddness, homogeneity, affine-fit, constant-term, and gradient-recovery
/// checks at `points` sampled interior points of the generator domain.
pub fn run_residual_diagnostics(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    seed: u64,
    points: usize,
    tols: &DiagnosticTolerances,
) -> ResidualDiagnostics {
    let domain = gen.domain();
    let mut out = ResidualDiagnostics {
        points_checked: 0,
        oddness: 0.0,
        homogeneity: 0.0,
        affine_fit: 0.0,
        h2_consistency: 0.0,
        grad_recovery: 0.0,
        all_pass: true,
    };
    for k in 0..points {
        let mut rng = sampler::stream_rng(seed, k as u64);
        let y = sampler::sample_interior_point(&mut rng, domain, sampler::DEFAULT_BOX_RADIUS);
        let Some(v) = direction_within(domain, &y, &mut rng) else {
            continue;
        };
        out.points_checked += 1;

        match check_g_oddness(gen, d, &y, &v, tols.oddness) {
            Ok(check) => out.oddness = out.oddness.max(check.residual),
            Err(_) => out.oddness = f64::INFINITY,
        }
        for &c in &HOMOGENEITY_MULTIPLIERS {
            match check_g_homogeneity(gen, d, &y, &v, c) {
                Ok(r) => out.homogeneity = out.homogeneity.max(r),
                Err(_) => out.homogeneity = f64::INFINITY,
            }
        }
        let probes = default_affine_probes(domain, &y, sampler::sub_seed(seed, k as u64));
        match fit_affine_residual(gen, d, &y, &probes) {
            Ok(fit) => {
                out.affine_fit = out.affine_fit.max(fit.max_fit_residual);
                let h2_res = (fit.h2 + linalg::dot(&fit.h1, &y)).abs();
                out.h2_consistency = out.h2_consistency.max(h2_res);
                if fit.max_fit_residual > AFFINE_GATE {
                    out.grad_recovery = f64::INFINITY;
                } else {
                    match check_gradient_recovery(gen, d, &y, &probes) {
                        Ok(disc) => out.grad_recovery = out.grad_recovery.max(disc),
                        Err(_) => out.grad_recovery = f64::INFINITY,
                    }
                }
            }
            Err(_) => {
                out.affine_fit = f64::INFINITY;
                out.h2_consistency = f64::INFINITY;
                out.grad_recovery = f64::INFINITY;
            }
        }
    }
    out.all_pass = out.points_checked > 0
        && out.oddness <= tols.oddness
        && out.homogeneity <= tols.homogeneity
        && out.affine_fit <= tols.affine_fit
        && out.h2_consistency <= tols.h2_consistency
        && out.grad_recovery <= tols.grad_recovery;
    out
}

/// Pick a direction `v` such that `y + c v` stays in the domain for every
/// homogeneity multiplier (and `y ± v` for oddness), shrinking toward zero as
/// needed. Returns `None` when no usable direction is found.
fn direction_within(
    domain: &ConvexDomain,
    y: &[f64],
    rng: &mut impl rand::Rng,
) -> Option<Vec<f64>> {
    let z = sampler::sample_interior_point(rng, domain, sampler::DEFAULT_BOX_RADIUS);
    let mut v = linalg::scale(0.3, &linalg::sub(&z, y));
    if linalg::norm_inf(&v) == 0.0 {
        return None;
    }
    let extremes = [-2.5, 2.5];
    for _ in 0..60 {
        if extremes
            .iter()
            .all(|&c| domain.contains(&linalg::axpy(c, &v, y)))
        {
            return Some(v);
        }
        v = linalg::scale(0.5, &v);
    }
    None
}

/// Certification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ConsistentWithBregman,
    RefutedWithCounterexample,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::ConsistentWithBregman => write!(f, "ConsistentWithBregman"),
            Verdict::RefutedWithCounterexample => write!(f, "RefutedWithCounterexample"),
        }
    }
}

/// A dataset on which the two informations disagree beyond tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub dataset: WeightedDataset,
    pub i_phi: f64,
    pub i_d: f64,
    /// `|I_phi - I_d| / (1 + |I_phi| + |I_d|)` on this dataset.
    pub normalized_gap: f64,
    /// Whether this instance was shrunk to a two-point dataset.
    pub minimized: bool,
}

/// Result of a certification run.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub trials_run: usize,
    /// Max over trials of the scale-normalized absolute gap
    /// `|I_phi - I_d| / (1 + |I_phi| + |I_d|)`.
    pub max_abs_gap: f64,
    pub tolerance_used: f64,
    pub counterexample: Option<Counterexample>,
    pub diagnostics: ResidualDiagnostics,
}

impl CertificationReport {
    /// One-line human description. A consistent verdict is sampled evidence,
    /// not a proof, and the summary says so.
    pub fn summary(&self) -> String {
        match self.verdict {
            Verdict::ConsistentWithBregman => format!(
                "consistent with the Bregman divergence on {} sampled trials \
                 (max normalized gap {:e} <= tol {:e}); sampled evidence, not a proof",
                self.trials_run, self.max_abs_gap, self.tolerance_used
            ),
            Verdict::RefutedWithCounterexample => format!(
                "refuted: normalized gap {:e} > tol {:e} on a {}-point counterexample",
                self.max_abs_gap,
                self.tolerance_used,
                self.counterexample
                    .as_ref()
                    .map_or(0, |c| c.dataset.len())
            ),
        }
    }
}

fn normalized_gap(i_phi: f64, i_d: f64) -> f64 {
    (i_phi - i_d).abs() / (1.0 + i_phi.abs() + i_d.abs())
}

/// Evaluate the two informations on a two-point dataset with weights
/// `(w, 1 - w)`. Returns `None` when the pair cannot be evaluated.
fn eval_pair(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    domain: &ConvexDomain,
    x1: &[f64],
    x2: &[f64],
    w: f64,
) -> Option<(WeightedDataset, f64, f64, f64)> {
    let points = Matrix::from_rows(&[x1.to_vec(), x2.to_vec()]).ok()?;
    let ds = WeightedDataset::new(domain.clone(), vec![w, 1.0 - w], points).ok()?;
    let i_phi = jensen_gap_information(gen, &ds).ok()?;
    let i_d = divergence_information(d, &ds).ok()?;
    let g = normalized_gap(i_phi, i_d);
    Some((ds, i_phi, i_d, g))
}

/// Shrink a refuting dataset to two points: scan row pairs in index order and
/// search the pair weight by a coarse grid plus interval halving around the
/// best grid point. Returns the first pair whose gap exceeds the tolerance.
fn minimize_counterexample(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    ds: &WeightedDataset,
    tol: f64,
) -> Option<Counterexample> {
    let n = ds.len();
    let domain = ds.domain();
    for i in 0..n {
        for j in (i + 1)..n {
            let x1 = ds.row(i);
            let x2 = ds.row(j);
            if x1 == x2 {
                continue;
            }
            const GRID: usize = 33;
            let mut best_w = 0.5;
            let mut best: Option<(WeightedDataset, f64, f64, f64)> = None;
            for k in 1..=GRID {
                let w = k as f64 / (GRID as f64 + 1.0);
                if let Some(cand) = eval_pair(gen, d, domain, x1, x2, w) {
                    if best.as_ref().is_none_or(|b| cand.3 > b.3) {
                        best_w = w;
                        best = Some(cand);
                    }
                }
            }
            let mut step = 1.0 / (GRID as f64 + 1.0);
            for _ in 0..40 {
                step *= 0.5;
                for w in [best_w - step, best_w + step] {
                    if w <= 0.0 || w >= 1.0 {
                        continue;
                    }
                    if let Some(cand) = eval_pair(gen, d, domain, x1, x2, w) {
                        if best.as_ref().is_none_or(|b| cand.3 > b.3) {
                            best_w = w;
                            best = Some(cand);
                        }
                    }
                }
            }
            if let Some((dataset, i_phi, i_d, g)) = best {
                if g > tol {
                    return Some(Counterexample {
                        dataset,
                        i_phi,
                        i_d,
                        normalized_gap: g,
                        minimized: true,
                    });
                }
            }
        }
    }
    None
}

/// Run the sampled information-equivalence test of `d` against `gen`.
///
/// Per trial the two informations are compared at the scale-normalized
/// tolerance; the max gap and the first refuting dataset (minimized to two
/// points when possible) are recorded. Residual diagnostics run on the same
/// seed stream regardless of verdict.
pub fn certify(
    gen: &ConvexGenerator,
    d: &DivergenceFn,
    trial_sampler: &TrialSampler,
    tol: f64,
) -> Result<CertificationReport> {
    assert!(tol > 0.0, "tolerance must be positive");
    if !trial_sampler.domain().same_shape(gen.domain()) {
        return Err(Error::SamplerDomainMismatch(format!(
            "sampler domain {} vs generator domain {}",
            trial_sampler.domain(),
            gen.domain()
        )));
    }
    if !trial_sampler.domain().same_shape(d.domain()) {
        return Err(Error::SamplerDomainMismatch(format!(
            "sampler domain {} vs divergence domain {}",
            trial_sampler.domain(),
            d.domain()
        )));
    }
    let mut max_gap = 0.0f64;
    let mut counterexample: Option<Counterexample> = None;
    for t in 0..trial_sampler.trials() {
        let ds = trial_sampler.dataset(t as u64);
        let i_phi = jensen_gap_information(gen, &ds)?;
        let i_d = divergence_information(d, &ds)?;
        let g = normalized_gap(i_phi, i_d);
        max_gap = max_gap.max(g);
        if g > tol && counterexample.is_none() {
            counterexample =
                Some(
                    minimize_counterexample(gen, d, &ds, tol).unwrap_or(Counterexample {
                        dataset: ds.clone(),
                        i_phi,
                        i_d,
                        normalized_gap: g,
                        minimized: ds.len() == 2,
                    }),
                );
        }
    }
    let diagnostics = run_residual_diagnostics(
        gen,
        d,
        sampler::sub_seed(trial_sampler.seed(), DIAGNOSTIC_STREAM),
        DEFAULT_DIAGNOSTIC_POINTS,
        &DiagnosticTolerances::default(),
    );
    let verdict = if max_gap > tol {
        Verdict::RefutedWithCounterexample
    } else {
        Verdict::ConsistentWithBregman
    };
    Ok(CertificationReport {
        verdict,
        trials_run: trial_sampler.trials(),
        max_abs_gap: max_gap,
        tolerance_used: tol,
        counterexample,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::bregman_from_generator;

    fn line_dataset(weights: Vec<f64>, xs: &[f64]) -> WeightedDataset {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        WeightedDataset::new(
            ConvexDomain::full_space(1).unwrap(),
            weights,
            Matrix::from_rows(&rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn residual_of_bregman_is_minus_gradient_term() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let x = [1.5, -0.5];
        let y = [0.25, 1.0];
        let f = residual(&gen, &d, &x, &y).unwrap();
        let grad = gen.gradient(&y).unwrap();
        let expected = -linalg::dot(&grad, &linalg::sub(&x, &y));
        assert!((f - expected).abs() < 1e-14);
    }

    #[test]
    fn residual_vanishes_on_diagonal() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.4, 0.6];
        assert!(residual(&gen, &d, &y, &y).unwrap().abs() < 1e-15);
    }

    #[test]
    fn residual_hand_value_for_abs_distance() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        // f(2, 1) = |2-1| - 2 + 0.5 = -0.5
        let f = residual(&gen, &d, &[2.0], &[1.0]).unwrap();
        assert!((f + 0.5).abs() < 1e-15);
    }

    #[test]
    fn mean_residual_zero_for_bregman() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = bregman_from_generator(&gen);
        let ds = line_dataset(vec![0.3, 0.2, 0.5], &[-1.0, 0.5, 2.0]);
        assert!(check_mean_zero_residual(&gen, &d, &ds).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn mean_residual_single_point_is_zero() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let ds = line_dataset(vec![1.0], &[0.7]);
        assert!(check_mean_zero_residual(&gen, &d, &ds).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn mean_residual_equals_information_difference_on_witness() {
        // On the witness instance the identity sum_i mu_i f(x_i, y) = I_d -
        // I_phi fixes the sign: both informations recomputed directly give
        // 1.0 - 0.5 = +0.5.
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let ds = line_dataset(vec![0.5, 0.5], &[0.0, 2.0]);
        let mean_f = check_mean_zero_residual(&gen, &d, &ds).unwrap();
        let i_phi = jensen_gap_information(&gen, &ds).unwrap();
        let i_d = divergence_information(&d, &ds).unwrap();
        assert!((mean_f - (i_d - i_phi)).abs() < 1e-14);
        assert!((mean_f - 0.5).abs() < 1e-14);
    }

    #[test]
    fn oddness_exact_for_bregman_residual() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.5, -0.25];
        let v = [0.4, 0.7];
        let check = check_g_oddness(&gen, &d, &y, &v, 1e-10).unwrap();
        assert!(check.pass, "residual {:e}", check.residual);
    }

    #[test]
    fn oddness_zero_direction_is_trivial() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let check = check_g_oddness(&gen, &d, &[1.0], &[0.0], 1e-12).unwrap();
        assert_eq!(check.residual, 0.0);
        assert!(check.pass);
    }

    #[test]
    fn oddness_detects_even_quartic_perturbation() {
        // d = (x-y)^2/2 + 1e-2 (x-y)^4 has g(v) = 1e-2 v^4 - y v, so
        // g(v) + g(-v) = 2e-2 v^4 by hand expansion.
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let domain = ConvexDomain::full_space(1).unwrap();
        let d = DivergenceFn::new("quartic-perturbed", domain, |x, y| {
            let t = x[0] - y[0];
            0.5 * t * t + 1e-2 * t.powi(4)
        });
        let v = 0.5;
        let check = check_g_oddness(&gen, &d, &[0.3], &[v], 1e-12).unwrap();
        let expected = 2.0 * 1e-2 * v.powi(4);
        assert!((check.residual - expected).abs() < 1e-12);
        assert!(!check.pass);
    }

    #[test]
    fn homogeneity_detects_odd_cubic_perturbation() {
        // A cubic perturbation is odd, so oddness passes but homogeneity
        // fails: g(cv) - c g(v) = 1e-2 (c^3 - c) v^3.
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let domain = ConvexDomain::full_space(1).unwrap();
        let d = DivergenceFn::new("cubic-perturbed", domain, |x, y| {
            let t = x[0] - y[0];
            0.5 * t * t + 1e-2 * t.powi(3)
        });
        let v = [0.5];
        let odd = check_g_oddness(&gen, &d, &[0.3], &v, 1e-12).unwrap();
        assert!(odd.pass, "cubic term is odd, residual {:e}", odd.residual);
        let c = 2.0;
        let r = check_g_homogeneity(&gen, &d, &[0.3], &v, c).unwrap();
        let expected = 1e-2 * (c.powi(3) - c) * v[0].powi(3);
        assert!((r - expected.abs()).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_trivial_multipliers() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let y = [0.2];
        let v = [0.7];
        // c = 0 reduces to |g(0)| = d(y, y) = 0.
        assert!(check_g_homogeneity(&gen, &d, &y, &v, 0.0).unwrap().abs() < 1e-15);
        // c = 1 is identically zero.
        assert_eq!(check_g_homogeneity(&gen, &d, &y, &v, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn homogeneity_exact_for_bregman() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.5, 1.5];
        let v = [0.2, -0.3];
        let r = check_g_homogeneity(&gen, &d, &y, &v, 2.5).unwrap();
        assert!(r <= 1e-10, "residual {r:e}");
    }

    #[test]
    fn affine_fit_recovers_slope_for_squared_norm() {
        // f(x, y) = -y.(x - y) so h1 = -y and h2 = ||y||^2.
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.8, -0.6];
        let probes = default_affine_probes(gen.domain(), &y, 7);
        let fit = fit_affine_residual(&gen, &d, &y, &probes).unwrap();
        assert!(fit.max_fit_residual <= 1e-8);
        assert!((fit.h1[0] + y[0]).abs() < 1e-8);
        assert!((fit.h1[1] + y[1]).abs() < 1e-8);
        assert!((fit.h2 - linalg::dot(&y, &y)).abs() < 1e-8);
    }

    #[test]
    fn affine_fit_constant_term_on_simplex() {
        let gen = ConvexGenerator::negative_entropy(3).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.2, 0.3, 0.5];
        let probes = default_affine_probes(gen.domain(), &y, 11);
        let fit = fit_affine_residual(&gen, &d, &y, &probes).unwrap();
        assert!(fit.max_fit_residual <= 1e-8);
        let h2_res = (fit.h2 + linalg::dot(&fit.h1, &y)).abs();
        assert!(h2_res <= 1e-8, "h2 + h1.y = {h2_res:e}");
    }

    #[test]
    fn affine_fit_rejects_rank_deficient_probes() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.0, 0.0];
        // All probes on a line: the design cannot identify two slopes.
        let probes = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![0.2, 0.0],
            vec![0.3, 0.0],
        ];
        match fit_affine_residual(&gen, &d, &y, &probes) {
            Err(Error::RankDeficientProbes { .. }) => {}
            other => panic!("expected RankDeficientProbes, got {other:?}"),
        }
    }

    #[test]
    fn abs_distance_is_far_from_affine() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let y = [0.0];
        // Probes straddling y so the kink is visible.
        let probes = vec![vec![-1.0], vec![-0.5], vec![0.5], vec![1.0], vec![0.0]];
        let fit = fit_affine_residual(&gen, &d, &y, &probes).unwrap();
        assert!(fit.max_fit_residual >= 0.1, "{:e}", fit.max_fit_residual);
        match check_gradient_recovery(&gen, &d, &y, &probes) {
            Err(Error::NotAffine { .. }) => {}
            other => panic!("expected NotAffine, got {other:?}"),
        }
    }

    #[test]
    fn gradient_recovery_for_builtins() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let y = [0.8, -0.6];
        let probes = default_affine_probes(gen.domain(), &y, 13);
        let disc = check_gradient_recovery(&gen, &d, &y, &probes).unwrap();
        assert!(disc <= 1e-8, "{disc:e}");

        let ent = ConvexGenerator::negative_entropy(3).unwrap();
        let dk = bregman_from_generator(&ent);
        let ys = [0.2, 0.3, 0.5];
        let probes = default_affine_probes(ent.domain(), &ys, 13);
        let disc = check_gradient_recovery(&ent, &dk, &ys, &probes).unwrap();
        assert!(disc <= 1e-7, "{disc:e}");
    }

    #[test]
    fn centroid_minimizer_passes_for_builtins() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = bregman_from_generator(&gen);
        let ds = line_dataset(vec![0.25, 0.25, 0.5], &[-2.0, 0.0, 1.0]);
        let check = check_centroid_minimizer(&d, &ds, 100, 3).unwrap();
        assert!(check.pass, "min excess {:e}", check.min_excess);

        let kl = DivergenceFn::kl(3).unwrap();
        let ds = WeightedDataset::new(
            ConvexDomain::simplex(3).unwrap(),
            vec![0.4, 0.6],
            Matrix::from_rows(&[vec![0.1, 0.4, 0.5], vec![0.5, 0.25, 0.25]]).unwrap(),
        )
        .unwrap();
        let check = check_centroid_minimizer(&kl, &ds, 100, 5).unwrap();
        assert!(check.pass, "min excess {:e}", check.min_excess);
    }

    #[test]
    fn centroid_minimizer_bias_variance_identity() {
        // Oracle: sum_i mu_i (x_i - z)^2 / 2 = I_d + (y - z)^2 / 2, so the
        // excess at any probe z is exactly the squared shift from the mean.
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = bregman_from_generator(&gen);
        let ds = line_dataset(vec![0.2, 0.3, 0.5], &[-1.0, 0.5, 2.0]);
        let y = ds.centroid().point[0];
        let i_d = crate::information::divergence_information(&d, &ds).unwrap();
        for z in [-2.0, -0.3, 0.0, y, 1.7] {
            let total: f64 = ds
                .weights()
                .iter()
                .enumerate()
                .map(|(i, &w)| w * 0.5 * (ds.row(i)[0] - z) * (ds.row(i)[0] - z))
                .sum();
            let expected = i_d + 0.5 * (y - z) * (y - z);
            assert!((total - expected).abs() < 1e-12, "z = {z}");
        }
        // z = y is the equality case of the minimizer sweep.
        let check = check_centroid_minimizer(&d, &ds, 100, 11).unwrap();
        assert!(check.pass);
        assert!(check.min_excess >= -1e-12);
    }

    #[test]
    fn centroid_minimizer_requires_claim() {
        let d = DivergenceFn::abs_distance();
        let ds = line_dataset(vec![0.5, 0.5], &[0.0, 2.0]);
        assert!(matches!(
            check_centroid_minimizer(&d, &ds, 10, 1),
            Err(Error::NoBregmanClaim)
        ));
    }

    #[test]
    fn certify_accepts_true_bregman_pair() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = bregman_from_generator(&gen);
        let s = TrialSampler::new(gen.domain().clone(), 42).with_trials(300);
        let report = certify(&gen, &d, &s, 1e-8).unwrap();
        assert_eq!(report.verdict, Verdict::ConsistentWithBregman);
        assert!(report.max_abs_gap <= 1e-9, "{:e}", report.max_abs_gap);
        assert!(report.counterexample.is_none());
        assert!(report.diagnostics.all_pass);
        assert!(report.summary().contains("not a proof"));
    }

    #[test]
    fn certify_refutes_abs_distance_with_two_point_witness() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let s = TrialSampler::new(gen.domain().clone(), 42).with_trials(100);
        let report = certify(&gen, &d, &s, 1e-6).unwrap();
        assert_eq!(report.verdict, Verdict::RefutedWithCounterexample);
        let ce = report.counterexample.expect("counterexample present");
        assert_eq!(ce.dataset.len(), 2);
        assert!(ce.minimized);
        assert!(ce.normalized_gap > 1e-6);
        // Replay: recompute both informations from the stored instance.
        let i_phi = jensen_gap_information(&gen, &ce.dataset).unwrap();
        let i_d = divergence_information(&d, &ce.dataset).unwrap();
        assert!((i_phi - ce.i_phi).abs() <= 1e-12);
        assert!((i_d - ce.i_d).abs() <= 1e-12);
    }

    #[test]
    fn certify_refutes_scaled_bregman() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let base = bregman_from_generator(&gen);
        for scale in [0.5, 2.0] {
            let scaled = {
                let inner = base.clone();
                DivergenceFn::new(
                    format!("scaled-{scale}"),
                    gen.domain().clone(),
                    move |x, y| {
                        scale
                            * inner
                                .evaluate(x, y)
                                .expect("arguments validated by outer divergence")
                    },
                )
            };
            let s = TrialSampler::new(gen.domain().clone(), 7).with_trials(100);
            let report = certify(&gen, &scaled, &s, 1e-6).unwrap();
            assert_eq!(report.verdict, Verdict::RefutedWithCounterexample, "{scale}");
        }
    }

    #[test]
    fn certify_demands_matching_domains() {
        let gen = ConvexGenerator::squared_norm(2).unwrap();
        let d = DivergenceFn::kl(2).unwrap();
        let s = TrialSampler::new(gen.domain().clone(), 1).with_trials(10);
        assert!(matches!(
            certify(&gen, &d, &s, 1e-8),
            Err(Error::SamplerDomainMismatch(_))
        ));
    }

    #[test]
    fn certify_is_deterministic() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let d = DivergenceFn::abs_distance();
        let s = TrialSampler::new(gen.domain().clone(), 99).with_trials(50);
        let a = certify(&gen, &d, &s, 1e-6).unwrap();
        let b = certify(&gen, &d, &s, 1e-6).unwrap();
        assert_eq!(a, b);
    }
}
