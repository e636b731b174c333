//! Seeded sampling of weighted datasets for property tests and the
//! certification loop. Every trial derives its own RNG from (seed, trial
//! index), so the trial sequence is identical regardless of evaluation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::WeightedDataset;
use crate::domain::{ConvexDomain, DomainKind};
use crate::linalg::Matrix;

/// Default coordinate radius for full-space and positive-orthant sampling.
pub const DEFAULT_BOX_RADIUS: f64 = 3.0;

/// SplitMix64 step, used to mix seeds and stream indices.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent stream seed from a base seed and a stream index.
pub fn sub_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(stream.wrapping_add(0x51_7C_C1_B7_27_22_0A_95)))
}

/// Seeded RNG for one derived stream.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(seed, stream))
}

/// Flat Dirichlet(1,...,1) sample: normalized unit exponentials.
pub fn dirichlet_uniform(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = g.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    for v in &mut g {
        *v /= sum;
    }
    g
}

/// Sample a point in the relative interior of `domain`.
///
/// Full space: componentwise uniform on [-radius, radius]. Positive orthant:
/// uniform on [margin, radius]. Simplex: flat Dirichlet clamped to the
/// interior margin and renormalized.
pub fn sample_interior_point(rng: &mut impl Rng, domain: &ConvexDomain, radius: f64) -> Vec<f64> {
    let l = domain.dim();
    match domain.kind() {
        DomainKind::FullSpace => (0..l).map(|_| rng.random_range(-radius..radius)).collect(),
        DomainKind::PositiveOrthant => (0..l)
            .map(|_| rng.random_range(domain.interior_margin()..radius))
            .collect(),
        DomainKind::Simplex => {
            let raw = dirichlet_uniform(rng, l);
            let (clamped, _) = domain.clamp_to_interior(&raw);
            clamped
        }
    }
}

/// Samples weighted datasets `(mu, X)` with `mu` flat-Dirichlet over the rows
/// and rows drawn from the domain-appropriate point law.
#[derive(Debug, Clone)]
pub struct TrialSampler {
    seed: u64,
    domain: ConvexDomain,
    n_min: usize,
    n_max: usize,
    trials: usize,
    box_radius: f64,
}

impl TrialSampler {
    pub fn new(domain: ConvexDomain, seed: u64) -> Self {
        Self {
            seed,
            domain,
            n_min: 1,
            n_max: 8,
            trials: 1000,
            box_radius: DEFAULT_BOX_RADIUS,
        }
    }

    pub fn with_n_range(mut self, n_min: usize, n_max: usize) -> Self {
        assert!(n_min >= 1 && n_min <= n_max, "invalid dataset size range");
        self.n_min = n_min;
        self.n_max = n_max;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        assert!(trials >= 1, "at least one trial");
        self.trials = trials;
        self
    }

    pub fn with_box_radius(mut self, radius: f64) -> Self {
        assert!(radius > 0.0, "radius must be positive");
        self.box_radius = radius;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn n_range(&self) -> (usize, usize) {
        (self.n_min, self.n_max)
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    /// The dataset for one trial index. Construction cannot fail: sampled
    /// weights are normalized and sampled rows are interior by construction.
    pub fn dataset(&self, trial: u64) -> WeightedDataset {
        let mut rng = stream_rng(self.seed, trial);
        let n = rng.random_range(self.n_min..=self.n_max);
        let weights = dirichlet_uniform(&mut rng, n);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| sample_interior_point(&mut rng, &self.domain, self.box_radius))
            .collect();
        let points = Matrix::from_rows(&rows).expect("sampled rows are rectangular");
        WeightedDataset::new(self.domain.clone(), weights, points)
            .expect("sampled dataset is valid by construction")
    }
}
