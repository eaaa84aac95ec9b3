//! Monte-Carlo samples from Haar measure on compact classical groups.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::par;

/// Smallest sample count accepted by [`haar_baseline`].
pub const MIN_HAAR_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HaarGroup {
    Symplectic,
    SpecialOrthogonal,
    OrthogonalFull,
    SpecialUnitary,
    Unitary,
}

impl fmt::Display for HaarGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaarGroup::Symplectic => "symplectic",
            HaarGroup::SpecialOrthogonal => "special_orthogonal",
            HaarGroup::OrthogonalFull => "orthogonal_full",
            HaarGroup::SpecialUnitary => "special_unitary",
            HaarGroup::Unitary => "unitary",
        })
    }
}

impl FromStr for HaarGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "symplectic" => HaarGroup::Symplectic,
            "special_orthogonal" => HaarGroup::SpecialOrthogonal,
            "orthogonal_full" => HaarGroup::OrthogonalFull,
            "special_unitary" => HaarGroup::SpecialUnitary,
            "unitary" => HaarGroup::Unitary,
            other => return Err(Error::Parse(format!("unknown group '{other}'"))),
        })
    }
}

/// A sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Estimate {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Estimate { mean: f64::NAN, se: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Estimate { mean, se: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate { mean, se: (var / n).sqrt() }
    }

    /// Distance in combined standard errors.
    pub fn z_against(&self, other: &Estimate) -> f64 {
        let s = (self.se * self.se + other.se * other.se).sqrt();
        let diff = self.mean - other.mean;
        if s == 0.0 {
            if diff.abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY * diff.signum()
            }
        } else {
            diff / s
        }
    }
}

/// Trace moments of a random matrix ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    pub group: HaarGroup,
    pub size: usize,
    pub samples: usize,
    /// `E[Re tr U]`.
    pub tr_re: Estimate,
    /// `E[Im tr U]`.
    pub tr_im: Estimate,
    /// `E[|tr U|^2]`.
    pub tr_abs2: Estimate,
    /// `E[Re tr U^2]`.
    pub tr_sq_re: Estimate,
}

/// The three trace statistics of one unitary class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceStats {
    pub tr: Complex64,
    pub tr_sq: Complex64,
}

impl TraceStats {
    pub fn of_eigenvalues(eig: &[Complex64]) -> TraceStats {
        TraceStats { tr: eig.iter().sum(), tr_sq: eig.iter().map(|z| z * z).sum() }
    }
}

/// Builds a moment table from per-sample trace statistics.
pub fn moments_of(group: HaarGroup, size: usize, stats: &[TraceStats]) -> MomentTable {
    let col = |f: &dyn Fn(&TraceStats) -> f64| -> Estimate {
        Estimate::from_samples(&stats.iter().map(f).collect::<Vec<_>>())
    };
    MomentTable {
        group,
        size,
        samples: stats.len(),
        tr_re: col(&|s| s.tr.re),
        tr_im: col(&|s| s.tr.im),
        tr_abs2: col(&|s| s.tr.norm_sqr()),
        tr_sq_re: col(&|s| s.tr_sq.re),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(gaussian(rng) * s, gaussian(rng) * s)
}

/// Orthonormalizes the columns in place; returns false on a degenerate column.
fn gram_schmidt(m: &mut DMatrix<Complex64>, from: usize, to: usize) -> bool {
    for j in from..to {
        for k in 0..j {
            let proj: Complex64 = (0..m.nrows()).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
            for i in 0..m.nrows() {
                let v = m[(i, k)];
                m[(i, j)] -= proj * v;
            }
        }
        let norm: f64 = (0..m.nrows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return false;
        }
        for i in 0..m.nrows() {
            m[(i, j)] /= norm;
        }
    }
    true
}

/// One Haar-distributed matrix of the given group.
pub fn sample_matrix(group: HaarGroup, size: usize, rng: &mut ChaCha8Rng) -> Result<DMatrix<Complex64>> {
    if size == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    loop {
        let m = match group {
            HaarGroup::Unitary | HaarGroup::SpecialUnitary => {
                let mut m = DMatrix::from_fn(size, size, |_, _| complex_gaussian(rng));
                if !gram_schmidt(&mut m, 0, size) {
                    continue;
                }
                if group == HaarGroup::SpecialUnitary {
                    let det = m.determinant();
                    let k = Uniform::new(0, size as u32).expect("nonempty range").sample(rng);
                    let root = Complex64::from_polar(
                        1.0,
                        -(det.arg() + 2.0 * std::f64::consts::PI * k as f64) / size as f64,
                    );
                    m *= root;
                }
                m
            }
            HaarGroup::OrthogonalFull | HaarGroup::SpecialOrthogonal => {
                let mut m = DMatrix::from_fn(size, size, |_, _| Complex64::new(gaussian(rng), 0.0));
                if !gram_schmidt(&mut m, 0, size) {
                    continue;
                }
                if group == HaarGroup::SpecialOrthogonal && m.determinant().re < 0.0 {
                    for i in 0..size {
                        m[(i, 0)] = -m[(i, 0)];
                    }
                }
                m
            }
            HaarGroup::Symplectic => {
                if size % 2 != 0 {
                    return Err(Error::InvalidInput("symplectic size must be even".into()));
                }
                let h = size / 2;
                let mut m = DMatrix::<Complex64>::zeros(size, size);
                let mut ok = true;
                for j in 0..h {
                    for i in 0..size {
                        m[(i, j)] = complex_gaussian(rng);
                    }
                    // orthogonalize against v_k and their partners -J conj(v_k)
                    for k in (0..j).chain(h..h + j) {
                        let proj: Complex64 = (0..size).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
                        for i in 0..size {
                            let v = m[(i, k)];
                            m[(i, j)] -= proj * v;
                        }
                    }
                    let norm: f64 = (0..size).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
                    if norm < 1e-12 {
                        ok = false;
                        break;
                    }
                    for i in 0..size {
                        m[(i, j)] /= norm;
                    }
                    // (a; b) -> (-conj(b); conj(a))
                    for i in 0..h {
                        m[(i, h + j)] = -m[(h + i, j)].conj();
                        m[(h + i, h + j)] = m[(i, j)].conj();
                    }
                }
                if !ok {
                    continue;
                }
                m
            }
        };
        return Ok(m);
    }
}

/// Monte-Carlo trace moments under Haar measure, one RNG stream per sample.
pub fn haar_baseline(group: HaarGroup, size: usize, samples: usize, seed: u64) -> Result<MomentTable> {
    if samples < MIN_HAAR_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_HAAR_SAMPLES} Haar samples, got {samples}"
        )));
    }
    let stats = par::map_range(samples, par::default_mode(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let m = sample_matrix(group, size, &mut rng)?;
        let sq = &m * &m;
        Ok(TraceStats { tr: m.trace(), tr_sq: sq.trace() })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(moments_of(group, size, &stats))
}
