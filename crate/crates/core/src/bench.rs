//! Random conjugate pairs and timing runs.
//!
//! `g = (b, x)` has `|x|_1` equal to the requested length and `b` integral
//! with entries in `[-3, 3]`. The hidden conjugator `h = (c, y)` has
//! `|y|_1 <= 3` and `c = M^-j w` with `j <= 2`, `w ∈ [-3, 3]^s`.

use std::io::Write;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conjugacy::{csp_solve, csp_solve_parallel, CspInstance, CspOutcome};
use crate::error::Error;
use crate::linalg::{Int, Rat};
use crate::presentation::GroupSpec;
use crate::words::{sd_conjugate, SemidirectElem};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform-ish vector in `Z^n` with l1-norm exactly `len`.
pub fn random_exponents<R: Rng>(rng: &mut R, n: usize, len: u64) -> Vec<i64> {
    let mut x = vec![0i64; n];
    for _ in 0..len {
        let i = rng.gen_range(0..n);
        x[i] += 1;
    }
    for e in &mut x {
        if rng.gen_bool(0.5) {
            *e = -*e;
        }
    }
    x
}

fn small_int_vec<R: Rng>(rng: &mut R, s: usize) -> Vec<Rat> {
    (0..s)
        .map(|_| Rat::from_integer(Int::from(rng.gen_range(-3i64..=3))))
        .collect()
}

/// A conjugate pair `(g, h g h^-1)` together with the hidden `h`.
#[derive(Clone, Debug)]
pub struct Pair {
    pub g: SemidirectElem,
    pub g1: SemidirectElem,
    pub h: SemidirectElem,
}

pub fn random_pair<R: Rng>(spec: &GroupSpec, len: u64, rng: &mut R) -> Pair {
    let (n, s) = (spec.n(), spec.s());
    let g = SemidirectElem::new(small_int_vec(rng, s), random_exponents(rng, n, len));
    let y_len = rng.gen_range(0..=3);
    let y = random_exponents(rng, n, y_len);
    let j = rng.gen_range(0..=2u64);
    let c = spec
        .action()
        .product_inverse()
        .pow(j)
        .mul_vec(&small_int_vec(rng, s));
    let h = SemidirectElem::new(c, y);
    let g1 = sd_conjugate(spec, &h, &g);
    Pair { g, g1, h }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub length: u64,
    pub trial: usize,
    pub seconds: f64,
    /// l1-norm of the found `y`, or -1 when none was found.
    pub conjugator_len: i64,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub lengths: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    pub max_len: u64,
    pub threads: Option<usize>,
}

pub fn run_bench(spec: &GroupSpec, cfg: &BenchConfig) -> Result<Vec<BenchRow>, Error> {
    let mut rng = rng_from_seed(cfg.seed);
    let mut rows = Vec::new();
    for &length in &cfg.lengths {
        for trial in 0..cfg.trials {
            let pair = random_pair(spec, length, &mut rng);
            let start = Instant::now();
            let inst = CspInstance::new(spec, pair.g, pair.g1)?;
            let out = match cfg.threads {
                Some(k) => csp_solve_parallel(&inst, cfg.max_len, k)?,
                None => csp_solve(&inst, cfg.max_len)?,
            };
            let seconds = start.elapsed().as_secs_f64();
            let conjugator_len = match out {
                CspOutcome::Found(c) => c.y_len() as i64,
                CspOutcome::NotFound { .. } => -1,
            };
            rows.push(BenchRow {
                length,
                trial,
                seconds,
                conjugator_len,
            });
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `ln(mean seconds)` against `ln(length)`.
pub fn loglog_slope(rows: &[BenchRow]) -> Option<f64> {
    let mut lengths: Vec<u64> = rows.iter().map(|r| r.length).filter(|&l| l > 0).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 2 {
        return None;
    }
    let points: Vec<(f64, f64)> = lengths
        .iter()
        .map(|&l| {
            let times: Vec<f64> = rows
                .iter()
                .filter(|r| r.length == l)
                .map(|r| r.seconds)
                .collect();
            let mean = times.iter().sum::<f64>() / times.len() as f64;
            ((l as f64).ln(), mean.max(1e-9).ln())
        })
        .collect();
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
