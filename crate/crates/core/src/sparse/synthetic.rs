//! Synthetic symmetric positive definite test matrices.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::CsrMatrix;

/// Standard 5-point Poisson matrix on a `k x k` grid with Dirichlet
/// boundaries: `k^2 x k^2`, diagonal 4, `-1` couplings to grid neighbours.
pub fn laplacian_2d(k: usize) -> CsrMatrix {
    assert!(k >= 2, "laplacian_2d needs k >= 2");
    let n = k * k;
    let mut t = Vec::with_capacity(5 * n);
    for gy in 0..k {
        for gx in 0..k {
            let i = gy * k + gx;
            if gy > 0 {
                t.push((i, i - k, -1.0));
            }
            if gx > 0 {
                t.push((i, i - 1, -1.0));
            }
            t.push((i, i, 4.0));
            if gx + 1 < k {
                t.push((i, i + 1, -1.0));
            }
            if gy + 1 < k {
                t.push((i, i + k, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, t).expect("stencil indices are in range")
}

/// `D L D` for the 2-D Laplacian `L` and a random diagonal `D` whose squared
/// entries span `decades` orders of magnitude. The diagonal ratio alone
/// certifies `cond >= 4^-1 * 10^decades * 4`, i.e. at least `10^decades`.
pub fn scaled_laplacian_2d(k: usize, decades: f64, seed: u64) -> CsrMatrix {
    let l = laplacian_2d(k);
    let n = l.n_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d: Vec<f64> = (0..n).map(|_| 10f64.powf(-0.5 * decades * rng.gen::<f64>())).collect();
    // pin the extremes so the spread is exact
    if n >= 2 {
        d[0] = 1.0;
        d[n - 1] = 10f64.powf(-0.5 * decades);
    }
    let t = l.triplets().map(|(i, j, v)| (i, j, d[i] * v * d[j]));
    CsrMatrix::from_triplets(n, n, t.collect::<Vec<_>>()).expect("same pattern")
}

/// Random symmetric, strictly diagonally dominant (hence SPD) matrix with
/// off-diagonal fill probability `density` and values in `(-1, 1)`.
pub fn random_spd(n: usize, density: f64, seed: u64) -> CsrMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::new();
    let mut row_abs = vec![0.0f64; n];
    for i in 0..n {
        for j in 0..i {
            if rng.gen::<f64>() < density {
                let v: f64 = rng.gen_range(-1.0..1.0);
                t.push((i, j, v));
                t.push((j, i, v));
                row_abs[i] += v.abs();
                row_abs[j] += v.abs();
            }
        }
    }
    for (i, r) in row_abs.iter().enumerate() {
        t.push((i, i, r + rng.gen_range(0.5..1.5)));
    }
    CsrMatrix::from_triplets(n, n, t).expect("indices are in range")
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid synthetic matrix `{0}`; expected identity:N, laplacian2d:K, scaled-laplacian2d:K:DECADES:SEED or random-spd:N:DENSITY:SEED")]
pub struct SyntheticParseError(pub String);

/// A textual recipe for a synthetic matrix, e.g. `laplacian2d:64`.
#[derive(Clone, Debug, PartialEq)]
pub enum Synthetic {
    Identity(usize),
    Laplacian2d(usize),
    ScaledLaplacian2d { k: usize, decades: f64, seed: u64 },
    RandomSpd { n: usize, density: f64, seed: u64 },
}

impl Synthetic {
    pub fn build(&self) -> CsrMatrix {
        match *self {
            Synthetic::Identity(n) => CsrMatrix::identity(n),
            Synthetic::Laplacian2d(k) => laplacian_2d(k),
            Synthetic::ScaledLaplacian2d { k, decades, seed } => scaled_laplacian_2d(k, decades, seed),
            Synthetic::RandomSpd { n, density, seed } => random_spd(n, density, seed),
        }
    }
}

impl FromStr for Synthetic {
    type Err = SyntheticParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SyntheticParseError(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |p: &str| p.parse::<usize>().map_err(|_| err());
        let float = |p: &str| p.parse::<f64>().ok().filter(|x| x.is_finite() && *x >= 0.0).ok_or_else(err);
        let seed = |p: &str| p.parse::<u64>().map_err(|_| err());
        let spec = match parts.as_slice() {
            ["identity", n] => Synthetic::Identity(int(n)?),
            ["laplacian2d", k] => Synthetic::Laplacian2d(int(k)?),
            ["scaled-laplacian2d", k, d, s] => {
                Synthetic::ScaledLaplacian2d { k: int(k)?, decades: float(d)?, seed: seed(s)? }
            }
            ["random-spd", n, d, s] => Synthetic::RandomSpd { n: int(n)?, density: float(d)?, seed: seed(s)? },
            _ => return Err(err()),
        };
        let ok = match spec {
            Synthetic::Identity(n) | Synthetic::RandomSpd { n, .. } => n >= 1,
            Synthetic::Laplacian2d(k) | Synthetic::ScaledLaplacian2d { k, .. } => k >= 2,
        };
        ok.then_some(spec).ok_or_else(err)
    }
}

impl fmt::Display for Synthetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Synthetic::Identity(n) => write!(f, "identity:{n}"),
            Synthetic::Laplacian2d(k) => write!(f, "laplacian2d:{k}"),
            Synthetic::ScaledLaplacian2d { k, decades, seed } => {
                write!(f, "scaled-laplacian2d:{k}:{decades}:{seed}")
            }
            Synthetic::RandomSpd { n, density, seed } => write!(f, "random-spd:{n}:{density}:{seed}"),
        }
    }
}
