//! Named strategies for choosing the planted partition of a given host.

use std::fmt;
use std::str::FromStr;

use hostcolor::forge::{forge_ra_adversary, ForgeError};
use hostcolor::spectral::{extreme_eigenpairs, full_spectrum_dense, SpectralError, ITERATIVE_TOL};
use hostcolor::{Coloring, Graph, Seed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdversaryError {
    #[error("unknown adversary `{0}` (expected id-blocks, degree-sorted, spectral or ra-forge)")]
    Unknown(String),
    #[error("{name} needs k = {need}, got {k}")]
    WrongK { name: Adversary, need: u32, k: u32 },
    #[error("host has {n} vertices, fewer than k = {k}")]
    TooSmall { n: usize, k: u32 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Forge(#[from] ForgeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// Consecutive vertex ids.
    IdBlocks,
    /// Round-robin by descending host degree.
    DegreeSorted,
    /// Consecutive blocks along the host's second eigenvector.
    Spectral,
    /// Isolates an induced triangle of the host.
    RaForge,
}

pub const MENU: [Adversary; 4] = [Adversary::IdBlocks, Adversary::DegreeSorted, Adversary::Spectral, Adversary::RaForge];

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Adversary::IdBlocks => "id-blocks",
            Adversary::DegreeSorted => "degree-sorted",
            Adversary::Spectral => "spectral",
            Adversary::RaForge => "ra-forge",
        })
    }
}

impl FromStr for Adversary {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MENU.into_iter().find(|a| a.to_string() == s).ok_or_else(|| AdversaryError::Unknown(s.to_string()))
    }
}

/// Class of each rank when `n` ranked vertices are cut into `k` consecutive
/// balanced blocks, larger blocks first.
fn blocks_by_rank(order: &[usize], k: u32) -> Coloring {
    let n = order.len();
    let k_us = k as usize;
    let mut assign = vec![0u32; n];
    let mut rank = 0;
    for c in 0..k_us {
        let size = n / k_us + usize::from(c < n % k_us);
        for &v in &order[rank..rank + size] {
            assign[v] = c as u32 + 1;
        }
        rank += size;
    }
    Coloring::new(k, assign).expect("block labels in range")
}

pub fn adversary_menu(adv: Adversary, host: &Graph, k: u32, seed: &Seed) -> Result<Coloring, AdversaryError> {
    let n = host.n();
    if n < k as usize || k == 0 {
        return Err(AdversaryError::TooSmall { n, k });
    }
    match adv {
        Adversary::IdBlocks => Ok(blocks_by_rank(&(0..n).collect::<Vec<_>>(), k)),
        Adversary::DegreeSorted => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| (std::cmp::Reverse(host.degree(v)), v));
            let mut assign = vec![0u32; n];
            for (r, &v) in order.iter().enumerate() {
                assign[v] = (r % k as usize) as u32 + 1;
            }
            Ok(Coloring::new(k, assign).expect("round-robin labels in range"))
        }
        Adversary::Spectral => {
            let spectrum = if n <= 64 { full_spectrum_dense(host)? } else { extreme_eigenpairs(host, 0, 2, ITERATIVE_TOL)? };
            let x = &spectrum.by_rank(1).expect("second eigenvector computed").vector;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
            Ok(blocks_by_rank(&order, k))
        }
        Adversary::RaForge => {
            if k != 3 {
                return Err(AdversaryError::WrongK { name: adv, need: 3, k });
            }
            Ok(forge_ra_adversary(host, &Graph::complete(3), seed)?.planted)
        }
    }
}
