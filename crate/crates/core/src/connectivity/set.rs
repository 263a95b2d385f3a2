//! Prune-and-regrow rewiring at fixed edge count.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rbm::Rbm;

/// What a rewire pass actually did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewireReport {
    pub active_before: usize,
    pub pruned: usize,
    pub regrown: usize,
    /// Edges that could not be regrown because no inactive slot was left
    /// (near-dense degenerate case).
    pub shortfall: usize,
}

/// One rewiring round: deactivates the `floor(zeta * E)` active non-frozen
/// connections with the smallest |w| (ties broken in row-major order), then
/// activates the same number of uniformly chosen slots that were inactive
/// before the prune, giving them fresh weights from U(-1, 1). Just-pruned
/// slots are not re-added in the same round; if fewer inactive slots exist
/// than edges pruned, the shortfall is reported.
pub fn epoch_rewire(rbm: &mut Rbm, zeta: f64, rng: &mut impl Rng) -> Result<RewireReport> {
    if !(0.0 < zeta && zeta < 1.0) {
        return Err(Error::InvalidArgument {
            name: "zeta",
            reason: format!("rewire fraction must lie in (0, 1), got {zeta}"),
        });
    }
    let w = &mut rbm.params.w;
    let conn = &mut rbm.connectivity;

    let mut active: Vec<(usize, usize)> = Vec::new();
    let mut inactive: Vec<(usize, usize)> = Vec::new();
    for ((i, j), &a) in conn.a.indexed_iter() {
        if conn.frozen[j] {
            continue;
        }
        if a != 0.0 {
            active.push((i, j));
        } else {
            inactive.push((i, j));
        }
    }

    let active_before = active.len();
    let n_prune = (zeta * active_before as f64).floor() as usize;
    active.sort_by(|&(i1, j1), &(i2, j2)| {
        w[[i1, j1]]
            .abs()
            .total_cmp(&w[[i2, j2]].abs())
            .then(i1.cmp(&i2))
            .then(j1.cmp(&j2))
    });
    for &(i, j) in &active[..n_prune] {
        conn.a[[i, j]] = 0.0;
        conn.a_prime[[i, j]] = 0.0;
    }

    let n_regrow = n_prune.min(inactive.len());
    // Partial Fisher-Yates: the first n_regrow entries become a uniform
    // sample without replacement.
    for k in 0..n_regrow {
        let pick = k + rng.random_range(0..inactive.len() - k);
        inactive.swap(k, pick);
        let (i, j) = inactive[k];
        conn.a[[i, j]] = 1.0;
        conn.a_prime[[i, j]] = 1.0;
        w[[i, j]] = rng.random_range(-1.0..1.0);
    }

    Ok(RewireReport {
        active_before,
        pruned: n_prune,
        regrown: n_regrow,
        shortfall: n_prune - n_regrow,
    })
}
