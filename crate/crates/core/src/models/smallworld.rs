//! Small-world graphs on the n×n torus: nearest-neighbour edges plus random
//! long edges with probability a·r^{−γ}.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::{bern, kappa};
use crate::error::{Error, Result};
use crate::graph::{bits_for, to_letters, GraphWithNames};
use crate::numeric::NeumaierSum;
use crate::sampling::for_each_success;

/// Exact calibration constant and its comparison with the asymptotic form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub a: f64,
    /// S_n, so that a·S_n = α.
    pub s_n: f64,
    /// a divided by its large-N approximation (κ_γ α N^{−(2−γ)/2} for γ < 2,
    /// α/(π ln N) for γ = 2); absent for γ > 2.
    pub asymptotic_ratio: Option<f64>,
}

fn check_side(side: u64) -> Result<u64> {
    if side < 5 || side % 2 == 0 {
        return Err(Error::validation(format!("torus side must be odd and >= 5, got {side}")));
    }
    Ok((side - 1) / 2)
}

/// S_n = 4 Σ_{i,j=1..h} (i²+j²)^{−γ/2} + 4 Σ_{i=2..h} i^{−γ}, h = (n−1)/2.
fn s_n(h: u64, gamma: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    let e = -gamma / 2.0;
    for i in 1..=h {
        for j in 1..=h {
            acc.add(4.0 * ((i * i + j * j) as f64).powf(e));
        }
    }
    for i in 2..=h {
        acc.add(4.0 * (i as f64).powf(-gamma));
    }
    acc.value()
}

/// Solves a·S_n = α exactly for the given torus side.
pub fn calibrate_a(side: u64, gamma: f64, alpha: f64) -> Result<Calibration> {
    let h = check_side(side)?;
    if !(gamma > 0.0) || !(alpha >= 0.0) {
        return Err(Error::validation("calibration needs gamma > 0 and alpha >= 0"));
    }
    let s = s_n(h, gamma);
    let a = alpha / s;
    if a * 2f64.powf(-gamma / 2.0) > 1.0 {
        return Err(Error::model(format!(
            "edge probability a*2^(-gamma/2) = {} exceeds 1",
            a * 2f64.powf(-gamma / 2.0)
        )));
    }
    let n = (side * side) as f64;
    let asymptotic = if gamma < 2.0 {
        Some(kappa(gamma)? * alpha * n.powf(-(2.0 - gamma) / 2.0))
    } else if gamma == 2.0 {
        Some(alpha / (PI * n.ln()))
    } else {
        None
    };
    Ok(Calibration {
        a,
        s_n: s,
        asymptotic_ratio: asymptotic.filter(|&x| x > 0.0).map(|x| a / x),
    })
}

/// (N/2)·[4 Σ_{i,j≥1} ℰ(a r^{−γ}) + 4 Σ_{i≥2} ℰ(a i^{−γ})] with calibrated a.
pub fn smallworld_entropy(side: u64, alpha: f64, gamma: f64) -> Result<f64> {
    let h = check_side(side)?;
    let a = calibrate_a(side, gamma, alpha)?.a;
    let e = -gamma / 2.0;
    let mut acc = NeumaierSum::new();
    for i in 1..=h {
        for j in 1..=h {
            acc.add(4.0 * bern(a * ((i * i + j * j) as f64).powf(e)));
        }
    }
    for i in 2..=h {
        acc.add(4.0 * bern(a * (i as f64).powf(-gamma)));
    }
    Ok((side * side) as f64 / 2.0 * acc.value())
}

/// Vertex (i, j) has index i·n + j and the name bits(i) ++ bits(j).
fn torus_names(side: u64) -> (u32, Vec<u8>) {
    let half = bits_for(side);
    let l = 2 * half;
    let mut letters = vec![0u8; (side * side * l as u64) as usize];
    for (v, chunk) in letters.chunks_mut(l as usize).enumerate() {
        let (i, j) = (v as u64 / side, v as u64 % side);
        to_letters(i, 2, half, &mut chunk[..half as usize]);
        to_letters(j, 2, half, &mut chunk[half as usize..]);
    }
    (l, letters)
}

pub(super) fn generate<R: Rng + ?Sized>(rng: &mut R, side: u64, alpha: f64, gamma: f64) -> Result<GraphWithNames> {
    let h = check_side(side)? as i64;
    let a = calibrate_a(side, gamma, alpha)?.a;
    let n = side as i64;
    let count = (side * side) as u64;
    let idx = |i: i64, j: i64| (i.rem_euclid(n) * n + j.rem_euclid(n)) as u32;
    let mut edges = Vec::with_capacity(2 * count as usize + (alpha * count as f64) as usize);
    for v in 0..count as i64 {
        let (i, j) = (v / n, v % n);
        for t in [idx(i + 1, j), idx(i, j + 1)] {
            let u = v as u32;
            edges.push((u.min(t), u.max(t)));
        }
    }
    // one canonical representative per ± offset pair
    for di in 0..=h {
        for dj in -h..=h {
            if di == 0 && dj <= 0 {
                continue;
            }
            let r2 = di * di + dj * dj;
            if r2 == 1 {
                continue;
            }
            let p = a * (r2 as f64).powf(-gamma / 2.0);
            for_each_success(rng, count, p, |v| {
                let (i, j) = (v as i64 / n, v as i64 % n);
                let t = idx(i + di, j + dj);
                let u = v as u32;
                edges.push((u.min(t), u.max(t)));
            });
        }
    }
    edges.sort_unstable();
    let (l, letters) = torus_names(side);
    Ok(GraphWithNames::from_sorted_parts(2, l, letters, edges, false))
}
