//! Analytic score and loss gradients against central differences.

use kgforge::embed::{add_score_gradient, pair_loss, score_rows, Technique};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 8;
pub const SAMPLES: usize = 100;
const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;
const MARGIN: f64 = 1.0;

fn row(rng: &mut ChaCha8Rng, width: usize) -> Vec<f64> {
    (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff = analytic.iter().zip(numeric).map(|(a, n)| (a - n).powi(2)).sum::<f64>().sqrt();
    let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(numeric.iter().map(|n| n * n).sum::<f64>().sqrt());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

/// Central differences of `f` over a flat parameter vector.
fn numeric_gradient(params: &[f64], f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..p.len())
        .map(|i| {
            let x = p[i];
            p[i] = x + STEP;
            let up = f(&p);
            p[i] = x - STEP;
            let down = f(&p);
            p[i] = x;
            (up - down) / (2.0 * STEP)
        })
        .collect()
}

/// Gradient of the loss of one (positive, corrupted-tail) pair with respect
/// to h, r, t and the corrupted tail t', laid out as [h | r | t | t'].
/// Also reports whether the loss was active (nonzero gradient).
fn check_pair(technique: Technique, rng: &mut ChaCha8Rng) -> Option<(f64, bool)> {
    let w = technique.width(DIM);
    let params: Vec<f64> = (0..4).flat_map(|_| row(rng, w)).collect();
    let split = |p: &[f64]| -> [Vec<f64>; 4] { [0, 1, 2, 3].map(|k| p[k * w..(k + 1) * w].to_vec()) };
    let loss = |p: &[f64]| {
        let [h, r, t, tn] = split(p);
        pair_loss(technique, MARGIN, score_rows(technique, &h, &r, &t), score_rows(technique, &h, &r, &tn)).0
    };

    let [h, r, t, tn] = split(&params);
    let pos = score_rows(technique, &h, &r, &t);
    let neg = score_rows(technique, &h, &r, &tn);
    if technique.margin_based() && (MARGIN - pos + neg).abs() < 1e-3 {
        // the hinge has no derivative at its kink
        return None;
    }
    let (_, d_pos, d_neg) = pair_loss(technique, MARGIN, pos, neg);
    let (mut gh, mut gr, mut gt, mut gtn) = (vec![0.0; w], vec![0.0; w], vec![0.0; w], vec![0.0; w]);
    add_score_gradient(technique, (&h, &r, &t), d_pos, (&mut gh, &mut gr, &mut gt));
    let mut gh2 = vec![0.0; w];
    let mut gr2 = vec![0.0; w];
    add_score_gradient(technique, (&h, &r, &tn), d_neg, (&mut gh2, &mut gr2, &mut gtn));
    for i in 0..w {
        gh[i] += gh2[i];
        gr[i] += gr2[i];
    }
    let analytic: Vec<f64> = [gh, gr, gt, gtn].concat();
    Some((relative_error(&analytic, &numeric_gradient(&params, loss)), d_pos != 0.0))
}

fn check_score(technique: Technique, rng: &mut ChaCha8Rng) -> f64 {
    let w = technique.width(DIM);
    let params: Vec<f64> = (0..3).flat_map(|_| row(rng, w)).collect();
    let score = |p: &[f64]| score_rows(technique, &p[..w], &p[w..2 * w], &p[2 * w..]);
    let (mut gh, mut gr, mut gt) = (vec![0.0; w], vec![0.0; w], vec![0.0; w]);
    add_score_gradient(technique, (&params[..w], &params[w..2 * w], &params[2 * w..]), 1.0, (&mut gh, &mut gr, &mut gt));
    relative_error(&[gh, gr, gt].concat(), &numeric_gradient(&params, score))
}

/// Worst relative errors of the score gradient and of the pair-loss
/// gradient over [`SAMPLES`] draws each, and how many loss samples had a
/// nonzero gradient. Hinge samples within 1e-3 of the kink are redrawn.
pub struct GradientReport {
    pub score_error: f64,
    pub loss_error: f64,
    pub active: usize,
}

pub fn check_technique(technique: Technique, seed: u64) -> GradientReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut score_error: f64 = 0.0;
    for _ in 0..SAMPLES {
        score_error = score_error.max(check_score(technique, &mut rng));
    }
    let (mut checked, mut active) = (0, 0);
    let mut loss_error: f64 = 0.0;
    while checked < SAMPLES {
        if let Some((err, nonzero)) = check_pair(technique, &mut rng) {
            loss_error = loss_error.max(err);
            checked += 1;
            active += usize::from(nonzero);
        }
    }
    GradientReport { score_error, loss_error, active }
}
