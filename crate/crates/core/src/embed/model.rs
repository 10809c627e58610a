use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Technique;

/// Entity and relation tables, row-major. Complex techniques store each row
/// as `d` real parts followed by `d` imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingModel {
    pub technique: Technique,
    pub dim: usize,
    pub entities: Vec<f64>,
    pub relations: Vec<f64>,
}

impl EmbeddingModel {
    /// All-zero tables.
    pub fn zeros(technique: Technique, dim: usize, num_entities: usize, num_relations: usize) -> Self {
        let width = technique.width(dim);
        EmbeddingModel {
            technique,
            dim,
            entities: vec![0.0; num_entities * width],
            relations: vec![0.0; num_relations * width],
        }
    }

    /// Uniform initialisation in ±6/√d for TransE (entities then
    /// normalised), ±1/√d otherwise; RotatE relations start as random unit
    /// phases.
    pub fn random(technique: Technique, dim: usize, num_entities: usize, num_relations: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut m = Self::zeros(technique, dim, num_entities, num_relations);
        let bound = match technique {
            Technique::TransE => 6.0 / (dim as f64).sqrt(),
            _ => 1.0 / (dim as f64).sqrt(),
        };
        for x in m.entities.iter_mut() {
            *x = rng.gen_range(-bound..bound);
        }
        match technique {
            Technique::RotatE => {
                for row in m.relations.chunks_mut(2 * dim) {
                    for i in 0..dim {
                        let phase: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                        row[i] = phase.cos();
                        row[dim + i] = phase.sin();
                    }
                }
            }
            _ => {
                for x in m.relations.iter_mut() {
                    *x = rng.gen_range(-bound..bound);
                }
            }
        }
        if technique == Technique::TransE {
            m.normalize_entities();
        }
        m
    }

    pub fn width(&self) -> usize {
        self.technique.width(self.dim)
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len() / self.width()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len() / self.width()
    }

    pub fn entity(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.entities[i * w..(i + 1) * w]
    }

    pub fn relation(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.relations[i * w..(i + 1) * w]
    }

    pub fn score(&self, h: usize, r: usize, t: usize) -> f64 {
        score_rows(self.technique, self.entity(h), self.relation(r), self.entity(t))
    }

    pub fn is_finite(&self) -> bool {
        self.entities.iter().chain(&self.relations).all(|x| x.is_finite())
    }

    /// Scale every entity row to unit L2 norm (zero rows stay zero).
    pub fn normalize_entities(&mut self) {
        let w = self.width();
        for row in self.entities.chunks_mut(w) {
            normalize_row(row);
        }
    }

    /// Project every complex relation entry onto the unit circle.
    pub fn project_relations(&mut self) {
        let d = self.dim;
        for row in self.relations.chunks_mut(2 * d) {
            project_unit_modulus(row, d);
        }
    }

    /// Largest deviation of |r_i| from 1 over all RotatE relation entries.
    pub fn max_modulus_error(&self) -> f64 {
        let d = self.dim;
        self.relations
            .chunks(2 * d)
            .flat_map(|row| (0..d).map(move |i| (row[i].hypot(row[d + i]) - 1.0).abs()))
            .fold(0.0, f64::max)
    }
}

pub(super) fn normalize_row(row: &mut [f64]) {
    let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in row {
            *x /= norm;
        }
    }
}

pub(super) fn project_unit_modulus(row: &mut [f64], d: usize) {
    for i in 0..d {
        let m = row[i].hypot(row[d + i]);
        if m > 0.0 {
            row[i] /= m;
            row[d + i] /= m;
        } else {
            row[i] = 1.0;
            row[d + i] = 0.0;
        }
    }
}

/// Plausibility of (h, r, t); higher is more plausible.
pub fn score_rows(technique: Technique, h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    match technique {
        Technique::TransE => {
            -h.iter().zip(r).zip(t).map(|((h, r), t)| (h + r - t).powi(2)).sum::<f64>().sqrt()
        }
        // h * t first: swapping h and t then gives bit-identical scores
        Technique::DistMult => h.iter().zip(r).zip(t).map(|((h, r), t)| h * t * r).sum(),
        Technique::ComplEx => {
            let d = h.len() / 2;
            (0..d)
                .map(|i| {
                    let (a, b, c, dd, e, f) = (h[i], h[d + i], r[i], r[d + i], t[i], t[d + i]);
                    (a * c - b * dd) * e + (a * dd + b * c) * f
                })
                .sum()
        }
        Technique::RotatE => {
            let d = h.len() / 2;
            -(0..d)
                .map(|i| {
                    let (a, b, c, dd, e, f) = (h[i], h[d + i], r[i], r[d + i], t[i], t[d + i]);
                    (a * c - b * dd - e).powi(2) + (a * dd + b * c - f).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        }
    }
}

/// Gradient of the score with respect to the h, r and t rows, added into
/// `gh`, `gr`, `gt` after scaling by `weight`.
pub fn add_score_gradient(
    technique: Technique,
    (h, r, t): (&[f64], &[f64], &[f64]),
    weight: f64,
    (gh, gr, gt): (&mut [f64], &mut [f64], &mut [f64]),
) {
    match technique {
        Technique::TransE => {
            let norm = h.iter().zip(r).zip(t).map(|((h, r), t)| (h + r - t).powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                return;
            }
            for i in 0..h.len() {
                let g = weight * (h[i] + r[i] - t[i]) / norm;
                gh[i] -= g;
                gr[i] -= g;
                gt[i] += g;
            }
        }
        Technique::DistMult => {
            for i in 0..h.len() {
                gh[i] += weight * r[i] * t[i];
                gr[i] += weight * h[i] * t[i];
                gt[i] += weight * h[i] * r[i];
            }
        }
        Technique::ComplEx => {
            let d = h.len() / 2;
            for i in 0..d {
                let (a, b, c, dd, e, f) = (h[i], h[d + i], r[i], r[d + i], t[i], t[d + i]);
                gh[i] += weight * (c * e + dd * f);
                gh[d + i] += weight * (c * f - dd * e);
                gr[i] += weight * (a * e + b * f);
                gr[d + i] += weight * (a * f - b * e);
                gt[i] += weight * (a * c - b * dd);
                gt[d + i] += weight * (a * dd + b * c);
            }
        }
        Technique::RotatE => {
            let d = h.len() / 2;
            let mut ure = vec![0.0; d];
            let mut uim = vec![0.0; d];
            for i in 0..d {
                let (a, b, c, dd, e, f) = (h[i], h[d + i], r[i], r[d + i], t[i], t[d + i]);
                ure[i] = a * c - b * dd - e;
                uim[i] = a * dd + b * c - f;
            }
            let norm = ure.iter().chain(&uim).map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return;
            }
            let k = weight / norm;
            for i in 0..d {
                let (a, b, c, dd) = (h[i], h[d + i], r[i], r[d + i]);
                let (u, v) = (ure[i], uim[i]);
                gh[i] -= k * (u * c + v * dd);
                gh[d + i] -= k * (v * c - u * dd);
                gr[i] -= k * (u * a + v * b);
                gr[d + i] -= k * (v * a - u * b);
                gt[i] += k * u;
                gt[d + i] += k * v;
            }
        }
    }
}

pub(super) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(super) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Loss of one (positive, negative) score pair and its derivatives with
/// respect to the two scores. Margin ranking for TransE and RotatE,
/// softplus (logistic) for DistMult and ComplEx.
pub fn pair_loss(technique: Technique, margin: f64, pos: f64, neg: f64) -> (f64, f64, f64) {
    if technique.margin_based() {
        let l = margin - pos + neg;
        if l > 0.0 {
            (l, -1.0, 1.0)
        } else {
            (0.0, 0.0, 0.0)
        }
    } else {
        (softplus(-pos) + softplus(neg), -sigmoid(-pos), sigmoid(neg))
    }
}
