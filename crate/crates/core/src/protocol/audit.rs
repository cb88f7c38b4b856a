use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::transcript::Transcript;
use super::ProtocolError;
use crate::brickwork::{BrickworkLayout, Coord};
use crate::simcore::Octant;

pub const MIN_SAMPLES_PER_GROUP: usize = 1_000;
pub const SIGNIFICANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaSample {
    pub coord: Coord,
    pub phi: Octant,
    pub delta: Octant,
}

/// Announced angles of one run paired with the layout's true angles.
pub fn delta_samples(transcript: &Transcript, layout: &BrickworkLayout) -> Vec<DeltaSample> {
    transcript.deltas().into_iter().map(|(coord, delta)| DeltaSample { coord, phi: layout.phi(coord), delta }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub coord: Coord,
    pub phi: Octant,
    pub samples: u64,
    pub counts: [u64; 8],
    pub chi_square: f64,
    pub p_value: f64,
}

impl GroupStats {
    pub fn frequencies(&self) -> [f64; 8] {
        self.counts.map(|c| c as f64 / self.samples as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlindnessReport {
    pub groups: Vec<GroupStats>,
    pub samples: u64,
    /// Plug-in estimate of I(φ; δ) over all samples, in bits.
    pub mutual_information_bits: f64,
    /// Expected plug-in value under independence, `(|Φ|−1)·7 / (2N ln 2)`.
    pub mutual_information_bias_bits: f64,
    /// Per-group threshold: the significance split evenly over the groups.
    pub per_group_threshold: f64,
    pub passed: bool,
}

impl BlindnessReport {
    pub fn min_p_value(&self) -> f64 {
        self.groups.iter().map(|g| g.p_value).fold(1.0, f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} samples in {} groups; I(φ;δ) = {:.2e} bits (independence bias {:.2e}); min p = {:.4} vs {:.4}: {}\n",
            self.samples,
            self.groups.len(),
            self.mutual_information_bits,
            self.mutual_information_bias_bits,
            self.min_p_value(),
            self.per_group_threshold,
            if self.passed { "uniform" } else { "REJECTED" }
        );
        for g in &self.groups {
            let f: Vec<String> = g.frequencies().iter().map(|v| format!("{v:.3}")).collect();
            s += &format!("  {} φ={} n={} χ²={:.2} p={:.4} [{}]\n", g.coord, g.phi, g.samples, g.chi_square, g.p_value, f.join(" "));
        }
        s
    }
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts.filter(|&c| c > 0).map(|c| c as f64 / n).map(|p| -p * p.log2()).sum()
}

/// Per (coordinate, φ) group: χ² of the announced δ against uniform over
/// the octants. Passes when no group is rejected.
pub fn blindness_audit(samples: &[DeltaSample]) -> Result<BlindnessReport, ProtocolError> {
    let mut groups: BTreeMap<(Coord, Octant), [u64; 8]> = BTreeMap::new();
    for s in samples {
        groups.entry((s.coord, s.phi)).or_default()[s.delta.index() as usize] += 1;
    }
    if groups.is_empty() {
        return Err(ProtocolError::InsufficientSamples { coord: Coord::new(0, 0), got: 0, need: MIN_SAMPLES_PER_GROUP });
    }
    let chi = ChiSquared::new(7.0).expect("7 degrees of freedom");
    let threshold = SIGNIFICANCE / groups.len() as f64;
    let mut out = Vec::with_capacity(groups.len());
    for (&(coord, phi), counts) in &groups {
        let n: u64 = counts.iter().sum();
        if (n as usize) < MIN_SAMPLES_PER_GROUP {
            return Err(ProtocolError::InsufficientSamples { coord, got: n as usize, need: MIN_SAMPLES_PER_GROUP });
        }
        let e = n as f64 / 8.0;
        let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        out.push(GroupStats { coord, phi, samples: n, counts: *counts, chi_square: stat, p_value: 1.0 - chi.cdf(stat) });
    }

    let n = samples.len() as f64;
    let mut by_phi = [0u64; 8];
    let mut by_delta = [0u64; 8];
    let mut joint = [[0u64; 8]; 8];
    for s in samples {
        by_phi[s.phi.index() as usize] += 1;
        by_delta[s.delta.index() as usize] += 1;
        joint[s.phi.index() as usize][s.delta.index() as usize] += 1;
    }
    let mi = entropy(by_phi.into_iter(), n) + entropy(by_delta.into_iter(), n) - entropy(joint.iter().flatten().copied(), n);
    let phis = by_phi.iter().filter(|&&c| c > 0).count() as f64;
    let bias = (phis - 1.0) * 7.0 / (2.0 * n * std::f64::consts::LN_2);
    let passed = out.iter().all(|g| g.p_value > threshold);
    Ok(BlindnessReport {
        groups: out,
        samples: samples.len() as u64,
        mutual_information_bits: mi.max(0.0),
        mutual_information_bias_bits: bias,
        per_group_threshold: threshold,
        passed,
    })
}
