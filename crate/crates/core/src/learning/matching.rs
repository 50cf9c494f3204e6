use crate::neuron::SpikeTrain;

/// Result of pairing actual output spikes with desired ones.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(actual index, desired index)`, increasing in both.
    pub pairs: Vec<(usize, usize)>,
    pub unmatched_actual: SpikeTrain,
    pub unmatched_desired: SpikeTrain,
}

impl Matching {
    /// Every desired spike matched and no stray actual spike.
    pub fn is_complete(&self) -> bool {
        self.unmatched_actual.is_empty() && self.unmatched_desired.is_empty()
    }
}

/// Greedy in-order matching: each actual spike takes the earliest unmatched
/// desired spike within `±tol`.
///
/// Desired spikes that fall more than `tol` behind the current actual spike
/// can never be matched later, so one forward pass suffices and the result
/// has the largest possible number of pairs.
pub fn match_spikes(actual: &SpikeTrain, desired: &SpikeTrain, tol: f64) -> Matching {
    let (a, d) = (actual.times(), desired.times());
    let mut pairs = Vec::new();
    let mut stray = Vec::new();
    let mut missed = Vec::new();
    let mut j = 0;
    for (i, &t) in a.iter().enumerate() {
        while j < d.len() && d[j] < t - tol {
            missed.push(d[j]);
            j += 1;
        }
        if j < d.len() && (d[j] - t).abs() <= tol {
            pairs.push((i, j));
            j += 1;
        } else {
            stray.push(t);
        }
    }
    missed.extend_from_slice(&d[j..]);
    Matching {
        pairs,
        unmatched_actual: SpikeTrain::from_sorted_unchecked(stray),
        unmatched_desired: SpikeTrain::from_sorted_unchecked(missed),
    }
}
