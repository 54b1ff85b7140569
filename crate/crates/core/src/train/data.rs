use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Indices of the training, validation and test samples.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn by_class(labels: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    classes
}

/// Stratified split with ratios `train:validation:test`. Each class is
/// shuffled and cut proportionally; rounding leftovers go to the parts with
/// the largest remainders, rotating between classes so that per-class counts
/// within a part differ by at most one from the exact proportion.
pub fn stratified_split(labels: &[usize], ratios: [usize; 3], seed: u64) -> Result<Split> {
    let total: usize = ratios.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParams(
            "split ratios must not all be zero".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts: [Vec<usize>; 3] = Default::default();
    for (ci, (_, mut idx)) in by_class(labels).into_iter().enumerate() {
        idx.shuffle(&mut rng);
        let m = idx.len();
        let mut counts = [0usize; 3];
        let mut rems = [(0usize, 0usize); 3];
        for p in 0..3 {
            counts[p] = m * ratios[p] / total;
            rems[p] = (m * ratios[p] % total, p);
        }
        let left = m - counts.iter().sum::<usize>();
        // largest remainders get the leftovers; ties rotate with the class index
        rems.sort_by(|a, b| {
            b.0.cmp(&a.0)
                .then(((a.1 + 3 - ci % 3) % 3).cmp(&((b.1 + 3 - ci % 3) % 3)))
        });
        for &(_, p) in rems.iter().take(left) {
            counts[p] += 1;
        }
        let mut it = idx.into_iter();
        for p in 0..3 {
            parts[p].extend(it.by_ref().take(counts[p]));
        }
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    let [train, validation, test] = parts;
    Ok(Split {
        train,
        validation,
        test,
    })
}

/// One epoch of batches that cycle through the classes: each class's
/// samples are shuffled, then drawn round-robin in a shuffled class order.
pub fn balanced_batches<R: Rng + ?Sized>(
    indices: &[usize],
    labels: &[usize],
    batch_size: usize,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let batch_size = batch_size.max(1);
    let sub: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();
    let mut queues: Vec<Vec<usize>> = by_class(&sub)
        .into_values()
        .map(|pos| {
            let mut q: Vec<usize> = pos.into_iter().map(|p| indices[p]).collect();
            q.shuffle(rng);
            q.reverse();
            q
        })
        .collect();
    let mut order = Vec::with_capacity(indices.len());
    while queues.iter().any(|q| !q.is_empty()) {
        let mut classes: Vec<usize> = (0..queues.len())
            .filter(|&c| !queues[c].is_empty())
            .collect();
        classes.shuffle(rng);
        for c in classes {
            order.extend(queues[c].pop());
        }
    }
    order.chunks(batch_size).map(<[usize]>::to_vec).collect()
}

/// Per-class counts of a subset.
pub fn class_counts(indices: &[usize], labels: &[usize], classes: usize) -> Vec<usize> {
    let mut counts = vec![0; classes];
    for &i in indices {
        counts[labels[i]] += 1;
    }
    counts
}
