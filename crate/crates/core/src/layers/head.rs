use alloc::vec;
use alloc::vec::Vec;

use super::Activation;
use crate::error::{Error, Result};
#[allow(unused_imports)] // unused whenever std is linked in
use num_traits::Float;

/// Per-channel max followed by per-channel mean: `[max_0..max_c, mean_0..mean_c]`.
pub fn pool(scalars: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = scalars.first().map_or(0, |r| r.len());
    if n == 0 {
        return Err(Error::Empty("graph"));
    }
    if let Some(r) = scalars.iter().find(|r| r.len() != n) {
        return Err(Error::ShapeMismatch {
            expected: n,
            found: r.len(),
        });
    }
    let mut out = Vec::with_capacity(2 * scalars.len());
    out.extend(
        scalars
            .iter()
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
    );
    out.extend(scalars.iter().map(|r| r.iter().sum::<f64>() / n as f64));
    Ok(out)
}

/// Two dense layers with a leaky ReLU in between; `w1` is `hidden × input`
/// and `w2` is `classes × hidden`, both row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadParams {
    pub input: usize,
    pub hidden: usize,
    pub classes: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub activation: Activation,
}

impl HeadParams {
    pub fn zeros(input: usize, hidden: usize, classes: usize) -> Self {
        Self {
            input,
            hidden,
            classes,
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; classes * hidden],
            b2: vec![0.0; classes],
            activation: Activation::default(),
        }
    }

    pub fn param_count(input: usize, hidden: usize, classes: usize) -> usize {
        hidden * input + hidden + classes * hidden + classes
    }

    pub fn validate(&self) -> Result<()> {
        if self.input == 0 || self.hidden == 0 || self.classes == 0 {
            return Err(Error::InvalidParams("head dimensions must be >= 1".into()));
        }
        let shapes = [
            (&self.w1, self.hidden * self.input),
            (&self.b1, self.hidden),
            (&self.w2, self.classes * self.hidden),
            (&self.b2, self.classes),
        ];
        for (v, len) in shapes {
            if v.len() != len {
                return Err(Error::ShapeMismatch {
                    expected: len,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    fn hidden_pre(&self, x: &[f64]) -> Vec<f64> {
        (0..self.hidden)
            .map(|h| {
                self.b1[h]
                    + self.w1[h * self.input..(h + 1) * self.input]
                        .iter()
                        .zip(x)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
            })
            .collect()
    }

    fn logits(&self, hidden: &[f64]) -> Vec<f64> {
        (0..self.classes)
            .map(|k| {
                self.b2[k]
                    + self.w2[k * self.hidden..(k + 1) * self.hidden]
                        .iter()
                        .zip(hidden)
                        .map(|(w, v)| w * v)
                        .sum::<f64>()
            })
            .collect()
    }

    fn input_vector(&self, pooled: &[f64], covariates: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        let found = pooled.len() + covariates.len();
        if found != self.input {
            return Err(Error::ShapeMismatch {
                expected: self.input,
                found,
            });
        }
        let mut x = pooled.to_vec();
        x.extend_from_slice(covariates);
        Ok(x)
    }
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    logits.iter().map(|l| l - lse).collect()
}

/// Class log-probabilities for the pooled vector with covariates appended.
pub fn head(pooled: &[f64], covariates: &[f64], params: &HeadParams) -> Result<Vec<f64>> {
    let x = params.input_vector(pooled, covariates)?;
    let hidden: Vec<f64> = params
        .hidden_pre(&x)
        .into_iter()
        .map(|z| params.activation.apply(z))
        .collect();
    Ok(log_softmax(&params.logits(&hidden)))
}

/// `-log_probs[label]`.
pub fn cross_entropy(log_probs: &[f64], label: usize) -> Result<f64> {
    match log_probs.get(label) {
        Some(lp) => Ok(-lp),
        None => Err(Error::LabelOutOfRange {
            label,
            classes: log_probs.len(),
        }),
    }
}

/// Gradient of the cross-entropy loss through the head.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadGradient {
    pub loss: f64,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    /// With respect to the (pooled ++ covariates) input.
    pub input: Vec<f64>,
}

/// Loss and its exact gradient with respect to the head parameters and input.
pub fn head_backward(
    pooled: &[f64],
    covariates: &[f64],
    params: &HeadParams,
    label: usize,
) -> Result<HeadGradient> {
    let x = params.input_vector(pooled, covariates)?;
    if label >= params.classes {
        return Err(Error::LabelOutOfRange {
            label,
            classes: params.classes,
        });
    }
    let pre = params.hidden_pre(&x);
    let hidden: Vec<f64> = pre.iter().map(|z| params.activation.apply(*z)).collect();
    let lp = log_softmax(&params.logits(&hidden));
    let loss = -lp[label];

    // d loss / d logits = softmax - onehot
    let mut dlogits: Vec<f64> = lp.iter().map(|l| l.exp()).collect();
    dlogits[label] -= 1.0;

    let (h, d) = (params.hidden, params.input);
    let mut w2 = vec![0.0; params.classes * h];
    let mut dhidden = vec![0.0; h];
    for k in 0..params.classes {
        for j in 0..h {
            w2[k * h + j] = dlogits[k] * hidden[j];
            dhidden[j] += dlogits[k] * params.w2[k * h + j];
        }
    }
    let dpre: Vec<f64> = dhidden
        .iter()
        .zip(&pre)
        .map(|(g, z)| g * params.activation.derivative(*z))
        .collect();
    let mut w1 = vec![0.0; h * d];
    let mut input = vec![0.0; d];
    for j in 0..h {
        for i in 0..d {
            w1[j * d + i] = dpre[j] * x[i];
            input[i] += dpre[j] * params.w1[j * d + i];
        }
    }
    Ok(HeadGradient {
        loss,
        w1,
        b1: dpre,
        w2,
        b2: dlogits,
        input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pool_examples() {
        assert_eq!(pool(&[vec![1.0, 3.0]]).unwrap(), vec![3.0, 2.0]);
        assert_eq!(pool(&[vec![5.0]]).unwrap(), vec![5.0, 5.0]);
        assert_eq!(
            pool(&[vec![2.0; 4], vec![-1.0, 0.0, 1.0, 4.0]]).unwrap(),
            vec![2.0, 4.0, 2.0, 1.0]
        );
        assert!(pool(&[vec![]]).is_err());
        assert!(pool(&[]).is_err());
        // order of nodes does not matter
        assert_eq!(
            pool(&[vec![3.0, 1.0]]).unwrap(),
            pool(&[vec![1.0, 3.0]]).unwrap()
        );
    }

    #[test]
    fn head_examples() {
        let p = HeadParams::zeros(4, 3, 3);
        let out = head(&[1.0, 2.0, 3.0], &[7.0], &p).unwrap();
        for v in out {
            assert!((v - (1.0f64 / 3.0).ln()).abs() < 1e-15);
        }
        assert!(head(&[1.0, 2.0], &[], &p).is_err());

        let lp = log_softmax(&[1.0, 0.0]);
        // log(e/(e+1)), log(1/(e+1))
        let z = core::f64::consts::E + 1.0;
        assert!((lp[0] - (core::f64::consts::E / z).ln()).abs() < 1e-15);
        assert!((lp[1] + z.ln()).abs() < 1e-15);
        assert!((lp[0] + 0.3133).abs() < 1e-4 && (lp[1] + 1.3133).abs() < 1e-4);
        assert!((cross_entropy(&lp, 0).unwrap() - 0.3133).abs() < 1e-4);

        let shifted = log_softmax(&[1.0 + 123.0, 123.0]);
        assert!((shifted[0] - lp[0]).abs() < 1e-12 && (shifted[1] - lp[1]).abs() < 1e-12);
        let big = log_softmax(&[1e300, 0.0]);
        assert!(big.iter().all(|v| v.is_finite() || *v == f64::NEG_INFINITY));
    }

    #[test]
    fn cross_entropy_examples() {
        assert_eq!(cross_entropy(&[0.0, f64::NEG_INFINITY], 0).unwrap(), 0.0);
        let u = (1.0f64 / 3.0).ln();
        assert!((cross_entropy(&[u; 3], 2).unwrap() - 3.0f64.ln()).abs() < 1e-15);
        assert!(matches!(
            cross_entropy(&[u; 3], 3),
            Err(Error::LabelOutOfRange {
                label: 3,
                classes: 3
            })
        ));
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = HeadParams::zeros(5, 4, 3);
        for v in
            p.w1.iter_mut()
                .chain(&mut p.b1)
                .chain(&mut p.w2)
                .chain(&mut p.b2)
        {
            *v = rng.random_range(-1.0..1.0);
        }
        let pooled: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cov = [0.3];
        let g = head_backward(&pooled, &cov, &p, 2).unwrap();
        let loss = |p: &HeadParams, x: &[f64]| {
            cross_entropy(&head(&x[..4], &x[4..], p).unwrap(), 2).unwrap()
        };
        let mut x: Vec<f64> = pooled.clone();
        x.push(0.3);
        assert!((g.loss - loss(&p, &x)).abs() < 1e-15);

        let h = 1e-6;
        let check = |get: &dyn Fn(&mut HeadParams) -> &mut Vec<f64>, grad: &[f64]| {
            for i in 0..grad.len() {
                let mut a = p.clone();
                get(&mut a)[i] += h;
                let mut b = p.clone();
                get(&mut b)[i] -= h;
                let fd = (loss(&a, &x) - loss(&b, &x)) / (2.0 * h);
                assert!((fd - grad[i]).abs() < 1e-7, "{fd} vs {}", grad[i]);
            }
        };
        check(&|p| &mut p.w1, &g.w1);
        check(&|p| &mut p.b1, &g.b1);
        check(&|p| &mut p.w2, &g.w2);
        check(&|p| &mut p.b2, &g.b2);
        for i in 0..5 {
            let mut a = x.clone();
            a[i] += h;
            let mut b = x.clone();
            b[i] -= h;
            let fd = (loss(&p, &a) - loss(&p, &b)) / (2.0 * h);
            assert!((fd - g.input[i]).abs() < 1e-7);
        }
    }
}
