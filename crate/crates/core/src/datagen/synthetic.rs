use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_seed, embed};
use crate::error::{Error, Result};
use crate::graph::FeatureGraph;

/// Random graph family; the discriminant doubles as the class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ErdosRenyi,
    BarabasiAlbert,
    WattsStrogatz,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::ErdosRenyi,
        Family::BarabasiAlbert,
        Family::WattsStrogatz,
    ];

    pub fn label(&self) -> usize {
        *self as usize
    }
}

/// Family hyperparameters, either sampled or fixed by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Hyper {
    ErdosRenyi { p: f64 },
    BarabasiAlbert { m: usize },
    WattsStrogatz { k: usize, p: f64 },
}

impl Hyper {
    pub fn family(&self) -> Family {
        match self {
            Hyper::ErdosRenyi { .. } => Family::ErdosRenyi,
            Hyper::BarabasiAlbert { .. } => Family::BarabasiAlbert,
            Hyper::WattsStrogatz { .. } => Family::WattsStrogatz,
        }
    }

    /// Edge probability `U[0.1, 1]`, attachment and ring sizes uniform on `{1, …, 2n}`.
    pub fn sample<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> Self {
        match family {
            Family::ErdosRenyi => Hyper::ErdosRenyi {
                p: rng.random_range(0.1..=1.0),
            },
            Family::BarabasiAlbert => Hyper::BarabasiAlbert {
                m: rng.random_range(1..=2 * n),
            },
            Family::WattsStrogatz => Hyper::WattsStrogatz {
                k: rng.random_range(1..=2 * n),
                p: rng.random_range(0.1..=1.0),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub family: Family,
    pub nodes: usize,
    pub seed: u64,
    /// Overrides sampling when set; must match `family`.
    pub hyper: Option<Hyper>,
}

impl SyntheticSpec {
    pub fn new(family: Family, nodes: usize, seed: u64) -> Self {
        Self {
            family,
            nodes,
            seed,
            hyper: None,
        }
    }

    pub fn with_hyper(mut self, hyper: Hyper) -> Self {
        self.hyper = Some(hyper);
        self
    }
}

/// An undirected simple graph with uniform weights `1/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticGraph {
    pub family: Family,
    pub hyper: Hyper,
    pub nodes: usize,
    /// Undirected edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl SyntheticGraph {
    pub fn weight(&self) -> f64 {
        1.0 / self.nodes as f64
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for (a, b) in &self.edges {
            d[*a] += 1;
            d[*b] += 1;
        }
        d
    }
}

pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticGraph> {
    let n = spec.nodes;
    if n < 3 {
        return Err(Error::InvalidParams(alloc::format!(
            "synthetic graphs need n >= 3, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let hyper = match spec.hyper {
        Some(h) if h.family() != spec.family => {
            return Err(Error::InvalidParams(
                "hyperparameters do not match the graph family".into(),
            ));
        }
        Some(h) => h,
        None => Hyper::sample(spec.family, n, &mut rng),
    };
    let edges = match hyper {
        Hyper::ErdosRenyi { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParams(alloc::format!(
                    "edge probability {p} outside [0, 1]"
                )));
            }
            erdos_renyi(n, p, &mut rng)
        }
        Hyper::BarabasiAlbert { m } => {
            if m < 1 {
                return Err(Error::InvalidParams("attachment count must be >= 1".into()));
            }
            barabasi_albert(n, m.min(n - 1), &mut rng)
        }
        Hyper::WattsStrogatz { k, p } => {
            if !(0.0..=1.0).contains(&p) || k < 1 {
                return Err(Error::InvalidParams(alloc::format!(
                    "invalid ring size {k} or rewiring probability {p}"
                )));
            }
            watts_strogatz(n, k, p, &mut rng)
        }
    };
    let mut edges: Vec<_> = edges.into_iter().collect();
    edges.sort_unstable();
    Ok(SyntheticGraph {
        family: spec.family,
        hyper,
        nodes: n,
        edges,
    })
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.random::<f64>() < p {
                edges.insert((a, b));
            }
        }
    }
    edges
}

/// Preferential attachment starting from a star on `m + 1` nodes; each new
/// node attaches to `m` distinct targets drawn proportionally to degree.
fn barabasi_albert<R: Rng>(n: usize, m: usize, rng: &mut R) -> BTreeSet<(usize, usize)> {
    let mut edges = BTreeSet::new();
    let mut repeated = Vec::new();
    for leaf in 1..=m {
        edges.insert((0, leaf));
        repeated.extend([0, leaf]);
    }
    for source in (m + 1)..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(*repeated.choose(rng).expect("star has edges"));
        }
        for &t in &targets {
            edges.insert(key(source, t));
            repeated.push(t);
        }
        repeated.extend(core::iter::repeat_n(source, m));
    }
    edges
}

/// Ring lattice with `k/2` neighbours on each side, each lattice edge rewired
/// with probability `p` to a uniform new endpoint; `k >= n` gives the complete graph.
fn watts_strogatz<R: Rng>(n: usize, k: usize, p: f64, rng: &mut R) -> BTreeSet<(usize, usize)> {
    if k >= n {
        return erdos_renyi(n, 1.0, rng);
    }
    let half = k / 2;
    let mut edges = BTreeSet::new();
    for j in 1..=half {
        for u in 0..n {
            edges.insert(key(u, (u + j) % n));
        }
    }
    let mut degree = vec![2 * half; n];
    let nodes: Vec<usize> = (0..n).collect();
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() < p {
                if degree[u] >= n - 1 {
                    continue;
                }
                let mut w = *nodes.choose(rng).expect("n >= 3");
                while w == u || edges.contains(&key(u, w)) {
                    w = *nodes.choose(rng).expect("n >= 3");
                }
                if edges.remove(&key(u, v)) {
                    degree[v] -= 1;
                    degree[w] += 1;
                    edges.insert(key(u, w));
                }
            }
        }
    }
    edges
}

/// Manifold embedding used to turn abstract graphs into feature graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Embedding {
    /// Node `k` ↦ `exp_o(e_k)` in `Lorentz(n)`.
    OneHotLorentz,
    /// Symmetric one-hot matrices in `SPD(size)`.
    OneHotSpd { size: usize },
    /// Degree one-hot through a fixed random linear map into `Lorentz(dim)`.
    DegreeLorentz { dim: usize, seed: u64 },
}

/// `per_family` graphs of each family (labels 0, 1, 2), interleaved by family.
pub fn synthetic_dataset(
    per_family: usize,
    nodes: usize,
    embedding: &Embedding,
    seed: u64,
) -> Result<Vec<FeatureGraph>> {
    let degree_map = match embedding {
        Embedding::DegreeLorentz { dim, seed } => {
            Some(embed::DegreeEmbedding::random(nodes, *dim, *seed)?)
        }
        _ => None,
    };
    let mut out = Vec::with_capacity(3 * per_family);
    for i in 0..per_family {
        for family in Family::ALL {
            let index = (3 * i + family.label()) as u64;
            let g = gen_synthetic(&SyntheticSpec::new(family, nodes, derive_seed(seed, index)))?;
            let fg = match embedding {
                Embedding::OneHotLorentz => embed::embed_onehot_hyperbolic(&g)?,
                Embedding::OneHotSpd { size } => embed::embed_onehot_spd(&g, *size)?,
                Embedding::DegreeLorentz { .. } => {
                    embed::embed_degree_hyperbolic(&g, degree_map.as_ref().expect("built above"))?
                }
            };
            out.push(fg.with_label(family.label()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism_and_weights() {
        for family in Family::ALL {
            let spec = SyntheticSpec::new(family, 20, 9);
            let a = gen_synthetic(&spec).unwrap();
            assert_eq!(a, gen_synthetic(&spec).unwrap());
            assert_eq!(a.family, family);
            assert!(a.edges.iter().all(|(x, y)| x < y && *y < 20));
        }
        let g = gen_synthetic(&SyntheticSpec::new(Family::ErdosRenyi, 100, 1)).unwrap();
        assert_eq!(g.weight(), 1.0 / 100.0);
        assert!(gen_synthetic(&SyntheticSpec::new(Family::ErdosRenyi, 2, 1)).is_err());
    }

    #[test]
    fn sampled_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            match Hyper::sample(Family::ErdosRenyi, 10, &mut rng) {
                Hyper::ErdosRenyi { p } => assert!((0.1..=1.0).contains(&p)),
                _ => unreachable!(),
            }
            match Hyper::sample(Family::WattsStrogatz, 10, &mut rng) {
                Hyper::WattsStrogatz { k, p } => {
                    assert!((1..=20).contains(&k) && (0.1..=1.0).contains(&p))
                }
                _ => unreachable!(),
            }
            match Hyper::sample(Family::BarabasiAlbert, 10, &mut rng) {
                Hyper::BarabasiAlbert { m } => assert!((1..=20).contains(&m)),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn forced_hyperparameters() {
        let spec =
            SyntheticSpec::new(Family::ErdosRenyi, 12, 5).with_hyper(Hyper::ErdosRenyi { p: 1.0 });
        assert_eq!(gen_synthetic(&spec).unwrap().edges.len(), 66);

        for seed in 0..10 {
            let spec = SyntheticSpec::new(Family::BarabasiAlbert, 25, seed)
                .with_hyper(Hyper::BarabasiAlbert { m: 1 });
            let g = gen_synthetic(&spec).unwrap();
            assert_eq!(g.edges.len(), 24);
            // connected: union-find over the edges
            let mut parent: Vec<usize> = (0..25).collect();
            fn find(p: &mut [usize], x: usize) -> usize {
                if p[x] != x {
                    let r = find(p, p[x]);
                    p[x] = r;
                }
                p[x]
            }
            for (a, b) in &g.edges {
                let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
                parent[ra] = rb;
            }
            let root = find(&mut parent, 0);
            assert!((0..25).all(|v| find(&mut parent, v) == root));
        }

        // BA with m = 3 on n nodes: 3 star edges, then 3 per new node
        let spec = SyntheticSpec::new(Family::BarabasiAlbert, 15, 2)
            .with_hyper(Hyper::BarabasiAlbert { m: 3 });
        assert_eq!(gen_synthetic(&spec).unwrap().edges.len(), 3 + 3 * 11);

        let spec = SyntheticSpec::new(Family::WattsStrogatz, 10, 2)
            .with_hyper(Hyper::WattsStrogatz { k: 10, p: 0.5 });
        assert_eq!(gen_synthetic(&spec).unwrap().edges.len(), 45);
        // rewiring keeps the edge count
        let spec = SyntheticSpec::new(Family::WattsStrogatz, 20, 2)
            .with_hyper(Hyper::WattsStrogatz { k: 4, p: 0.7 });
        assert_eq!(gen_synthetic(&spec).unwrap().edges.len(), 40);
        let spec = SyntheticSpec::new(Family::WattsStrogatz, 20, 2)
            .with_hyper(Hyper::WattsStrogatz { k: 4, p: 0.0 });
        let ring = gen_synthetic(&spec).unwrap();
        assert!(ring.degrees().iter().all(|d| *d == 4));

        let bad = SyntheticSpec::new(Family::WattsStrogatz, 20, 2)
            .with_hyper(Hyper::ErdosRenyi { p: 0.5 });
        assert!(gen_synthetic(&bad).is_err());
    }

    #[test]
    fn dataset_is_balanced() {
        let data = synthetic_dataset(4, 8, &Embedding::OneHotLorentz, 1).unwrap();
        assert_eq!(data.len(), 12);
        for label in 0..3 {
            assert_eq!(data.iter().filter(|g| g.label == Some(label)).count(), 4);
        }
        assert_eq!(
            data,
            synthetic_dataset(4, 8, &Embedding::OneHotLorentz, 1).unwrap()
        );
    }
}
