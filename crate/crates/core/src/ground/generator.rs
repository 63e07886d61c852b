//! Measure generators used as ground truth in experiments.

use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::multiscale::{DeltaSequence, MultiscaleMeasure};
use super::{stream_rng, DiscreteMeasure, Norm, Rng};
use crate::error::{Error, Result};

/// Cantor maps are composed until the cell side drops below this.
const CANTOR_RESOLUTION: f64 = 1.0 / (1u64 << 40) as f64;

/// Stream reserved for structural randomness (e.g. drawn cluster centres).
const STRUCTURE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Lebesgue measure on `[0,1]^dim`.
    UniformCube { dim: usize },
    /// Finitely many atoms; uniform weights when `weights` is absent.
    DiracMix {
        atoms: Vec<Vec<f64>>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// Uniform mixture of uniform laws on sup-norm balls of radius `radius`.
    /// Centres are drawn from `[radius, 1-radius]^dim` when not given.
    Clusterable {
        dim: usize,
        radius: f64,
        #[serde(default)]
        clusters: Option<usize>,
        #[serde(default)]
        centers: Option<Vec<Vec<f64>>>,
    },
    /// Uniform mixture of isotropic Gaussians whose covariance has trace
    /// `sigma^2`, clamped coordinatewise to the cube.
    GaussianMixture { means: Vec<Vec<f64>>, sigma: f64 },
    /// Product self-similar set: `branches` equally spaced maps of ratio
    /// `ratio` on each axis, `branches^dim` maps in total.
    CantorSelfSimilar { dim: usize, ratio: f64, branches: usize },
    /// The multiscale measure driven by `δ_n = min(1, c·n^α)`.
    MultiscaleConverse { c: f64, alpha: f64, depth: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    /// Seeds structural randomness such as drawn cluster centres.
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        Self { kind, seed: 0 }
    }
}

/// Metadata from one sampling call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SampleInfo {
    /// Coordinates moved back into `[0,1]` by clamping.
    pub clamped_coordinates: usize,
}

#[derive(Debug, Clone)]
enum Sampler {
    Uniform,
    Atoms {
        coords: Vec<f64>,
        index: WeightedIndex<f64>,
    },
    Balls {
        centers: Vec<f64>,
        radius: f64,
    },
    Gaussian {
        means: Vec<f64>,
        sd: f64,
    },
    Cantor {
        offsets: Vec<f64>,
        ratio: f64,
        depth: usize,
    },
    Multiscale(Box<MultiscaleMeasure>),
}

/// A validated generator ready to draw samples.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: GeneratorSpec,
    dim: usize,
    sampler: Sampler,
}

fn flatten_points(points: &[Vec<f64>], what: &str) -> Result<(usize, Vec<f64>)> {
    let dim = points.first().map(Vec::len).unwrap_or(0);
    if points.is_empty() || dim == 0 {
        return Err(Error::config(format!("{what} must be a nonempty list of points")));
    }
    let mut flat = Vec::with_capacity(points.len() * dim);
    for p in points {
        if p.len() != dim {
            return Err(Error::config(format!("{what} have inconsistent dimensions")));
        }
        if p.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::config(format!("{what} must lie in the unit cube")));
        }
        flat.extend_from_slice(p);
    }
    Ok((dim, flat))
}

fn positive_dim(dim: usize) -> Result<usize> {
    if dim == 0 {
        Err(Error::config("generator dimension must be positive"))
    } else {
        Ok(dim)
    }
}

impl Generator {
    pub fn new(spec: &GeneratorSpec) -> Result<Self> {
        let (dim, sampler) = match &spec.kind {
            GeneratorKind::UniformCube { dim } => (positive_dim(*dim)?, Sampler::Uniform),
            GeneratorKind::DiracMix { atoms, weights } => {
                let (dim, coords) = flatten_points(atoms, "dirac atoms")?;
                let w = match weights {
                    Some(w) => {
                        if w.len() != atoms.len() {
                            return Err(Error::config("dirac weights and atoms differ in length"));
                        }
                        let total: f64 = w.iter().sum();
                        if (total - 1.0).abs() > 1e-12 {
                            return Err(Error::config("dirac weights must sum to 1"));
                        }
                        w.clone()
                    }
                    None => vec![1.0 / atoms.len() as f64; atoms.len()],
                };
                let index = WeightedIndex::new(&w).map_err(|e| Error::config(format!("invalid dirac weights: {e}")))?;
                (dim, Sampler::Atoms { coords, index })
            }
            GeneratorKind::Clusterable {
                dim,
                radius,
                clusters,
                centers,
            } => {
                let dim = positive_dim(*dim)?;
                if !(*radius > 0.0 && *radius < 0.5) {
                    return Err(Error::config(format!(
                        "cluster radius must lie in (0, 1/2), got {radius}"
                    )));
                }
                let flat = match (centers, clusters) {
                    (Some(c), _) => {
                        let (d, flat) = flatten_points(c, "cluster centers")?;
                        if d != dim {
                            return Err(Error::config("cluster centers do not match dim"));
                        }
                        flat
                    }
                    (None, Some(k)) if *k > 0 => {
                        let mut rng = stream_rng(spec.seed, STRUCTURE_STREAM);
                        (0..k * dim)
                            .map(|_| radius + (1.0 - 2.0 * radius) * rng.random::<f64>())
                            .collect()
                    }
                    _ => {
                        return Err(Error::config(
                            "clusterable generator needs `centers` or a positive `clusters`",
                        ))
                    }
                };
                (
                    dim,
                    Sampler::Balls {
                        centers: flat,
                        radius: *radius,
                    },
                )
            }
            GeneratorKind::GaussianMixture { means, sigma } => {
                let (dim, flat) = flatten_points(means, "mixture means")?;
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::config(format!("sigma must be positive, got {sigma}")));
                }
                (
                    dim,
                    Sampler::Gaussian {
                        means: flat,
                        sd: sigma / (dim as f64).sqrt(),
                    },
                )
            }
            GeneratorKind::CantorSelfSimilar { dim, ratio, branches } => {
                let dim = positive_dim(*dim)?;
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::config(format!("cantor ratio must lie in (0, 1), got {ratio}")));
                }
                if *branches < 2 || *branches as f64 * ratio > 1.0 {
                    return Err(Error::config(
                        "cantor generator needs branches >= 2 and branches * ratio <= 1",
                    ));
                }
                let step = (1.0 - ratio) / (*branches - 1) as f64;
                let offsets = (0..*branches).map(|j| j as f64 * step).collect();
                let depth = (CANTOR_RESOLUTION.ln() / ratio.ln()).ceil() as usize + 1;
                (
                    dim,
                    Sampler::Cantor {
                        offsets,
                        ratio: *ratio,
                        depth,
                    },
                )
            }
            GeneratorKind::MultiscaleConverse { c, alpha, depth } => {
                let m = MultiscaleMeasure::build(DeltaSequence { c: *c, alpha: *alpha }, *depth)?;
                (m.dim(), Sampler::Multiscale(Box::new(m)))
            }
        };
        Ok(Self {
            spec: spec.clone(),
            dim,
            sampler,
        })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn multiscale(&self) -> Option<&MultiscaleMeasure> {
        match &self.sampler {
            Sampler::Multiscale(m) => Some(m),
            _ => None,
        }
    }

    /// Exact atoms when the law is finitely supported.
    pub fn exact_measure(&self) -> Option<DiscreteMeasure> {
        match (&self.sampler, &self.spec.kind) {
            (Sampler::Atoms { coords, .. }, GeneratorKind::DiracMix { weights, .. }) => {
                let n = coords.len() / self.dim;
                let w = weights.clone().unwrap_or_else(|| vec![1.0 / n as f64; n]);
                DiscreteMeasure::new(self.dim, coords.clone(), w)
                    .ok()
                    .map(|m| m.merged())
            }
            _ => None,
        }
    }

    /// Flat centres of a clusterable generator.
    pub fn cluster_centers(&self) -> Option<(&[f64], f64)> {
        match &self.sampler {
            Sampler::Balls { centers, radius } => Some((centers, *radius)),
            _ => None,
        }
    }

    /// Analytic dimension of the support when known.
    pub fn reference_dimension(&self) -> Option<f64> {
        match &self.spec.kind {
            GeneratorKind::UniformCube { dim } => Some(*dim as f64),
            GeneratorKind::DiracMix { .. } => Some(0.0),
            GeneratorKind::Clusterable { dim, .. } => Some(*dim as f64),
            GeneratorKind::GaussianMixture { means, .. } => Some(means[0].len() as f64),
            GeneratorKind::CantorSelfSimilar { dim, ratio, branches } => {
                Some(*dim as f64 * (*branches as f64).ln() / (1.0 / ratio).ln())
            }
            GeneratorKind::MultiscaleConverse { .. } => None,
        }
    }

    /// Upper bound on the mass of any closed ball of diameter `eps`, when the
    /// law admits a simple one.
    pub fn max_ball_mass(&self, eps: f64, norm: Norm) -> Option<f64> {
        match &self.sampler {
            Sampler::Uniform => {
                let side = match norm {
                    Norm::LInf => eps,
                    Norm::L2Scaled => eps * (self.dim as f64).sqrt(),
                };
                Some(side.min(1.0).powi(self.dim as i32))
            }
            _ => None,
        }
    }

    fn draw(&self, rng: &mut Rng, out: &mut Vec<f64>, info: &mut SampleInfo) {
        let m = self.dim;
        match &self.sampler {
            Sampler::Uniform => out.extend((0..m).map(|_| rng.random::<f64>())),
            Sampler::Atoms { coords, index } => {
                let i = index.sample(rng);
                out.extend_from_slice(&coords[i * m..(i + 1) * m]);
            }
            Sampler::Balls { centers, radius } => {
                let k = rng.random_range(0..centers.len() / m);
                for &c in &centers[k * m..(k + 1) * m] {
                    let x = c + radius * (2.0 * rng.random::<f64>() - 1.0);
                    out.push(x.clamp(0.0, 1.0));
                }
            }
            Sampler::Gaussian { means, sd } => {
                let k = rng.random_range(0..means.len() / m);
                for &mu in &means[k * m..(k + 1) * m] {
                    let z: f64 = rng.sample(StandardNormal);
                    let x = mu + sd * z;
                    if !(0.0..=1.0).contains(&x) {
                        info.clamped_coordinates += 1;
                    }
                    out.push(x.clamp(0.0, 1.0));
                }
            }
            Sampler::Cantor { offsets, ratio, depth } => {
                for _ in 0..m {
                    let mut x = 0.0;
                    let mut scale = 1.0;
                    for _ in 0..*depth {
                        x += scale * offsets[rng.random_range(0..offsets.len())];
                        scale *= ratio;
                    }
                    out.push(x.min(1.0));
                }
            }
            Sampler::Multiscale(ms) => ms.sample_point(rng, out),
        }
    }

    /// `n` i.i.d. draws from `rng`, as a uniform empirical measure.
    pub fn sample_with(&self, n: usize, rng: &mut Rng) -> Result<(DiscreteMeasure, SampleInfo)> {
        if n == 0 {
            return Err(Error::input("sample size must be at least 1"));
        }
        let mut coords = Vec::with_capacity(n * self.dim);
        let mut info = SampleInfo::default();
        for _ in 0..n {
            self.draw(rng, &mut coords, &mut info);
        }
        let w = vec![1.0 / n as f64; n];
        Ok((DiscreteMeasure::from_parts_unchecked(self.dim, coords, w), info))
    }

    /// Raw i.i.d. points (flat), without building a measure.
    pub fn sample_points(&self, n: usize, rng: &mut Rng) -> Vec<f64> {
        let mut coords = Vec::with_capacity(n * self.dim);
        let mut info = SampleInfo::default();
        for _ in 0..n {
            self.draw(rng, &mut coords, &mut info);
        }
        coords
    }
}

/// Empirical measure of `n` i.i.d. draws; deterministic in `(spec, n, seed)`.
pub fn sample_empirical(spec: &GeneratorSpec, n: usize, seed: u64) -> Result<DiscreteMeasure> {
    let g = Generator::new(spec)?;
    let mut rng = stream_rng(seed, 0);
    Ok(g.sample_with(n, &mut rng)?.0)
}

/// Monte-Carlo estimate of `μ(S_ε)`, the mass within distance `eps` of `set`.
pub fn fattening_mass(
    generator: &Generator,
    space: &super::GroundSpace,
    set: &[f64],
    eps: f64,
    n_mc: usize,
    seed: u64,
) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::input("fattening of an empty set is undefined"));
    }
    if eps < 0.0 || n_mc == 0 {
        return Err(Error::input("fattening needs eps >= 0 and n_mc >= 1"));
    }
    if !set.len().is_multiple_of(space.dim) || generator.dim() != space.dim {
        return Err(Error::input("dimension mismatch in fattening_mass"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut buf = Vec::with_capacity(space.dim);
    let mut info = SampleInfo::default();
    let mut hits = 0usize;
    for _ in 0..n_mc {
        buf.clear();
        generator.draw(&mut rng, &mut buf, &mut info);
        if space.distance_to_set(&buf, set)? <= eps {
            hits += 1;
        }
    }
    Ok(hits as f64 / n_mc as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::GroundSpace;

    #[test]
    fn single_dirac_repeats_point() {
        let spec = GeneratorSpec::new(GeneratorKind::DiracMix {
            atoms: vec![vec![0.25, 0.75]],
            weights: None,
        });
        let mu = sample_empirical(&spec, 5, 1).unwrap();
        assert_eq!(mu.len(), 5);
        for (i, a) in mu.atoms().enumerate() {
            assert_eq!(a, &[0.25, 0.75]);
            assert_eq!(mu.weight(i), 0.2);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = GeneratorSpec::new(GeneratorKind::UniformCube { dim: 2 });
        let a = sample_empirical(&spec, 100, 7).unwrap();
        let b = sample_empirical(&spec, 100, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_empirical(&spec, 100, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn clusterable_atoms_stay_in_balls() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::Clusterable {
                dim: 4,
                radius: 0.01,
                clusters: Some(3),
                centers: None,
            },
            seed: 5,
        };
        let g = Generator::new(&spec).unwrap();
        let (centers, r) = g.cluster_centers().unwrap();
        let space = GroundSpace::linf(4);
        let mu = sample_empirical(&spec, 50, 2).unwrap();
        for a in mu.atoms() {
            assert!(space.distance_to_set(a, centers).unwrap() <= r);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = [
            GeneratorKind::Clusterable {
                dim: 2,
                radius: 0.0,
                clusters: Some(2),
                centers: None,
            },
            GeneratorKind::CantorSelfSimilar {
                dim: 1,
                ratio: 1.0,
                branches: 2,
            },
            GeneratorKind::CantorSelfSimilar {
                dim: 1,
                ratio: 0.6,
                branches: 2,
            },
            GeneratorKind::UniformCube { dim: 0 },
        ];
        for kind in bad {
            let e = Generator::new(&GeneratorSpec::new(kind)).unwrap_err();
            assert_eq!(e.exit_code(), 2);
        }
    }

    #[test]
    fn cantor_points_lie_in_attractor() {
        let spec = GeneratorSpec::new(GeneratorKind::CantorSelfSimilar {
            dim: 1,
            ratio: 1.0 / 3.0,
            branches: 2,
        });
        let g = Generator::new(&spec).unwrap();
        assert!((g.reference_dimension().unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        let mu = sample_empirical(&spec, 200, 4).unwrap();
        for a in mu.atoms() {
            // The first five ternary digits avoid 1.
            let mut x = a[0];
            for _ in 0..5 {
                x *= 3.0;
                let d = x.floor().min(2.0);
                assert!(d != 1.0 || (x - 1.0).abs() < 1e-9 || (x - 2.0).abs() < 1e-9, "{}", a[0]);
                x -= d;
            }
        }
    }

    #[test]
    fn gaussian_mixture_records_clamping() {
        let spec = GeneratorSpec::new(GeneratorKind::GaussianMixture {
            means: vec![vec![0.0, 0.0]],
            sigma: 0.1,
        });
        let g = Generator::new(&spec).unwrap();
        let mut rng = stream_rng(1, 0);
        let (mu, info) = g.sample_with(200, &mut rng).unwrap();
        assert!(info.clamped_coordinates > 100);
        assert!(mu.coords().iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn json_schema_uses_variant_tag() {
        let spec: GeneratorSpec = serde_json::from_str(r#"{"variant":"uniform_cube","dim":3,"seed":9}"#).unwrap();
        assert_eq!(spec.kind, GeneratorKind::UniformCube { dim: 3 });
        assert_eq!(spec.seed, 9);
        let back = serde_json::to_value(&spec).unwrap();
        assert_eq!(back["variant"], "uniform_cube");
    }

    #[test]
    fn fattening_of_dirac_is_full() {
        let spec = GeneratorSpec::new(GeneratorKind::DiracMix {
            atoms: vec![vec![0.3]],
            weights: None,
        });
        let g = Generator::new(&spec).unwrap();
        let s = GroundSpace::linf(1);
        assert_eq!(fattening_mass(&g, &s, &[0.3], 0.0, 100, 1).unwrap(), 1.0);
        assert!(fattening_mass(&g, &s, &[], 0.1, 100, 1).is_err());
    }

    #[test]
    fn fattening_of_uniform_interval() {
        let g = Generator::new(&GeneratorSpec::new(GeneratorKind::UniformCube { dim: 1 })).unwrap();
        let s = GroundSpace::linf(1);
        let f = fattening_mass(&g, &s, &[0.5], 0.1, 20_000, 3).unwrap();
        assert!((f - 0.2).abs() < 0.015, "{f}");
    }
}
