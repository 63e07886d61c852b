//! The discrete stand-in `μ_ref` for the law `μ`, with a bound or estimate
//! of `W_p^p(μ, μ_ref)`.

use serde::Serialize;

use crate::dyadic::{CellHistogram, DyadicPartition};
use crate::error::Result;
use crate::ground::{derive_seed, stream_rng, DiscreteMeasure, Generator, GroundSpace};
use crate::transport::dyadic_upper_bound;

/// Seed labels of the reference draws.
const REFERENCE_LABEL: u64 = 0x5245_4600;
const SHADOW_LABEL: u64 = 0x5245_4601;
/// Dyadic histograms stop once a level could hold this many cells.
const PROXY_MAX_CELLS: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// `μ` itself (finitely many atoms).
    Exact,
    /// Cell centres of the multiscale measure at one level.
    CellCentres,
    /// An i.i.d. sample from `μ`.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProxyError {
    /// Bound or estimate of `W_p^p(μ, μ_ref)`.
    pub value_pp: f64,
    /// `value_pp^{1/p}`, on the scale of `W_p`.
    pub value: f64,
    pub method: &'static str,
}

#[derive(Debug, Clone)]
pub struct Reference {
    pub measure: DiscreteMeasure,
    pub kind: ReferenceKind,
    pub proxy: ProxyError,
}

fn proxy(value_pp: f64, p: f64, method: &'static str) -> ProxyError {
    ProxyError {
        value_pp,
        value: value_pp.max(0.0).powf(1.0 / p),
        method,
    }
}

/// Exact atoms, multiscale cell centres at `level` (default: the truncation
/// depth), or `size` i.i.d. draws.
pub fn build_reference(
    generator: &Generator,
    space: &GroundSpace,
    p: f64,
    size: usize,
    level: Option<usize>,
    seed: u64,
) -> Result<Reference> {
    if let Some(measure) = generator.exact_measure() {
        return Ok(Reference {
            measure,
            kind: ReferenceKind::Exact,
            proxy: proxy(0.0, p, "exact"),
        });
    }
    if let Some(ms) = generator.multiscale() {
        let level = level.unwrap_or(ms.depth()).min(ms.depth());
        let measure = ms.center_measure(level)?;
        // Coupling each live cube to its centre moves mass at most half a
        // side; the scaled Euclidean norm never exceeds the sup norm.
        let half = 0.5f64.powi(level as i32 + 1);
        return Ok(Reference {
            measure,
            kind: ReferenceKind::CellCentres,
            proxy: proxy(half.powf(p), p, "cell_centre_coupling"),
        });
    }
    let mut rng = stream_rng(derive_seed(seed, REFERENCE_LABEL), 0);
    let measure = generator.sample_with(size, &mut rng)?.0;
    let mut shadow_rng = stream_rng(derive_seed(seed, SHADOW_LABEL), 0);
    let shadow = generator.sample_with(size, &mut shadow_rng)?.0;
    let value = best_dyadic_bound(space, &measure, &shadow, p)?;
    Ok(Reference {
        measure,
        kind: ReferenceKind::Sample,
        proxy: proxy(value, p, "dyadic_bound_vs_independent_sample"),
    })
}

/// Smallest ternary dyadic bound on `W_p^p(a, b)` over partition depths.
pub fn best_dyadic_bound(space: &GroundSpace, a: &DiscreteMeasure, b: &DiscreteMeasure, p: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut depth = 1;
    while depth <= 30 && 3f64.powi((depth * space.dim) as i32) <= PROXY_MAX_CELLS {
        let part = DyadicPartition::standard(space, 3, depth)?;
        let ha = CellHistogram::new(&part, a)?;
        let hb = CellHistogram::new(&part, b)?;
        let v = dyadic_upper_bound(&ha, &hb, p)?;
        if v > best {
            break;
        }
        best = v;
        depth += 1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::{GeneratorKind, GeneratorSpec};

    #[test]
    fn dirac_mix_is_its_own_reference() {
        let spec = GeneratorSpec::new(GeneratorKind::DiracMix {
            atoms: vec![vec![0.1], vec![0.7]],
            weights: None,
        });
        let g = Generator::new(&spec).unwrap();
        let r = build_reference(&g, &GroundSpace::linf(1), 1.0, 100, None, 0).unwrap();
        assert_eq!(r.kind, ReferenceKind::Exact);
        assert_eq!(r.measure.len(), 2);
        assert_eq!(r.proxy.value_pp, 0.0);
    }

    #[test]
    fn multiscale_reference_uses_cell_centres() {
        let spec = GeneratorSpec::new(GeneratorKind::MultiscaleConverse {
            c: 1.0,
            alpha: -0.5,
            depth: 6,
        });
        let g = Generator::new(&spec).unwrap();
        let r = build_reference(&g, &GroundSpace::linf(2), 1.0, 0, None, 0).unwrap();
        assert_eq!(r.kind, ReferenceKind::CellCentres);
        assert_eq!(r.measure.len(), 256);
        assert_eq!(r.proxy.value, 1.0 / 128.0);
    }

    #[test]
    fn sampled_reference_is_reproducible() {
        let g = Generator::new(&GeneratorSpec::new(GeneratorKind::UniformCube { dim: 2 })).unwrap();
        let s = GroundSpace::linf(2);
        let a = build_reference(&g, &s, 1.0, 500, None, 9).unwrap();
        let b = build_reference(&g, &s, 1.0, 500, None, 9).unwrap();
        assert_eq!(a.measure, b.measure);
        assert!(a.proxy.value_pp > 0.0 && a.proxy.value_pp < 1.0);
    }
}
