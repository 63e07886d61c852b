use crate::error::{Error, Result};
use crate::ground::{DiscreteMeasure, GroundSpace};

/// Largest atom count accepted by [`brute_force_wp`].
pub const BRUTE_FORCE_MAX: usize = 8;

/// `min_π (1/n) Σ D(x_i, y_π(i))^p` over all permutations. For uniform
/// measures with equal counts this is `W_p^p`, since the extreme points of
/// the coupling polytope are permutation matrices.
pub fn brute_force_wp(space: &GroundSpace, mu: &DiscreteMeasure, nu: &DiscreteMeasure, p: f64) -> Result<f64> {
    let n = mu.len();
    if n != nu.len() || n == 0 || n > BRUTE_FORCE_MAX {
        return Err(Error::input(format!(
            "brute force needs equal atom counts in 1..={BRUTE_FORCE_MAX}, got {} and {}",
            mu.len(),
            nu.len()
        )));
    }
    if !mu.is_uniform() || !nu.is_uniform() {
        return Err(Error::input("brute force needs uniform weights"));
    }
    if mu.dim() != space.dim || nu.dim() != space.dim {
        return Err(Error::input("measure dimension differs from the space"));
    }
    let cost: Vec<Vec<f64>> = mu
        .atoms()
        .map(|x| nu.atoms().map(|y| space.cost(x, y, p)).collect())
        .collect();

    // Heap's algorithm, iterative form.
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let total = |perm: &[usize]| -> f64 { perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum() };
    let mut best = total(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.min(total(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best / n as f64)
}
