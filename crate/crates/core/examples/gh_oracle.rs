//! Gromov-Hausdorff distance between small finite metric spaces: the exact value by search
//! next to the cheap lower and upper bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublab::metric_space::{gh_bounds, gh_exact, FiniteMetricSpace};

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> sublab::Result<FiniteMetricSpace> {
    // points in the plane give a genuine metric
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
    FiniteMetricSpace::from_fn((0..n).map(|i| format!("p{i}")).collect(), |i, j| {
        (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1)
    })
}

fn main() -> sublab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let point = FiniteMetricSpace::singleton();
    println!("{:>3} {:>3} {:>10} {:>10} {:>10}", "|X|", "|Y|", "lower", "exact", "upper");
    for _ in 0..8 {
        let (nx, ny) = (rng.random_range(2..=6), rng.random_range(1..=6));
        let x = random_space(&mut rng, nx)?;
        let y = if ny == 1 { point.clone() } else { random_space(&mut rng, ny)? };
        let b = gh_bounds(&x, &y)?;
        println!("{nx:>3} {ny:>3} {:>10.5} {:>10.5} {:>10.5}", b.lower, gh_exact(&x, &y)?, b.upper);
    }
    let x = random_space(&mut rng, 5)?;
    println!("to a point: exact {:.6}, half diameter {:.6}", gh_exact(&x, &point)?, x.diameter() / 2.0);
    Ok(())
}
