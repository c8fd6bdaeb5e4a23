use super::FiniteMetricSpace;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NetReport {
    pub subset: Vec<usize>,
    pub covering_radius: f64,
}

/// `max_x min_{s ∈ subset} d(x, s)`; `+∞` for an empty subset.
pub fn covering_radius(x: &FiniteMetricSpace, subset: &[usize]) -> f64 {
    (0..x.len())
        .map(|i| subset.iter().map(|&s| x.d(i, s)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Greedy farthest-point ε-net seeded at index 0; ties go to the lowest index.
pub fn eps_net(x: &FiniteMetricSpace, eps: f64) -> Result<NetReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be positive")));
    }
    let mut subset = vec![0];
    let mut nearest: Vec<f64> = x.row(0).to_vec();
    loop {
        let (far, radius) = nearest
            .iter()
            .enumerate()
            .fold((0, 0.0), |(bi, bd), (i, &d)| if d > bd { (i, d) } else { (bi, bd) });
        if radius <= eps {
            return Ok(NetReport { subset, covering_radius: radius });
        }
        subset.push(far);
        for (n, d) in nearest.iter_mut().zip(x.row(far)) {
            *n = n.min(*d);
        }
    }
}

/// Union of per-fiber nets, with the covering radius recomputed in `x`.
pub fn merge_fiber_nets(fiber_nets: &[Vec<usize>], x: &FiniteMetricSpace) -> Result<NetReport> {
    if let Some(k) = fiber_nets.iter().position(Vec::is_empty) {
        return Err(Error::EmptyFiberNet(k));
    }
    let mut subset: Vec<usize> = fiber_nets.iter().flatten().cloned().collect();
    subset.sort_unstable();
    subset.dedup();
    let covering_radius = covering_radius(x, &subset);
    Ok(NetReport { subset, covering_radius })
}

/// Image of a net under a point map into `target`, duplicates merged.
pub fn project_net(net: &[usize], map: &[usize], target: &FiniteMetricSpace) -> NetReport {
    let mut subset: Vec<usize> = net.iter().map(|&i| map[i]).collect();
    subset.sort_unstable();
    subset.dedup();
    let covering_radius = covering_radius(target, &subset);
    NetReport { subset, covering_radius }
}
