use super::{distance_gap, FiniteMetricSpace};
use crate::error::{Error, Result};

/// Largest `|X|·|Y|` accepted by [`gh_exact`].
pub const GH_EXACT_LIMIT: usize = 36;

/// A relation between two finite spaces that is surjective in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>, nx: usize, ny: usize) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        if let Some(&(i, j)) = pairs.iter().find(|(i, j)| *i >= nx || *j >= ny) {
            return Err(Error::NotSurjective(format!("pair ({i}, {j}) is out of range")));
        }
        let mut hit_x = vec![false; nx];
        let mut hit_y = vec![false; ny];
        for &(i, j) in &pairs {
            hit_x[i] = true;
            hit_y[j] = true;
        }
        if let Some(i) = hit_x.iter().position(|h| !h) {
            return Err(Error::NotSurjective(format!("point {i} of X has no partner")));
        }
        if let Some(j) = hit_y.iter().position(|h| !h) {
            return Err(Error::NotSurjective(format!("point {j} of Y has no partner")));
        }
        Ok(Correspondence { pairs })
    }

    /// The graph of `map: X → Y`; fails with `UncoveredTarget` if `map` is not onto.
    pub fn from_map(map: &[usize], ny: usize) -> Result<Self> {
        let mut hit = vec![false; ny];
        for &j in map {
            if j >= ny {
                return Err(Error::UncoveredTarget(j));
            }
            hit[j] = true;
        }
        if let Some(j) = hit.iter().position(|h| !h) {
            return Err(Error::UncoveredTarget(j));
        }
        Ok(Correspondence { pairs: map.iter().cloned().enumerate().collect() })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        Correspondence { pairs }
    }
}

fn check_fits(r: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<()> {
    Correspondence::new(r.pairs.clone(), x.len(), y.len()).map(|_| ())
}

/// `max |d_X(i,i′) − d_Y(j,j′)|` over pairs of pairs in `r`.
pub fn distortion(r: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    check_fits(r, x, y)?;
    let mut worst: f64 = 0.0;
    for (a, &(i, j)) in r.pairs.iter().enumerate() {
        for &(i2, j2) in &r.pairs[a + 1..] {
            worst = worst.max(distance_gap(x.d(i, i2), y.d(j, j2)));
        }
    }
    Ok(worst)
}

/// `½ dis(R)`, an upper bound for `d_GH(X, Y)`.
pub fn gh_upper(r: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    Ok(0.5 * distortion(r, x, y)?)
}

/// Exact `d_GH` by branch and bound over minimal correspondences.
///
/// Every correspondence contains one of the form `graph(f) ∪ {(g(y), y) : y ∉ f(X)}`, so it
/// suffices to search over maps `f: X → Y` and partner choices for the points `f` misses.
pub fn gh_exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    let size = x.len() * y.len();
    if size > GH_EXACT_LIMIT {
        return Err(Error::TooLarge { size, limit: GH_EXACT_LIMIT });
    }
    // branch over the larger side so that few points are left uncovered
    let (big, small) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let full: Vec<(usize, usize)> =
        (0..big.len()).flat_map(|i| (0..small.len()).map(move |j| (i, j))).collect();
    let mut search = Search { x: big, y: small, best: distortion(&Correspondence { pairs: full }, big, small)? };
    let mut pairs = Vec::with_capacity(big.len() + small.len());
    search.assign(0, &mut pairs, 0.0);
    Ok(0.5 * search.best)
}

struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    best: f64,
}

impl Search<'_> {
    fn added_cost(&self, pairs: &[(usize, usize)], (i, j): (usize, usize)) -> f64 {
        pairs
            .iter()
            .map(|&(i2, j2)| distance_gap(self.x.d(i, i2), self.y.d(j, j2)))
            .fold(0.0, f64::max)
    }

    fn assign(&mut self, i: usize, pairs: &mut Vec<(usize, usize)>, cost: f64) {
        if cost >= self.best {
            return;
        }
        if i == self.x.len() {
            let mut hit = vec![false; self.y.len()];
            for &(_, j) in pairs.iter() {
                hit[j] = true;
            }
            let missing: Vec<usize> = (0..self.y.len()).filter(|&j| !hit[j]).collect();
            self.cover(&missing, pairs, cost);
            return;
        }
        for j in 0..self.y.len() {
            let c = cost.max(self.added_cost(pairs, (i, j)));
            pairs.push((i, j));
            self.assign(i + 1, pairs, c);
            pairs.pop();
        }
    }

    fn cover(&mut self, missing: &[usize], pairs: &mut Vec<(usize, usize)>, cost: f64) {
        if cost >= self.best {
            return;
        }
        let Some((&j, rest)) = missing.split_first() else {
            self.best = cost;
            return;
        };
        for i in 0..self.x.len() {
            let c = cost.max(self.added_cost(pairs, (i, j)));
            pairs.push((i, j));
            self.cover(rest, pairs, c);
            pairs.pop();
        }
    }
}

/// Cheap two-sided bounds on `d_GH`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `½|diam X − diam Y| ≤ d_GH ≤ min(½ max(diam X, diam Y), ½ dis(R))` with `R` matching
/// points by eccentricity rank.
pub fn gh_bounds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<GhBounds> {
    let (dx, dy) = (x.diameter(), y.diameter());
    let lower = 0.5 * distance_gap(dx, dy);
    let rank = |s: &FiniteMetricSpace| {
        let ecc: Vec<f64> = (0..s.len()).map(|i| s.row(i).iter().cloned().fold(0.0, f64::max)).collect();
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.sort_by(|&a, &b| ecc[a].total_cmp(&ecc[b]).then(a.cmp(&b)));
        order
    };
    let (rx, ry) = (rank(x), rank(y));
    let mut pairs = Vec::with_capacity(x.len() + y.len());
    for (k, &i) in rx.iter().enumerate() {
        pairs.push((i, ry[k * y.len() / x.len()]));
    }
    for (k, &j) in ry.iter().enumerate() {
        pairs.push((rx[k * x.len() / y.len()], j));
    }
    let r = Correspondence::new(pairs, x.len(), y.len())?;
    let upper = (0.5 * dx.max(dy)).min(gh_upper(&r, x, y)?);
    Ok(GhBounds { lower, upper: upper.max(lower) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let m = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteMetricSpace::from_matrix(m).unwrap()
    }

    #[test]
    fn distortion_basics() {
        let x = line(&[0.0, 1.0, 3.0]);
        let id = Correspondence::new(vec![(0, 0), (1, 1), (2, 2)], 3, 3).unwrap();
        assert_eq!(distortion(&id, &x, &x).unwrap(), 0.0);
        let two = line(&[0.0, 2.0]);
        let one = FiniteMetricSpace::singleton();
        let forced = Correspondence::new(vec![(0, 0), (1, 0)], 2, 1).unwrap();
        assert_eq!(distortion(&forced, &two, &one).unwrap(), 2.0);
        assert_eq!(gh_upper(&forced, &two, &one).unwrap(), 1.0);
        assert!(Correspondence::new(vec![(0, 0)], 2, 1).is_err());
        assert!(matches!(Correspondence::from_map(&[0, 0], 2), Err(Error::UncoveredTarget(1))));
    }

    #[test]
    fn exact_small_cases() {
        let tri = FiniteMetricSpace::from_fn((0..3).map(|i| i.to_string()).collect(), |i, j| {
            if i == j { 0.0 } else { 1.0 }
        })
        .unwrap();
        assert_eq!(gh_exact(&tri, &FiniteMetricSpace::singleton()).unwrap(), 0.5);
        assert_eq!(gh_exact(&line(&[0.0, 1.0]), &line(&[0.0, 2.0])).unwrap(), 0.5);
        let a = line(&[0.0, 1.0, 3.0]);
        let b = line(&[3.0, 0.0, 1.0]);
        assert_eq!(gh_exact(&a, &b).unwrap(), 0.0);
        let big = line(&(0..7).map(|i| i as f64).collect::<Vec<_>>());
        assert!(matches!(gh_exact(&big, &big), Err(Error::TooLarge { size: 49, .. })));
    }

    #[test]
    fn bounds_bracket_exact() {
        let a = line(&[0.0, 1.0, 3.0, 4.5]);
        let b = line(&[0.0, 2.0, 2.5]);
        let ex = gh_exact(&a, &b).unwrap();
        let bd = gh_bounds(&a, &b).unwrap();
        assert!(bd.lower <= ex + 1e-12 && ex <= bd.upper + 1e-12, "{bd:?} vs {ex}");
    }

    #[test]
    fn infinite_distances_between_components() {
        let inf = f64::INFINITY;
        let x = FiniteMetricSpace::from_matrix(vec![vec![0.0, inf], vec![inf, 0.0]]).unwrap();
        let id = Correspondence::new(vec![(0, 0), (1, 1)], 2, 2).unwrap();
        assert_eq!(distortion(&id, &x, &x).unwrap(), 0.0);
        let glued = Correspondence::new(vec![(0, 0), (1, 0)], 2, 1).unwrap();
        assert_eq!(distortion(&glued, &x, &FiniteMetricSpace::singleton()).unwrap(), inf);
    }
}
