use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geom::{catalog, Coords};
use crate::submersion::SubmersionModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    /// Flat `T² → S¹`, projecting to the first factor.
    ProductTorus,
    /// `S² × S¹ → S²`.
    ProductSphereCircle,
    /// `S³ → S²(1/2)` in Hopf coordinates.
    Hopf,
    /// The round `S²` mapped to itself.
    Identity,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 4] =
        [ScenarioId::ProductTorus, ScenarioId::ProductSphereCircle, ScenarioId::Hopf, ScenarioId::Identity];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioId::ProductTorus => "product-torus",
            ScenarioId::ProductSphereCircle => "product-sphere-circle",
            ScenarioId::Hopf => "hopf",
            ScenarioId::Identity => "identity",
        }
    }

    /// Whether the horizontal distribution is integrable.
    pub fn integrable(&self) -> bool {
        !matches!(self, ScenarioId::Hopf)
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown scenario `{s}`")))
    }
}

/// A catalog submersion together with its sampling lattices.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: ScenarioId,
    pub submersion: SubmersionModel,
    pub total_resolution: Vec<usize>,
    pub base_resolution: Vec<usize>,
    pub sphere_resolution: usize,
}

/// The submersion behind a scenario id, with its analytic Jacobian.
pub fn submersion(id: ScenarioId) -> SubmersionModel {
    let v = |x: &[f64]| DVector::from_column_slice(x);
    match id {
        ScenarioId::ProductTorus => SubmersionModel::new(catalog::flat_torus(), catalog::circle(1.0), move |x| v(&x[..1]))
            .expect("valid dimensions")
            .with_jacobian(|_| DMatrix::from_row_slice(1, 2, &[1.0, 0.0])),
        ScenarioId::ProductSphereCircle => {
            SubmersionModel::new(catalog::sphere_times_circle(), catalog::round_sphere(), move |x| v(&x[..2]))
                .expect("valid dimensions")
                .with_jacobian(|_| DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]))
        }
        ScenarioId::Hopf => SubmersionModel::new(catalog::hopf_three_sphere(), catalog::sphere(0.5), |x| {
            DVector::from_vec(vec![2.0 * x[0], x[2] - x[1]])
        })
        .expect("valid dimensions")
        .with_jacobian(|_| DMatrix::from_row_slice(2, 3, &[2.0, 0.0, 0.0, 0.0, -1.0, 1.0])),
        ScenarioId::Identity => SubmersionModel::identity(catalog::round_sphere()),
    }
}

impl Scenario {
    /// Builds the scenario with base-direction axes at `base_res` and fiber axes at
    /// `fiber_res`, and checks the submersion invariants on a lattice.
    pub fn new(id: ScenarioId, base_res: usize, fiber_res: usize, sphere_res: usize) -> Result<Self> {
        if base_res < 4 || fiber_res < 4 || sphere_res < 4 {
            return Err(Error::InvalidScenario(format!(
                "resolutions must be at least 4 (got {base_res}, {fiber_res}, {sphere_res})"
            )));
        }
        let (total_resolution, base_resolution) = match id {
            ScenarioId::ProductTorus => (vec![base_res, fiber_res], vec![base_res]),
            ScenarioId::ProductSphereCircle | ScenarioId::Hopf => {
                (vec![base_res, base_res, fiber_res], vec![base_res, base_res])
            }
            ScenarioId::Identity => (vec![base_res, base_res], vec![base_res, base_res]),
        };
        let scenario = Scenario { id, submersion: submersion(id), total_resolution, base_resolution, sphere_resolution: sphere_res };
        scenario.check_invariants()?;
        Ok(scenario)
    }

    fn check_invariants(&self) -> Result<()> {
        let probe = vec![4; self.submersion.total().dim()];
        let points = self.submersion.total().sample_grid(&probe)?;
        let d = self.submersion.diagnostics(&points)?;
        if d.splitting > 1e-9 || d.lift_projection > 1e-9 || d.riemannian > 1e-6 || d.min_singular_value <= 1e-8 {
            return Err(Error::InvalidScenario(format!("{} fails the submersion invariants: {d:?}", self.id)));
        }
        Ok(())
    }

    /// `count` reproducible interior points of the total space.
    pub fn random_points(&self, count: usize, seed: u64) -> Vec<Coords> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let axes = self.submersion.total().axes();
        (0..count)
            .map(|_| {
                DVector::from_iterator(
                    axes.len(),
                    axes.iter().map(|a| {
                        let (lo, hi) = a.sample_range();
                        // keep well inside interval axes so finite-difference stencils fit
                        let pad = if a.periodic { 0.0 } else { 0.05 * (hi - lo) };
                        rng.random_range(lo + pad..hi - pad)
                    }),
                )
            })
            .collect()
    }
}
