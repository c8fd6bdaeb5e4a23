use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::scenario::{Scenario, ScenarioId};
use crate::bundle::PQParams;
use crate::error::{Error, Result};
use crate::submersion::WarpSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarpKind {
    /// `f_n = c₀ / n^decay`, params `[c₀, decay]`.
    ConstantSequence,
    /// `f_n(x) = c₀ / n^decay · (1 + amp·sin x₀)`, params `[c₀, decay, amp]`.
    Separable,
}

/// Flat key/value experiment description, read from TOML.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario_id: ScenarioId,
    #[serde(default = "default_base_resolution")]
    pub base_resolution: usize,
    #[serde(default = "default_fiber_resolution")]
    pub fiber_resolution: usize,
    #[serde(default = "default_fiber_resolution")]
    pub sphere_fiber_resolution: usize,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default = "default_warp_kind")]
    pub warp_kind: WarpKind,
    #[serde(default = "default_warp_params")]
    pub warp_params: Vec<f64>,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_path")]
    pub out_path: PathBuf,
}

fn default_base_resolution() -> usize {
    32
}
fn default_fiber_resolution() -> usize {
    16
}
fn one() -> f64 {
    1.0
}
fn default_warp_kind() -> WarpKind {
    WarpKind::ConstantSequence
}
fn default_warp_params() -> Vec<f64> {
    vec![1.0, 1.0]
}
fn default_n_list() -> Vec<u32> {
    vec![1, 2, 4, 8, 16]
}
fn default_out_path() -> PathBuf {
    PathBuf::from("collapse.csv")
}

/// Parameters of a warp family after validation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarpFamily {
    pub kind: WarpKind,
    pub c0: f64,
    pub decay: f64,
    pub amp: f64,
}

impl WarpFamily {
    pub fn from_params(kind: WarpKind, params: &[f64]) -> Result<Self> {
        let (c0, decay, amp) = match (kind, params) {
            (WarpKind::ConstantSequence, [c0]) => (*c0, 1.0, 0.0),
            (WarpKind::ConstantSequence, [c0, decay]) => (*c0, *decay, 0.0),
            (WarpKind::Separable, [c0, decay, amp]) => (*c0, *decay, *amp),
            _ => {
                return Err(Error::Config(format!("warp_params {params:?} do not fit warp_kind {kind:?}")));
            }
        };
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::Config(format!("warp scale c0 = {c0} must be positive")));
        }
        if !(decay >= 0.0) || !decay.is_finite() {
            return Err(Error::Config(format!("warp decay {decay} must be nonnegative")));
        }
        if !(amp.abs() < 1.0) {
            return Err(Error::Config(format!("warp amplitude {amp} must satisfy |amp| < 1")));
        }
        Ok(WarpFamily { kind, c0, decay, amp })
    }

    /// Uniform bound `c₀(1 + |amp|)` over all `n`.
    pub fn upper_bound(&self) -> f64 {
        self.c0 * (1.0 + self.amp.abs())
    }

    pub fn scale(&self, n: u32) -> f64 {
        self.c0 / (n as f64).powf(self.decay)
    }

    pub fn member(&self, n: u32) -> WarpSpec {
        let (c, amp) = (self.scale(n), self.amp);
        match self.kind {
            WarpKind::ConstantSequence => WarpSpec::new(move |_| c, self.upper_bound()),
            WarpKind::Separable => WarpSpec::new(move |x| c * (1.0 + amp * x[0].sin()), self.upper_bound()),
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ScenarioConfig::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("base_resolution", self.base_resolution),
            ("fiber_resolution", self.fiber_resolution),
            ("sphere_fiber_resolution", self.sphere_fiber_resolution),
        ] {
            if r < 4 {
                return Err(Error::Config(format!("{name} = {r} must be at least 4")));
            }
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("n_list is empty".into()));
        }
        if self.n_list[0] == 0 || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("n_list {:?} must be positive and increasing", self.n_list)));
        }
        self.pq()?;
        self.warp_family()?;
        Ok(())
    }

    pub fn pq(&self) -> Result<PQParams> {
        PQParams::new(self.p, self.q).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn warp_family(&self) -> Result<WarpFamily> {
        WarpFamily::from_params(self.warp_kind, &self.warp_params)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.scenario_id, self.base_resolution, self.fiber_resolution, self.sphere_fiber_resolution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = ScenarioConfig::from_toml_str("scenario_id = \"product-torus\"\n").unwrap();
        assert_eq!(cfg.base_resolution, 32);
        assert_eq!(cfg.fiber_resolution, 16);
        assert_eq!(cfg.n_list, vec![1, 2, 4, 8, 16]);
        assert_eq!(cfg.pq().unwrap(), PQParams::cheeger_gromoll());
        let fam = cfg.warp_family().unwrap();
        assert_eq!(fam.scale(4), 0.25);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "scenario_id = \"torus\"",
            "scenario_id = \"hopf\"\nbase_resolution = 3",
            "scenario_id = \"hopf\"\nn_list = []",
            "scenario_id = \"hopf\"\nn_list = [2, 1]",
            "scenario_id = \"hopf\"\nq = -1.0",
            "scenario_id = \"hopf\"\nwarp_kind = \"separable\"\nwarp_params = [1.0, 1.0, 1.5]",
            "scenario_id = \"hopf\"\nwarp_params = [0.0]",
            "scenario_id = \"hopf\"\ncolour = 3",
        ] {
            assert!(ScenarioConfig::from_toml_str(text).is_err(), "{text}");
        }
    }

    #[test]
    fn separable_members_respect_bound() {
        let fam = WarpFamily::from_params(WarpKind::Separable, &[1.0, 1.0, 0.5]).unwrap();
        assert_eq!(fam.upper_bound(), 1.5);
        let f = fam.member(2);
        let x = nalgebra::DVector::from_vec(vec![std::f64::consts::FRAC_PI_2]);
        assert!((f.eval(&x) - 0.75).abs() < 1e-15);
        assert!(f.validate(&crate::geom::catalog::circle(1.0)).is_ok());
    }
}
