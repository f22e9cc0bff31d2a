//! JSON configuration documents for the command-line entry points.
//!
//! Required top-level keys are checked by hand before serde decodes the
//! document, so an absent key is always reported as "missing key: <name>"
//! independent of field order, and unknown keys are rejected rather than
//! silently ignored. Shape problems surface as [`Error::Config`] or
//! [`Error::Json`] (exit code 2); value problems surface from the model
//! constructors (exit code 3).

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::loci::{CmFreeParam, CmHopfBase};
use crate::model::{ModelFamily, ModelInstance, PlanarState};
use crate::sweep::SweepConfig;

pub fn load_value(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Fails with "missing key: <name>" for the first required key absent from
/// the top-level object.
pub fn require_keys(v: &Value, keys: &[&str]) -> Result<()> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    for k in keys {
        if !obj.contains_key(*k) {
            return Err(Error::Config(format!("missing key: {k}")));
        }
    }
    Ok(())
}

fn decode<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(Error::from)
}

fn reject_unknown(v: &Value, allowed: &[&str]) -> Result<()> {
    let obj = v.as_object().expect("checked by require_keys");
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!("unknown key: {k}")));
        }
    }
    Ok(())
}

fn get_f64(v: &Value, key: &str) -> Result<f64> {
    v.as_object()
        .and_then(|o| o.get(key))
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Config(format!("key {key} must be a number")))
}

fn get_family(v: &Value) -> Result<ModelFamily> {
    decode(v.as_object().expect("checked by require_keys")["family"].clone())
}

fn default_series_points() -> usize {
    256
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub family: ModelFamily,
    pub params: BTreeMap<String, f64>,
    /// rows in the sampled-series CSV, spread across the admissible interval
    #[serde(default = "default_series_points")]
    pub series_points: usize,
}

impl AnalyzeConfig {
    pub fn parse(v: Value) -> Result<AnalyzeConfig> {
        require_keys(&v, &["family", "params"])?;
        let cfg: AnalyzeConfig = decode(v)?;
        if cfg.series_points == 0 {
            return Err(Error::Config("series_points must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn instance(&self) -> Result<ModelInstance> {
        ModelInstance::from_map(self.family, &self.params)
    }
}

/// Zero-trace locus request; the keys after `family` are flat because each
/// family's constructor takes a different tuple.
#[derive(Clone, Debug)]
pub enum HopfLociConfig {
    /// one constructed instance per request: equilibrium at x = k0/2
    Bazykin { k0: f64, b: f64, x0: f64, r: f64, sigma: f64 },
    /// tuned (beta, delta) at the requested prey value
    HollingIv { a: f64, h1: f64, h2: f64, x: f64 },
    /// tuned (c, gamma) at the requested prey value
    CrowleyMartin { base: CmHopfBase, x: f64 },
}

impl HopfLociConfig {
    pub fn parse(v: Value) -> Result<HopfLociConfig> {
        require_keys(&v, &["family"])?;
        match get_family(&v)? {
            ModelFamily::Bazykin => {
                let keys = ["k0", "b", "x0", "r", "sigma"];
                require_keys(&v, &keys)?;
                reject_unknown(&v, &["family", "k0", "b", "x0", "r", "sigma"])?;
                Ok(HopfLociConfig::Bazykin {
                    k0: get_f64(&v, "k0")?,
                    b: get_f64(&v, "b")?,
                    x0: get_f64(&v, "x0")?,
                    r: get_f64(&v, "r")?,
                    sigma: get_f64(&v, "sigma")?,
                })
            }
            ModelFamily::HollingIv => {
                require_keys(&v, &["a", "h1", "x"])?;
                reject_unknown(&v, &["family", "a", "h1", "h2", "x"])?;
                let h2 = if v.get("h2").is_some() { get_f64(&v, "h2")? } else { 0.0 };
                Ok(HopfLociConfig::HollingIv {
                    a: get_f64(&v, "a")?,
                    h1: get_f64(&v, "h1")?,
                    h2,
                    x: get_f64(&v, "x")?,
                })
            }
            ModelFamily::CrowleyMartin => {
                require_keys(&v, &["rho", "k", "a", "b", "d", "x"])?;
                reject_unknown(&v, &["family", "rho", "k", "a", "b", "d", "x"])?;
                Ok(HopfLociConfig::CrowleyMartin {
                    base: CmHopfBase {
                        rho: get_f64(&v, "rho")?,
                        k: get_f64(&v, "k")?,
                        a: get_f64(&v, "a")?,
                        b: get_f64(&v, "b")?,
                        d: get_f64(&v, "d")?,
                    },
                    x: get_f64(&v, "x")?,
                })
            }
            other => Err(Error::Config(format!(
                "zero-trace loci apply to continuous families, not {other}"
            ))),
        }
    }

    pub fn family(&self) -> ModelFamily {
        match self {
            HopfLociConfig::Bazykin { .. } => ModelFamily::Bazykin,
            HopfLociConfig::HollingIv { .. } => ModelFamily::HollingIv,
            HopfLociConfig::CrowleyMartin { .. } => ModelFamily::CrowleyMartin,
        }
    }
}

/// Double-zero search over a grid of prey values on the coupled
/// parameter slice (one shape degree of freedom).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BtLociConfig {
    pub family: ModelFamily,
    pub x0_lo: f64,
    pub x0_hi: f64,
    pub x0_step: f64,
}

impl BtLociConfig {
    pub fn parse(v: Value) -> Result<BtLociConfig> {
        require_keys(&v, &["family", "x0_lo", "x0_hi", "x0_step"])?;
        let cfg: BtLociConfig = decode(v)?;
        if cfg.family != ModelFamily::HollingIv {
            return Err(Error::Config(format!(
                "double-zero loci apply to family holling4, not {}",
                cfg.family
            )));
        }
        if !(cfg.x0_lo > 0.0 && cfg.x0_hi >= cfg.x0_lo && cfg.x0_step > 0.0) {
            return Err(Error::Config(
                "grid must satisfy 0 < x0_lo <= x0_hi with x0_step > 0".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn grid(&self) -> Vec<f64> {
        let mut xs = Vec::new();
        let mut i = 0usize;
        loop {
            let x = self.x0_lo + self.x0_step * i as f64;
            if x > self.x0_hi * (1.0 + 1e-12) {
                break;
            }
            xs.push(x);
            i += 1;
        }
        xs
    }
}

/// Unit-determinant locus request for the discrete family. The scan tunes
/// `free_parameter` (and conditions gamma per point), so `c` only matters
/// when the free slot is rho or d.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NsLociConfig {
    pub family: ModelFamily,
    pub rho: f64,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub free_parameter: Option<String>,
    #[serde(default)]
    pub x_lo: Option<f64>,
    #[serde(default)]
    pub x_hi: Option<f64>,
}

impl NsLociConfig {
    pub fn parse(v: Value) -> Result<NsLociConfig> {
        require_keys(&v, &["family", "rho", "k", "a", "b", "d"])?;
        let cfg: NsLociConfig = decode(v)?;
        if cfg.family != ModelFamily::DiscreteCrowleyMartin {
            return Err(Error::Config(format!(
                "unit-determinant loci apply to family discrete_crowley_martin, not {}",
                cfg.family
            )));
        }
        cfg.free()?;
        Ok(cfg)
    }

    pub fn free(&self) -> Result<CmFreeParam> {
        match self.free_parameter.as_deref() {
            None | Some("c") => Ok(CmFreeParam::Interference),
            Some("rho") => Ok(CmFreeParam::GrowthRate),
            Some("d") => Ok(CmFreeParam::Mortality),
            Some(other) => Err(Error::Config(format!(
                "free_parameter must be one of c, rho, d, got {other}"
            ))),
        }
    }

    /// Base instance for the scan; gamma is a placeholder because the scan
    /// conditions it per point.
    pub fn base(&self) -> Result<crate::model::CrowleyMartinParams> {
        crate::model::CrowleyMartinParams::new(
            self.rho, self.k, self.a, self.b, self.c, 1.0, self.d,
        )
    }
}

fn default_sim_steps() -> usize {
    100_000
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub family: ModelFamily,
    pub params: BTreeMap<String, f64>,
    pub start: PlanarState,
    #[serde(default = "default_sim_steps")]
    pub steps: usize,
    /// flow step size; the spectral default when absent, 1 for the map
    #[serde(default)]
    pub dt: Option<f64>,
    /// center for orbit classification; the nearest coexistence equilibrium
    /// when absent
    #[serde(default)]
    pub reference: Option<PlanarState>,
}

impl SimulateConfig {
    pub fn parse(v: Value) -> Result<SimulateConfig> {
        require_keys(&v, &["family", "params", "start"])?;
        let cfg: SimulateConfig = decode(v)?;
        if cfg.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if let Some(dt) = cfg.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        Ok(cfg)
    }

    pub fn instance(&self) -> Result<ModelInstance> {
        ModelInstance::from_map(self.family, &self.params)
    }
}

/// The sweep schema is [`SweepConfig`] itself; this wrapper only pins the
/// missing-key wording and runs the config validation up front.
pub fn parse_sweep(v: Value) -> Result<SweepConfig> {
    require_keys(&v, &["family", "samples", "seed", "checks"])?;
    let cfg: SweepConfig = decode(v)?;
    cfg.validate()?;
    Ok(cfg)
}

fn default_duality_values() -> usize {
    50
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualityConfig {
    pub rho: f64,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub c_lo: f64,
    pub c_hi: f64,
    #[serde(default = "default_duality_values")]
    pub values: usize,
}

impl DualityConfig {
    pub fn parse(v: Value) -> Result<DualityConfig> {
        require_keys(&v, &["rho", "k", "a", "b", "d", "c_lo", "c_hi"])?;
        decode(v)
    }

    pub fn base(&self) -> CmHopfBase {
        CmHopfBase { rho: self.rho, k: self.k, a: self.a, b: self.b, d: self.d }
    }
}

/// Duality comparison defaults: the unit-coefficient base with k = 2 over
/// interference values small enough that the zero-trace locus is nonempty
/// at every entry.
pub fn default_duality() -> DualityConfig {
    DualityConfig {
        rho: 1.0,
        k: 2.0,
        a: 1.0,
        b: 1.0,
        d: 1.0,
        c_lo: 1e-3,
        c_hi: 4e-2,
        values: default_duality_values(),
    }
}
