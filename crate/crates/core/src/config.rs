//! Plain-text system configuration.
//!
//! A system file either names a catalog system (`n`, `k`, `variant`) or
//! spells out every component explicitly. Catalog shorthand:
//!
//! ```toml
//! n = 4
//! k = 2
//! variant = "base"
//! risk_mode = "next-state-closed-form"   # optional
//! ```
//!
//! Explicit form (what [`to_toml`] emits) carries `k`, `c_mob`, `kappa`,
//! `gamma`, `b0`, `risk_mode`, and a `[[components]]` table per component
//! with `t_nominal`, `t_repair_effect`, `o_inspect`, `cost_repair`,
//! `cost_inspect`. Round-trips are lossless.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::model::{build_paper_system, ComponentModel, Matrix3, RiskMode, SystemModel, Variant};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComponentConfig {
    t_nominal: Matrix3,
    t_repair_effect: Matrix3,
    o_inspect: Matrix3,
    cost_repair: f64,
    cost_inspect: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SystemConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<Variant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_mob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b0: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    risk_mode: Option<RiskMode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentConfig>,
}

/// Serialize a system in the explicit (fully spelled-out) form.
pub fn to_toml(model: &SystemModel) -> String {
    let cfg = SystemConfig {
        n: None,
        k: model.k,
        variant: None,
        c_mob: Some(model.c_mob),
        kappa: Some(model.kappa),
        gamma: Some(model.gamma),
        b0: Some(model.b0),
        risk_mode: Some(model.risk_mode),
        components: model
            .components
            .iter()
            .map(|c| ComponentConfig {
                t_nominal: c.t_nominal,
                t_repair_effect: c.t_repair_effect,
                o_inspect: c.o_inspect,
                cost_repair: c.cost_repair,
                cost_inspect: c.cost_inspect,
            })
            .collect(),
    };
    toml::to_string(&cfg).expect("system config serializes")
}

/// Parse a system from either form.
pub fn from_toml(text: &str) -> Result<SystemModel, CoreError> {
    let cfg: SystemConfig =
        toml::from_str(text).map_err(|e| CoreError::Config(e.to_string()))?;
    let risk_mode = cfg.risk_mode.unwrap_or(RiskMode::CurrentStateIndicator);
    if !cfg.components.is_empty() {
        let components = cfg
            .components
            .iter()
            .map(|c| {
                ComponentModel::new(
                    c.t_nominal,
                    c.t_repair_effect,
                    c.o_inspect,
                    c.cost_repair,
                    c.cost_inspect,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut model = SystemModel::new(
            components,
            cfg.k,
            cfg.c_mob.ok_or_else(|| missing("c_mob"))?,
            cfg.kappa.ok_or_else(|| missing("kappa"))?,
            cfg.gamma.ok_or_else(|| missing("gamma"))?,
            cfg.b0.ok_or_else(|| missing("b0"))?,
            risk_mode,
        )?;
        model.risk_mode = risk_mode;
        Ok(model)
    } else {
        let n = cfg.n.ok_or_else(|| missing("n (or explicit components)"))?;
        let variant = cfg.variant.ok_or_else(|| missing("variant"))?;
        let mut model = build_paper_system(n, cfg.k, variant)?;
        if let Some(g) = cfg.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(CoreError::Config(format!("gamma out of range: {g}")));
            }
            model.gamma = g;
        }
        if let Some(b0) = cfg.b0 {
            model.b0 = b0;
        }
        model.risk_mode = risk_mode;
        Ok(model)
    }
}

fn missing(key: &str) -> CoreError {
    CoreError::Config(format!("missing required key `{key}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_form_round_trips_losslessly() {
        let model = build_paper_system(4, 2, Variant::Base).unwrap();
        let text = to_toml(&model);
        let back = from_toml(&text).unwrap();
        assert_eq!(model, back);
        // And once more through the explicit form.
        assert_eq!(to_toml(&back), text);
    }

    #[test]
    fn catalog_shorthand_parses() {
        let model = from_toml("n = 2\nk = 1\nvariant = \"no-mobilization\"\n").unwrap();
        assert_eq!(model.n(), 2);
        assert_eq!(model.c_mob, 0.0);
        let model =
            from_toml("n = 4\nk = 4\nvariant = \"base\"\nrisk_mode = \"current-state-indicator\"\n")
                .unwrap();
        assert_eq!(model.risk_mode, RiskMode::CurrentStateIndicator);
    }

    #[test]
    fn missing_keys_are_named() {
        let err = from_toml("k = 1\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('n'), "{msg}");
        let err = from_toml("n = 9\nk = 1\nvariant = \"base\"\n").unwrap_err();
        assert!(matches!(err, CoreError::UnsupportedSystem(_)));
    }
}
