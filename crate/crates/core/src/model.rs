//! Component and system parameters.
//!
//! Each component is a three-state damage chain with actions
//! `do-nothing` / `repair` / `inspect`. Deterioration under do-nothing or
//! inspect follows an upper-triangular row-stochastic matrix with an
//! absorbing failure state; repair applies an instantaneous restoration
//! matrix and then the same deterioration step. Inspection yields a noisy
//! damage reading; without inspection the observation channel is uniform
//! (carries no information).

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Row-stochastic 3x3 matrix, rows indexed by current state.
pub type Matrix3 = [[f64; 3]; 3];

/// Number of damage states per component (`no-damage`, `major-damage`, `failure`).
pub const N_STATES: usize = 3;
/// Number of actions per component.
pub const N_ACTIONS: usize = 3;
/// Number of observation symbols per component (same labels as states).
pub const N_OBS: usize = 3;
/// Index of the failed state.
pub const FAILED: usize = 2;

/// Per-component action set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentAction {
    DoNothing,
    Repair,
    Inspect,
}

impl ComponentAction {
    pub const ALL: [ComponentAction; 3] = [
        ComponentAction::DoNothing,
        ComponentAction::Repair,
        ComponentAction::Inspect,
    ];

    pub fn index(self) -> usize {
        match self {
            ComponentAction::DoNothing => 0,
            ComponentAction::Repair => 1,
            ComponentAction::Inspect => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<ComponentAction> {
        Self::ALL.get(i).copied()
    }
}

/// How the system failure probability entering the risk term is evaluated.
///
/// The two readings differ by a one-step shift. The catalog default is the
/// current-state indicator: solved cost bounds under it bracket the
/// published reference values for the 4-component systems, while the
/// next-state closed form lands systematically higher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RiskMode {
    /// `p_f` = probability that fewer than k components are functional at the
    /// *next* state given (s, a), from the closed-form k-out-of-n expression
    /// over per-component one-step failure probabilities.
    NextStateClosedForm,
    /// `p_f` = the closed form evaluated at the known current state, where
    /// per-component failure probabilities degenerate to 0/1: an indicator
    /// that fewer than k components are currently functional. Default.
    CurrentStateIndicator,
}

/// Reward-model variants studied alongside the base case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Mobilization cost 4, failure penalty factor 3 (the 4-component base case).
    Base,
    /// Mobilization cost 0, failure penalty factor 3.
    NoMobilization,
    /// Mobilization cost 0, failure penalty factor 1.5.
    LowKappa,
}

/// One component's deterioration, repair, and observation model plus costs.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentModel {
    /// Transition matrix under do-nothing / inspect.
    pub t_nominal: Matrix3,
    /// Instantaneous effect of repair, applied before deterioration.
    pub t_repair_effect: Matrix3,
    /// Composed repair transition `t_repair_effect * t_nominal`.
    pub t_repair: Matrix3,
    /// Observation model under inspection, rows indexed by (next) state.
    pub o_inspect: Matrix3,
    /// Observation model otherwise: uniform 1/3 everywhere.
    pub o_null: Matrix3,
    pub cost_repair: f64,
    pub cost_inspect: f64,
}

impl ComponentModel {
    /// Build and validate a component from its primitive matrices.
    pub fn new(
        t_nominal: Matrix3,
        t_repair_effect: Matrix3,
        o_inspect: Matrix3,
        cost_repair: f64,
        cost_inspect: f64,
    ) -> Result<ComponentModel, CoreError> {
        let t_repair = mat_mul(&t_repair_effect, &t_nominal);
        let o_null = [[1.0 / 3.0; 3]; 3];
        let cm = ComponentModel {
            t_nominal,
            t_repair_effect,
            t_repair,
            o_inspect,
            o_null,
            cost_repair,
            cost_inspect,
        };
        cm.validate()?;
        Ok(cm)
    }

    fn validate(&self) -> Result<(), CoreError> {
        for (name, m) in [
            ("t_nominal", &self.t_nominal),
            ("t_repair_effect", &self.t_repair_effect),
            ("t_repair", &self.t_repair),
            ("o_inspect", &self.o_inspect),
            ("o_null", &self.o_null),
        ] {
            check_stochastic(name, m, 1e-12)?;
        }
        // Deterioration cannot improve the state and failure is absorbing.
        for s in 0..N_STATES {
            for sp in 0..s {
                if self.t_nominal[s][sp] != 0.0 {
                    return Err(CoreError::InvalidDistribution {
                        context: "t_nominal".into(),
                        detail: format!("entry ({s},{sp}) below diagonal is nonzero"),
                    });
                }
            }
        }
        if self.t_nominal[FAILED][FAILED] != 1.0 {
            return Err(CoreError::InvalidDistribution {
                context: "t_nominal".into(),
                detail: "failure state is not absorbing".into(),
            });
        }
        if self.cost_repair < 0.0 || self.cost_inspect < 0.0 {
            return Err(CoreError::InvalidDistribution {
                context: "costs".into(),
                detail: "negative cost".into(),
            });
        }
        Ok(())
    }

    /// Transition matrix effective under `action`.
    pub fn transition(&self, action: ComponentAction) -> &Matrix3 {
        match action {
            ComponentAction::Repair => &self.t_repair,
            _ => &self.t_nominal,
        }
    }

    /// Observation matrix effective under `action` (rows: next state).
    pub fn observation(&self, action: ComponentAction) -> &Matrix3 {
        match action {
            ComponentAction::Inspect => &self.o_inspect,
            _ => &self.o_null,
        }
    }
}

/// The k-out-of-n system: components, redundancy threshold, and shared costs.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    pub components: Vec<ComponentModel>,
    /// The system operates while at least `k` components are functional.
    pub k: usize,
    /// Mobilization cost, charged once per timestep with any intervention.
    pub c_mob: f64,
    /// Failure penalty factor; `c_f = kappa * sum of repair costs`.
    pub kappa: f64,
    /// Failure cost entering the risk term `c_f * p_f`.
    pub c_f: f64,
    pub gamma: f64,
    /// Initial per-component belief.
    pub b0: [f64; 3],
    pub risk_mode: RiskMode,
}

impl SystemModel {
    pub fn new(
        components: Vec<ComponentModel>,
        k: usize,
        c_mob: f64,
        kappa: f64,
        gamma: f64,
        b0: [f64; 3],
        risk_mode: RiskMode,
    ) -> Result<SystemModel, CoreError> {
        let n = components.len();
        if n == 0 || k == 0 || k > n {
            return Err(CoreError::UnsupportedSystem(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(CoreError::UnsupportedSystem(format!(
                "discount factor must be in (0,1), got {gamma}"
            )));
        }
        let s: f64 = b0.iter().sum();
        if (s - 1.0).abs() > 1e-9 || b0.iter().any(|&x| x < 0.0) {
            return Err(CoreError::InvalidDistribution {
                context: "b0".into(),
                detail: format!("not on the simplex: {b0:?}"),
            });
        }
        let c_f = kappa * components.iter().map(|c| c.cost_repair).sum::<f64>();
        Ok(SystemModel {
            components,
            k,
            c_mob,
            kappa,
            c_f,
            gamma,
            b0,
            risk_mode,
        })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// Input width of a centralized observer: all component beliefs stacked.
    pub fn central_dim(&self) -> usize {
        3 * self.n()
    }
}

// ---------------------------------------------------------------------------
// Study catalog: four heterogeneous components.
// ---------------------------------------------------------------------------

const T_NOMINAL: [Matrix3; 4] = [
    [[0.82, 0.18, 0.0], [0.0, 0.87, 0.13], [0.0, 0.0, 1.0]],
    [[0.72, 0.28, 0.0], [0.0, 0.78, 0.22], [0.0, 0.0, 1.0]],
    [[0.79, 0.21, 0.0], [0.0, 0.85, 0.15], [0.0, 0.0, 1.0]],
    [[0.72, 0.28, 0.0], [0.0, 0.78, 0.22], [0.0, 0.0, 1.0]],
];

/// Repair restores to no-damage with probability {0.95, 0.9, 0.98, 1}; the
/// residual mass stays where it was (failed stays failed for components 1-3).
const T_REPAIR_EFFECT: [Matrix3; 4] = [
    [[1.0, 0.0, 0.0], [0.95, 0.05, 0.0], [0.95, 0.0, 0.05]],
    [[1.0, 0.0, 0.0], [0.9, 0.1, 0.0], [0.9, 0.0, 0.1]],
    [[1.0, 0.0, 0.0], [0.98, 0.02, 0.0], [0.98, 0.0, 0.02]],
    [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
];

const O_INSPECT: [Matrix3; 4] = [
    [[0.8, 0.2, 0.0], [0.1, 0.8, 0.1], [0.0, 0.05, 0.95]],
    [[0.85, 0.15, 0.0], [0.075, 0.85, 0.075], [0.0, 0.1, 0.9]],
    [[0.9, 0.1, 0.0], [0.05, 0.9, 0.05], [0.0, 0.02, 0.98]],
    [[0.9, 0.1, 0.0], [0.05, 0.9, 0.05], [0.0, 0.0, 1.0]],
];

const COST_REPAIR: [f64; 4] = [50.0, 30.0, 80.0, 90.0];
const COST_INSPECT: [f64; 4] = [5.0, 3.0, 8.0, 4.0];

/// Shared initial belief for every component.
pub const B0: [f64; 3] = [0.6, 0.4, 0.0];
/// Discount factor used throughout the study.
pub const GAMMA: f64 = 0.8;

/// Component `index` (0-based) from the study catalog.
pub fn catalog_component(index: usize) -> Result<ComponentModel, CoreError> {
    if index >= 4 {
        return Err(CoreError::UnsupportedSystem(format!(
            "catalog has 4 components, asked for index {index}"
        )));
    }
    ComponentModel::new(
        T_NOMINAL[index],
        T_REPAIR_EFFECT[index],
        O_INSPECT[index],
        COST_REPAIR[index],
        COST_INSPECT[index],
    )
}

/// Build a k-out-of-n system from the study catalog.
///
/// `n` in {2,3,4} takes the first `n` catalog components. `Base`
/// (mobilization 4, kappa 3) is defined only for the full 4-component
/// system; the smaller systems and the reward ablation drop mobilization.
pub fn build_paper_system(n: usize, k: usize, variant: Variant) -> Result<SystemModel, CoreError> {
    if !(2..=4).contains(&n) {
        return Err(CoreError::UnsupportedSystem(format!(
            "catalog systems have n in {{2,3,4}}, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(CoreError::UnsupportedSystem(format!(
            "need 1 <= k <= n, got k = {k}"
        )));
    }
    if variant == Variant::Base && n != 4 {
        return Err(CoreError::UnsupportedSystem(
            "the base variant (with mobilization cost) is defined for n = 4 only".into(),
        ));
    }
    let (c_mob, kappa) = match variant {
        Variant::Base => (4.0, 3.0),
        Variant::NoMobilization => (0.0, 3.0),
        Variant::LowKappa => (0.0, 1.5),
    };
    let components = (0..n)
        .map(catalog_component)
        .collect::<Result<Vec<_>, _>>()?;
    SystemModel::new(
        components,
        k,
        c_mob,
        kappa,
        GAMMA,
        B0,
        RiskMode::CurrentStateIndicator,
    )
}

/// Single-catalog-component system (useful as a plain POMDP testbed).
pub fn single_component_system(index: usize) -> Result<SystemModel, CoreError> {
    SystemModel::new(
        vec![catalog_component(index)?],
        1,
        0.0,
        3.0,
        GAMMA,
        B0,
        RiskMode::CurrentStateIndicator,
    )
}

pub(crate) fn mat_mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for x in 0..3 {
                acc += a[i][x] * b[x][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn check_stochastic(name: &str, m: &Matrix3, tol: f64) -> Result<(), CoreError> {
    for (r, row) in m.iter().enumerate() {
        if row.iter().any(|&x| x < 0.0) {
            return Err(CoreError::InvalidDistribution {
                context: name.into(),
                detail: format!("row {r} has a negative entry"),
            });
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > tol {
            return Err(CoreError::InvalidDistribution {
                context: name.into(),
                detail: format!("row {r} sums to {s}"),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_rows_are_stochastic() {
        for i in 0..4 {
            let c = catalog_component(i).unwrap();
            for m in [&c.t_nominal, &c.t_repair_effect, &c.t_repair, &c.o_inspect] {
                for row in m {
                    let s: f64 = row.iter().sum();
                    assert!((s - 1.0).abs() < 1e-12, "component {i} row sum {s}");
                }
            }
            assert_eq!(c.t_nominal[FAILED][FAILED], 1.0);
            assert!(c.o_null.iter().flatten().all(|&x| x == 1.0 / 3.0));
        }
    }

    #[test]
    fn base_system_matches_catalog_costs() {
        let m = build_paper_system(4, 3, Variant::Base).unwrap();
        assert_eq!(m.components[0].t_nominal[0], [0.82, 0.18, 0.0]);
        assert_eq!(m.components[0].t_nominal[1], [0.0, 0.87, 0.13]);
        assert_eq!(m.c_f, 3.0 * (50.0 + 30.0 + 80.0 + 90.0));
        assert_eq!(m.c_mob, 4.0);
        assert_eq!(m.gamma, 0.8);
        assert_eq!(m.b0, [0.6, 0.4, 0.0]);
    }

    #[test]
    fn ablation_variants() {
        let m = build_paper_system(2, 1, Variant::NoMobilization).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.c_f, 3.0 * (50.0 + 30.0));
        assert_eq!(m.c_mob, 0.0);

        let m = build_paper_system(4, 4, Variant::LowKappa).unwrap();
        assert_eq!(m.c_f, 1.5 * 250.0);
        assert_eq!(m.c_f, 375.0);
    }

    #[test]
    fn rejects_out_of_catalog_requests() {
        assert!(build_paper_system(5, 1, Variant::Base).is_err());
        assert!(build_paper_system(4, 0, Variant::Base).is_err());
        assert!(build_paper_system(4, 5, Variant::Base).is_err());
        assert!(build_paper_system(3, 2, Variant::Base).is_err());
        assert!(build_paper_system(2, 2, Variant::NoMobilization).is_ok());
    }

    #[test]
    fn repair_composition_applies_restoration_first() {
        // Failed component 1 under repair: restored w.p. 0.95, then deteriorates.
        let c = catalog_component(0).unwrap();
        let row = c.t_repair[FAILED];
        assert!((row[0] - 0.95 * 0.82).abs() < 1e-15);
        assert!((row[1] - 0.95 * 0.18).abs() < 1e-15);
        assert!((row[2] - 0.05).abs() < 1e-15);
        // Component 4 repair is certain: every composed row equals the fresh row.
        let c4 = catalog_component(3).unwrap();
        for s in 0..3 {
            assert_eq!(c4.t_repair[s], c4.t_nominal[0]);
        }
    }
}
