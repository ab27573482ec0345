//! The repeated Climb Game.
//!
//! Two agents, three actions each, rewards depending only on the joint
//! action. The optimal joint action `(a1, a1)` pays 11 but is shadowed:
//! a unilateral deviation from it costs -30, which makes the safer
//! suboptimal equilibria attractive to independent learners.

/// Stateless two-agent matrix game, played repeatedly for a fixed horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ClimbGame {
    /// `payoff[i][j]` = reward when agent 2 plays `i` and agent 1 plays `j`.
    pub payoff: [[f64; 3]; 3],
    pub horizon: usize,
}

impl Default for ClimbGame {
    fn default() -> Self {
        ClimbGame {
            payoff: [[11.0, -30.0, 0.0], [-30.0, 7.0, 6.0], [0.0, 0.0, 5.0]],
            horizon: 25,
        }
    }
}

impl ClimbGame {
    /// Reward of the joint action `(agent 1's action, agent 2's action)`.
    pub fn step(&self, joint_action: (usize, usize)) -> f64 {
        let (a1, a2) = joint_action;
        self.payoff[a2][a1]
    }

    /// Undiscounted return of repeating one joint action for the horizon.
    pub fn repeated_return(&self, joint_action: (usize, usize)) -> f64 {
        self.horizon as f64 * self.step(joint_action)
    }
}
