//! Heterogeneity algebra and cluster-head election probabilities.
//!
//! Nodes belong to one of four energy classes. A node of class `c` starts
//! with `e0 * (1 + alpha_c)` joules where `alpha` is `0`, `a`, `b` or `u`.
//! Its per-round election probability is
//!
//! ```text
//! p_i = p_opt * (1 + alpha_c) * E_i(r) / (D * E_avg(r))
//! D   = 1 + m * (a + m0 * (-a + b + m1 * (-b + u)))
//! ```
//!
//! so that, when every node holds exactly the average energy, the expected
//! number of heads is `p_opt * N`. The two- and three-level baselines use the
//! same expression with the upper classes folded together.

use std::fmt;
use std::str::FromStr;

use crate::error::{ConfigError, DomainError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Normal,
    Advanced,
    Super,
    UltraSuper,
}

impl NodeClass {
    pub const ALL: [NodeClass; 4] = [
        NodeClass::Normal,
        NodeClass::Advanced,
        NodeClass::Super,
        NodeClass::UltraSuper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NodeClass::Normal => "normal",
            NodeClass::Advanced => "advanced",
            NodeClass::Super => "super",
            NodeClass::UltraSuper => "ultra-super",
        }
    }

    /// Extra-energy multiplier for this class (`0`, `a`, `b` or `u`).
    pub fn alpha(self, params: &HeterogeneityParams) -> f64 {
        match self {
            NodeClass::Normal => 0.0,
            NodeClass::Advanced => params.a,
            NodeClass::Super => params.b,
            NodeClass::UltraSuper => params.u,
        }
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cluster-head election rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Fixed probability `p_opt`, energy-blind.
    Leach,
    /// Two levels: super and ultra-super nodes count as advanced.
    Deec,
    /// Three levels: ultra-super nodes count as super.
    Edeec,
    /// Four levels.
    Beenish,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Leach,
        Strategy::Deec,
        Strategy::Edeec,
        Strategy::Beenish,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Leach => "LEACH",
            Strategy::Deec => "DEEC",
            Strategy::Edeec => "EDEEC",
            Strategy::Beenish => "BEENISH",
        }
    }

    /// Class the strategy believes a node belongs to.
    pub fn effective_class(self, class: NodeClass) -> NodeClass {
        match (self, class) {
            (Strategy::Deec, NodeClass::Super | NodeClass::UltraSuper) => NodeClass::Advanced,
            (Strategy::Edeec, NodeClass::UltraSuper) => NodeClass::Super,
            _ => class,
        }
    }

    /// Heterogeneity parameters as seen by the strategy, with the fractions of
    /// the classes it cannot distinguish zeroed.
    pub fn effective_params(self, params: &HeterogeneityParams) -> HeterogeneityParams {
        match self {
            Strategy::Deec => HeterogeneityParams {
                m0: 0.0,
                m1: 0.0,
                ..*params
            },
            Strategy::Edeec => HeterogeneityParams { m1: 0.0, ..*params },
            Strategy::Leach | Strategy::Beenish => *params,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown strategy `{s}`; expected one of LEACH, DEEC, EDEEC, BEENISH")
            })
    }
}

/// Population mix and energy endowment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterogeneityParams {
    /// Fraction of nodes that are not normal.
    pub m: f64,
    /// Fraction of the non-normal nodes that are super or ultra-super.
    pub m0: f64,
    /// Fraction of those that are ultra-super.
    pub m1: f64,
    pub a: f64,
    pub b: f64,
    pub u: f64,
    /// Initial energy of a normal node (J).
    pub e0: f64,
    /// Target fraction of cluster heads per round.
    pub p_opt: f64,
}

impl Default for HeterogeneityParams {
    fn default() -> Self {
        Self {
            m: 0.5,
            m0: 0.3,
            m1: 0.2,
            a: 1.5,
            b: 2.0,
            u: 2.5,
            e0: 0.5,
            p_opt: 0.1,
        }
    }
}

impl HeterogeneityParams {
    /// Normaliser `D`; equals the network's total energy in units of `N * e0`.
    pub fn denominator(&self) -> f64 {
        1.0 + self.m * (self.a + self.m0 * (-self.a + self.b + self.m1 * (-self.b + self.u)))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, v) in [("het.m", self.m), ("het.m0", self.m0), ("het.m1", self.m1)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::invalid(
                    key,
                    format!("fraction {v} out of [0, 1]"),
                ));
            }
        }
        for (key, v) in [("het.a", self.a), ("het.b", self.b), ("het.u", self.u)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::invalid(
                    key,
                    format!("multiplier {v} must be finite and >= 0"),
                ));
            }
        }
        if !(self.e0.is_finite() && self.e0 > 0.0) {
            return Err(ConfigError::invalid(
                "het.e0",
                format!("base energy {} must be > 0", self.e0),
            ));
        }
        if !(self.p_opt > 0.0 && self.p_opt <= 1.0) {
            return Err(ConfigError::invalid(
                "het.p_opt",
                format!("{} out of (0, 1]", self.p_opt),
            ));
        }
        if !(self.denominator() > 0.0) {
            return Err(ConfigError::invalid(
                "het.m",
                "energy normaliser D must be > 0",
            ));
        }
        Ok(())
    }
}

/// Number of nodes in each class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassCounts {
    pub normal: u64,
    pub advanced: u64,
    pub super_: u64,
    pub ultra: u64,
}

impl ClassCounts {
    pub fn get(&self, class: NodeClass) -> u64 {
        match class {
            NodeClass::Normal => self.normal,
            NodeClass::Advanced => self.advanced,
            NodeClass::Super => self.super_,
            NodeClass::UltraSuper => self.ultra,
        }
    }

    pub fn total(&self) -> u64 {
        self.normal + self.advanced + self.super_ + self.ultra
    }

    pub fn as_tuple(&self) -> (u64, u64, u64, u64) {
        (self.normal, self.advanced, self.super_, self.ultra)
    }
}

// Nearest integer, exact halves going down. Keeps N * m * m0 = 1.5 at 1.
fn round_half_down(x: f64) -> f64 {
    let floor = x.floor();
    if x - floor > 0.5 {
        floor + 1.0
    } else {
        floor
    }
}

/// Splits `n_nodes` into the four classes using nested rounding of
/// `N*m`, `N*m*m0` and `N*m*m0*m1`.
pub fn class_counts(
    n_nodes: u64,
    params: &HeterogeneityParams,
) -> Result<ClassCounts, ConfigError> {
    if n_nodes == 0 {
        return Err(ConfigError::invalid("sim.n_nodes", "must be at least 1"));
    }
    let n = n_nodes as f64;
    let non_normal = round_half_down(n * params.m);
    let upper = round_half_down(n * params.m * params.m0);
    let ultra = round_half_down(n * params.m * params.m0 * params.m1);
    let normal = n - non_normal;
    let advanced = non_normal - upper;
    let super_ = upper - ultra;
    if [normal, advanced, super_, ultra].iter().any(|&c| c < 0.0) {
        return Err(ConfigError::invalid(
            "het.m",
            "class rounding produced a negative count",
        ));
    }
    Ok(ClassCounts {
        normal: normal as u64,
        advanced: advanced as u64,
        super_: super_ as u64,
        ultra: ultra as u64,
    })
}

pub fn initial_energy(class: NodeClass, params: &HeterogeneityParams) -> f64 {
    params.e0 * (1.0 + class.alpha(params))
}

/// Closed-form network energy `N * e0 * D`.
pub fn total_energy(n_nodes: u64, params: &HeterogeneityParams) -> f64 {
    n_nodes as f64 * params.e0 * params.denominator()
}

/// Linear estimate of the mean residual energy at `round`, given an expected
/// lifetime of `total_rounds` rounds. Zero once the estimate runs out.
pub fn average_energy_estimate(
    round: u64,
    total_rounds: u64,
    e_total: f64,
    n_nodes: u64,
) -> Result<f64, DomainError> {
    if total_rounds == 0 {
        return Err(DomainError::NonPositive {
            what: "total_rounds",
            value: 0.0,
        });
    }
    if n_nodes == 0 {
        return Err(DomainError::NoNodes);
    }
    let frac = 1.0 - round as f64 / total_rounds as f64;
    Ok((e_total / n_nodes as f64 * frac).max(0.0))
}

/// Expected number of rounds until the network is exhausted, at least 1.
pub fn lifetime_estimate(e_total: f64, e_round: f64) -> Result<u64, DomainError> {
    if !(e_round > 0.0) {
        return Err(DomainError::NonPositive {
            what: "e_round",
            value: e_round,
        });
    }
    Ok(((e_total / e_round).floor() as u64).max(1))
}

/// Per-round probability that a node of `class` with `residual` joules
/// becomes a cluster head.
pub fn election_probability(
    strategy: Strategy,
    class: NodeClass,
    residual: f64,
    avg_energy: f64,
    params: &HeterogeneityParams,
) -> Result<f64, DomainError> {
    if !(avg_energy > 0.0) {
        return Err(DomainError::NonPositive {
            what: "avg_energy",
            value: avg_energy,
        });
    }
    if !(residual >= 0.0) {
        return Err(DomainError::NonPositive {
            what: "residual",
            value: residual,
        });
    }
    if strategy == Strategy::Leach {
        return Ok(params.p_opt);
    }
    if residual == 0.0 {
        return Ok(0.0);
    }
    let seen = strategy.effective_params(params);
    let class = strategy.effective_class(class);
    let weight = 1.0 + class.alpha(&seen);
    let p = seen.p_opt * weight * (residual / avg_energy) / seen.denominator();
    Ok(p.clamp(f64::MIN_POSITIVE, 1.0))
}

/// Rotating epoch: rounds a node sits out after serving as head.
pub fn epoch_length(p: f64) -> Result<u64, DomainError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(DomainError::Probability(p));
    }
    Ok(((1.0 / p).round() as u64).max(1))
}

/// Election threshold for a node with probability `p` at `round`.
pub fn ch_threshold(p: f64, round: u64, eligible: bool) -> f64 {
    if !eligible || !(p > 0.0) {
        return 0.0;
    }
    let Ok(n) = epoch_length(p.min(1.0)) else {
        return 0.0;
    };
    let denom = 1.0 - p * (round % n) as f64;
    if denom <= 0.0 {
        return 1.0;
    }
    (p / denom).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use proptest::prelude::*;
    use proptest::strategy::Strategy as _;

    fn paper() -> HeterogeneityParams {
        HeterogeneityParams::default()
    }

    #[test]
    fn class_counts_examples() {
        assert_eq!(
            class_counts(100, &paper()).unwrap().as_tuple(),
            (50, 35, 12, 3)
        );
        let homo = HeterogeneityParams { m: 0.0, ..paper() };
        assert_eq!(class_counts(100, &homo).unwrap().as_tuple(), (100, 0, 0, 0));
        assert_eq!(class_counts(10, &paper()).unwrap().as_tuple(), (5, 4, 1, 0));
        assert!(class_counts(0, &paper()).is_err());
    }

    #[test]
    fn rounding_ties_go_down() {
        assert_eq!(round_half_down(1.5), 1.0);
        assert_eq!(round_half_down(1.5000001), 2.0);
        assert_eq!(round_half_down(2.49), 2.0);
        assert_eq!(round_half_down(0.0), 0.0);
    }

    #[test]
    fn initial_energy_per_class() {
        let p = paper();
        assert_eq!(initial_energy(NodeClass::Normal, &p), 0.5);
        assert_eq!(initial_energy(NodeClass::Advanced, &p), 1.25);
        assert_eq!(initial_energy(NodeClass::Super, &p), 1.5);
        assert_eq!(initial_energy(NodeClass::UltraSuper, &p), 1.75);
    }

    #[test]
    fn total_energy_examples() {
        let p = paper();
        assert!((total_energy(100, &p) - 92.0).abs() < 1e-12);
        let classwise: f64 = NodeClass::ALL
            .iter()
            .map(|&c| class_counts(100, &p).unwrap().get(c) as f64 * initial_energy(c, &p))
            .sum();
        assert!((classwise - 92.0).abs() < 1e-12);
        assert_eq!(
            total_energy(100, &HeterogeneityParams { m: 0.0, ..p }),
            50.0
        );
        let all_adv = HeterogeneityParams {
            m: 1.0,
            m0: 0.0,
            ..p
        };
        assert_eq!(total_energy(100, &all_adv), 100.0 * 0.5 * 2.5);
    }

    #[test]
    fn average_energy_examples() {
        assert_eq!(average_energy_estimate(0, 100, 92.0, 100).unwrap(), 0.92);
        assert_eq!(average_energy_estimate(100, 100, 92.0, 100).unwrap(), 0.0);
        assert!((average_energy_estimate(50, 100, 92.0, 100).unwrap() - 0.46).abs() < 1e-15);
        assert_eq!(average_energy_estimate(150, 100, 92.0, 100).unwrap(), 0.0);
        assert!(average_energy_estimate(1, 0, 92.0, 100).is_err());
    }

    #[test]
    fn lifetime_examples() {
        assert_eq!(lifetime_estimate(0.3, 0.3).unwrap(), 1);
        assert_eq!(lifetime_estimate(92.0, 0.02).unwrap(), 4600);
        assert_eq!(lifetime_estimate(10.5 * 0.7, 0.7).unwrap(), 10);
        assert_eq!(lifetime_estimate(0.0, 1.0).unwrap(), 1);
        assert!(lifetime_estimate(1.0, 0.0).is_err());
    }

    #[test]
    fn probability_examples() {
        let p = paper();
        let normal =
            election_probability(Strategy::Beenish, NodeClass::Normal, 0.7, 0.7, &p).unwrap();
        assert!((normal - 0.054348).abs() < 1e-6);
        let ultra =
            election_probability(Strategy::Beenish, NodeClass::UltraSuper, 0.7, 0.7, &p).unwrap();
        assert!((ultra - 0.190217).abs() < 1e-6);
        for s in [Strategy::Deec, Strategy::Edeec, Strategy::Beenish] {
            for c in NodeClass::ALL {
                assert_eq!(election_probability(s, c, 0.0, 0.7, &p).unwrap(), 0.0);
            }
        }
        assert_eq!(
            election_probability(Strategy::Leach, NodeClass::Super, 0.0, 0.7, &p).unwrap(),
            0.1
        );
        assert!(election_probability(Strategy::Beenish, NodeClass::Normal, 0.5, 0.0, &p).is_err());
    }

    #[test]
    fn probability_clamps_to_one() {
        let p = paper();
        let v = election_probability(Strategy::Beenish, NodeClass::UltraSuper, 100.0, 0.01, &p)
            .unwrap();
        assert_eq!(v, 1.0);
        let tiny =
            election_probability(Strategy::Beenish, NodeClass::Normal, 1e-300, 1e300, &p).unwrap();
        assert!(tiny > 0.0);
    }

    #[test]
    fn collapsed_classes() {
        assert_eq!(
            Strategy::Deec.effective_class(NodeClass::UltraSuper),
            NodeClass::Advanced
        );
        assert_eq!(
            Strategy::Deec.effective_class(NodeClass::Super),
            NodeClass::Advanced
        );
        assert_eq!(
            Strategy::Edeec.effective_class(NodeClass::UltraSuper),
            NodeClass::Super
        );
        assert_eq!(
            Strategy::Edeec.effective_class(NodeClass::Advanced),
            NodeClass::Advanced
        );
        assert_eq!(
            Strategy::Beenish.effective_class(NodeClass::UltraSuper),
            NodeClass::UltraSuper
        );
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(ch_threshold(0.1, 3, false), 0.0);
        assert_eq!(ch_threshold(0.1, 0, true), 0.1);
        assert_eq!(ch_threshold(0.1, 9, true), 1.0);
        assert_eq!(ch_threshold(0.1, 10, true), 0.1);
        assert_eq!(ch_threshold(0.0, 5, true), 0.0);
    }

    #[test]
    fn epoch_examples() {
        assert_eq!(epoch_length(0.1).unwrap(), 10);
        assert_eq!(epoch_length(1.0).unwrap(), 1);
        assert_eq!(epoch_length(0.054348).unwrap(), 18);
        assert!(epoch_length(0.0).is_err());
        assert!(epoch_length(-0.2).is_err());
    }

    #[test]
    fn strategy_parse() {
        assert_eq!("beenish".parse::<Strategy>().unwrap(), Strategy::Beenish);
        assert_eq!(" EDEEC ".parse::<Strategy>().unwrap(), Strategy::Edeec);
        assert!("ddeec".parse::<Strategy>().is_err());
    }

    #[test]
    fn validate_names_key() {
        let err = HeterogeneityParams { m: 1.5, ..paper() }
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("het.m"));
        let err = HeterogeneityParams {
            p_opt: 0.0,
            ..paper()
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("het.p_opt"));
    }

    fn het_strategy() -> impl proptest::strategy::Strategy<Value = HeterogeneityParams> {
        (
            0.0..=1.0f64,
            0.0..=1.0f64,
            0.0..=1.0f64,
            0.0..5.0f64,
            0.0..5.0f64,
            0.0..5.0f64,
            0.01..=1.0f64,
        )
            .prop_map(|(m, m0, m1, a, b, u, p_opt)| HeterogeneityParams {
                m,
                m0,
                m1,
                a,
                b,
                u,
                e0: 0.5,
                p_opt,
            })
    }

    proptest! {
        #[test]
        fn class_monotonicity(
            base in 0.0..3.0f64, db in 0.0..3.0f64, du in 0.0..3.0f64,
            residual in 0.01..2.0f64, avg in 0.01..2.0f64,
        ) {
            let p = HeterogeneityParams { a: base, b: base + db, u: base + db + du, ..paper() };
            let prob = |c| election_probability(Strategy::Beenish, c, residual, avg, &p).unwrap();
            prop_assert!(prob(NodeClass::UltraSuper) >= prob(NodeClass::Super));
            prop_assert!(prob(NodeClass::Super) >= prob(NodeClass::Advanced));
            prop_assert!(prob(NodeClass::Advanced) >= prob(NodeClass::Normal));
        }

        #[test]
        fn energy_monotonicity(p in het_strategy(), lo in 0.001..1.0f64, extra in 0.001..1.0f64) {
            let avg = 10.0;
            for s in [Strategy::Deec, Strategy::Edeec, Strategy::Beenish] {
                for c in NodeClass::ALL {
                    let a = election_probability(s, c, lo, avg, &p).unwrap();
                    let b = election_probability(s, c, lo + extra, avg, &p).unwrap();
                    prop_assert!(b > a || a == 1.0);
                }
            }
        }

        #[test]
        fn specialisation_chain(p in het_strategy(), residual in 0.0..2.0f64, avg in 0.01..2.0f64) {
            let no_ultra = HeterogeneityParams { m1: 0.0, ..p };
            for c in [NodeClass::Normal, NodeClass::Advanced, NodeClass::Super] {
                prop_assert_eq!(
                    election_probability(Strategy::Beenish, c, residual, avg, &no_ultra).unwrap(),
                    election_probability(Strategy::Edeec, c, residual, avg, &no_ultra).unwrap()
                );
            }
            let two_level = HeterogeneityParams { m0: 0.0, m1: 0.0, ..p };
            for c in [NodeClass::Normal, NodeClass::Advanced] {
                let b = election_probability(Strategy::Beenish, c, residual, avg, &two_level).unwrap();
                prop_assert_eq!(b, election_probability(Strategy::Edeec, c, residual, avg, &two_level).unwrap());
                prop_assert_eq!(b, election_probability(Strategy::Deec, c, residual, avg, &two_level).unwrap());
            }
            let homo = HeterogeneityParams { m: 0.0, ..p };
            for s in [Strategy::Deec, Strategy::Edeec, Strategy::Beenish] {
                prop_assert_eq!(
                    election_probability(s, NodeClass::Normal, avg, avg, &homo).unwrap(),
                    homo.p_opt
                );
            }
        }

        #[test]
        fn threshold_rises_through_epoch(n in 1u64..50) {
            let p = 1.0 / n as f64;
            let mut prev = 0.0;
            for r in 0..n {
                let t = ch_threshold(p, r, true);
                prop_assert!(t >= prev);
                prev = t;
            }
            prop_assert!(prev >= 1.0 - 1e-9);
        }
    }
}
