//! First-order radio energy model.
//!
//! A transmitter spends `e_elec` per bit on electronics plus an amplifier
//! term that is quadratic in distance below the crossover distance `d0` and
//! quartic at or above it. Receivers spend only the electronics cost.
//! Cluster heads additionally pay `e_da` per bit for every signal they fuse.
//!
//! The network-level helpers ([`round_energy`], [`optimal_cluster_count`])
//! assume nodes uniformly scattered over a square field and are used only to
//! estimate the expected network lifetime before a run starts.

use std::f64::consts::PI;

use crate::error::{ConfigError, DomainError};

/// Mean distance from a uniformly placed node to the centre of a square field,
/// as a fraction of half the side length.
pub const BS_DISTANCE_FACTOR: f64 = 0.765;

/// Physical-layer energy constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Electronics energy per bit, transmit or receive (J/bit).
    pub e_elec: f64,
    /// Free-space amplifier coefficient (J/bit/m²).
    pub eps_fs: f64,
    /// Multipath amplifier coefficient (J/bit/m⁴).
    pub eps_mp: f64,
    /// Aggregation cost per bit per fused signal (J/bit/signal).
    pub e_da: f64,
    /// Data packet length in bits.
    pub packet_bits: u64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            eps_fs: 10e-12,
            eps_mp: 1.3e-15,
            e_da: 5e-9,
            packet_bits: 4000,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (key, value) in [
            ("radio.e_elec", self.e_elec),
            ("radio.eps_fs", self.eps_fs),
            ("radio.eps_mp", self.eps_mp),
            ("radio.e_da", self.e_da),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConfigError::invalid(
                    key,
                    "must be finite and strictly positive",
                ));
            }
        }
        if self.packet_bits == 0 {
            return Err(ConfigError::invalid(
                "radio.packet_bits",
                "must be strictly positive",
            ));
        }
        let d0 = threshold_distance(self);
        if !(d0.is_finite() && d0 > 0.0) {
            return Err(ConfigError::invalid(
                "radio.eps_fs",
                "sqrt(eps_fs / eps_mp) must be finite and positive",
            ));
        }
        Ok(())
    }
}

/// Crossover distance `sqrt(eps_fs / eps_mp)` where both amplifier branches agree.
pub fn threshold_distance(params: &RadioParams) -> f64 {
    (params.eps_fs / params.eps_mp).sqrt()
}

/// Energy to transmit `bits` over `distance` metres.
///
/// Distances strictly below the crossover use the free-space branch; the
/// crossover itself and anything beyond use the multipath branch.
pub fn tx_energy(params: &RadioParams, bits: u64, distance: f64) -> Result<f64, DomainError> {
    if !(distance >= 0.0) {
        return Err(DomainError::NegativeDistance(distance));
    }
    let bits = bits as f64;
    let d2 = distance * distance;
    let amp = if distance < threshold_distance(params) {
        params.eps_fs * d2
    } else {
        params.eps_mp * d2 * d2
    };
    Ok(bits * params.e_elec + bits * amp)
}

/// Energy to receive `bits`.
pub fn rx_energy(params: &RadioParams, bits: u64) -> f64 {
    bits as f64 * params.e_elec
}

/// Energy a cluster head spends fusing `signals` packets of `bits` each.
pub fn aggregation_energy(params: &RadioParams, bits: u64, signals: u64) -> f64 {
    params.e_da * bits as f64 * signals as f64
}

/// Expected member-to-head distance with `k` clusters on a `field_side` square.
pub fn avg_dist_to_ch(field_side: f64, k: u64) -> Result<f64, DomainError> {
    if k == 0 {
        return Err(DomainError::ZeroClusters);
    }
    if !(field_side > 0.0) {
        return Err(DomainError::NonPositive {
            what: "field_side",
            value: field_side,
        });
    }
    Ok(field_side / (2.0 * PI * k as f64).sqrt())
}

/// Expected head-to-sink distance for a sink at the field centre.
pub fn avg_dist_to_bs(field_side: f64) -> f64 {
    BS_DISTANCE_FACTOR * field_side / 2.0
}

/// Analytic energy the whole network dissipates in one round with `k` clusters.
pub fn round_energy(
    params: &RadioParams,
    n_nodes: u64,
    k: u64,
    field_side: f64,
) -> Result<f64, DomainError> {
    if n_nodes == 0 {
        return Err(DomainError::NoNodes);
    }
    let d_to_ch = avg_dist_to_ch(field_side, k)?;
    let d_to_bs = avg_dist_to_bs(field_side);
    let n = n_nodes as f64;
    let per_bit = 2.0 * n * params.e_elec
        + n * params.e_da
        + k as f64 * params.eps_mp * (d_to_bs * d_to_bs) * (d_to_bs * d_to_bs)
        + n * params.eps_fs * d_to_ch * d_to_ch;
    Ok(params.packet_bits as f64 * per_bit)
}

/// Real-valued cluster count minimising [`round_energy`].
pub fn optimal_cluster_count_continuous(
    params: &RadioParams,
    n_nodes: u64,
    field_side: f64,
    d_to_bs: f64,
) -> Result<f64, DomainError> {
    if !(d_to_bs > 0.0) {
        return Err(DomainError::NonPositive {
            what: "d_to_bs",
            value: d_to_bs,
        });
    }
    if !(field_side > 0.0) {
        return Err(DomainError::NonPositive {
            what: "field_side",
            value: field_side,
        });
    }
    if n_nodes == 0 {
        return Err(DomainError::NoNodes);
    }
    let n = n_nodes as f64;
    Ok(
        (n.sqrt() / (2.0 * PI).sqrt()) * threshold_distance(params) * field_side
            / (d_to_bs * d_to_bs),
    )
}

/// Optimal cluster count rounded to the nearest integer and kept within `[1, n_nodes]`.
pub fn optimal_cluster_count(
    params: &RadioParams,
    n_nodes: u64,
    field_side: f64,
    d_to_bs: f64,
) -> Result<u64, DomainError> {
    let k = optimal_cluster_count_continuous(params, n_nodes, field_side, d_to_bs)?;
    Ok((k.round() as u64).clamp(1, n_nodes))
}
