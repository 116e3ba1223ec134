//! Log-distance path loss, threshold delivery and constant-speed delay.

use super::{NetError, Position};
use crate::sim::SimTime;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Radio parameters of a wireless channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub phy_rate_bps: u64,
    pub tx_power_dbm: f64,
    pub rx_sensitivity_dbm: f64,
    pub pathloss_exponent: f64,
    pub reference_loss_db: f64,
    pub reference_distance_m: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            phy_rate_bps: 54_000_000,
            tx_power_dbm: 16.0206,
            rx_sensitivity_dbm: -96.0,
            pathloss_exponent: 3.0,
            reference_loss_db: 46.6777,
            reference_distance_m: 1.0,
        }
    }
}

impl RadioParams {
    pub fn rx_power_dbm(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.reference_distance_m);
        let loss = path_loss_db(d, self.pathloss_exponent, self.reference_loss_db, self.reference_distance_m)
            .expect("distance clamped to the reference distance");
        self.tx_power_dbm - loss
    }

    /// Largest distance at which a packet is still received.
    pub fn max_range_m(&self) -> f64 {
        let budget = self.tx_power_dbm - self.rx_sensitivity_dbm - self.reference_loss_db;
        self.reference_distance_m * 10f64.powf(budget / (10.0 * self.pathloss_exponent))
    }
}

/// `reference_loss + 10·n·log10(d / d0)`; distances inside the reference
/// distance get the reference loss.
pub fn path_loss_db(
    distance_m: f64,
    exponent: f64,
    reference_loss_db: f64,
    reference_distance_m: f64,
) -> Result<f64, NetError> {
    if !distance_m.is_finite() || distance_m <= 0.0 {
        return Err(NetError::InvalidDistance(distance_m));
    }
    if distance_m <= reference_distance_m {
        return Ok(reference_loss_db);
    }
    Ok(reference_loss_db + 10.0 * exponent * (distance_m / reference_distance_m).log10())
}

/// Received iff the link budget meets the receiver sensitivity.
pub fn delivery_decision(radio: &RadioParams, tx: &Position, rx: &Position) -> bool {
    radio.rx_power_dbm(tx.distance(rx)) >= radio.rx_sensitivity_dbm
}

pub fn propagation_delay(tx: &Position, rx: &Position) -> SimTime {
    let secs = tx.distance(rx) / SPEED_OF_LIGHT;
    SimTime::from_nanos((secs * 1e9).round() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loss(d: f64) -> f64 {
        path_loss_db(d, 3.0, 46.6777, 1.0).unwrap()
    }

    #[test]
    fn log_distance_values() {
        assert!((loss(1.0) - 46.6777).abs() < 1e-9);
        assert!((loss(10.0) - 76.6777).abs() < 1e-9);
        assert!((loss(100.0) - 106.6777).abs() < 1e-9);
        assert!((loss(0.5) - 46.6777).abs() < 1e-9);
    }

    #[test]
    fn non_positive_distance_is_domain_error() {
        assert!(path_loss_db(0.0, 3.0, 46.6777, 1.0).is_err());
        assert!(path_loss_db(-2.0, 3.0, 46.6777, 1.0).is_err());
    }

    #[test]
    fn link_budget_examples() {
        let radio = RadioParams::default();
        let ap = Position::ORIGIN;
        assert!((radio.rx_power_dbm(1.0) - (-30.6571)).abs() < 1e-9);
        assert!(delivery_decision(&radio, &ap, &Position::new(1.0, 0.0)));

        let far = radio.rx_power_dbm(200.0);
        assert!((far - (-99.688)).abs() < 1e-3, "{far}");
        assert!(!delivery_decision(&radio, &ap, &Position::new(200.0, 0.0)));
    }

    #[test]
    fn range_boundary_near_150_7_m() {
        // Solve tx − (PL0 + 30·log10 d) = sens for d independently.
        let d_star = 10f64.powf((16.0206 + 96.0 - 46.6777) / 30.0);
        assert!((d_star - 150.7).abs() < 0.05, "{d_star}");
        let radio = RadioParams::default();
        assert!((radio.max_range_m() - d_star).abs() < 1e-9);
        assert!(delivery_decision(&radio, &Position::ORIGIN, &Position::new(d_star - 0.01, 0.0)));
        assert!(!delivery_decision(&radio, &Position::ORIGIN, &Position::new(d_star + 0.01, 0.0)));
    }

    #[test]
    fn co_located_nodes_have_zero_delay() {
        assert_eq!(propagation_delay(&Position::ORIGIN, &Position::ORIGIN), SimTime::ZERO);
        // 299.792458 m is one microsecond away.
        assert_eq!(propagation_delay(&Position::ORIGIN, &Position::new(299.792458, 0.0)), SimTime::from_nanos(1000));
    }
}
