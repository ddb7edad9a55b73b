//! Every numerical threshold used by the crate, in one record.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// ‖U†U − I‖ for a matrix to count as unitary.
    pub unitarity: f64,
    /// ‖MM† − M†M‖ for `eigendecompose_normal`.
    pub normality: f64,
    /// ‖A − A†‖ for Hermitian inputs.
    pub hermiticity: f64,
    /// ‖[A, B]‖ for commuting families in `simultaneous_eigenbasis`.
    pub commutation: f64,
    /// Off-diagonal residue allowed after a shared diagonalization.
    pub shared_basis: f64,
    /// Projected norm below which postselection fails.
    pub zero_probability: f64,
    /// Slack on ‖A/α‖ ≤ 1 accepted by `dilate`.
    pub dilation_norm: f64,
    /// Slack on ‖p‖∞ ≤ 1 accepted by the polynomial backend.
    pub poly_bound: f64,
    /// Slack on the spectrum lying in [−1, 1].
    pub spectrum: f64,
    /// Normality slack on an encoded matrix in `split_normal`.
    pub split_normality: f64,
    /// Commutation slack on encoded blocks in `mqet`.
    pub block_commutation: f64,
    /// Relative sup norm below which a decomposition term is dropped.
    pub zero_term: f64,
    /// Relative singular value threshold for numerical rank.
    pub rank: f64,
    /// Minimum gap between interpolation nodes.
    pub node_gap: f64,
    /// Maximum |t|·α accepted by `exp_normal`.
    pub max_exp_time: f64,
    /// Truncation error target for `exp_normal`.
    pub exp_target: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-10,
            normality: 1e-8,
            hermiticity: 1e-8,
            commutation: 1e-8,
            shared_basis: 1e-7,
            zero_probability: 1e-14,
            dilation_norm: 1e-12,
            poly_bound: 1e-9,
            spectrum: 1e-9,
            split_normality: 1e-6,
            block_commutation: 1e-7,
            zero_term: 1e-12,
            rank: 1e-9,
            node_gap: 1e-10,
            max_exp_time: 4.0,
            exp_target: 1e-6,
        }
    }
}

impl Tolerances {
    /// Override one field by name, as used by `--tol NAME=VAL`.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance {name}={value}")));
        }
        let slot = match name {
            "unitarity" => &mut self.unitarity,
            "normality" => &mut self.normality,
            "hermiticity" => &mut self.hermiticity,
            "commutation" => &mut self.commutation,
            "shared_basis" => &mut self.shared_basis,
            "zero_probability" => &mut self.zero_probability,
            "dilation_norm" => &mut self.dilation_norm,
            "poly_bound" => &mut self.poly_bound,
            "spectrum" => &mut self.spectrum,
            "split_normality" => &mut self.split_normality,
            "block_commutation" => &mut self.block_commutation,
            "zero_term" => &mut self.zero_term,
            "rank" => &mut self.rank,
            "node_gap" => &mut self.node_gap,
            "max_exp_time" => &mut self.max_exp_time,
            "exp_target" => &mut self.exp_target,
            _ => return Err(Error::InvalidArgument(format!("unknown tolerance {name}"))),
        };
        *slot = value;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_by_name() {
        let mut t = Tolerances::default();
        t.set("rank", 1e-6).unwrap();
        assert_eq!(t.rank, 1e-6);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("rank", f64::NAN).is_err());
    }
}
