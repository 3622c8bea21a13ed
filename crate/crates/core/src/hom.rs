//! Hong-Ou-Mandel interference of two photons whose internal states overlap.

use crate::error::{check_range, Result};

/// Visibility and the side-channel overlap it corresponds to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityPoint {
    pub visibility: f64,
    pub delta: f64,
}

impl VisibilityPoint {
    pub fn from_visibility(visibility: f64) -> Result<Self> {
        Ok(Self {
            visibility,
            delta: delta_from_visibility(visibility)?,
        })
    }

    pub fn from_delta(delta: f64) -> Result<Self> {
        Ok(Self {
            visibility: visibility_from_delta(delta)?,
            delta,
        })
    }
}

/// Probability of a coincidence at the two output ports of a balanced beam
/// splitter for single photons with internal-state overlap `overlap`.
pub fn coincidence_probability(overlap: f64) -> Result<f64> {
    check_range("overlap", overlap, 0.0, 1.0, "[0, 1]")?;
    Ok((1.0 - overlap * overlap) / 2.0)
}

/// `Tr[ρ₀ρ₁]` for the pure side-channel pair.
pub fn visibility_from_delta(delta: f64) -> Result<f64> {
    check_range("delta", delta, 0.0, 1.0, "[0, 1]")?;
    Ok(delta * delta)
}

pub fn delta_from_visibility(visibility: f64) -> Result<f64> {
    check_range("V", visibility, 0.0, 1.0, "[0, 1]")?;
    Ok(visibility.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincidences() {
        assert_eq!(coincidence_probability(1.0).unwrap(), 0.0);
        assert_eq!(coincidence_probability(0.0).unwrap(), 0.5);
        assert!((coincidence_probability(0.6).unwrap() - 0.32).abs() < 1e-15);
        assert!(coincidence_probability(1.1).is_err());
    }

    #[test]
    fn mapping_endpoints_and_inverse() {
        assert_eq!(visibility_from_delta(1.0).unwrap(), 1.0);
        assert_eq!(visibility_from_delta(0.0).unwrap(), 0.0);
        assert!((delta_from_visibility(0.49).unwrap() - 0.7).abs() < 1e-15);
        let p = VisibilityPoint::from_delta(0.3).unwrap();
        assert!((p.visibility - 0.09).abs() < 1e-15);
        assert!(delta_from_visibility(-0.1).is_err());
    }
}
