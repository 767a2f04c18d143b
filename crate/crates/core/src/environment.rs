//! Chemoattractant concentration fields and the Taylor–Green background flow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// `c = c_k·y + c₀`
    Linear,
    /// `c = c₀ − c_k·|r|`, peaked at the origin.
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationField<T> {
    kind: FieldKind,
    gradient: T,
    offset: T,
}

impl<T: Scalar> ConcentrationField<T> {
    pub fn new(kind: FieldKind, gradient: T, offset: T) -> Result<Self> {
        if !(gradient > T::zero() && gradient.is_finite() && offset.is_finite()) {
            return Err(Error::config(format!(
                "concentration gradient must be positive and finite, got {gradient}"
            )));
        }
        Ok(ConcentrationField {
            kind,
            gradient,
            offset,
        })
    }

    pub fn linear(gradient: T, offset: T) -> Result<Self> {
        Self::new(FieldKind::Linear, gradient, offset)
    }

    pub fn radial(gradient: T, offset: T) -> Result<Self> {
        Self::new(FieldKind::Radial, gradient, offset)
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn gradient(&self) -> T {
        self.gradient
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// Field value at `p`. Not clamped: far from the source it may be negative.
    pub fn at(&self, p: Vec2<T>) -> T {
        match self.kind {
            FieldKind::Linear => self.gradient * p.y + self.offset,
            FieldKind::Radial => self.offset - self.gradient * p.norm(),
        }
    }
}

/// Background velocity `(u_x, u_y)` and the rotation rate ω₀ it imposes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowSample<T> {
    pub u_x: T,
    pub u_y: T,
    pub omega0: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FlowField<T> {
    None,
    TaylorGreen { u0: T, k: T },
}

impl<T: Scalar> FlowField<T> {
    pub fn taylor_green(u0: T, k: T) -> Result<Self> {
        if !(u0 >= T::zero() && k > T::zero() && u0.is_finite() && k.is_finite()) {
            return Err(Error::config(format!(
                "Taylor-Green flow needs u0 >= 0 and k > 0, got u0 = {u0}, k = {k}"
            )));
        }
        Ok(FlowField::TaylorGreen { u0, k })
    }

    pub fn is_none(&self) -> bool {
        matches!(self, FlowField::None)
    }

    pub fn at(&self, p: Vec2<T>) -> FlowSample<T> {
        match *self {
            FlowField::None => FlowSample::default(),
            FlowField::TaylorGreen { u0, k } => {
                let (sx, cx) = (k * p.x).sin_cos();
                let (sy, cy) = (k * p.y).sin_cos();
                FlowSample {
                    u_x: u0 * cx * sy,
                    u_y: -u0 * sx * cy,
                    omega0: -u0 * k * cx * cy,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tg() -> FlowField<f64> {
        FlowField::taylor_green(0.1, PI / 10.0).unwrap()
    }

    #[test]
    fn concentration_examples() {
        let lin = ConcentrationField::linear(1.0, 20.0).unwrap();
        assert_eq!(lin.at(Vec2::new(7.0, 5.0)), 25.0);
        assert_eq!(lin.at(Vec2::new(-13.0, 0.0)), 20.0);
        let rad = ConcentrationField::radial(1.0, 100.0).unwrap();
        assert_eq!(rad.at(Vec2::new(3.0, 4.0)), 95.0);
        assert!(rad.at(Vec2::new(300.0, 400.0)) < 0.0);
    }

    #[test]
    fn rejects_nonpositive_gradient() {
        assert!(ConcentrationField::linear(0.0, 20.0).is_err());
        assert!(FlowField::taylor_green(0.1, 0.0).is_err());
    }

    #[test]
    fn taylor_green_examples() {
        let s = tg().at(Vec2::new(0.0, 0.0));
        assert_eq!((s.u_x, s.u_y), (0.0, 0.0));
        assert!((s.omega0 + 0.031_415_926_535_897_93).abs() < 1e-15);

        // kx = ky = π/2 is a stagnation point with zero vorticity.
        let s = tg().at(Vec2::new(5.0, 5.0));
        assert!(s.u_x.abs() < 1e-15 && s.u_y.abs() < 1e-15 && s.omega0.abs() < 1e-15);

        let s = tg().at(Vec2::new(0.0, 5.0));
        assert!((s.u_x - 0.1).abs() < 1e-15 && s.u_y.abs() < 1e-15 && s.omega0.abs() < 1e-15);
        let s = tg().at(Vec2::new(5.0, 0.0));
        assert!(s.u_x.abs() < 1e-15 && (s.u_y + 0.1).abs() < 1e-15 && s.omega0.abs() < 1e-15);

        let none = FlowField::<f64>::None.at(Vec2::new(3.0, -8.0));
        assert_eq!(none, FlowSample::default());
    }

    proptest! {
        #[test]
        fn taylor_green_is_divergence_free(x in -40.0..40.0f64, y in -40.0..40.0f64) {
            let f = tg();
            let h = 1e-4;
            let dux = (f.at(Vec2::new(x + h, y)).u_x - f.at(Vec2::new(x - h, y)).u_x) / (2.0 * h);
            let duy = (f.at(Vec2::new(x, y + h)).u_y - f.at(Vec2::new(x, y - h)).u_y) / (2.0 * h);
            prop_assert!((dux + duy).abs() < 1e-6);
        }

        #[test]
        fn omega_is_half_the_curl(x in -40.0..40.0f64, y in -40.0..40.0f64) {
            let f = tg();
            let h = 1e-4;
            let duy_dx = (f.at(Vec2::new(x + h, y)).u_y - f.at(Vec2::new(x - h, y)).u_y) / (2.0 * h);
            let dux_dy = (f.at(Vec2::new(x, y + h)).u_x - f.at(Vec2::new(x, y - h)).u_x) / (2.0 * h);
            let analytic = -0.1 * (PI / 10.0) * (PI / 10.0 * x).cos() * (PI / 10.0 * y).cos();
            let s = f.at(Vec2::new(x, y));
            prop_assert!((s.omega0 - analytic).abs() < 1e-12);
            prop_assert!((s.omega0 - (duy_dx - dux_dy) / 2.0).abs() < 1e-5);
        }

        #[test]
        fn taylor_green_is_periodic(x in -40.0..40.0f64, y in -40.0..40.0f64) {
            let f = tg();
            let period = 20.0;
            let a = f.at(Vec2::new(x, y));
            for b in [f.at(Vec2::new(x + period, y)), f.at(Vec2::new(x, y + period))] {
                prop_assert!((a.u_x - b.u_x).abs() < 1e-12);
                prop_assert!((a.u_y - b.u_y).abs() < 1e-12);
                prop_assert!((a.omega0 - b.omega0).abs() < 1e-12);
            }
        }

        #[test]
        fn linear_field_has_constant_gradient(x in -50.0..50.0f64, y in -50.0..50.0f64, h in 0.01..5.0f64) {
            let c = ConcentrationField::linear(1.0, 20.0).unwrap();
            let d = (c.at(Vec2::new(x, y + h)) - c.at(Vec2::new(x, y))) / h;
            prop_assert!((d - 1.0).abs() < 1e-9);
        }
    }
}
