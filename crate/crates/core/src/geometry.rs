//! Curvature-steered path integration in the plane.
//!
//! The swimmer's frame is stored as a single heading angle, so the tangent
//! and normal are orthonormal by construction. Self-propulsion along a
//! constant-curvature arc is advanced with the exact chord of that arc;
//! background advection is added with an explicit Euler step.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::environment::FlowSample;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(T::zero(), T::zero())
    }

    /// Unit vector at `angle` radians from the x axis.
    pub fn from_angle(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> AddAssign for Vec2<T> {
    fn add_assign(&mut self, rhs: Self) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

/// The two legal path curvatures and their paired speeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionSet<T> {
    kappa1: T,
    kappa2: T,
    v1: T,
    v2: T,
    adaptive_speed: bool,
}

impl<T: Scalar> ActionSet<T> {
    /// Constant swimming speed `v` for both curvatures.
    pub fn constant_speed(kappa1: T, kappa2: T, v: T) -> Result<Self> {
        Self::validate(kappa1, kappa2, v, v)?;
        Ok(ActionSet {
            kappa1,
            kappa2,
            v1: v,
            v2: v,
            adaptive_speed: false,
        })
    }

    /// Speed `v1` on `kappa1` and `v2` on `kappa2`.
    pub fn adaptive_speed(kappa1: T, kappa2: T, v1: T, v2: T) -> Result<Self> {
        Self::validate(kappa1, kappa2, v1, v2)?;
        Ok(ActionSet {
            kappa1,
            kappa2,
            v1,
            v2,
            adaptive_speed: true,
        })
    }

    fn validate(kappa1: T, kappa2: T, v1: T, v2: T) -> Result<()> {
        if !(kappa1 > T::zero() && kappa1 < kappa2 && kappa2.is_finite()) {
            return Err(Error::config(format!(
                "curvatures must satisfy 0 < kappa1 < kappa2, got {kappa1} and {kappa2}"
            )));
        }
        if !(v1 > T::zero() && v2 > T::zero() && v1.is_finite() && v2.is_finite()) {
            return Err(Error::config(format!(
                "swimming speeds must be positive, got {v1} and {v2}"
            )));
        }
        Ok(())
    }

    pub fn kappa1(&self) -> T {
        self.kappa1
    }

    pub fn kappa2(&self) -> T {
        self.kappa2
    }

    pub fn is_adaptive(&self) -> bool {
        self.adaptive_speed
    }

    /// Characteristic curvature (κ₁ + κ₂)/2.
    pub fn kappa_mean(&self) -> T {
        (self.kappa1 + self.kappa2) / T::lit(2.0)
    }

    /// Curvature selected by action index 0 or 1.
    pub fn kappa_for(&self, action: usize) -> T {
        match action {
            0 => self.kappa1,
            1 => self.kappa2,
            _ => panic!("action index {action} out of range for two curvatures"),
        }
    }

    /// Action index for one of the two legal curvatures.
    pub fn index_of(&self, kappa: T) -> Option<usize> {
        if kappa == self.kappa1 {
            Some(0)
        } else if kappa == self.kappa2 {
            Some(1)
        } else {
            None
        }
    }

    /// Swimming speed paired with `kappa`.
    ///
    /// Panics if `kappa` is neither of the two legal curvatures.
    pub fn speed_for(&self, kappa: T) -> T {
        match self.index_of(kappa) {
            Some(0) => self.v1,
            Some(_) => self.v2,
            None => panic!("curvature {kappa} is not one of the legal values"),
        }
    }
}

/// Position, frame, and steering parameters of one swimmer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwimmerState<T> {
    pub position: Vec2<T>,
    /// Tangent direction angle φ.
    pub heading: T,
    pub curvature: T,
    pub speed: T,
    pub time: T,
}

impl<T: Scalar> SwimmerState<T> {
    pub fn new(position: Vec2<T>, heading: T, curvature: T, speed: T) -> Self {
        SwimmerState {
            position,
            heading,
            curvature,
            speed,
            time: T::zero(),
        }
    }

    pub fn tangent(&self) -> Vec2<T> {
        Vec2::from_angle(self.heading)
    }

    /// Left normal, the tangent rotated by +π/2.
    pub fn normal(&self) -> Vec2<T> {
        let (s, c) = self.heading.sin_cos();
        Vec2::new(-s, c)
    }

    /// Center of the osculating circle, `r + n/κ`.
    pub fn curvature_center(&self) -> Vec2<T> {
        self.position + self.normal() * self.curvature.recip()
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.heading.is_finite()
            && self.curvature.is_finite()
            && self.speed.is_finite()
    }

    /// Advances the swimmer by `dt`, with the flow sampled at the pre-step position.
    ///
    /// The heading turns by `(vκ + ω₀)·dt`. The position moves along the chord
    /// of the self-propelled arc (turn angle `vκ·dt`) plus `u_e·dt`.
    pub fn step(&self, flow: &FlowSample<T>, dt: T) -> Self {
        let two = T::lit(2.0);
        let self_turn = self.speed * self.curvature * dt;
        let chord_len = two / self.curvature * (self_turn / two).sin();
        let chord = Vec2::from_angle(self.heading + self_turn / two) * chord_len;
        let advection = Vec2::new(flow.u_x, flow.u_y) * dt;
        SwimmerState {
            position: self.position + chord + advection,
            heading: self.heading + self_turn + flow.omega0 * dt,
            curvature: self.curvature,
            speed: self.speed,
            time: self.time + dt,
        }
    }

    /// Switches to `kappa` and its paired speed.
    pub fn steer(&mut self, actions: &ActionSet<T>, kappa: T) {
        self.curvature = kappa;
        self.speed = actions.speed_for(kappa);
    }
}
