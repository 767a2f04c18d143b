//! Summary statistics and centerline geometry used by evaluation reports.

use crate::geometry::Vec2;
use crate::scalar::Scalar;

pub fn mean<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::nan();
    }
    values.iter().copied().sum::<T>() / T::from_count(values.len())
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance<T: Scalar>(values: &[T]) -> T {
    if values.len() < 2 {
        return T::zero();
    }
    let m = mean(values);
    values.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::from_count(values.len() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle<T> {
    pub center: Vec2<T>,
    pub radius: T,
}

impl<T: Scalar> Circle<T> {
    /// Largest `| |p − center| − radius |` over `points`, relative to the radius.
    pub fn max_relative_deviation(&self, points: &[Vec2<T>]) -> T {
        points
            .iter()
            .map(|&p| ((p - self.center).norm() - self.radius).abs() / self.radius)
            .fold(T::zero(), T::max)
    }
}

/// Algebraic least-squares circle through `points`; `None` when they are
/// fewer than three or collinear.
pub fn fit_circle<T: Scalar>(points: &[Vec2<T>]) -> Option<Circle<T>> {
    if points.len() < 3 {
        return None;
    }
    let n = T::from_count(points.len());
    let centroid = points.iter().fold(Vec2::zero(), |acc, &p| acc + p) * n.recip();

    // Minimize Σ (u² + v² + D·u + E·v + F)² in centroid coordinates.
    let mut ata = [[T::zero(); 3]; 3];
    let mut atb = [T::zero(); 3];
    for &p in points {
        let d = p - centroid;
        let row = [d.x, d.y, T::one()];
        let rhs = -(d.x * d.x + d.y * d.y);
        for i in 0..3 {
            atb[i] += row[i] * rhs;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let [d, e, f] = solve3(ata, atb)?;
    let two = T::lit(2.0);
    let center = Vec2::new(-d / two, -e / two);
    let r2 = center.dot(center) - f;
    if !(r2 > T::zero()) {
        return None;
    }
    Some(Circle {
        center: center + centroid,
        radius: r2.sqrt(),
    })
}

fn solve3<T: Scalar>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= T::epsilon() * T::lit(1e3) * a[pivot][col].abs().max(T::one()) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let tail: T = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Moving average of distances to `origin` over a window of `window` points.
pub fn smoothed_distances<T: Scalar>(points: &[Vec2<T>], origin: Vec2<T>, window: usize) -> Vec<T> {
    let window = window.max(1);
    let d: Vec<T> = points.iter().map(|&p| (p - origin).norm()).collect();
    if d.len() < window {
        return Vec::new();
    }
    d.windows(window).map(mean).collect()
}
