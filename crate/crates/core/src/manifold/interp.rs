//! Cubic Hermite interpolation of radial fields on a nonuniform grid.

use std::f64::consts::PI;

/// Derivative estimate at node `i` from the three-point nonuniform formula.
/// Radial fields are even about `r = 0` and `r = π`, so the end slopes use
/// mirrored ghost nodes.
fn slope(r: &[f64], u: &[f64], i: usize) -> f64 {
    let n = r.len();
    let (rl, ul) = if i == 0 { (-r[0], u[0]) } else { (r[i - 1], u[i - 1]) };
    let (rr, ur) = if i + 1 == n {
        (2.0 * PI - r[n - 1], u[n - 1])
    } else {
        (r[i + 1], u[i + 1])
    };
    let h0 = r[i] - rl;
    let h1 = rr - r[i];
    let d0 = (u[i] - ul) / h0;
    let d1 = (ur - u[i]) / h1;
    (h1 * d0 + h0 * d1) / (h0 + h1)
}

pub(crate) fn radial_cubic(r: &[f64], u: &[f64], x: f64) -> f64 {
    let n = r.len();
    if x <= r[0] {
        // even extension through the pole
        let t = (x * x - r[0] * r[0]) / (r[1] * r[1] - r[0] * r[0]);
        return u[0] + (u[1] - u[0]) * t;
    }
    if x >= r[n - 1] {
        let a = PI - r[n - 1];
        let b = PI - r[n - 2];
        let y = PI - x;
        let t = (y * y - a * a) / (b * b - a * a);
        return u[n - 1] + (u[n - 2] - u[n - 1]) * t;
    }
    let j = r.partition_point(|v| *v <= x) - 1;
    let h = r[j + 1] - r[j];
    let t = (x - r[j]) / h;
    let (m0, m1) = (slope(r, u, j), slope(r, u, j + 1));
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * u[j]
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * u[j + 1]
        + (t3 - t2) * h * m1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_profile() {
        let n = 400;
        let r: Vec<f64> = (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect();
        let u: Vec<f64> = r.iter().map(|x| x.cos()).collect();
        for k in 0..97 {
            let x = PI * k as f64 / 96.0;
            assert!((radial_cubic(&r, &u, x) - x.cos()).abs() < 1e-5, "x={x}");
        }
        // nodes are reproduced exactly
        assert_eq!(radial_cubic(&r, &u, r[10]), u[10]);
    }
}
