//! Midpoint-radius complex arithmetic in `f64`. Every operation inflates the
//! radius by the floating-point rounding error of the midpoint computation.

use num_complex::Complex64;

const U: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub mid: Complex64,
    pub rad: f64,
}

fn up(x: f64) -> f64 {
    // One ulp of slack on top of a radius computation.
    x * (1.0 + 4.0 * U) + f64::MIN_POSITIVE
}

impl Ball {
    pub fn new(mid: Complex64, rad: f64) -> Self {
        Ball { mid, rad: rad.max(0.0) }
    }

    pub fn real(x: f64, rad: f64) -> Self {
        Ball::new(Complex64::new(x, 0.0), rad)
    }

    pub fn exact(x: f64) -> Self {
        Ball::real(x, 0.0)
    }

    pub fn zero() -> Self {
        Ball::exact(0.0)
    }

    pub fn add(&self, o: &Ball) -> Ball {
        let mid = self.mid + o.mid;
        Ball::new(mid, up(self.rad + o.rad + U * mid.norm()))
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        let mid = self.mid - o.mid;
        Ball::new(mid, up(self.rad + o.rad + U * mid.norm()))
    }

    pub fn neg(&self) -> Ball {
        Ball::new(-self.mid, self.rad)
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        let mid = self.mid * o.mid;
        let r = self.mid.norm() * o.rad + o.mid.norm() * self.rad + self.rad * o.rad;
        Ball::new(mid, up(r + 4.0 * U * mid.norm() + 4.0 * U * self.mid.norm() * o.mid.norm()))
    }

    pub fn scale(&self, x: f64) -> Ball {
        self.mul(&Ball::exact(x))
    }

    pub fn conj(&self) -> Ball {
        Ball::new(self.mid.conj(), self.rad)
    }

    pub fn re(&self) -> Ball {
        Ball::real(self.mid.re, self.rad)
    }

    pub fn im(&self) -> Ball {
        Ball::real(self.mid.im, self.rad)
    }

    /// Upper bound for the modulus.
    pub fn abs_upper(&self) -> f64 {
        up(self.mid.norm() + self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.norm() <= self.rad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_encloses_exact_value() {
        let a = Ball::new(Complex64::new(0.1, 0.2), 1e-12);
        let b = Ball::new(Complex64::new(-3.0, 0.5), 1e-12);
        let p = a.mul(&b);
        let exact = Complex64::new(0.1 * -3.0 - 0.2 * 0.5, 0.1 * 0.5 + 0.2 * -3.0);
        assert!((p.mid - exact).norm() <= p.rad + 1e-15);
        assert!(p.rad < 1e-10);
    }
}
