//! Rate functions and the implicit map `phi`.

use crate::error::{ensure, Result};

use super::roots::bisect;

/// Bracket width for `phi`. Zero runs bisection down to adjacent floats,
/// which `a_max` in the variational problem needs: `tau` is a square root of
/// the error in `g_U` there.
pub const ROOT_XTOL: f64 = 0.0;

/// `x - 1 - ln x` on `(0, 1]`, zero above 1.
pub fn upsilon(x: f64) -> Result<f64> {
    ensure(x > 0.0, "x", x, "x > 0")?;
    Ok(upsilon_unchecked(x))
}

pub(crate) fn upsilon_unchecked(x: f64) -> f64 {
    if x <= 1.0 {
        x - 1.0 - x.ln()
    } else {
        0.0
    }
}

/// The functions of one geometric parameter `p` in `(0, 1)`.
///
/// Construction validates `p`; methods only `debug_assert` their argument
/// domains so they can sit inside tight loops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    p: f64,
    q: f64,
}

impl Rates {
    pub fn new(p: f64) -> Result<Self> {
        ensure(p > 0.0 && p < 1.0, "p", p, "0 < p < 1")?;
        Ok(Rates { p, q: 1.0 - p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn sigma(&self) -> f64 {
        self.p * self.q
    }

    /// `ln f(x)` for `x <= 1`, with `0^0 = 1` at `x = 1`.
    pub fn log_f(&self, x: f64) -> f64 {
        debug_assert!(x <= 1.0);
        let (p, q) = (self.p, self.q);
        let y = 1.0 - x;
        let tail = if y == 0.0 { 0.0 } else { y * q.ln() - y * y.ln() };
        (2.0 - x) * (2.0 - x).ln() + p.ln() + tail
    }

    /// `(2-x)^(2-x) p (1-p)^(1-x) (1-x)^(x-1)`.
    pub fn f(&self, x: f64) -> f64 {
        self.log_f(x).exp()
    }

    /// Right end of the first two cases of `h`.
    fn h_break(&self) -> f64 {
        if self.p >= 0.5 {
            2.0 - 1.0 / self.p
        } else {
            (1.0 - 2.0 * self.p) / self.q
        }
    }

    /// Rate of the reflected sums, three cases on `[0, 1]`.
    pub fn h(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        if x <= self.h_break() {
            if self.p >= 0.5 {
                return 1.0;
            }
            return (self.p / self.q).powf(x);
        }
        self.f(x)
    }

    /// `Phi(a, s) = p(1-p)(2-s)^2 (s-a) - a(1-s)`.
    pub fn big_phi(&self, a: f64, s: f64) -> f64 {
        self.sigma() * (2.0 - s).powi(2) * (s - a) - a * (1.0 - s)
    }

    /// The unique root of `Phi(a, .)` in `[a, 1]`.
    pub fn phi(&self, a: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&a));
        if a <= 0.0 {
            return 0.0;
        }
        if a >= 1.0 {
            return 1.0;
        }
        bisect(|s| self.big_phi(a, s), a, 1.0, ROOT_XTOL)
    }

    /// Inverse of `phi`; `Phi` is linear in `a`, so this is closed form.
    pub fn phi_inverse(&self, s: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&s));
        if s <= 0.0 || s >= 1.0 {
            return s;
        }
        let k = self.sigma() * (2.0 - s).powi(2);
        k * s / (k + 1.0 - s)
    }

    /// `ln((1-p)(2-s)/(1-s))`, the exponent base shared by `g_L` and `g_U`.
    fn drift(&self, s: f64) -> f64 {
        (self.q * (2.0 - s) / (1.0 - s)).ln()
    }

    fn g_general(&self, a: f64) -> f64 {
        let s = self.phi(a);
        (((s - a) / s).ln() + a * self.drift(s)).exp()
    }

    /// Lower-bound rate of the thinned `Y` sums, `a` in `(0, 1)`.
    pub fn g_l(&self, a: f64) -> f64 {
        debug_assert!(a > 0.0 && a < 1.0);
        if self.p > 0.5 && a < 1.0 - 0.5 / self.p {
            return 0.5;
        }
        self.g_general(a)
    }

    /// Upper-bound rate of the thinned reflected sums, `a` in `[0, 1]`.
    pub fn g_u(&self, a: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&a));
        if self.p >= 0.5 && a <= 1.0 - 0.5 / self.p {
            return 0.5;
        }
        if self.p < 0.5 && a <= (1.0 - 2.0 * self.p) / (2.0 * self.q) {
            return (self.q / self.p).powf(a) / 2.0;
        }
        if a >= 1.0 {
            return 1.0 / self.p;
        }
        self.g_general(a)
    }

    /// Derivative of `g_U` on `(0, 1)`.
    pub fn g_u_prime(&self, a: f64) -> f64 {
        debug_assert!(a > 0.0 && a < 1.0);
        if self.p >= 0.5 && a <= 1.0 - 0.5 / self.p {
            return 0.0;
        }
        if self.p < 0.5 && a <= (1.0 - 2.0 * self.p) / (2.0 * self.q) {
            return (self.q / self.p).ln() * self.g_u(a);
        }
        self.drift(self.phi(a)) * self.g_u(a)
    }
}

fn rates(p: f64) -> Result<Rates> {
    Rates::new(p)
}

pub fn f(x: f64, p: f64) -> Result<f64> {
    ensure(x <= 1.0, "x", x, "x <= 1")?;
    Ok(rates(p)?.f(x))
}

pub fn log_f(x: f64, p: f64) -> Result<f64> {
    ensure(x <= 1.0, "x", x, "x <= 1")?;
    Ok(rates(p)?.log_f(x))
}

pub fn h(x: f64, p: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&x), "x", x, "0 <= x <= 1")?;
    Ok(rates(p)?.h(x))
}

pub fn big_phi(a: f64, s: f64, p: f64) -> Result<f64> {
    Ok(rates(p)?.big_phi(a, s))
}

pub fn phi_fn(a: f64, p: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&a), "a", a, "0 <= a <= 1")?;
    Ok(rates(p)?.phi(a))
}

pub fn phi_inverse(s: f64, p: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&s), "s", s, "0 <= s <= 1")?;
    Ok(rates(p)?.phi_inverse(s))
}

pub fn g_l(a: f64, p: f64) -> Result<f64> {
    ensure(a > 0.0 && a < 1.0, "a", a, "0 < a < 1")?;
    Ok(rates(p)?.g_l(a))
}

pub fn g_u(a: f64, p: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&a), "a", a, "0 <= a <= 1")?;
    Ok(rates(p)?.g_u(a))
}

pub fn g_u_prime(a: f64, p: f64) -> Result<f64> {
    ensure(a > 0.0 && a < 1.0, "a", a, "0 < a < 1")?;
    Ok(rates(p)?.g_u_prime(a))
}
