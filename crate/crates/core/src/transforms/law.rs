//! Closed-form cumulants of the supported laws, before any shift.

use crate::process_sim::{JumpDist, Process};

use super::ExtReal;

/// Where `Λ'` saturates at one end of its range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Edge {
    /// `Λ'` is unbounded on this side.
    Open,
    /// `Λ'` tends to `at`; the conjugate there equals `value`.
    Closed { at: f64, value: ExtReal },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Law {
    Gaussian { mean: f64, var: f64 },
    CenteredPoisson { rate: f64 },
    CompoundPoisson { rate: f64, jump: JumpDist },
    Gamma { shape: f64, scale: f64 },
    StepTwoPoint { p: f64, up: f64, down: f64 },
    StepExponential { mean: f64 },
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

impl Law {
    pub fn from_process(p: &Process) -> Law {
        match p {
            Process::BrownianDrift { sigma, drift } => Law::Gaussian { mean: -drift, var: sigma * sigma },
            Process::CenteredPoisson { rate } => Law::CenteredPoisson { rate: *rate },
            Process::CompoundPoisson { rate, jump } => Law::CompoundPoisson { rate: *rate, jump: jump.clone() },
            Process::GammaSubordinator { shape, scale } => Law::Gamma { shape: *shape, scale: *scale },
            Process::PartialSum { step } => match *step {
                JumpDist::TwoPoint { p, up, down } => Law::StepTwoPoint { p, up, down },
                JumpDist::Exponential { mean } => Law::StepExponential { mean },
                JumpDist::Gaussian { mean, sd } => Law::Gaussian { mean, var: sd * sd },
            },
        }
    }

    /// Open interval `(t₁, t₀)` on which the cumulant is finite.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Law::CompoundPoisson { jump: JumpDist::Exponential { mean }, .. } => (f64::NEG_INFINITY, 1.0 / mean),
            Law::Gamma { scale, .. } => (f64::NEG_INFINITY, 1.0 / scale),
            Law::StepExponential { mean } => (f64::NEG_INFINITY, 1.0 / mean),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `Λ(t)`; `+∞` outside the domain.
    pub fn value(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if !(t > lo && t < hi) {
            return f64::INFINITY;
        }
        match *self {
            Law::Gaussian { mean, var } => mean * t + 0.5 * var * t * t,
            Law::CenteredPoisson { rate } => rate * (t.exp_m1() - t),
            Law::CompoundPoisson { rate, ref jump } => rate * jump_mgf_minus_one(jump, t),
            Law::Gamma { shape, scale } => -shape * (-scale * t).ln_1p(),
            Law::StepTwoPoint { p, up, down } => log_add_exp(p.ln() + up * t, (1.0 - p).ln() + down * t),
            Law::StepExponential { mean } => -(-mean * t).ln_1p(),
        }
    }

    /// `Λ'(t)` inside the domain.
    pub fn d1(&self, t: f64) -> f64 {
        match *self {
            Law::Gaussian { mean, var } => mean + var * t,
            Law::CenteredPoisson { rate } => rate * t.exp_m1(),
            Law::CompoundPoisson { rate, ref jump } => rate * jump_mgf_d1(jump, t),
            Law::Gamma { shape, scale } => shape * scale / (1.0 - scale * t),
            Law::StepTwoPoint { p, up, down } => {
                let w = two_point_weight(p, up, down, t);
                down + w * (up - down)
            }
            Law::StepExponential { mean } => mean / (1.0 - mean * t),
        }
    }

    /// `Λ''(t)` inside the domain.
    pub fn d2(&self, t: f64) -> f64 {
        match *self {
            Law::Gaussian { var, .. } => var,
            Law::CenteredPoisson { rate } => rate * t.exp(),
            Law::CompoundPoisson { rate, ref jump } => rate * jump_mgf_d2(jump, t),
            Law::Gamma { shape, scale } => {
                let r = 1.0 - scale * t;
                shape * scale * scale / (r * r)
            }
            Law::StepTwoPoint { p, up, down } => {
                let w = two_point_weight(p, up, down, t);
                w * (1.0 - w) * (up - down) * (up - down)
            }
            Law::StepExponential { mean } => {
                let r = 1.0 - mean * t;
                mean * mean / (r * r)
            }
        }
    }

    /// `(tΛ'(t) − Λ(t), Λ''(t))` sharing the exponentials where possible.
    pub fn tilt(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            return (0.0, self.d2(0.0));
        }
        match *self {
            Law::Gaussian { var, .. } => (0.5 * var * t * t, var),
            Law::CenteredPoisson { rate } => {
                let em = t.exp_m1();
                (rate * (t * (em + 1.0) - em), rate * (em + 1.0))
            }
            Law::CompoundPoisson { rate, jump: JumpDist::TwoPoint { p, up, down } } => {
                let (a, b) = (up * t, down * t);
                let (ema, emb) = (a.exp_m1(), b.exp_m1());
                let r = p * (a * (ema + 1.0) - ema) + (1.0 - p) * (b * (emb + 1.0) - emb);
                let d2 = p * up * up * (ema + 1.0) + (1.0 - p) * down * down * (emb + 1.0);
                (rate * r, rate * d2)
            }
            _ => (t * self.d1(t) - self.value(t), self.d2(t)),
        }
    }

    pub fn lower_edge(&self) -> Edge {
        self.edge(false)
    }

    pub fn upper_edge(&self) -> Edge {
        self.edge(true)
    }

    fn edge(&self, upper: bool) -> Edge {
        let closed = |at: f64, value: f64| Edge::Closed { at, value: ExtReal::Finite(value) };
        match *self {
            Law::Gaussian { mean, var } => {
                if var > 0.0 {
                    Edge::Open
                } else {
                    closed(mean, 0.0)
                }
            }
            Law::CenteredPoisson { rate } => {
                if upper {
                    Edge::Open
                } else {
                    closed(-rate, rate)
                }
            }
            Law::CompoundPoisson { rate, ref jump } => {
                // Z(1) = 0 exactly when no nonzero jump occurs.
                let (lo, hi, p_zero) = match *jump {
                    JumpDist::TwoPoint { p, up, down } => {
                        let pz = if up == 0.0 { p } else if down == 0.0 { 1.0 - p } else { 0.0 };
                        (up.min(down), up.max(down), pz)
                    }
                    JumpDist::Exponential { .. } => (0.0, f64::INFINITY, 0.0),
                    JumpDist::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY, 0.0),
                };
                let bounded = if upper { hi <= 0.0 } else { lo >= 0.0 };
                if bounded {
                    closed(0.0, rate * (1.0 - p_zero))
                } else {
                    Edge::Open
                }
            }
            Law::Gamma { .. } | Law::StepExponential { .. } => {
                if upper {
                    Edge::Open
                } else {
                    Edge::Closed { at: 0.0, value: ExtReal::PosInf }
                }
            }
            Law::StepTwoPoint { p, up, down } => {
                let (p_lo, lo, p_hi, hi) = if up > down { (1.0 - p, down, p, up) } else { (p, up, 1.0 - p, down) };
                if upper {
                    closed(hi, -p_hi.ln())
                } else {
                    closed(lo, -p_lo.ln())
                }
            }
        }
    }

    /// Conjugate in closed form where one is known.
    pub fn conjugate_closed(&self, a: f64) -> Option<ExtReal> {
        use ExtReal::{Finite, PosInf};
        match *self {
            Law::Gaussian { mean, var } => Some(if var > 0.0 {
                Finite((a - mean) * (a - mean) / (2.0 * var))
            } else if a == mean {
                Finite(0.0)
            } else {
                PosInf
            }),
            Law::CenteredPoisson { rate } => Some(if a > -rate {
                let x = a / rate;
                Finite(rate * ((1.0 + x) * x.ln_1p() - x))
            } else if a == -rate {
                Finite(rate)
            } else {
                PosInf
            }),
            Law::Gamma { shape, scale } => Some(if a > 0.0 {
                let r = a / (shape * scale);
                Finite(shape * (r - 1.0 - r.ln()))
            } else {
                PosInf
            }),
            Law::StepExponential { mean } => Some(if a > 0.0 {
                let r = a / mean;
                Finite(r - 1.0 - r.ln())
            } else {
                PosInf
            }),
            Law::StepTwoPoint { p, up, down } => {
                let q = (a - down) / (up - down);
                Some(if (0.0..=1.0).contains(&q) {
                    Finite(xlogx_ratio(q, p) + xlogx_ratio(1.0 - q, 1.0 - p))
                } else {
                    PosInf
                })
            }
            Law::CompoundPoisson { rate, jump: JumpDist::Exponential { mean } } => Some(if a >= 0.0 {
                let d = (a / mean).sqrt() - rate.sqrt();
                Finite(d * d)
            } else {
                PosInf
            }),
            Law::CompoundPoisson { rate, jump: JumpDist::TwoPoint { p, up, down } }
                if p == 0.5 && up == -down =>
            {
                let v = up.abs();
                let x = a / (rate * v);
                Some(Finite(a * x.asinh() / v - rate * (x.hypot(1.0) - 1.0)))
            }
            _ => None,
        }
    }
}

fn xlogx_ratio(q: f64, p: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        q * (q / p).ln()
    }
}

// Weight of `up` under the exponentially tilted two-point law.
fn two_point_weight(p: f64, up: f64, down: f64, t: f64) -> f64 {
    let z = (p / (1.0 - p)).ln() + (up - down) * t;
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn jump_mgf_minus_one(jump: &JumpDist, t: f64) -> f64 {
    match *jump {
        JumpDist::TwoPoint { p, up, down } => p * (up * t).exp_m1() + (1.0 - p) * (down * t).exp_m1(),
        JumpDist::Exponential { mean } => mean * t / (1.0 - mean * t),
        JumpDist::Gaussian { mean, sd } => (mean * t + 0.5 * sd * sd * t * t).exp_m1(),
    }
}

fn jump_mgf_d1(jump: &JumpDist, t: f64) -> f64 {
    match *jump {
        JumpDist::TwoPoint { p, up, down } => p * up * (up * t).exp() + (1.0 - p) * down * (down * t).exp(),
        JumpDist::Exponential { mean } => {
            let r = 1.0 - mean * t;
            mean / (r * r)
        }
        JumpDist::Gaussian { mean, sd } => {
            let s2 = sd * sd;
            (mean + s2 * t) * (mean * t + 0.5 * s2 * t * t).exp()
        }
    }
}

fn jump_mgf_d2(jump: &JumpDist, t: f64) -> f64 {
    match *jump {
        JumpDist::TwoPoint { p, up, down } => {
            p * up * up * (up * t).exp() + (1.0 - p) * down * down * (down * t).exp()
        }
        JumpDist::Exponential { mean } => {
            let r = 1.0 - mean * t;
            2.0 * mean * mean / (r * r * r)
        }
        JumpDist::Gaussian { mean, sd } => {
            let s2 = sd * sd;
            let k = mean + s2 * t;
            (k * k + s2) * (mean * t + 0.5 * s2 * t * t).exp()
        }
    }
}
