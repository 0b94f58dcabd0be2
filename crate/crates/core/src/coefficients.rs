//! The nine real coefficients of the trace and determinant quadratics
//! `f1(x) = p1 x² + p2 x + p3`, `f2(x) = q1 x² + q2 x + q3`,
//! `f3(x) = q4 x² + q5 x + q6`, which satisfy
//! `tr(G2(x)⁻¹G1(x)) = f1/f2` and `det(G2(x)⁻¹G1(x)) = f3/f2`.

use serde::{Deserialize, Serialize};

use crate::channel::GramPair;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
    pub q5: f64,
    pub q6: f64,
}

/// Names one of the nine coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    P1,
    P2,
    P3,
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPolyValues {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl CoefficientSet {
    pub fn get_mut(&mut self, which: Coefficient) -> &mut f64 {
        match which {
            Coefficient::P1 => &mut self.p1,
            Coefficient::P2 => &mut self.p2,
            Coefficient::P3 => &mut self.p3,
            Coefficient::Q1 => &mut self.q1,
            Coefficient::Q2 => &mut self.q2,
            Coefficient::Q3 => &mut self.q3,
            Coefficient::Q4 => &mut self.q4,
            Coefficient::Q5 => &mut self.q5,
            Coefficient::Q6 => &mut self.q6,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.p1, self.p2, self.p3, self.q1, self.q2, self.q3, self.q4, self.q5, self.q6,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// Coefficients of `F(x) = A1 x² + B1 x + C1 = −τ² f2(x) + τ f1(x) − f3(x)`
    /// at a fixed `tau`, returned as `(A1, B1, C1)`.
    pub fn f_of_x_coefficients(&self, tau: f64) -> (f64, f64, f64) {
        let t2 = tau * tau;
        (
            -t2 * self.q1 + tau * self.p1 - self.q4,
            -t2 * self.q2 + tau * self.p2 - self.q5,
            -t2 * self.q3 + tau * self.p3 - self.q6,
        )
    }
}

/// Evaluates the nine coefficients from the Gram entries. Only `|b1|²`,
/// `|b2|²` and `Re(b1* b2)` enter, so the arithmetic is real.
pub fn coefficient_set(g: &GramPair) -> CoefficientSet {
    let (a1, c1, a2, c2) = (g.a1(), g.c1(), g.a2(), g.c2());
    let (b1, b2) = (g.b1(), g.b2());
    let b1_sq = b1.norm_sqr();
    let b2_sq = b2.norm_sqr();
    // b1* b2 + b1 b2* = 2 Re(b1* b2)
    let cross = 2.0 * (b1.re * b2.re + b1.im * b2.im);
    let det1 = a1 * c1 - b1_sq;
    let det2 = a2 * c2 - b2_sq;

    CoefficientSet {
        p1: -cross - (1.0 + a1) * det2 - (1.0 + a2) * det1,
        p2: 2.0 * cross + (1.0 + a1) * (a2 - c2 + det2) + (1.0 + a2) * (a1 - c1 + det1),
        p3: (1.0 + a1) * (1.0 + c2) + (1.0 + a2) * (1.0 + c1) - cross,
        q1: -a2 * (c2 + det2),
        q2: a2 - c2 + a2 * a2 + b2_sq + a2 * det2,
        q3: 1.0 + a2 + c2 + det2,
        q4: -a1 * (c1 + det1),
        q5: a1 - c1 + a1 * a1 + b1_sq + a1 * det1,
        q6: 1.0 + a1 + c1 + det1,
    }
}

/// `f1(x)`, `f2(x)`, `f3(x)` by Horner's rule.
pub fn f_values(c: &CoefficientSet, x: f64) -> FPolyValues {
    FPolyValues {
        f1: (c.p1 * x + c.p2) * x + c.p3,
        f2: (c.q1 * x + c.q2) * x + c.q3,
        f3: (c.q4 * x + c.q5) * x + c.q6,
    }
}
