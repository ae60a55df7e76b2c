//! Asymptotic constants from the characteristic determinant
//! `f(x, y, z) = det(I - (z/K) sum_eps x^eps M_eps(y))` of the final
//! component, and the classification they imply.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{jet_from_edge, Jet2, JetMatrix, Var};
use crate::model::FinalComponent;
use crate::rational::{self, Rational};

/// The asymptotic constants: `E Input = e1 n`, `E Output = e2 n + O(1)`,
/// `V Input = v1 n`, `V Output = v2 n + O(1)`, `Cov = c n + O(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moments {
    pub e1: Rational,
    pub e2: Rational,
    pub v1: Rational,
    pub v2: Rational,
    pub c: Rational,
}

impl Moments {
    /// `det Sigma = v1 v2 - c^2`.
    pub fn sigma_det(&self) -> Rational {
        &self.v1 * &self.v2 - &self.c * &self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitLaw {
    /// Regular Sigma: joint normal limit.
    JointNormal,
    /// Input sum degenerate, output sum normal.
    NormalTimesDegenerate,
    /// Rank one with both variances positive: the centered output is
    /// asymptotically a multiple of the centered input.
    LinearRelationship,
    /// Output sum has bounded variance; input sum normal.
    DegenerateOutput,
}

impl LimitLaw {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitLaw::JointNormal => "joint-normal",
            LimitLaw::NormalTimesDegenerate => "normal-times-degenerate",
            LimitLaw::LinearRelationship => "linear-relationship",
            LimitLaw::DegenerateOutput => "degenerate-output",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// `c = 0`.
    pub independent: bool,
    /// `v2 = 0`.
    pub bounded_variance: bool,
    pub sigma_rank: u8,
    /// `c^2 / (v1 v2)`, defined when `v1 v2 != 0`.
    pub squared_correlation: Option<Rational>,
    pub correlation_sign: i8,
    /// Rank one with `c != 0`: correlation coefficient `+1` or `-1`.
    pub perfectly_correlated: bool,
    pub limit_law: LimitLaw,
}

/// `I - (z/K) sum_eps x^eps M_eps(y)` over the final component, parallel
/// transitions summed entrywise. Rows and columns follow `fc.states()`.
pub fn characteristic_matrix(fc: &FinalComponent) -> JetMatrix {
    let mut m = JetMatrix::identity(fc.n());
    for t in fc.transitions() {
        let (i, j) = (fc.local_index(t.from).unwrap(), fc.local_index(t.to).unwrap());
        *m.get_mut(i, j) -= &jet_from_edge(&t.input, &t.output, fc.k());
    }
    m
}

/// Second-order jet of `f` at `(1, 1, 1)`.
pub fn characteristic_jet(fc: &FinalComponent) -> Result<Jet2> {
    if fc.k() < 2 {
        return Err(Error::AlphabetTooSmall { size: fc.k() });
    }
    let jet = characteristic_matrix(fc).det();
    if !jet.value().is_zero() {
        return Err(Error::InternalMismatch(format!(
            "f(1,1,1) = {} but K must be an eigenvalue of the transition matrix",
            jet.value()
        )));
    }
    if jet.d(Var::Z).is_zero() {
        return Err(Error::DegenerateCharacteristic);
    }
    Ok(jet)
}

/// `(1/K) sum eps` and `(1/K) sum eps^2 - ((1/K) sum eps)^2`.
pub fn input_closed_form(alphabet: &[Rational]) -> (Rational, Rational) {
    let k = rational::int(alphabet.len() as i64);
    let mean = alphabet.iter().sum::<Rational>() / &k;
    let square = alphabet.iter().map(|e| e * e).sum::<Rational>() / &k;
    let variance = square - &mean * &mean;
    (mean, variance)
}

/// The five constants from the partial derivatives of `f`, with `e1` and
/// `v1` checked against their closed forms over `alphabet`.
pub fn asymptotic_moments(jet: &Jet2, alphabet: &[Rational]) -> Result<Moments> {
    use Var::{X, Y, Z};
    let (fx, fy, fz) = (jet.d(X), jet.d(Y), jet.d(Z));
    if fz.is_zero() {
        return Err(Error::DegenerateCharacteristic);
    }
    let (fxx, fyy, fzz) = (jet.d2(X, X), jet.d2(Y, Y), jet.d2(Z, Z));
    let (fxy, fxz, fyz) = (jet.d2(X, Y), jet.d2(X, Z), jet.d2(Y, Z));
    let fz2 = &fz * &fz;
    let fz3 = &fz2 * &fz;
    let zz = &fzz + &fz;

    let variance = |fa: &Rational, faa: &Rational, faz: &Rational| -> Rational {
        (fa * fa * &zz + &fz2 * (faa + fa) - rational::int(2) * fa * &fz * faz) / &fz3
    };

    let moments = Moments {
        e1: &fx / &fz,
        e2: &fy / &fz,
        v1: variance(&fx, &fxx, &fxz),
        v2: variance(&fy, &fyy, &fyz),
        c: (&fx * &fy * &zz + &fz2 * &fxy - &fy * &fz * &fxz - &fx * &fz * &fyz) / &fz3,
    };

    let (e1, v1) = input_closed_form(alphabet);
    if e1 != moments.e1 || v1 != moments.v1 {
        return Err(Error::InternalMismatch(format!(
            "input moments from the determinant ({}, {}) differ from the closed form ({e1}, {v1})",
            moments.e1, moments.v1
        )));
    }
    Ok(moments)
}

/// Characteristic jet followed by [`asymptotic_moments`].
pub fn moments_algebraic(fc: &FinalComponent) -> Result<Moments> {
    asymptotic_moments(&characteristic_jet(fc)?, fc.alphabet())
}

pub fn classify(m: &Moments) -> Classification {
    let det = m.sigma_det();
    let sigma_rank = if !det.is_zero() {
        2
    } else if m.v1.is_zero() && m.v2.is_zero() {
        0
    } else {
        1
    };
    let variance_product = &m.v1 * &m.v2;
    let squared_correlation = (!variance_product.is_zero()).then(|| &m.c * &m.c / &variance_product);
    let limit_law = match sigma_rank {
        2 => LimitLaw::JointNormal,
        _ if m.v2.is_zero() => LimitLaw::DegenerateOutput,
        _ if m.v1.is_zero() => LimitLaw::NormalTimesDegenerate,
        _ => LimitLaw::LinearRelationship,
    };
    Classification {
        independent: m.c.is_zero(),
        bounded_variance: m.v2.is_zero(),
        sigma_rank,
        perfectly_correlated: sigma_rank == 1 && !m.c.is_zero(),
        correlation_sign: rational::sign(&m.c),
        squared_correlation,
        limit_law,
    }
}

impl Classification {
    /// Squared correlation equals one exactly when perfectly correlated.
    pub fn is_consistent(&self) -> bool {
        let perfect = self.squared_correlation.as_ref().is_some_and(|r| r.is_one());
        (self.limit_law == LimitLaw::JointNormal) == (self.sigma_rank == 2) && (!self.perfectly_correlated || perfect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::model::final_component;
    use crate::rational::{frac, int};

    fn moments_of(t: &crate::Transducer) -> Moments {
        moments_algebraic(&final_component(t).unwrap()).unwrap()
    }

    /// Taylor coefficients at z = 1 of a polynomial given by its coefficients
    /// in increasing powers of z: (p(1), p'(1), p''(1) / 2).
    fn taylor_at_one(p: &[Rational]) -> [Rational; 3] {
        let mut out: [Rational; 3] = Default::default();
        for (k, c) in p.iter().enumerate() {
            let k = k as i64;
            out[0] += c;
            out[1] += c * int(k);
            out[2] += c * int(k * (k - 1) / 2);
        }
        out
    }

    fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn naf_slice_matches_factored_polynomial() {
        let jet = characteristic_jet(&final_component(&builtins::naf()).unwrap()).unwrap();
        // (1 - z/2)(1 - z/2 - z^2/2)
        let g = poly_mul(&[int(1), frac(-1, 2)], &[int(1), frac(-1, 2), frac(-1, 2)]);
        let [g0, g1, g2] = taylor_at_one(&g);
        assert_eq!(jet.value(), &g0);
        assert_eq!(jet.d(Var::Z), g1);
        assert_eq!(jet.d2(Var::Z, Var::Z) / int(2), g2);
        assert!(!g1.is_zero());
    }

    #[test]
    fn one_state_machine_is_one_minus_z() {
        let one = crate::Transducer::new(
            1,
            vec![
                crate::Transition::new(1, 1, int(0), int(0)),
                crate::Transition::new(1, 1, int(1), int(0)),
            ],
            Default::default(),
            None,
        )
        .unwrap();
        let jet = characteristic_jet(&final_component(&one).unwrap()).unwrap();
        assert_eq!(jet.d(Var::Z), int(-1));
        assert_eq!(jet.d2(Var::Z, Var::Z), int(0));
        assert!(jet.d(Var::Y).is_zero());
    }

    #[test]
    fn output_free_machine_has_no_y_dependence() {
        let jet = characteristic_jet(&final_component(&builtins::simple(Default::default())).unwrap()).unwrap();
        assert!(jet.d(Var::Y).is_zero());
        assert!(jet.d2(Var::Y, Var::Y).is_zero());
        assert!(jet.d2(Var::X, Var::Y).is_zero());
        assert!(jet.d2(Var::Y, Var::Z).is_zero());
    }

    #[test]
    fn block_machines() {
        let m = moments_of(&builtins::block01());
        assert_eq!(m.v2, frac(1, 16));
        assert!(m.c.is_zero());

        let m = moments_of(&builtins::block11());
        assert_eq!(m.v2, frac(5, 16));
        let class = classify(&m);
        assert_eq!(class.squared_correlation, Some(frac(4, 5)));
        assert_eq!(class.correlation_sign, 1);
        assert!(!class.independent);
        assert_eq!(class.limit_law, LimitLaw::JointNormal);
    }

    #[test]
    fn simple_with_first_output_one() {
        let m = moments_of(&builtins::simple([int(1), int(0), int(0), int(0)]));
        assert_eq!(m.e2, frac(1, 4));
        assert_eq!(m.c, frac(-1, 4));
        assert_eq!(m.v2, frac(5, 16));
    }

    #[test]
    fn binary_input_constants() {
        for (_, t) in builtins::all_default() {
            let m = moments_of(&t);
            assert_eq!(m.e1, frac(1, 2));
            assert_eq!(m.v1, frac(1, 4));
        }
    }

    #[test]
    fn naf_constants() {
        let m = moments_of(&builtins::naf());
        assert_eq!(m.e2, frac(1, 3));
        assert_eq!(m.v2, frac(2, 27));
        let class = classify(&m);
        assert!(class.independent);
        assert!(!class.bounded_variance);
    }

    #[test]
    fn constant_output_is_degenerate() {
        let t = builtins::naf().map_outputs(|_| int(3));
        let m = moments_of(&t);
        assert_eq!(m.e2, int(3));
        let class = classify(&m);
        assert!(class.bounded_variance);
        assert!(class.independent);
        assert_eq!(class.sigma_rank, 1);
        assert_eq!(class.limit_law, LimitLaw::DegenerateOutput);
        assert_eq!(class.squared_correlation, None);
        assert!(class.is_consistent());
    }

    #[test]
    fn identity_output_is_perfectly_correlated() {
        let t = builtins::naf();
        let copy = crate::Transducer::new(
            3,
            t.transitions()
                .iter()
                .map(|tr| crate::Transition::new(tr.from, tr.to, tr.input.clone(), tr.input.clone()))
                .collect(),
            Default::default(),
            None,
        )
        .unwrap();
        let class = classify(&moments_of(&copy));
        assert_eq!(class.sigma_rank, 1);
        assert!(class.perfectly_correlated);
        assert_eq!(class.squared_correlation, Some(int(1)));
        assert_eq!(class.limit_law, LimitLaw::LinearRelationship);
    }

    #[test]
    fn input_mismatch_is_caught() {
        let jet = characteristic_jet(&final_component(&builtins::naf()).unwrap()).unwrap();
        let err = asymptotic_moments(&jet, &[int(0), int(2)]).unwrap_err();
        assert!(matches!(err, Error::InternalMismatch(_)));
    }

    #[test]
    fn closed_form_with_rational_alphabet() {
        let (mean, variance) = input_closed_form(&[frac(-1, 2), int(0), int(2)]);
        assert_eq!(mean, frac(1, 2));
        // (1/4 + 0 + 4)/3 - 1/4
        assert_eq!(variance, frac(17, 12) - frac(1, 4));
    }
}
