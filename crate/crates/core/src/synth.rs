//! Top-level constructions: the polynomial `P = Q ∘ F`, its gradient field
//! `−∇P`, and the saddle-augmented field with stable points on `X` and
//! saddles between consecutive axis images.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coord::{build_coord_change, CoordChange, PointSet};
use crate::error::Result;
use crate::morse::{AlphaSpec, MorsePair};
use crate::poly::{rat, serial, univariate, MultiPoly, PolyMap, Rational};
use crate::verify::{hessian_exact, leading_minors};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub input: PointSet,
    pub change: CoordChange,
    pub morse: MorsePair,
    /// `f(x₁, x₂) + ½ Σ_{i>2} xᵢ²`.
    pub q: MultiPoly,
    /// `P = Q ∘ F`.
    pub p_poly: MultiPoly,
    /// `−∇P`.
    pub grad_field: PolyMap,
}

/// Builds `P` with critical set exactly `xs`, all nondegenerate minima.
pub fn synthesize(xs: &PointSet) -> Result<SynthesisResult> {
    let n = xs.dimension();
    let change = build_coord_change(xs)?;
    let spec = AlphaSpec::new(change.axis_images.clone())?;
    let morse = MorsePair::from_spec(&spec)?;
    let mut q = morse.f.extend_dimension(n)?;
    for i in 2..n {
        q = &q + &MultiPoly::var(n, i)?.pow(2).scale(&rat(1, 2));
    }
    let p_poly = q.compose(&change.forward)?;
    let grad_field = p_poly.gradient().neg();
    Ok(SynthesisResult {
        input: xs.clone(),
        change,
        morse,
        q,
        p_poly,
        grad_field,
    })
}

/// Exact Hessian of `P` at `x` from the symbolic second partials.
pub fn hessian_at(result: &SynthesisResult, x: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    hessian_exact(&result.p_poly, x)
}

/// `−∇P`, recomputed from `P`.
pub fn gradient_field(result: &SynthesisResult) -> PolyMap {
    result.p_poly.gradient().neg()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointAudit {
    #[serde(with = "serial::rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serial::rational_matrix")]
    pub hessian: Vec<Vec<Rational>>,
    #[serde(with = "serial::rational_vec")]
    pub minors: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeAudit {
    pub f: u32,
    pub forward_max: u32,
    pub p: u32,
    /// `deg f · max_j deg F_j`.
    pub bound: u32,
}

/// The JSON artifact written by `synthesize` and read by `verify`, `flow`
/// and `export-grid`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditBundle {
    pub kind: String,
    #[serde(flatten)]
    pub result: SynthesisResult,
    pub per_point: Vec<PointAudit>,
    pub degrees: DegreeAudit,
}

pub const BUNDLE_KIND: &str = "synthesis";

impl SynthesisResult {
    pub fn degrees(&self) -> DegreeAudit {
        let f = self.morse.f.total_degree().unwrap_or(0);
        let forward_max = self.change.forward.max_degree();
        DegreeAudit {
            f,
            forward_max,
            p: self.p_poly.total_degree().unwrap_or(0),
            bound: f * forward_max.max(1),
        }
    }

    pub fn to_bundle(&self) -> Result<AuditBundle> {
        let per_point = self
            .input
            .points()
            .iter()
            .map(|x| {
                let hessian = hessian_at(self, x)?;
                let minors = leading_minors(&hessian);
                Ok(PointAudit {
                    point: x.clone(),
                    hessian,
                    minors,
                })
            })
            .collect::<Result<_>>()?;
        Ok(AuditBundle {
            kind: BUNDLE_KIND.into(),
            result: self.clone(),
            per_point,
            degrees: self.degrees(),
        })
    }
}

/// The saddle-augmented field, in the flattened coordinates and pulled back
/// to the original ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaddleField {
    pub kind: String,
    pub input: PointSet,
    pub change: CoordChange,
    /// `γ(x) = −∏(x − aᵢ) ∏(x − bᵢ)`, one variable.
    pub gamma: MultiPoly,
    /// `(γ(x₁), −x₂, …, −xₙ)`.
    pub field: PolyMap,
    /// `a₁ < … < a_k`.
    #[serde(with = "serial::rational_vec")]
    pub stable_set: Vec<Rational>,
    /// `bᵢ = (aᵢ + aᵢ₊₁)/2`.
    #[serde(with = "serial::rational_vec")]
    pub saddle_set: Vec<Rational>,
    /// `JF(x)⁻¹ · field(F(x))`, the same dynamics in the input coordinates.
    pub pulled_back: PolyMap,
}

pub const SADDLE_KIND: &str = "saddle-field";

pub fn build_saddle_field(xs: &PointSet) -> Result<SaddleField> {
    let n = xs.dimension();
    let change = build_coord_change(xs)?;
    let mut stable_set = change.axis_images.clone();
    stable_set.sort();
    let saddle_set: Vec<Rational> = stable_set
        .windows(2)
        .map(|w| (&w[0] + &w[1]) * rat(1, 2))
        .collect();
    let roots: Vec<Rational> = stable_set.iter().chain(&saddle_set).cloned().collect();
    let gamma = -univariate::from_roots(&roots);

    let x1 = PolyMap::new(n, vec![MultiPoly::var(n, 0)?])?;
    let mut comps = vec![gamma.compose(&x1)?];
    for i in 1..n {
        comps.push(-MultiPoly::var(n, i)?);
    }
    let field = PolyMap::new(n, comps)?;

    // JF(x)⁻¹ = J(F⁻¹)(F(x))
    let field_at_f = field.compose_map(&change.forward)?;
    let inv_jac = change.inverse.jacobian();
    let mut pulled = Vec::with_capacity(n);
    for row in &inv_jac {
        let mut acc = MultiPoly::zero(n);
        for (entry, g) in row.iter().zip(field_at_f.components()) {
            if entry.is_zero() || g.is_zero() {
                continue;
            }
            acc = &acc + &(&entry.compose(&change.forward)? * g);
        }
        pulled.push(acc);
    }
    let pulled_back = PolyMap::new(n, pulled)?;

    Ok(SaddleField {
        kind: SADDLE_KIND.into(),
        input: xs.clone(),
        change,
        gamma,
        field,
        stable_set,
        saddle_set,
        pulled_back,
    })
}

/// Exact equilibrium census of the flattened saddle field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    /// `γ` vanishes on every stable and saddle abscissa.
    pub roots_vanish: bool,
    /// `deg γ` equals the number of those abscissae, so there are no others.
    pub degree_matches: bool,
    /// `γ′(aᵢ) < 0` for every stable abscissa.
    pub stable_slopes_negative: bool,
    /// `γ′(bᵢ) > 0` for every saddle abscissa.
    pub saddle_slopes_positive: bool,
    /// Tail components are exactly `−x₂, …, −xₙ`.
    pub tail_is_linear_decay: bool,
}

impl Census {
    pub fn pass(&self) -> bool {
        self.roots_vanish
            && self.degree_matches
            && self.stable_slopes_negative
            && self.saddle_slopes_positive
            && self.tail_is_linear_decay
    }
}

impl SaddleField {
    pub fn census(&self) -> Result<Census> {
        let n = self.field.domain_dim();
        let d_gamma = self.gamma.partial(0)?;
        let at = |p: &MultiPoly, a: &Rational| p.eval_rational(std::slice::from_ref(a));
        let mut roots_vanish = true;
        for r in self.stable_set.iter().chain(&self.saddle_set) {
            roots_vanish &= at(&self.gamma, r)?.is_zero();
        }
        let mut distinct: Vec<&Rational> = self.stable_set.iter().chain(&self.saddle_set).collect();
        distinct.sort();
        distinct.dedup();
        let degree_matches = !self.gamma.is_zero()
            && distinct.len() == self.stable_set.len() + self.saddle_set.len()
            && self.gamma.total_degree() == Some(distinct.len() as u32);
        let mut stable_slopes_negative = true;
        for a in &self.stable_set {
            stable_slopes_negative &= at(&d_gamma, a)?.is_negative();
        }
        let mut saddle_slopes_positive = true;
        for b in &self.saddle_set {
            saddle_slopes_positive &= at(&d_gamma, b)?.is_positive();
        }
        let tail_is_linear_decay = (1..n).all(|i| {
            self.field.components()[i] == -MultiPoly::var(n, i).expect("index in range")
        });
        Ok(Census {
            roots_vanish,
            degree_matches,
            stable_slopes_negative,
            saddle_slopes_positive,
            tail_is_linear_decay,
        })
    }

    /// Equilibria of the flattened field: `(c, 0, …, 0)` for each stable then
    /// each saddle abscissa.
    pub fn equilibria(&self) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
        let n = self.field.domain_dim();
        let lift = |c: &Rational| {
            let mut v = vec![Rational::zero(); n];
            v[0] = c.clone();
            v
        };
        (
            self.stable_set.iter().map(lift).collect(),
            self.saddle_set.iter().map(lift).collect(),
        )
    }
}

/// `γ′` at `c`, handy for reporting eigenvalues along the first axis.
pub fn gamma_slope(field: &SaddleField, c: &Rational) -> Result<Rational> {
    field
        .gamma
        .partial(0)?
        .eval_rational(std::slice::from_ref(c))
}
