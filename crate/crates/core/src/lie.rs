//! The seven-dimensional subalgebra `L0 = span{X1, X2, XX, YY, ZZ, YZ, ZY}` of
//! su(4) and the Weyl chamber of two-qubit class vectors.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qmat::{kron, pauli, Axis, CMat2, CMat4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorLabel {
    X1,
    X2,
    XX,
    YY,
    ZZ,
    YZ,
    ZY,
}

use GeneratorLabel::*;

impl GeneratorLabel {
    pub const ALL: [GeneratorLabel; 7] = [X1, X2, XX, YY, ZZ, YZ, ZY];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Pauli axes on (qubit 1, qubit 2); `None` is the identity factor.
    fn axes(self) -> (Option<Axis>, Option<Axis>) {
        match self {
            X1 => (Some(Axis::X), None),
            X2 => (None, Some(Axis::X)),
            XX => (Some(Axis::X), Some(Axis::X)),
            YY => (Some(Axis::Y), Some(Axis::Y)),
            ZZ => (Some(Axis::Z), Some(Axis::Z)),
            YZ => (Some(Axis::Y), Some(Axis::Z)),
            ZY => (Some(Axis::Z), Some(Axis::Y)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            X1 => "X1",
            X2 => "X2",
            XX => "XX",
            YY => "YY",
            ZZ => "ZZ",
            YZ => "YZ",
            ZY => "ZY",
        }
    }
}

/// Which physical Pauli axis plays the role of `x` for the local generators.
///
/// The cyclic relabelings `x→y→z→x` are proper rotations, so every frame yields
/// an algebra with the same commutator table. In the `Z` frame the local pair
/// is `(Z1, Z2)` and the Cartan triple `(XX, YY, ZZ)` becomes `(ZZ, XX, YY)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    #[default]
    X,
    Y,
    Z,
}

impl Frame {
    pub fn map(self, axis: Axis) -> Axis {
        let shift = match self {
            Frame::X => 0,
            Frame::Y => 1,
            Frame::Z => 2,
        };
        let idx = match axis {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        };
        Axis::ALL[(idx + shift) % 3]
    }
}

/// Pauli product of a generator label in a frame, without the `i/2` factor.
pub fn pauli_product_in(frame: Frame, label: GeneratorLabel) -> CMat4 {
    let factor = |a: Option<Axis>| a.map(|a| pauli(frame.map(a))).unwrap_or_else(CMat2::identity);
    let (a, b) = label.axes();
    kron(&factor(a), &factor(b))
}

/// `(i/2)·P` for the label's Pauli product `P`; anti-Hermitian and traceless.
pub fn generator_matrix(label: GeneratorLabel) -> CMat4 {
    generator_matrix_in(Frame::X, label)
}

pub fn generator_matrix_in(frame: Frame, label: GeneratorLabel) -> CMat4 {
    pauli_product_in(frame, label) * Complex64::new(0.0, 0.5)
}

/// Real linear combination of the seven generators.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct L0Element {
    pub coeffs: [f64; 7],
}

impl L0Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(label: GeneratorLabel) -> Self {
        Self::term(1.0, label)
    }

    pub fn term(coeff: f64, label: GeneratorLabel) -> Self {
        let mut coeffs = [0.0; 7];
        coeffs[label.index()] = coeff;
        Self { coeffs }
    }

    pub fn get(&self, label: GeneratorLabel) -> f64 {
        self.coeffs[label.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn to_matrix(&self, frame: Frame) -> CMat4 {
        GeneratorLabel::ALL
            .iter()
            .filter(|l| self.get(**l) != 0.0)
            .fold(CMat4::zeros(), |acc, &l| acc + generator_matrix_in(frame, l).scale(self.get(l)))
    }

    /// Orthogonal projection of a matrix onto `L0` (the generators are
    /// orthonormal under `tr(A†B)`), together with the norm of the remainder.
    pub fn project(m: &CMat4, frame: Frame) -> (Self, f64) {
        let mut coeffs = [0.0; 7];
        for l in GeneratorLabel::ALL {
            let g = generator_matrix_in(frame, l);
            coeffs[l.index()] = (g.adjoint() * m).trace().re;
        }
        let elem = Self { coeffs };
        let rest = m - elem.to_matrix(frame);
        (elem, rest.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Lie bracket, bilinear extension of [`commutator`].
    pub fn bracket(&self, other: &L0Element) -> L0Element {
        let mut out = [0.0; 7];
        for a in GeneratorLabel::ALL {
            for b in GeneratorLabel::ALL {
                let w = self.get(a) * other.get(b);
                if w == 0.0 {
                    continue;
                }
                if let Some((s, l)) = table_entry(a, b) {
                    out[l.index()] += w * s;
                }
            }
        }
        L0Element { coeffs: out }
    }
}

impl std::ops::Add for L0Element {
    type Output = L0Element;
    fn add(mut self, rhs: L0Element) -> L0Element {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

// Row a, column b holds [a, b].
const TABLE: [[Option<(f64, GeneratorLabel)>; 7]; 7] = {
    const O: Option<(f64, GeneratorLabel)> = None;
    const fn p(l: GeneratorLabel) -> Option<(f64, GeneratorLabel)> {
        Some((1.0, l))
    }
    const fn m(l: GeneratorLabel) -> Option<(f64, GeneratorLabel)> {
        Some((-1.0, l))
    }
    [
        [O, O, O, m(ZY), p(YZ), m(ZZ), p(YY)],
        [O, O, O, m(YZ), p(ZY), p(YY), m(ZZ)],
        [O, O, O, O, O, O, O],
        [p(ZY), p(YZ), O, O, O, m(X2), m(X1)],
        [m(YZ), m(ZY), O, O, O, p(X1), p(X2)],
        [p(ZZ), m(YY), O, p(X2), m(X1), O, O],
        [m(YY), p(ZZ), O, p(X1), m(X2), O, O],
    ]
};

fn table_entry(a: GeneratorLabel, b: GeneratorLabel) -> Option<(f64, GeneratorLabel)> {
    TABLE[a.index()][b.index()]
}

/// `[a, b]` read from the commutator table of `L0`.
pub fn commutator(a: GeneratorLabel, b: GeneratorLabel) -> L0Element {
    match table_entry(a, b) {
        Some((s, l)) => L0Element::term(s, l),
        None => L0Element::zero(),
    }
}

/// Local-equivalence class coordinates `(c1, c2, c3)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ClassVector {
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    /// The CNOT class `(π/2, 0, 0)`.
    pub const CNOT: ClassVector = ClassVector::new(FRAC_PI_2, 0.0, 0.0);

    pub fn from_half_pi(units: [f64; 3]) -> Self {
        Self::new(units[0] * FRAC_PI_2, units[1] * FRAC_PI_2, units[2] * FRAC_PI_2)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn in_half_pi(self) -> [f64; 3] {
        self.to_array().map(|c| c / FRAC_PI_2)
    }

    pub fn max_abs_diff(self, other: ClassVector) -> f64 {
        let (a, b) = (self.to_array(), other.to_array());
        (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }

    /// Conditions (i)–(iii) of the canonical chamber, within `tol`.
    pub fn is_canonical(self, tol: f64) -> bool {
        chamber_violation(self.to_array(), tol) == 0.0
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.in_half_pi();
        write!(f, "({a:.6}, {b:.6}, {c:.6})×π/2")
    }
}

const SNAP: f64 = 1e-12;

fn reduce_mod_pi(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    if r > PI - SNAP || r < SNAP {
        0.0
    } else {
        r
    }
}

// Sum of constraint violations; zero inside the chamber.
fn chamber_violation(c: [f64; 3], tol: f64) -> f64 {
    let pos = |x: f64| if x > tol { x } else { 0.0 };
    let [c1, c2, c3] = c;
    let mut v = pos(c1 - PI) + pos(c2 - c1) + pos(c3 - c2) + pos(-c3) + pos(c1 + c2 - PI);
    if c3 <= tol {
        v += pos(c1 - FRAC_PI_2);
    }
    v
}

const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
const FLIPS: [[bool; 3]; 4] = [
    [false, false, false],
    [true, true, false],
    [true, false, true],
    [false, true, true],
];

/// Representative of `c` in the canonical Weyl chamber.
///
/// Enumerates the orbit of `c` under coordinate permutations, simultaneous
/// sign flips of two coordinates and shifts by π (all three are local
/// symmetries of the entangler), reduced into `[0, π)³`, and returns the
/// lexicographically smallest member satisfying the chamber conditions.
pub fn canonicalize_weyl(c: ClassVector) -> ClassVector {
    let r = c.to_array().map(reduce_mod_pi);
    let mut best: Option<[f64; 3]> = None;
    let mut fallback: Option<(f64, [f64; 3])> = None;
    for flip in FLIPS {
        let v: [f64; 3] = std::array::from_fn(|k| if flip[k] { reduce_mod_pi(PI - r[k]) } else { r[k] });
        for perm in PERMS {
            let cand = [v[perm[0]], v[perm[1]], v[perm[2]]];
            let viol = chamber_violation(cand, SNAP);
            if viol == 0.0 {
                if best.map_or(true, |b| lex_less(cand, b)) {
                    best = Some(cand);
                }
            } else if fallback.map_or(true, |(fv, _)| viol < fv) {
                fallback = Some((viol, cand));
            }
        }
    }
    let out = best.or(fallback.map(|(_, c)| c)).expect("orbit is non-empty");
    ClassVector::from_array(out)
}

fn lex_less(a: [f64; 3], b: [f64; 3]) -> bool {
    for i in 0..3 {
        if a[i] < b[i] {
            return true;
        }
        if a[i] > b[i] {
            return false;
        }
    }
    false
}
