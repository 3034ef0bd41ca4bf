//! Short-Weierstrass curves `y^2 = x^3 + ax + b` in affine coordinates over any
//! [`FiniteField`] of characteristic at least 5.

use rayon::prelude::*;

use crate::arith::prime_factors;
use crate::error::{capacity_err, param_err, Result};
use crate::field::{FiniteField, MAX_ENUMERATION};

/// Point enumeration sweeps every `x`; prime fields up to this size.
pub const MAX_PRIME_SWEEP: u64 = 1 << 20;
/// Extension fields up to this size.
pub const MAX_EXT_SWEEP: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point<E> {
    Infinity,
    Affine { x: E, y: E },
}

impl<E> Point<E> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&E> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, .. } => Some(x),
        }
    }

    pub fn y(&self) -> Option<&E> {
        match self {
            Point::Infinity => None,
            Point::Affine { y, .. } => Some(y),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve<F: FiniteField> {
    field: F,
    a: F::Elem,
    b: F::Elem,
}

impl<F: FiniteField> Curve<F> {
    pub fn new(field: F, a: F::Elem, b: F::Elem) -> Result<Self> {
        if field.characteristic() < 5 {
            return Err(param_err!(
                "curves need characteristic >= 5, got {}",
                field.characteristic()
            ));
        }
        if !field.contains(&a) || !field.contains(&b) {
            return Err(param_err!("curve coefficients are not field elements"));
        }
        let a3 = field.mul(&field.square(&a), &a);
        let disc = field.add(
            &field.mul(&field.constant(4), &a3),
            &field.mul(&field.constant(27), &field.square(&b)),
        );
        if field.is_zero(&disc) {
            return Err(param_err!("singular curve: 4a^3 + 27b^2 = 0"));
        }
        Ok(Self { field, a, b })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn a(&self) -> &F::Elem {
        &self.a
    }

    pub fn b(&self) -> &F::Elem {
        &self.b
    }

    /// `x^3 + ax + b`.
    pub fn rhs(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        let x3 = f.mul(&f.square(x), x);
        f.add(&f.add(&x3, &f.mul(&self.a, x)), &self.b)
    }

    pub fn is_on_curve(&self, p: &Point<F::Elem>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                self.field.contains(x)
                    && self.field.contains(y)
                    && self.field.square(y) == self.rhs(x)
            }
        }
    }

    pub fn point(&self, x: F::Elem, y: F::Elem) -> Result<Point<F::Elem>> {
        let p = Point::Affine { x, y };
        if !self.is_on_curve(&p) {
            return Err(param_err!("{p:?} is not on the curve"));
        }
        Ok(p)
    }

    pub fn neg(&self, p: &Point<F::Elem>) -> Point<F::Elem> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::Affine {
                x: x.clone(),
                y: self.field.neg(y),
            },
        }
    }

    /// Group law with both operands validated against this curve.
    pub fn add(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Result<Point<F::Elem>> {
        for pt in [p, q] {
            if !self.is_on_curve(pt) {
                return Err(param_err!("{pt:?} is not on the curve"));
            }
        }
        Ok(self.add_unchecked(p, q))
    }

    /// Chord-tangent addition; operands must already be on the curve.
    pub fn add_unchecked(&self, p: &Point<F::Elem>, q: &Point<F::Elem>) -> Point<F::Elem> {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine { x: x1, y: y1 }, Point::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let slope = if x1 == x2 {
            if f.is_zero(&f.add(y1, y2)) {
                return Point::Infinity;
            }
            // doubling: (3x^2 + a) / (2y)
            let num = f.add(&f.mul(&f.constant(3), &f.square(x1)), &self.a);
            let den = f.add(y1, y1);
            f.mul(&num, &f.inv(&den).expect("2y != 0 when y != -y"))
        } else {
            let den = f.sub(x2, x1);
            f.mul(&f.sub(y2, y1), &f.inv(&den).expect("x2 != x1"))
        };
        let x3 = f.sub(&f.sub(&f.square(&slope), x1), x2);
        let y3 = f.sub(&f.mul(&slope, &f.sub(x1, &x3)), y1);
        Point::Affine { x: x3, y: y3 }
    }

    /// Double-and-add.
    pub fn scalar_mul(&self, mut n: u64, p: &Point<F::Elem>) -> Point<F::Elem> {
        let mut acc = Point::Infinity;
        let mut base = p.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Every rational point, `O` first, then affine points ordered by the
    /// field index of `x` and then of `y`.
    pub fn enumerate(&self) -> Result<Vec<Point<F::Elem>>> {
        let size = self.field.order();
        let cap = if self.field.order() == self.field.characteristic() {
            MAX_PRIME_SWEEP
        } else {
            MAX_EXT_SWEEP
        };
        if size > cap {
            return Err(capacity_err!(
                "field of size {size} exceeds point-enumeration cap {cap}"
            ));
        }
        let f = &self.field;
        // roots[i] holds the (at most two) square roots of the element with index i
        let mut roots: Vec<[u64; 2]> = vec![[u64::MAX; 2]; size as usize];
        for yi in 0..size {
            let y = f.element_at(yi);
            let slot = &mut roots[f.index_of(&f.square(&y)) as usize];
            if slot[0] == u64::MAX {
                slot[0] = yi;
            } else {
                slot[1] = yi;
            }
        }
        let affine: Vec<Point<F::Elem>> = (0..size)
            .into_par_iter()
            .flat_map_iter(|xi| {
                let x = f.element_at(xi);
                let r = roots[f.index_of(&self.rhs(&x)) as usize];
                r.into_iter()
                    .filter(|&yi| yi != u64::MAX)
                    .map(move |yi| Point::Affine {
                        x: x.clone(),
                        y: f.element_at(yi),
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut pts = Vec::with_capacity(affine.len() + 1);
        pts.push(Point::Infinity);
        pts.extend(affine);
        Ok(pts)
    }

    /// Smallest `n >= 1` with `nP = O`, given a multiple `bound` of it.
    pub fn order_of(&self, p: &Point<F::Elem>, bound: u64) -> u64 {
        let mut n = bound;
        for r in prime_factors(bound) {
            while n.is_multiple_of(r) && self.scalar_mul(n / r, p).is_infinity() {
                n /= r;
            }
        }
        n
    }

    pub fn subgroup(&self, q: u64, seed: u64) -> Result<EcSubgroup<F>> {
        let points = self.enumerate()?;
        EcSubgroup::from_points(self, &points, q, seed)
    }
}

/// Whether `|count - (q + 1)| <= 2 sqrt(q)`, checked in integers.
pub fn hasse_holds(count: u64, q: u64) -> bool {
    let diff = count as i128 - (q as i128 + 1);
    diff * diff <= 4 * q as i128
}

/// A cyclic subgroup of `E(F)`: `elements[i] = i * generator`.
#[derive(Clone, Debug)]
pub struct EcSubgroup<F: FiniteField> {
    curve: Curve<F>,
    generator: Point<F::Elem>,
    order: u64,
    elements: Vec<Point<F::Elem>>,
}

impl<F: FiniteField> EcSubgroup<F> {
    /// Scans `points` (cyclically, from index `seed`) for a `P` such that
    /// `(N/q) P` has exact order `q`. When the group is not cyclic that can
    /// fail even though points of order `q` exist, so a second scan takes
    /// `(ord(P)/q) P` for the first `P` whose order is a multiple of `q`.
    pub fn from_points(
        curve: &Curve<F>,
        points: &[Point<F::Elem>],
        q: u64,
        seed: u64,
    ) -> Result<Self> {
        let n = points.len() as u64;
        if q == 0 || !n.is_multiple_of(q) {
            return Err(param_err!(
                "subgroup order {q} does not divide the group order {n}"
            ));
        }
        if q > MAX_ENUMERATION {
            return Err(capacity_err!(
                "subgroup order {q} exceeds the enumeration cap"
            ));
        }
        let factors = prime_factors(q);
        let exact = |g: &Point<F::Elem>| {
            curve.scalar_mul(q, g).is_infinity()
                && factors
                    .iter()
                    .all(|r| !curve.scalar_mul(q / r, g).is_infinity())
        };
        let scan = || (0..n).map(|step| &points[((seed % n + step) % n) as usize]);
        let by_cofactor = scan()
            .map(|p| curve.scalar_mul(n / q, p))
            .find(|g| exact(g));
        let generator = by_cofactor.or_else(|| {
            scan().find_map(|p| {
                let o = curve.order_of(p, n);
                o.is_multiple_of(q).then(|| curve.scalar_mul(o / q, p))
            })
        });
        let Some(g) = generator else {
            return Err(param_err!("no point of order {q} among the {n} points"));
        };
        let mut elements = Vec::with_capacity(q as usize);
        let mut acc = Point::Infinity;
        for _ in 0..q {
            elements.push(acc.clone());
            acc = curve.add_unchecked(&acc, &g);
        }
        debug_assert!(acc.is_infinity());
        Ok(Self {
            curve: curve.clone(),
            generator: g,
            order: q,
            elements,
        })
    }

    pub fn curve(&self) -> &Curve<F> {
        &self.curve
    }

    pub fn generator(&self) -> &Point<F::Elem> {
        &self.generator
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn elements(&self) -> &[Point<F::Elem>] {
        &self.elements
    }

    pub fn contains(&self, p: &Point<F::Elem>) -> bool {
        self.elements.contains(p)
    }

    /// Finite points only, with the number of `O` entries dropped.
    pub fn finite_points(&self) -> (Vec<&Point<F::Elem>>, u64) {
        let finite: Vec<_> = self.elements.iter().filter(|p| !p.is_infinity()).collect();
        let dropped = self.elements.len() as u64 - finite.len() as u64;
        (finite, dropped)
    }
}
