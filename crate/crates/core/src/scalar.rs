//! Scalar contexts for the generic linear algebra.
//!
//! Arithmetic is routed through a context value rather than through operator
//! traits on the elements, so that runtime-parameterised rings (finite fields
//! of a chosen size, truncated series of a chosen precision) share the same
//! matrix code as the num-traits scalars.

use std::fmt::Debug;
use std::marker::PhantomData;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, One, Zero};

/// A commutative ring given by a context object.
pub trait Ring {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    /// `None` exactly for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }
}

/// Context for any num-traits scalar; arithmetic is the scalar's own.
pub struct Exact<T>(PhantomData<T>);

impl<T> Exact<T> {
    pub const fn new() -> Self {
        Exact(PhantomData)
    }
}

impl<T> Default for Exact<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Clone for Exact<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Exact<T> {}

impl<T> Debug for Exact<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Exact<{}>", std::any::type_name::<T>())
    }
}

impl<T> Ring for Exact<T>
where
    T: Num + Clone + Debug,
{
    type Elem = T;

    fn zero(&self) -> T {
        T::zero()
    }
    fn one(&self) -> T {
        T::one()
    }
    fn add(&self, a: &T, b: &T) -> T {
        a.clone() + b.clone()
    }
    fn sub(&self, a: &T, b: &T) -> T {
        a.clone() - b.clone()
    }
    fn neg(&self, a: &T) -> T {
        T::zero() - a.clone()
    }
    fn mul(&self, a: &T, b: &T) -> T {
        a.clone() * b.clone()
    }
    fn is_zero(&self, a: &T) -> bool {
        a.is_zero()
    }
}

impl<I> Field for Exact<Ratio<I>>
where
    I: Integer + Clone + Debug,
{
    fn inv(&self, a: &Ratio<I>) -> Option<Ratio<I>> {
        if a.is_zero() {
            None
        } else {
            Some(Ratio::one() / a.clone())
        }
    }
}

/// The prime field `Z/p`, elements stored as residues in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Self {
        PrimeField { p }
    }

    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }
}

impl Ring for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1 % self.p
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        (a + self.p - b) % self.p
    }
    fn neg(&self, a: &u32) -> u32 {
        (self.p - a) % self.p
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
}

impl Field for PrimeField {
    fn inv(&self, a: &u32) -> Option<u32> {
        if *a % self.p == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut result = 1u64;
        let mut base = *a as u64;
        let mut e = self.p - 2;
        let m = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        Some(result as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn rational_context_inverts() {
        let q = Exact::<Rat>::new();
        let a = Rat::new(3.into(), 7.into());
        assert_eq!(q.mul(&a, &q.inv(&a).unwrap()), q.one());
        assert!(q.inv(&q.zero()).is_none());
    }

    #[test]
    fn prime_field_inverse_table() {
        let f = PrimeField::new(7);
        for a in 1..7u32 {
            let b = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &b), 1);
        }
        assert_eq!(f.neg(&0), 0);
        assert_eq!(f.sub(&2, &5), 4);
    }
}
