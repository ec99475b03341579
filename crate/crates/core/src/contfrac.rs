//! Continued fractions `x = [0; e_0, e_1, …]` with every `e_j ≥ 4`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::curve_algebra::{dehn_twist, Slope};
use crate::error::{Error, Result};
use crate::numeric::{Rat, RatInterval};

/// Largest index accepted by [`CFSide::continuant_oracle`].
pub const ORACLE_LIMIT: usize = 20;

/// Finite coefficient prefix of one side's continued fraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFSide {
    coeffs: Vec<BigInt>,
    side: u8,
    conv: Vec<(BigInt, BigInt)>,
}

impl CFSide {
    pub fn new(coeffs: Vec<BigInt>, side: u8) -> Result<CFSide> {
        if side > 1 {
            return Err(Error::InvalidParameter(format!("side must be 0 or 1, got {side}")));
        }
        let four = BigInt::from(4);
        if let Some(j) = coeffs.iter().position(|e| e < &four) {
            return Err(Error::InvalidParameter(format!(
                "coefficient e_{j} = {} is below 4",
                coeffs[j]
            )));
        }
        let mut conv = Vec::with_capacity(coeffs.len() + 1);
        conv.push((BigInt::zero(), BigInt::one()));
        if let Some(e0) = coeffs.first() {
            conv.push((BigInt::one(), e0.clone()));
        }
        for j in 2..=coeffs.len() {
            let e = &coeffs[j - 1];
            let p = e * &conv[j - 1].0 + &conv[j - 2].0;
            let q = e * &conv[j - 1].1 + &conv[j - 2].1;
            conv.push((p, q));
        }
        Ok(CFSide { coeffs, side, conv })
    }

    pub fn from_i64(coeffs: &[i64], side: u8) -> Result<CFSide> {
        CFSide::new(coeffs.iter().map(|&e| BigInt::from(e)).collect(), side)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn side(&self) -> u8 {
        self.side
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Copy padded with coefficients equal to 4 up to `len` entries.
    pub fn extended(&self, len: usize) -> CFSide {
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() < len {
            coeffs.push(BigInt::from(4));
        }
        CFSide::new(coeffs, self.side).expect("padding keeps coefficients ≥ 4")
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i > self.coeffs.len() {
            Err(Error::IndexOutOfRange { index: i, available: self.coeffs.len() })
        } else {
            Ok(())
        }
    }

    /// `(p_j, q_j)` for `j = 0..=i`.
    pub fn convergents(&self, i: usize) -> Result<Vec<(BigInt, BigInt)>> {
        self.check_index(i)?;
        Ok(self.conv[..=i].to_vec())
    }

    pub fn convergent(&self, i: usize) -> Result<&(BigInt, BigInt)> {
        self.check_index(i)?;
        Ok(&self.conv[i])
    }

    /// The curve `γ_i = p_i/q_i`.
    pub fn gamma(&self, i: usize) -> Result<Slope> {
        let (p, q) = self.convergent(i)?;
        Slope::new(p.clone(), q.clone())
    }

    /// `[γ_{−1}, γ_0, …, γ_len] = [1/0, 0/1, 1/e_0, …]`.
    pub fn curves(&self) -> Vec<Slope> {
        let mut out = vec![Slope::infinity()];
        for (p, q) in &self.conv {
            out.push(Slope::new(p.clone(), q.clone()).expect("convergents are primitive"));
        }
        out
    }

    /// `q_i` summed over index sets obtained from `{0, …, i−1}` by deleting
    /// disjoint adjacent pairs, by explicit enumeration of subsets.
    pub fn continuant_oracle(&self, i: usize) -> Result<BigInt> {
        self.check_index(i)?;
        if i > ORACLE_LIMIT {
            return Err(Error::EnumerationTooLarge(i));
        }
        let mut total = BigInt::zero();
        for kept in 0u32..(1u32 << i) {
            // The deleted positions must split into consecutive pairs.
            let mut ok = true;
            let mut j = 0;
            while j < i {
                if kept & (1 << j) == 0 {
                    if j + 1 < i && kept & (1 << (j + 1)) == 0 {
                        j += 2;
                        continue;
                    }
                    ok = false;
                    break;
                }
                j += 1;
            }
            if !ok {
                continue;
            }
            let mut prod = BigInt::one();
            for (j, e) in self.coeffs[..i].iter().enumerate() {
                if kept & (1 << j) != 0 {
                    prod *= e;
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// `Π_{j<i} (1 + e_j)`, the sum of `Π_{j∈J} e_j` over all `J ⊆ {0, …, i−1}`.
    pub fn i_of(&self, i: usize) -> Result<BigInt> {
        self.check_index(i)?;
        Ok(self.coeffs[..i].iter().fold(BigInt::one(), |acc, e| acc * (e + 1)))
    }

    /// Interval containing the limit `x` of the full (infinite) expansion.
    ///
    /// The tail `y = [e_i; e_{i+1}, …]` lies in `[e_i, e_i + 1/4]` when `e_i`
    /// is known and in `[4, ∞)` otherwise; `x = (p_i y + p_{i−1})/(q_i y + q_{i−1})`
    /// is monotone in `y`.
    pub fn value_interval(&self, i: usize) -> Result<RatInterval> {
        if i < 2 {
            return Err(Error::IndexOutOfRange { index: i, available: self.coeffs.len() });
        }
        if i > self.coeffs.len() {
            return Err(Error::InsufficientCoefficients { needed: i, have: self.coeffs.len() });
        }
        let (p1, q1) = &self.conv[i];
        let (p0, q0) = &self.conv[i - 1];
        let at = |y: &Rat| {
            let num = Rat::from_integer(p1.clone()) * y + Rat::from_integer(p0.clone());
            let den = Rat::from_integer(q1.clone()) * y + Rat::from_integer(q0.clone());
            num / den
        };
        let limit = Rat::new(p1.clone(), q1.clone());
        let iv = match self.coeffs.get(i) {
            Some(e) => {
                let lo = Rat::from_integer(e.clone());
                let hi = &lo + Rat::new(BigInt::one(), BigInt::from(4));
                RatInterval::spanning(at(&lo), at(&hi))
            }
            None => RatInterval::spanning(at(&Rat::from_integer(BigInt::from(4))), limit),
        };
        Ok(iv)
    }

    /// Enclosure at the deepest available index.
    pub fn value_interval_full(&self) -> Result<RatInterval> {
        self.value_interval(self.coeffs.len())
    }

    /// Rebuilds the curve sequence by Dehn twists, trying both signs at each
    /// step and keeping the one that reproduces the next convergent. Returns
    /// the chosen signs `s_j` with `γ_{j+1} = T_{γ_j}^{s_j e_j}(γ_{j−1})`.
    pub fn twist_signs(&self) -> Result<Vec<i8>> {
        let curves = self.curves();
        let mut signs = Vec::with_capacity(self.coeffs.len());
        for (j, e) in self.coeffs.iter().enumerate() {
            let prev = &curves[j];
            let about = &curves[j + 1];
            let next = &curves[j + 2];
            let mut found = None;
            for s in [1i8, -1] {
                let power = e * BigInt::from(s);
                if &dehn_twist(about, prev, &power) == next {
                    found = Some(s);
                    break;
                }
            }
            match found {
                Some(s) => signs.push(s),
                None => {
                    return Err(Error::Degenerate(format!(
                        "no twist sign maps γ_{} to γ_{} at step {j}",
                        j as i64 - 1,
                        j + 1
                    )))
                }
            }
        }
        Ok(signs)
    }
}

/// True iff the signs alternate, starting from either value.
pub fn signs_alternate(signs: &[i8]) -> bool {
    signs.windows(2).all(|w| w[0] == -w[1])
}

/// True iff `a x² + b x + c` changes sign (or vanishes) between the interval
/// endpoints.
pub fn quadratic_root_in(iv: &RatInterval, a: i64, b: i64, c: i64) -> bool {
    let f = |x: &Rat| {
        Rat::from_integer(BigInt::from(a)) * x * x + Rat::from_integer(BigInt::from(b)) * x + Rat::from_integer(BigInt::from(c))
    };
    let (l, h) = (f(iv.lo()), f(iv.hi()));
    !(l.is_positive() && h.is_positive() || l.is_negative() && h.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(p, q)| (BigInt::from(p), BigInt::from(q))).collect()
    }

    #[test]
    fn convergent_examples() {
        let s = CFSide::from_i64(&[4, 4, 4], 0).unwrap();
        assert_eq!(s.convergents(3).unwrap(), pairs(&[(0, 1), (1, 4), (4, 17), (17, 72)]));
        let t = CFSide::from_i64(&[5], 1).unwrap();
        assert_eq!(t.convergents(1).unwrap(), pairs(&[(0, 1), (1, 5)]));
        assert!(t.convergents(2).is_err());
        let u = CFSide::from_i64(&[4, 4], 0).unwrap();
        assert_eq!(u.convergent(2).unwrap().1, BigInt::from(17));
        assert!(CFSide::from_i64(&[4, 3], 0).is_err());
        assert!(CFSide::from_i64(&[4], 2).is_err());
    }

    #[test]
    fn curve_sequence_starts_at_infinity() {
        let s = CFSide::from_i64(&[4, 4, 4], 0).unwrap();
        let names: Vec<String> = s.curves().iter().map(|c| c.to_string()).collect();
        assert_eq!(names, ["1/0", "0/1", "1/4", "4/17", "17/72"]);
    }

    #[test]
    fn continuant_examples() {
        let s = CFSide::from_i64(&[4, 4], 0).unwrap();
        assert_eq!(s.continuant_oracle(2).unwrap(), BigInt::from(17));
        assert_eq!(s.continuant_oracle(0).unwrap(), BigInt::one());
        let t = CFSide::from_i64(&[7], 0).unwrap();
        assert_eq!(t.continuant_oracle(1).unwrap(), BigInt::from(7));
        let long = CFSide::from_i64(&[4; 21], 0).unwrap();
        assert_eq!(long.continuant_oracle(21), Err(Error::EnumerationTooLarge(21)));
    }

    #[test]
    fn i_of_examples() {
        let s = CFSide::from_i64(&[4, 4, 4], 0).unwrap();
        assert_eq!(s.i_of(0).unwrap(), BigInt::one());
        assert_eq!(s.i_of(2).unwrap(), BigInt::from(25));
        assert_eq!(s.i_of(3).unwrap(), BigInt::from(125));
        assert!(s.i_of(3).unwrap() >= s.convergent(3).unwrap().1);
    }

    #[test]
    fn value_interval_encloses_golden_surd() {
        let s = CFSide::from_i64(&[4; 40], 0).unwrap();
        let iv = s.value_interval(40).unwrap();
        assert!(quadratic_root_in(&iv, 1, 4, -1));
        assert!(iv.width() < Rat::new(BigInt::one(), BigInt::from(10).pow(40)));
        let short = CFSide::from_i64(&[4, 4], 0).unwrap();
        let iv2 = short.value_interval(2).unwrap();
        assert!(iv2.width() <= Rat::new(BigInt::one(), BigInt::from(289)));
        assert!(quadratic_root_in(&iv2, 1, 4, -1));
        assert!(short.value_interval(1).is_err());
        assert!(short.value_interval(3).is_err());
    }

    #[test]
    fn twist_recursion_alternates() {
        let s = CFSide::from_i64(&[4, 5, 9, 4, 6], 0).unwrap();
        let signs = s.twist_signs().unwrap();
        assert_eq!(signs.len(), 5);
        assert!(signs_alternate(&signs));
        assert_eq!(signs[0], 1);
    }

    #[test]
    fn convergents_match_oracle_on_random_tuples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let coeffs: Vec<i64> = (0..12).map(|_| rng.gen_range(4..=9)).collect();
            let s = CFSide::from_i64(&coeffs, 0).unwrap();
            for i in 0..=12 {
                assert_eq!(s.convergent(i).unwrap().1, s.continuant_oracle(i).unwrap());
            }
        }
    }

    fn coeff_vec() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(4i64..=40, 2..14)
    }

    proptest! {
        #[test]
        fn consecutive_convergents_are_adjacent(c in coeff_vec()) {
            let s = CFSide::from_i64(&c, 0).unwrap();
            let conv = s.convergents(c.len()).unwrap();
            for w in conv.windows(2) {
                let d = &w[0].0 * &w[1].1 - &w[1].0 * &w[0].1;
                prop_assert_eq!(d.abs(), BigInt::one());
            }
        }

        #[test]
        fn denominators_are_sandwiched(c in coeff_vec()) {
            let s = CFSide::from_i64(&c, 0).unwrap();
            for i in 1..=c.len() {
                let q = &s.convergent(i).unwrap().1;
                prop_assert!(&BigInt::from(c[i - 1]) <= q);
                prop_assert!(q <= &s.i_of(i).unwrap());
            }
        }

        #[test]
        fn enclosures_shrink_and_nest(c in coeff_vec()) {
            let s = CFSide::from_i64(&c, 0).unwrap();
            let mut prev: Option<RatInterval> = None;
            for i in 2..=c.len() {
                let iv = s.value_interval(i).unwrap();
                let q = &s.convergent(i).unwrap().1;
                prop_assert!(iv.width() <= Rat::new(BigInt::one(), q * q));
                if let Some(p) = &prev {
                    prop_assert!(iv.width() <= p.width());
                    prop_assert!(p.lo() <= iv.lo() && iv.hi() <= p.hi());
                }
                prev = Some(iv);
            }
        }

        #[test]
        fn twist_signs_always_alternate(c in coeff_vec()) {
            let s = CFSide::from_i64(&c, 1).unwrap();
            prop_assert!(signs_alternate(&s.twist_signs().unwrap()));
        }
    }
}
