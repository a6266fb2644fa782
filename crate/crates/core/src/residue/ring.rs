use crate::zi::GaussInt;

/// Residues of `Z[i]` modulo a non-zero `q`, indexed densely.
///
/// The lattice `qZ[i]` has Hermite basis `{(N/g, 0), (c, g)}` with `g` the
/// gcd of the coordinates of `q`; every class has exactly one representative
/// `r + s·i` with `0 <= r < N/g`, `0 <= s < g`, and its index is `s·(N/g) + r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    modulus: GaussInt,
    norm: u64,
    width: i64,
    height: i64,
    shear: i64,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl ResidueRing {
    pub fn new(q: GaussInt) -> Self {
        assert!(!q.is_zero(), "residue ring of zero");
        let (a, b) = (q.re, q.im);
        let norm = q.norm_small();
        // b·x + a·y = g
        let (g, x, y) = ext_gcd(b, a);
        let width = norm as i64 / g;
        let shear = (a * x - b * y).rem_euclid(width);
        ResidueRing {
            modulus: q,
            norm,
            width,
            height: g,
            shear,
        }
    }

    pub fn modulus(&self) -> GaussInt {
        self.modulus
    }

    pub fn size(&self) -> usize {
        self.norm as usize
    }

    #[inline]
    pub fn index(&self, z: GaussInt) -> usize {
        let t = z.im.div_euclid(self.height);
        let s = z.im - t * self.height;
        let r = (z.re - t * self.shear).rem_euclid(self.width);
        (s * self.width + r) as usize
    }

    #[inline]
    pub fn element(&self, idx: usize) -> GaussInt {
        let idx = idx as i64;
        GaussInt::new(idx % self.width, idx / self.width)
    }

    #[inline]
    pub fn reduce(&self, z: GaussInt) -> GaussInt {
        self.element(self.index(z))
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index(self.element(a) * self.element(b))
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut acc = self.index(GaussInt::ONE);
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_a_bijection_on_classes() {
        for q in [
            GaussInt::ONE,
            GaussInt::new(-3, 0),
            GaussInt::new(-1, 2),
            GaussInt::new(9, 0),
            GaussInt::new(3, -6),
            GaussInt::new(-2, 2),
            GaussInt::new(5, 0),
        ] {
            let ring = ResidueRing::new(q);
            let n = ring.size();
            let mut hit = vec![false; n];
            for (idx, h) in hit.iter_mut().enumerate() {
                let z = ring.element(idx);
                assert_eq!(ring.index(z), idx);
                *h = true;
            }
            assert!(hit.iter().all(|&h| h));
            for re in -15..15 {
                for im in -15..15 {
                    let z = GaussInt::new(re, im);
                    assert!(q.divides(z - ring.reduce(z)), "{q} {z}");
                    for w in [GaussInt::ONE, GaussInt::I, GaussInt::new(2, -1)] {
                        assert_eq!(ring.index(z + q * w), ring.index(z));
                    }
                }
            }
        }
    }
}
