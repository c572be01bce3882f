//! Arithmetic over the prime field GF(q) and affine solution sets of linear
//! systems, used to enumerate hash cosets directly.

use super::CodecError;

pub(crate) fn add(a: u8, b: u8, q: u8) -> u8 {
    ((a as u16 + b as u16) % q as u16) as u8
}

pub(crate) fn sub(a: u8, b: u8, q: u8) -> u8 {
    ((a as i16 - b as i16).rem_euclid(q as i16)) as u8
}

pub(crate) fn mul(a: u8, b: u8, q: u8) -> u8 {
    ((a as u16 * b as u16) % q as u16) as u8
}

pub(crate) fn inv(a: u8, q: u8) -> u8 {
    // Fermat: a^(q-2) mod q for prime q.
    debug_assert!(a != 0);
    let mut result = 1u8;
    let mut base = a;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(result, base, q);
        }
        base = mul(base, base, q);
        e >>= 1;
    }
    result
}

pub(crate) fn is_prime(q: u8) -> bool {
    if q < 2 {
        return false;
    }
    (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// Solution set `{particular + span(basis)}` of a linear system over GF(q).
#[derive(Clone, Debug)]
pub(crate) struct AffineSet {
    pub particular: Vec<u8>,
    pub basis: Vec<Vec<u8>>,
    pub q: u8,
}

/// Solves `rows * z = targets` over GF(q) by Gaussian elimination.
///
/// Returns `None` when the system is inconsistent (the coset is empty).
pub(crate) fn solve_affine(
    n_unknowns: usize,
    rows: &[(Vec<u8>, u8)],
    q: u8,
) -> Option<AffineSet> {
    let m = rows.len();
    let mut a: Vec<Vec<u8>> = rows.iter().map(|(r, _)| r.clone()).collect();
    let mut b: Vec<u8> = rows.iter().map(|(_, t)| *t).collect();
    let mut pivot_col_of_row = vec![usize::MAX; m];
    let mut row = 0usize;
    for col in 0..n_unknowns {
        let Some(p) = (row..m).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);
        let piv_inv = inv(a[row][col], q);
        for v in a[row].iter_mut() {
            *v = mul(*v, piv_inv, q);
        }
        b[row] = mul(b[row], piv_inv, q);
        for r in 0..m {
            if r != row && a[r][col] != 0 {
                let f = a[r][col];
                for c in 0..n_unknowns {
                    let t = mul(f, a[row][c], q);
                    a[r][c] = sub(a[r][c], t, q);
                }
                b[r] = sub(b[r], mul(f, b[row], q), q);
            }
        }
        pivot_col_of_row[row] = col;
        row += 1;
        if row == m {
            break;
        }
    }
    // Inconsistency: a zero row with nonzero rhs.
    for r in row..m {
        if b[r] != 0 && a[r].iter().all(|&v| v == 0) {
            return None;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row[..row].to_vec();
    let is_pivot = {
        let mut f = vec![false; n_unknowns];
        for &c in &pivot_cols {
            f[c] = true;
        }
        f
    };
    let mut particular = vec![0u8; n_unknowns];
    for (r, &c) in pivot_cols.iter().enumerate() {
        particular[c] = b[r];
    }
    let mut basis = Vec::new();
    for free in 0..n_unknowns {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![0u8; n_unknowns];
        v[free] = 1;
        for (r, &c) in pivot_cols.iter().enumerate() {
            v[c] = sub(0, a[r][free], q);
        }
        basis.push(v);
    }
    Some(AffineSet {
        particular,
        basis,
        q,
    })
}

impl AffineSet {
    pub fn len(&self) -> u128 {
        (self.q as u128).pow(self.basis.len() as u32)
    }

    /// Enumerates every member, sorted lexicographically.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Vec<u8>>, CodecError> {
        let count = self.len();
        if count > cap as u128 {
            return Err(CodecError::SupportTooLarge {
                states: count,
                cap: cap as u128,
            });
        }
        let count = count as usize;
        let k = self.basis.len();
        let q = self.q;
        let mut out = Vec::with_capacity(count);
        let mut coeffs = vec![0u8; k];
        for _ in 0..count {
            let mut member = self.particular.clone();
            for (c, bvec) in coeffs.iter().zip(&self.basis) {
                if *c != 0 {
                    for (m, &bv) in member.iter_mut().zip(bvec) {
                        *m = add(*m, mul(*c, bv, q), q);
                    }
                }
            }
            out.push(member);
            for slot in coeffs.iter_mut().rev() {
                *slot += 1;
                if *slot < q {
                    break;
                }
                *slot = 0;
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}
