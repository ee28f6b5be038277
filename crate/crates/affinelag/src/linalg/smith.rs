//! Smith normal form over Z with unimodular transform tracking, and integer
//! linear system solving on top of it.
//!
//! The pivot rule picks a smallest-nonzero-absolute-value entry of the
//! remaining block, which keeps intermediate entries small on the sparse
//! coboundary matrices this crate feeds in. Transforms are tracked as whole
//! matrices; callers choose which of U, U^-1, V, V^-1 they need.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::int_matrix::IntMatrix;
use super::LinalgError;

/// U * A * V = S with U, V unimodular and S diagonal, nonnegative, with
/// d_1 | d_2 | ... | d_r followed by zeros.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of S up to min(rows, cols).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Invariant factors > 1 (the torsion part of the cokernel).
    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .collect()
    }
}

#[derive(Clone, Copy, Default)]
pub(crate) struct SmithOptions {
    pub track_u: bool,
    pub track_u_inv: bool,
    pub track_v: bool,
    pub track_v_inv: bool,
}

pub(crate) struct SmithData {
    pub s: IntMatrix,
    pub rank: usize,
    pub u: Option<IntMatrix>,
    pub u_inv: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub v_inv: Option<IntMatrix>,
}

struct Worker {
    s: IntMatrix,
    u: Option<IntMatrix>,
    u_inv: Option<IntMatrix>,
    v: Option<IntMatrix>,
    v_inv: Option<IntMatrix>,
}

impl Worker {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.s.swap_rows(a, b);
        if let Some(u) = &mut self.u {
            u.swap_rows(a, b);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.s.swap_cols(a, b);
        if let Some(v) = &mut self.v {
            v.swap_cols(a, b);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap_rows(a, b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        self.s.negate_row(r);
        if let Some(u) = &mut self.u {
            u.negate_row(r);
        }
        if let Some(ui) = &mut self.u_inv {
            ui.negate_col(r);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        self.s.add_row_multiple(dst, src, q);
        if let Some(u) = &mut self.u {
            u.add_row_multiple(dst, src, q);
        }
        if let Some(ui) = &mut self.u_inv {
            let nq = -q;
            ui.add_col_multiple(src, dst, &nq);
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        self.s.add_col_multiple(dst, src, q);
        if let Some(v) = &mut self.v {
            v.add_col_multiple(dst, src, q);
        }
        if let Some(vi) = &mut self.v_inv {
            let nq = -q;
            vi.add_row_multiple(src, dst, &nq);
        }
    }
}

/// Quotient of the division x = q*p + r with balanced remainder |r| <= p/2.
/// Requires p > 0.
fn balanced_quotient(x: &BigInt, p: &BigInt) -> BigInt {
    let (mut q, mut r) = x.div_mod_floor(p);
    if &r * 2 > *p {
        r -= p;
        q += 1;
        let _ = r;
    }
    q
}

pub(crate) fn smith_with_options(a: &IntMatrix, opts: SmithOptions) -> SmithData {
    let m = a.rows();
    let k = a.cols();
    let mut w = Worker {
        s: a.clone(),
        u: opts.track_u.then(|| IntMatrix::identity(m)),
        u_inv: opts.track_u_inv.then(|| IntMatrix::identity(m)),
        v: opts.track_v.then(|| IntMatrix::identity(k)),
        v_inv: opts.track_v_inv.then(|| IntMatrix::identity(k)),
    };
    let bound = m.min(k);
    let mut t = 0;
    'outer: while t < bound {
        // smallest nonzero |entry| in the remaining block; unit pivots win
        // immediately since nothing can beat them
        let mut pivot: Option<(usize, usize)> = None;
        let mut best: Option<BigInt> = None;
        'scan: for r in t..m {
            for c in t..k {
                let e = w.s.get(r, c);
                if e.is_zero() {
                    continue;
                }
                let a = e.abs();
                if best.as_ref().is_none_or(|b| &a < b) {
                    let unit = a.is_one();
                    pivot = Some((r, c));
                    best = Some(a);
                    if unit {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break; // remaining block is zero
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        if w.s.get(t, t).is_negative() {
            w.negate_row(t);
        }
        let p = w.s.get(t, t).clone();

        let mut cleared = true;
        for r in t + 1..m {
            if w.s.get(r, t).is_zero() {
                continue;
            }
            let q = -balanced_quotient(w.s.get(r, t), &p);
            w.add_row(r, t, &q);
            if !w.s.get(r, t).is_zero() {
                cleared = false;
            }
        }
        for c in t + 1..k {
            if w.s.get(t, c).is_zero() {
                continue;
            }
            let q = -balanced_quotient(w.s.get(t, c), &p);
            w.add_col(c, t, &q);
            if !w.s.get(t, c).is_zero() {
                cleared = false;
            }
        }
        if !cleared {
            continue; // a strictly smaller pivot now exists in the block
        }
        if !p.is_one() {
            for r in t + 1..m {
                for c in t + 1..k {
                    if !w.s.get(r, c).mod_floor(&p).is_zero() {
                        // fold the offending row into row t and redo the pivot
                        w.add_row(t, r, &BigInt::one());
                        continue 'outer;
                    }
                }
            }
        }
        t += 1;
    }
    let rank = t;
    SmithData {
        s: w.s,
        rank,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
    }
}

/// No transforms: fastest way to ranks and invariant factors.
pub(crate) fn smith_shape(a: &IntMatrix) -> SmithShape {
    let data = smith_with_options(a, SmithOptions::default());
    let n = data.s.rows().min(data.s.cols());
    SmithShape {
        diag: (0..n).map(|i| data.s.get(i, i).clone()).collect(),
        rank: data.rank,
    }
}

/// Diagonal summary of a Smith form.
pub(crate) struct SmithShape {
    diag: Vec<BigInt>,
    rank: usize,
}

impl SmithShape {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect()
    }
}

/// Track only U and U^-1: enough for cokernel coordinates.
pub(crate) fn smith_row_transforms(a: &IntMatrix) -> SmithData {
    smith_with_options(
        a,
        SmithOptions {
            track_u: true,
            track_u_inv: true,
            ..SmithOptions::default()
        },
    )
}

/// Track only V and V^-1: enough for kernel bases and coordinates.
pub(crate) fn smith_col_transforms(a: &IntMatrix) -> SmithData {
    smith_with_options(
        a,
        SmithOptions {
            track_v: true,
            track_v_inv: true,
            ..SmithOptions::default()
        },
    )
}

/// Smith normal form: returns unimodular U, V with U*A*V = S.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let data = smith_with_options(
        a,
        SmithOptions {
            track_u: true,
            track_v: true,
            ..SmithOptions::default()
        },
    );
    SmithDecomposition {
        u: data.u.expect("tracked"),
        s: data.s,
        v: data.v.expect("tracked"),
    }
}

/// A particular integer solution of A x = b together with a basis of the
/// integer kernel of A.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSolution {
    pub particular: Vec<BigInt>,
    pub kernel_basis: Vec<Vec<BigInt>>,
}

/// Solve A x = b over the integers. `Ok(None)` means no integer solution
/// exists; the kernel basis returned with a solution is saturated, so it
/// spans the full integer kernel.
pub fn solve_integer(
    a: &IntMatrix,
    b: &[BigInt],
) -> Result<Option<IntegerSolution>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} rows, right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    let data = smith_with_options(
        a,
        SmithOptions {
            track_u: true,
            track_v: true,
            ..SmithOptions::default()
        },
    );
    let u = data.u.expect("tracked");
    let v = data.v.expect("tracked");
    let w = u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, wi) in w.iter().enumerate() {
        if i < data.rank {
            let d = data.s.get(i, i);
            let (q, r) = wi.div_rem(d);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !wi.is_zero() {
            return Ok(None);
        }
    }
    let particular = v.mul_vec(&y)?;
    let kernel_basis = (data.rank..a.cols()).map(|c| v.column(c)).collect();
    Ok(Some(IntegerSolution {
        particular,
        kernel_basis,
    }))
}
