use num_traits::{One, Zero};

use crate::compositions::{ArithClass, InequalityReport, PartitionSource};
use crate::error::{domain, Error, Result};
use crate::rational::Q;

use super::weights::WeightSequence;

/// Which recursion produced the forest tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// `f_{n,k} = Σ_i w_i f_{n−1,k+i−1}` (only for `d = 1`).
    Direct,
    /// The residue-indexed arrays `F^s_{n,k} = f_{nd+s, kd+s}`.
    Arithmetic,
}

#[derive(Clone, Debug)]
enum Forest {
    /// `f[n][k]` for `n < size`, `k ≤ n`.
    Direct(Vec<Vec<Q>>),
    /// `F[s][n][k]` for `nd + s < size`, `k ≤ n`.
    Arithmetic(Vec<Vec<Vec<Q>>>),
}

/// `b^w_n`, forest weights and shifted partition values for trees with at most
/// `size` vertices.
///
/// As a [`PartitionSource`] the horizon is `size − 1`: the root composition of
/// a tree with `size` vertices has total `size − 1`.
#[derive(Clone, Debug)]
pub struct PartitionTables {
    w: WeightSequence,
    d: u32,
    size: usize,
    /// `b[n]` for `1 ≤ n ≤ size`, `b[0] = 0`.
    b: Vec<Q>,
    forest: Forest,
    /// `z[l][t]` for `l ≤ top(w)`, `t < size`.
    z: Vec<Vec<Q>>,
    route: Route,
    zero: Q,
}

/// Tables for trees with at most `size` vertices, by the direct recursion when
/// `d = 1` and the arithmetic one otherwise.
pub fn compute_tables(w: &WeightSequence, d: u32, size: usize) -> Result<PartitionTables> {
    if d == 1 {
        PartitionTables::direct(w, size)
    } else {
        PartitionTables::arithmetic(w, d, size)
    }
}

impl PartitionTables {
    pub fn direct(w: &WeightSequence, size: usize) -> Result<Self> {
        Self::prepare(w, 1, size)?;
        let wi = |i: usize| w.get(i);
        // f[n][k], n < size.
        let mut f: Vec<Vec<Q>> = Vec::with_capacity(size);
        for n in 0..size {
            let mut row = vec![Q::zero(); n + 1];
            if n == 0 {
                row[0] = Q::one();
            } else {
                for (k, slot) in row.iter_mut().enumerate().skip(1) {
                    // k + i − 1 ≤ n − 1
                    let mut acc = Q::zero();
                    for i in 0..=(n - k) {
                        let prev = &f[n - 1][k + i - 1];
                        if !prev.is_zero() {
                            acc += wi(i) * prev;
                        }
                    }
                    *slot = acc;
                }
            }
            f.push(row);
        }
        let mut b = vec![Q::zero(); size + 1];
        for n in 0..size {
            b[n + 1] = (0..=n).map(|i| wi(i) * &f[n][i]).sum();
        }
        let z = (0..=w.top())
            .map(|l| {
                (0..size)
                    .map(|t| {
                        if t == 0 {
                            wi(l)
                        } else {
                            (0..=t).map(|i| wi(i + l) * &f[t][i]).sum()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(PartitionTables {
            w: w.clone(),
            d: 1,
            size,
            b,
            forest: Forest::Direct(f),
            z,
            route: Route::Direct,
            zero: Q::zero(),
        })
    }

    pub fn arithmetic(w: &WeightSequence, d: u32, size: usize) -> Result<Self> {
        Self::prepare(w, d, size)?;
        let du = d as usize;
        let big_w = w.progression(d);
        let ww = |j: usize| big_w.get(j).cloned().unwrap_or_else(Q::zero);
        // f[s][n] exists when nd + s < size.
        let rows = |s: usize| if size > s { (size - 1 - s) / du + 1 } else { 0 };
        let mut f: Vec<Vec<Vec<Q>>> = (0..du).map(|s| Vec::with_capacity(rows(s))).collect();
        let get = |f: &Vec<Vec<Vec<Q>>>, s: usize, n: usize, k: usize| -> Q {
            f[s].get(n).and_then(|row: &Vec<Q>| row.get(k)).cloned().unwrap_or_else(Q::zero)
        };
        for n in 0..rows(0) {
            for s in 0..du {
                if n >= rows(s) {
                    break;
                }
                let mut row = vec![Q::zero(); n + 1];
                if s == 0 {
                    if n == 0 {
                        row[0] = Q::one();
                    } else {
                        for (k, slot) in row.iter_mut().enumerate().skip(1) {
                            *slot = (0..=n)
                                .map(|j| ww(j) * get(&f, du - 1, n - 1, k + j - 1))
                                .sum();
                        }
                    }
                } else {
                    for (k, slot) in row.iter_mut().enumerate() {
                        *slot = (0..=n - k).map(|j| ww(j) * get(&f, s - 1, n, k + j)).sum();
                    }
                }
                f[s].push(row);
            }
        }
        let mut b = vec![Q::zero(); size + 1];
        for n in 0..rows(0) {
            b[n * du + 1] = (0..=n).map(|j| ww(j) * get(&f, 0, n, j)).sum();
        }
        let mut z = vec![vec![Q::zero(); size]; w.top() + 1];
        for (l, zl) in z.iter_mut().enumerate() {
            let (q, s) = (l / du, l % du);
            zl[0] = w.get(l);
            for (t, slot) in zl.iter_mut().enumerate().skip(1) {
                if s >= 1 && t % du == du - s {
                    let n = t / du;
                    *slot = (0..=n).map(|i| ww(i + q + 1) * get(&f, du - s, n, i)).sum();
                } else if s == 0 && t % du == 0 {
                    let n1 = t / du;
                    *slot = (0..=n1).map(|i| ww(i + q) * get(&f, 0, n1, i)).sum();
                }
            }
        }
        Ok(PartitionTables {
            w: w.clone(),
            d,
            size,
            b,
            forest: Forest::Arithmetic(f),
            z,
            route: Route::Arithmetic,
            zero: Q::zero(),
        })
    }

    fn prepare(w: &WeightSequence, d: u32, size: usize) -> Result<()> {
        w.validate(d)?;
        if size == 0 {
            return domain("tables need at least one vertex");
        }
        w.check_radius(size)
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.w
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn route(&self) -> Route {
        self.route
    }

    /// Largest tree size covered.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `b^w_n` for `1 ≤ n ≤ size`.
    pub fn b_value(&self, n: usize) -> Result<&Q> {
        if n == 0 {
            return domain("b is indexed from 1");
        }
        if n > self.size {
            return Err(Error::HorizonExceeded {
                requested: n,
                horizon: self.size,
            });
        }
        Ok(&self.b[n])
    }

    pub fn b_values(&self) -> &[Q] {
        &self.b[1..]
    }

    /// `f^w_{n,k}`: total weight of forests of `k` trees with `n` vertices.
    pub fn forest(&self, n: usize, k: usize) -> Result<Q> {
        if n >= self.size {
            return Err(Error::HorizonExceeded {
                requested: n,
                horizon: self.size - 1,
            });
        }
        Ok(match &self.forest {
            Forest::Direct(f) => f[n].get(k).cloned().unwrap_or_else(Q::zero),
            Forest::Arithmetic(f) => {
                let d = self.d as usize;
                if k % d != n % d {
                    Q::zero()
                } else {
                    f[n % d][n / d].get(k / d).cloned().unwrap_or_else(Q::zero)
                }
            }
        })
    }

    /// `F^s_{n,k} = f_{nd+s, kd+s}`.
    pub fn residue_array(&self, s: usize, n: usize, k: usize) -> Result<Q> {
        let d = self.d as usize;
        if s >= d {
            return domain(format!("residue {s} out of range for d = {d}"));
        }
        self.forest(n * d + s, k * d + s)
    }

    /// Rows `n` with `nd + s < size` for residue `s`.
    pub fn residue_rows(&self, s: usize) -> usize {
        let d = self.d as usize;
        if self.size > s {
            (self.size - 1 - s) / d + 1
        } else {
            0
        }
    }

    /// `Z^{w^{+l}, b}_t`.
    pub fn z_value(&self, shift: usize, total: usize) -> Result<&Q> {
        if total >= self.size {
            return Err(Error::HorizonExceeded {
                requested: total,
                horizon: self.size - 1,
            });
        }
        Ok(self.z.get(shift).map(|row| &row[total]).unwrap_or(&self.zero))
    }

    /// `Z^{w^{+((r−1)d+s)}}_{nd+(d−s)} = W_r Σ_i W_i F^{d−s−1}_{n,i}` for `n ≥ 1`.
    pub fn check_edge_identity(&self) -> Result<InequalityReport> {
        let d = self.d as usize;
        let r = self.w.r(self.d);
        let big_w = self.w.progression(self.d);
        let ww = |j: usize| big_w.get(j).cloned().unwrap_or_else(Q::zero);
        let mut report = InequalityReport::new("top-shift edge identity");
        for n in (1..).take_while(|n| n * d < self.size) {
            for s in 0..d {
                let total = n * d + (d - s);
                if total >= self.size {
                    continue;
                }
                let left = self.z_value((r - 1) * d + s, total)?;
                let mut sum = Q::zero();
                for i in 0..=n {
                    sum += ww(i) * self.residue_array(d - s - 1, n, i)?;
                }
                report.equal(n, format!("s={s}"), "edge identity", left, &(ww(r) * sum));
            }
        }
        Ok(report)
    }
}

impl PartitionSource for PartitionTables {
    fn class(&self) -> ArithClass {
        ArithClass { d: self.d, s: 0 }
    }

    fn top_shift(&self) -> usize {
        self.w.top()
    }

    fn horizon(&self) -> usize {
        self.size - 1
    }

    fn b(&self, m: usize) -> Result<&Q> {
        self.b_value(m)
    }

    fn z(&self, shift: usize, total: usize) -> Result<&Q> {
        self.z_value(shift, total)
    }
}

/// `f_{n,k} f_{n',k'} ≥ f_{n,k'} f_{n',k}` for `n ≤ n'`, `k ≤ k'` over the
/// residue arrays (the single array `f` when `d = 1`), rows `n ≤ n_max`.
pub fn check_tp2_array(tables: &PartitionTables, n_max: usize) -> Result<InequalityReport> {
    let d = tables.d() as usize;
    let mut report = InequalityReport::new("forest array 2x2 minors");
    for s in 0..d {
        let rows = tables.residue_rows(s);
        if n_max >= rows {
            return Err(Error::HorizonExceeded {
                requested: n_max,
                horizon: rows.saturating_sub(1),
            });
        }
        let a: Vec<Vec<Q>> = (0..=n_max)
            .map(|n| (0..=n_max).map(|k| tables.residue_array(s, n, k)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        for n in 0..=n_max {
            for n2 in n..=n_max {
                for k in 0..=n_max {
                    for k2 in k..=n_max {
                        let left = &a[n][k2] * &a[n2][k];
                        let right = &a[n][k] * &a[n2][k2];
                        report.le(n, format!("s={s}, n'={n2}, k={k}, k'={k2}"), "minor >= 0", &left, &right);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// The ratio chain `R_n(0,0) ≥ R_n(1,0) ≥ … ≥ R_n(r−1,d−1)` with
/// `R_n(q,s) = Z^{w^{+(qd+s)}}_{nd+(d−s)} / Z^{w^{+(qd+s)}}_{(n−1)d+(d−s)}`,
/// only `s = 0` at `n = 0`, and the endpoint identities
/// `R_n(0,0) = b_{(n+1)d+1}/b_{nd+1}`, `R_n(r−1,d−1) = b_{nd+1}/b_{(n−1)d+1}`.
/// For `d = 1` this is the chain `b_{n+1}/b_n = … ≤ Z^{w^{+l}}_{n+1}/Z^{w^{+l}}_n ≤ … = b_{n+2}/b_{n+1}`.
pub fn check_ratio_chain(tables: &PartitionTables, n_max: usize) -> Result<InequalityReport> {
    let d = tables.d() as usize;
    let r = tables.weights().r(tables.d());
    let mut report = InequalityReport::new("ratio chain");
    if (n_max + 1) * d + 1 > tables.size() {
        return Err(Error::HorizonExceeded {
            requested: (n_max + 1) * d + 1,
            horizon: tables.size(),
        });
    }
    let b = |n: usize| tables.b_value(n);
    for n in 0..=n_max {
        let mut chain: Vec<((usize, usize), Q)> = Vec::new();
        for s in 0..d {
            if n == 0 && s > 0 {
                break;
            }
            for q in 0..r {
                let shift = q * d + s;
                let hi = n * d + (d - s);
                let den = tables.z_value(shift, hi - d)?;
                if den.is_zero() {
                    report.undefined(n, format!("(q,s)=({q},{s})"));
                    continue;
                }
                chain.push(((q, s), tables.z_value(shift, hi)? / den));
            }
        }
        for pair in chain.windows(2) {
            let ((q, s), x) = &pair[0];
            let ((q2, s2), y) = &pair[1];
            report.le(n, format!("(q,s)=({q},{s}) then ({q2},{s2})"), "R decreases", y, x);
        }
        if let Some((_, first)) = chain.first() {
            let expected = b((n + 1) * d + 1)? / b(n * d + 1)?;
            report.equal(n, "first".to_string(), "R_n(0,0) = b ratio", first, &expected);
        }
        if n >= 1 {
            if let Some((_, last)) = chain.last() {
                let expected = b(n * d + 1)? / b((n - 1) * d + 1)?;
                report.equal(n, "last".to_string(), "R_n(r-1,d-1) = b ratio", last, &expected);
            }
        }
    }
    Ok(report)
}
