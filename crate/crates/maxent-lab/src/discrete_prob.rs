//! Exact probability tables over finite alphabets.
//!
//! All information quantities are in nats. The convention 0·ln 0 = 0 is
//! applied throughout, and zero-mass slices contribute nothing to
//! conditional mutual information. Tables are dense; the feature
//! dimension of an induced triple enumerates all 2^n configurations,
//! capped at n = 16.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::{Error, Result};

/// Normalization tolerance applied at construction time.
pub const NORM_TOL: f64 = 1e-12;
/// Hard cap on the number of binary features in an enumerated triple.
pub const MAX_FEATURES: usize = 16;

/// A finite symbol domain, optionally with human-readable labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alphabet {
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("alphabet size must be >= 1".into()));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("alphabet size must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate label `{l}`")));
            }
        }
        Ok(Alphabet { size: labels.len(), labels: Some(labels) })
    }
}

/// Dense joint distribution over 2 or 3 finite variables.
///
/// Entries are stored row-major in `probs`; they are validated to be
/// nonnegative and to sum to 1 within [`NORM_TOL`] at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if dims.len() < 2 || dims.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "joint table rank must be 2 or 3, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("all dimensions must be >= 1".into()));
        }
        let expect: usize = dims.iter().product();
        if probs.len() != expect {
            return Err(Error::DimensionMismatch(format!(
                "table of dims {dims:?} needs {expect} entries, got {}",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(JointTable { dims, probs })
    }

    /// Build a rank-2 table from a nested row layout `rows[a][b]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let na = rows.len();
        let nb = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != nb) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        JointTable::new(vec![na, nb], rows.iter().flatten().copied().collect())
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get2(&self, a: usize, b: usize) -> f64 {
        debug_assert_eq!(self.rank(), 2);
        self.probs[a * self.dims[1] + b]
    }

    pub fn get3(&self, a: usize, b: usize, c: usize) -> f64 {
        debug_assert_eq!(self.rank(), 3);
        self.probs[(a * self.dims[1] + b) * self.dims[2] + c]
    }

    /// Marginal distribution of one dimension.
    pub fn marginal(&self, dim: usize) -> Vec<f64> {
        assert!(dim < self.rank());
        let mut out = vec![0.0; self.dims[dim]];
        self.for_each(|idx, p| out[idx[dim]] += p);
        out
    }

    /// Sum out one dimension of a rank-3 table, leaving a rank-2 table.
    pub fn marginalize_out(&self, dim: usize) -> Result<JointTable> {
        if self.rank() != 3 {
            return Err(Error::InvalidArgument("marginalize_out needs a rank-3 table".into()));
        }
        let keep: Vec<usize> = (0..3).filter(|&d| d != dim).collect();
        let (da, db) = (self.dims[keep[0]], self.dims[keep[1]]);
        let mut out = vec![0.0; da * db];
        self.for_each(|idx, p| out[idx[keep[0]] * db + idx[keep[1]]] += p);
        // Re-normalize the floating-point residue away so the result
        // passes construction at NORM_TOL.
        let sum: f64 = out.iter().sum();
        if sum > 0.0 {
            for v in &mut out {
                *v /= sum;
            }
        }
        JointTable::new(vec![da, db], out)
    }

    /// Conditional rows P(B | A) of a rank-2 table; zero-mass rows are
    /// filled with the uniform distribution.
    pub fn conditional_rows(&self) -> Vec<Vec<f64>> {
        assert_eq!(self.rank(), 2);
        let (na, nb) = (self.dims[0], self.dims[1]);
        let mut rows = Vec::with_capacity(na);
        for a in 0..na {
            let mass: f64 = (0..nb).map(|b| self.get2(a, b)).sum();
            if mass > 0.0 {
                rows.push((0..nb).map(|b| self.get2(a, b) / mass).collect());
            } else {
                rows.push(vec![1.0 / nb as f64; nb]);
            }
        }
        rows
    }

    fn for_each(&self, mut f: impl FnMut(&[usize], f64)) {
        match self.rank() {
            2 => {
                for a in 0..self.dims[0] {
                    for b in 0..self.dims[1] {
                        f(&[a, b], self.get2(a, b));
                    }
                }
            }
            3 => {
                for a in 0..self.dims[0] {
                    for b in 0..self.dims[1] {
                        for c in 0..self.dims[2] {
                            f(&[a, b, c], self.get3(a, b, c));
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }
}

/// Per-feature activation probabilities t_i(x) = P(T_i = 1 | X = x)
/// over a finite X alphabet. The induced P(T|X) is the product of
/// independent Bernoulli(t_i(x)) draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMap {
    pub x_size: usize,
    pub n_features: usize,
    /// Row-major `[x_size × n_features]`.
    pub t: Vec<f64>,
}

impl FeatureMap {
    pub fn new(x_size: usize, n_features: usize, t: Vec<f64>) -> Result<Self> {
        if t.len() != x_size * n_features {
            return Err(Error::DimensionMismatch(format!(
                "feature table needs {} entries, got {}",
                x_size * n_features,
                t.len()
            )));
        }
        for (i, &v) in t.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "feature activation {v} at index {i} outside [0,1]"
                )));
            }
        }
        Ok(FeatureMap { x_size, n_features, t })
    }

    pub fn activation(&self, x: usize, i: usize) -> f64 {
        self.t[x * self.n_features + i]
    }

    /// The feature vector t(x) for one input symbol.
    pub fn row(&self, x: usize) -> Vec<f64> {
        self.t[x * self.n_features..(x + 1) * self.n_features].to_vec()
    }

    /// Probability of the feature configuration `k` (bit i of k is the
    /// value of T_i) given X = x.
    pub fn config_prob(&self, x: usize, k: usize) -> f64 {
        let mut p = 1.0;
        for i in 0..self.n_features {
            let t = self.activation(x, i);
            p *= if (k >> i) & 1 == 1 { t } else { 1.0 - t };
        }
        p
    }
}

/// Empirical data: one real-valued input vector and one label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub y_size: usize,
}

impl SampleSet {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>, y_size: usize) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != labels.len() {
            return Err(Error::EmptySample);
        }
        let dim = inputs[0].len();
        if inputs.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("ragged input rows".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= y_size) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} out of range for y_size {y_size}"
            )));
        }
        Ok(SampleSet { inputs, labels, y_size })
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }
}

fn check_dist(p: &[f64]) -> Result<()> {
    for (i, &v) in p.iter().enumerate() {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::NegativeEntry { index: i, value: v });
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// Shannon entropy −Σ p ln p in nats.
pub fn entropy(p: &[f64]) -> Result<f64> {
    check_dist(p)?;
    Ok(-p.iter().map(|&v| plogp(v)).sum::<f64>())
}

/// Binary entropy of a Bernoulli(p) variable, total on [0,1].
pub fn binary_entropy(p: f64) -> f64 {
    -plogp(p) - plogp(1.0 - p)
}

fn mi_from_cells(cells: &[(usize, usize, f64)], pa: &[f64], pb: &[f64]) -> f64 {
    let mut mi = 0.0;
    for &(a, b, p) in cells {
        if p > 0.0 {
            mi += p * (p / (pa[a] * pb[b])).ln();
        }
    }
    mi.max(0.0)
}

/// Mutual information I(A;B) of a rank-2 joint table, in nats.
pub fn mutual_information(j: &JointTable) -> Result<f64> {
    if j.rank() != 2 {
        return Err(Error::InvalidArgument("mutual_information needs rank 2".into()));
    }
    let pa = j.marginal(0);
    let pb = j.marginal(1);
    let mut cells = Vec::with_capacity(j.probs().len());
    for a in 0..j.dims()[0] {
        for b in 0..j.dims()[1] {
            cells.push((a, b, j.get2(a, b)));
        }
    }
    Ok(mi_from_cells(&cells, &pa, &pb))
}

/// Conditional mutual information I(A;B|C) of a rank-3 table, where
/// `conditioned_dim` selects which dimension plays the role of C.
/// Zero-mass slices contribute zero.
pub fn conditional_mutual_information(j: &JointTable, conditioned_dim: usize) -> Result<f64> {
    if j.rank() != 3 {
        return Err(Error::InvalidArgument(
            "conditional_mutual_information needs rank 3".into(),
        ));
    }
    if conditioned_dim > 2 {
        return Err(Error::InvalidArgument(format!(
            "conditioned_dim {conditioned_dim} out of range"
        )));
    }
    let free: Vec<usize> = (0..3).filter(|&d| d != conditioned_dim).collect();
    let (da, db) = (j.dims()[free[0]], j.dims()[free[1]]);
    let dc = j.dims()[conditioned_dim];
    let mut cmi = 0.0;
    for c in 0..dc {
        // Slice at C = c.
        let mut slice = vec![0.0; da * db];
        let mut idx = [0usize; 3];
        idx[conditioned_dim] = c;
        for a in 0..da {
            for b in 0..db {
                idx[free[0]] = a;
                idx[free[1]] = b;
                slice[a * db + b] = j.get3(idx[0], idx[1], idx[2]);
            }
        }
        let pc: f64 = slice.iter().sum();
        if pc <= 0.0 {
            continue;
        }
        let mut pa = vec![0.0; da];
        let mut pb = vec![0.0; db];
        let mut cells = Vec::with_capacity(da * db);
        for a in 0..da {
            for b in 0..db {
                let p = slice[a * db + b] / pc;
                pa[a] += p;
                pb[b] += p;
                cells.push((a, b, p));
            }
        }
        cmi += pc * mi_from_cells(&cells, &pa, &pb);
    }
    Ok(cmi.max(0.0))
}

/// Build the exact triple P(X, T, Y) from a pair table P(X,Y) and a
/// feature map, with T enumerating all 2^n feature configurations:
/// P(x, k, y) = P(x, y) · Π_i Bernoulli(t_i(x)) evaluated at bit i of k.
pub fn induce_triple(j: &JointTable, f: &FeatureMap) -> Result<JointTable> {
    if j.rank() != 2 {
        return Err(Error::InvalidArgument("induce_triple needs a rank-2 joint".into()));
    }
    if f.x_size != j.dims()[0] {
        return Err(Error::DimensionMismatch(format!(
            "feature map x_size {} vs joint x dimension {}",
            f.x_size,
            j.dims()[0]
        )));
    }
    if f.n_features > MAX_FEATURES {
        return Err(Error::TooManyFeatures { n: f.n_features });
    }
    let (nx, ny) = (j.dims()[0], j.dims()[1]);
    let nt = 1usize << f.n_features;
    let mut probs = vec![0.0; nx * nt * ny];
    for x in 0..nx {
        for k in 0..nt {
            let pk = f.config_prob(x, k);
            if pk == 0.0 {
                continue;
            }
            for y in 0..ny {
                probs[(x * nt + k) * ny + y] = j.get2(x, y) * pk;
            }
        }
    }
    // Absorb the product round-off so the triple normalizes exactly.
    let sum: f64 = probs.iter().sum();
    for v in &mut probs {
        *v /= sum;
    }
    JointTable::new(vec![nx, nt, ny], probs)
}

/// Pairwise joint P(T_i, T_j, Y) induced by a pair table and feature
/// map, for condition-2 style checks. Features are conditionally
/// independent given X by construction.
pub fn induce_feature_pair_triple(
    j: &JointTable,
    f: &FeatureMap,
    i: usize,
    k: usize,
) -> Result<JointTable> {
    if j.rank() != 2 || f.x_size != j.dims()[0] {
        return Err(Error::DimensionMismatch("joint/feature shape".into()));
    }
    let ny = j.dims()[1];
    let mut probs = vec![0.0; 2 * 2 * ny];
    for x in 0..f.x_size {
        let ti = f.activation(x, i);
        let tk = f.activation(x, k);
        for y in 0..ny {
            let pxy = j.get2(x, y);
            if pxy == 0.0 {
                continue;
            }
            probs[y] += pxy * (1.0 - ti) * (1.0 - tk);
            probs[ny + y] += pxy * (1.0 - ti) * tk;
            probs[2 * ny + y] += pxy * ti * (1.0 - tk);
            probs[3 * ny + y] += pxy * ti * tk;
        }
    }
    let sum: f64 = probs.iter().sum();
    for v in &mut probs {
        *v /= sum;
    }
    JointTable::new(vec![2, 2, ny], probs)
}

/// Joint P(T_i, X): p(t, x) = P(x) · Bernoulli(t_i(x)).
pub fn induce_feature_input_pair(j: &JointTable, f: &FeatureMap, i: usize) -> Result<JointTable> {
    if j.rank() != 2 || f.x_size != j.dims()[0] {
        return Err(Error::DimensionMismatch("joint/feature shape".into()));
    }
    let px = j.marginal(0);
    let nx = f.x_size;
    let mut probs = vec![0.0; 2 * nx];
    for x in 0..nx {
        let t = f.activation(x, i);
        probs[x] = px[x] * (1.0 - t);
        probs[nx + x] = px[x] * t;
    }
    let sum: f64 = probs.iter().sum();
    for v in &mut probs {
        *v /= sum;
    }
    JointTable::new(vec![2, nx], probs)
}

/// Equal-width bin index over [0,1]; values exactly on a bin edge go to
/// the lower bin.
fn bin_index(v: f64, bins: usize) -> u16 {
    let s = v * bins as f64;
    if s <= 0.0 {
        0
    } else {
        let b = s.ceil() as usize - 1;
        b.min(bins - 1) as u16
    }
}

/// Min-max rescale a column to [0,1] when it leaves that range.
fn column_scaler(rows: &[Vec<f64>], col: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in rows {
        lo = lo.min(r[col]);
        hi = hi.max(r[col]);
    }
    if lo >= 0.0 && hi <= 1.0 {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi - lo)
    } else {
        (lo, 1.0)
    }
}

fn symbolize(rows: &[Vec<f64>], bins: usize) -> Vec<usize> {
    let dim = rows[0].len();
    let scalers: Vec<(f64, f64)> = (0..dim).map(|c| column_scaler(rows, c)).collect();
    let mut codebook: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
    let mut symbols = Vec::with_capacity(rows.len());
    for r in rows {
        let key: Vec<u16> = r
            .iter()
            .enumerate()
            .map(|(c, &v)| bin_index((v - scalers[c].0) / scalers[c].1, bins))
            .collect();
        let next = codebook.len();
        let id = *codebook.entry(key).or_insert(next);
        symbols.push(id);
    }
    symbols
}

fn mi_of_symbol_streams(xs: &[usize], ys: &[usize]) -> f64 {
    let n = xs.len() as f64;
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    let mut ma: BTreeMap<usize, u64> = BTreeMap::new();
    let mut mb: BTreeMap<usize, u64> = BTreeMap::new();
    for (&a, &b) in xs.iter().zip(ys) {
        *joint.entry((a, b)).or_insert(0) += 1;
        *ma.entry(a).or_insert(0) += 1;
        *mb.entry(b).or_insert(0) += 1;
    }
    let mut mi = 0.0;
    for (&(a, b), &c) in &joint {
        let p = c as f64 / n;
        let pa = ma[&a] as f64 / n;
        let pb = mb[&b] as f64 / n;
        mi += p * (p / (pa * pb)).ln();
    }
    mi.max(0.0)
}

/// Binned mutual information between two empirical vector-valued
/// samples. Each coordinate is discretized into `bins` equal-width bins
/// over [0,1] (after min-max rescaling of any column that leaves
/// [0,1]); the exact MI of the resulting discrete joint is returned.
pub fn binned_mi(xs: &[Vec<f64>], ys: &[Vec<f64>], bins: usize) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptySample);
    }
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch(format!(
            "sample counts differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument("bins must be >= 2".into()));
    }
    Ok(mi_of_symbol_streams(&symbolize(xs, bins), &symbolize(ys, bins)))
}

/// Binned MI between vector samples and already-discrete labels; labels
/// are used as-is, never binned.
pub fn binned_mi_labels(xs: &[Vec<f64>], labels: &[usize], bins: usize) -> Result<f64> {
    if xs.is_empty() || labels.is_empty() {
        return Err(Error::EmptySample);
    }
    if xs.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "sample counts differ: {} vs {}",
            xs.len(),
            labels.len()
        )));
    }
    if bins < 2 {
        return Err(Error::InvalidArgument("bins must be >= 2".into()));
    }
    Ok(mi_of_symbol_streams(&symbolize(xs, bins), labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn entropy_uniform_binary() {
        assert!((entropy(&[0.5, 0.5]).unwrap() - LN2).abs() < 1e-12);
    }

    #[test]
    fn entropy_degenerate() {
        assert_eq!(entropy(&[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn entropy_skewed_binary() {
        // Hand oracle: -(0.25 ln 0.25 + 0.75 ln 0.75).
        let expect = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert!((expect - 0.562335).abs() < 1e-6);
        assert!((entropy(&[0.25, 0.75]).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn entropy_rejects_bad_input() {
        assert!(matches!(entropy(&[0.5, 0.6]), Err(Error::NotNormalized { .. })));
        assert!(matches!(entropy(&[-0.1, 1.1]), Err(Error::NegativeEntry { .. })));
    }

    #[test]
    fn mi_independent_product_is_zero() {
        let pa = [0.3, 0.7];
        let pb = [0.2, 0.5, 0.3];
        let mut probs = Vec::new();
        for a in &pa {
            for b in &pb {
                probs.push(a * b);
            }
        }
        let j = JointTable::new(vec![2, 3], probs).unwrap();
        assert!(mutual_information(&j).unwrap() < 1e-12);
    }

    #[test]
    fn mi_perfect_copy_is_ln2() {
        let j = JointTable::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&j).unwrap() - LN2).abs() < 1e-12);
    }

    #[test]
    fn mi_matches_cell_oracle() {
        // Direct summation over the 4 cells of [[0.4,0.1],[0.1,0.4]].
        let cells = [0.4f64, 0.1, 0.1, 0.4];
        let ma = [0.5f64, 0.5];
        let mut oracle = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let p = cells[a * 2 + b];
                oracle += p * (p / (ma[a] * ma[b])).ln();
            }
        }
        assert!((oracle - 0.192745).abs() < 1e-6);
        let j = JointTable::from_rows(&[vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert!((mutual_information(&j).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn cmi_copy_with_constant_condition() {
        // A = B uniform binary, C constant: I(A;B|C) = H(A) = ln 2.
        let j = JointTable::new(vec![2, 2, 1], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((conditional_mutual_information(&j, 2).unwrap() - LN2).abs() < 1e-12);
    }

    #[test]
    fn cmi_markov_chain_is_zero() {
        // A -> C -> B built as p(a) p(c|a) p(b|c).
        let pa = [0.4, 0.6];
        let pca = [[0.7, 0.3], [0.2, 0.8]];
        let pbc = [[0.9, 0.1], [0.25, 0.75]];
        let mut probs = vec![0.0; 8];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    probs[(a * 2 + b) * 2 + c] = pa[a] * pca[a][c] * pbc[c][b];
                }
            }
        }
        let j = JointTable::new(vec![2, 2, 2], probs).unwrap();
        assert!(conditional_mutual_information(&j, 2).unwrap() < 1e-12);
    }

    #[test]
    fn cmi_xor_example() {
        // T1, T2 fair independent bits, Y = T1 XOR T2, from the 8-cell
        // enumeration: I(T1;T2) = 0 but I(T1;T2|Y) = ln 2.
        let mut probs = vec![0.0; 8];
        for t1 in 0..2usize {
            for t2 in 0..2usize {
                let y = t1 ^ t2;
                probs[(t1 * 2 + t2) * 2 + y] = 0.25;
            }
        }
        let j = JointTable::new(vec![2, 2, 2], probs).unwrap();
        let pair = j.marginalize_out(2).unwrap();
        assert!(mutual_information(&pair).unwrap() < 1e-12);
        assert!((conditional_mutual_information(&j, 2).unwrap() - LN2).abs() < 1e-12);
    }

    #[test]
    fn induce_triple_zero_features() {
        let j = JointTable::from_rows(&[vec![0.2, 0.3], vec![0.1, 0.4]]).unwrap();
        let f = FeatureMap::new(2, 0, vec![]).unwrap();
        let t = induce_triple(&j, &f).unwrap();
        assert_eq!(t.dims(), &[2, 1, 2]);
        let back = t.marginalize_out(1).unwrap();
        for (a, b) in back.probs().iter().zip(j.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn induce_triple_deterministic_features() {
        let j = JointTable::from_rows(&[vec![0.2, 0.3], vec![0.1, 0.4]]).unwrap();
        // t_1(x) = x: configuration concentrates on k = x.
        let f = FeatureMap::new(2, 1, vec![0.0, 1.0]).unwrap();
        let t = induce_triple(&j, &f).unwrap();
        for x in 0..2 {
            for k in 0..2 {
                for y in 0..2 {
                    let p = t.get3(x, k, y);
                    if k == x {
                        assert!((p - j.get2(x, y)).abs() < 1e-12);
                    } else {
                        assert_eq!(p, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn induce_triple_marginal_recovery_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut probs: Vec<f64> = (0..12).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= s);
        let j = JointTable::new(vec![4, 3], probs).unwrap();
        let t: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
        let f = FeatureMap::new(4, 2, t).unwrap();
        let triple = induce_triple(&j, &f).unwrap();
        let back = triple.marginalize_out(1).unwrap();
        for (a, b) in back.probs().iter().zip(j.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn induce_triple_feature_cap() {
        let j = JointTable::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        let f = FeatureMap::new(2, 17, vec![0.5; 34]).unwrap();
        assert!(matches!(induce_triple(&j, &f), Err(Error::TooManyFeatures { n: 17 })));
    }

    #[test]
    fn binned_mi_identical_columns() {
        let xs: Vec<Vec<f64>> = (0..100).map(|i| vec![(i % 7) as f64 / 7.0]).collect();
        let mi = binned_mi(&xs, &xs, 10).unwrap();
        // Equals the empirical entropy of the binned column.
        let mut counts = [0usize; 10];
        for r in &xs {
            counts[bin_index(r[0], 10) as usize] += 1;
        }
        let h: f64 = counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / 100.0;
                -p * p.ln()
            })
            .sum();
        assert!((mi - h).abs() < 1e-12);
    }

    #[test]
    fn binned_mi_independent_approaches_zero() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let xs: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>()]).collect();
        let ys: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen::<f64>()]).collect();
        assert!(binned_mi(&xs, &ys, 30).unwrap() < 0.05);
    }

    #[test]
    fn binned_mi_deterministic() {
        let xs: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 0.37) % 1.0]).collect();
        let ys: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 0.11) % 1.0]).collect();
        let a = binned_mi(&xs, &ys, 8).unwrap();
        let b = binned_mi(&xs, &ys, 8).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn bin_edges_go_to_lower_bin() {
        // 0.5 is the edge between bins 4 and 5 at bins = 10.
        assert_eq!(bin_index(0.5, 10), 4);
        assert_eq!(bin_index(0.0, 10), 0);
        assert_eq!(bin_index(1.0, 10), 9);
        assert_eq!(bin_index(0.05, 10), 0);
    }

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(Alphabet::with_labels(vec!["a".into(), "a".into()]).is_err());
        assert!(Alphabet::new(0).is_err());
        assert_eq!(Alphabet::new(3).unwrap().size, 3);
    }

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new(vec![], vec![], 2).is_err());
        assert!(SampleSet::new(vec![vec![0.0]], vec![5], 2).is_err());
        assert!(SampleSet::new(vec![vec![0.0], vec![0.0, 1.0]], vec![0, 1], 2).is_err());
    }
}
