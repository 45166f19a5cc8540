//! Dense complex tensors whose every index has dimension 4, and the
//! pairwise contraction kernel.
//!
//! A tensor's legs are labeled by [`WireId`]s. Two tensors that carry the same
//! label are joined by that wire; [`contract`] sums every shared label at
//! once. Entries are stored row-major: the first index varies slowest.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Dimension of every tensor index (one qubit leg in the superoperator picture).
pub const LEG_DIM: usize = 4;

/// Default largest rank a contraction may materialize (4^15 entries, 16 GiB).
pub const DEFAULT_RANK_CAP: usize = 15;

/// Default FLOP count above which a single contraction is split across threads.
pub const DEFAULT_PARALLEL_THRESHOLD: u128 = 1 << 20; // 4^10

/// Label of a tensor leg; shared labels are summed on contraction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireId(pub usize);

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("tensor of rank {rank} needs {expected} entries, got {got}")]
    WrongLength {
        rank: usize,
        expected: usize,
        got: usize,
    },
    #[error("duplicate index label {0}")]
    DuplicateLabel(WireId),
    #[error("disjoint tensors: no shared index label")]
    Disjoint,
    #[error("contraction would produce a rank {rank} tensor, above the cap of {cap}")]
    RankCap { rank: usize, cap: usize },
    #[error("index label {0} not present")]
    MissingLabel(WireId),
    #[error("label sets do not match")]
    LabelMismatch,
}

/// Number of entries of a rank-`rank` tensor, or `None` on overflow.
pub fn entry_count(rank: usize) -> Option<usize> {
    LEG_DIM.checked_pow(u32::try_from(rank).ok()?)
}

/// `4^exp` as a saturating FLOP count.
pub fn flops_for(exp: usize) -> u128 {
    u32::try_from(exp)
        .ok()
        .and_then(|e| 4u128.checked_pow(e))
        .unwrap_or(u128::MAX)
}

/// Cost accounting of one or more pairwise contractions.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct ContractionCost {
    pub flops: u128,
    pub peak_rank: usize,
}

impl ContractionCost {
    pub fn accumulate(&mut self, other: ContractionCost) {
        self.flops = self.flops.saturating_add(other.flops);
        self.peak_rank = self.peak_rank.max(other.peak_rank);
    }
}

/// Execution knobs for [`contract_with`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ContractOptions {
    pub threads: usize,
    pub parallel_threshold: u128,
    pub rank_cap: usize,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions {
            threads: 8,
            parallel_threshold: DEFAULT_PARALLEL_THRESHOLD,
            rank_cap: DEFAULT_RANK_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    indices: Vec<WireId>,
    data: Vec<Complex64>,
}

impl Tensor {
    pub fn new(indices: Vec<WireId>, data: Vec<Complex64>) -> Result<Self, TensorError> {
        let rank = indices.len();
        let expected = entry_count(rank).ok_or(TensorError::WrongLength {
            rank,
            expected: usize::MAX,
            got: data.len(),
        })?;
        if data.len() != expected {
            return Err(TensorError::WrongLength {
                rank,
                expected,
                got: data.len(),
            });
        }
        for (i, label) in indices.iter().enumerate() {
            if indices[..i].contains(label) {
                return Err(TensorError::DuplicateLabel(*label));
            }
        }
        Ok(Tensor { indices, data })
    }

    /// Builds a tensor from real entries.
    pub fn from_real(indices: Vec<WireId>, data: &[f64]) -> Result<Self, TensorError> {
        Tensor::new(
            indices,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn scalar(value: Complex64) -> Self {
        Tensor {
            indices: Vec::new(),
            data: vec![value],
        }
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[WireId] {
        &self.indices
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// The single entry of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<Complex64> {
        (self.rank() == 0).then(|| self.data[0])
    }

    pub fn position(&self, label: WireId) -> Option<usize> {
        self.indices.iter().position(|&l| l == label)
    }

    /// Entry at a multi-index (one value in `0..4` per leg).
    pub fn get(&self, index: &[usize]) -> Complex64 {
        assert_eq!(index.len(), self.rank(), "multi-index length");
        let offset = index.iter().fold(0, |acc, &i| {
            assert!(i < LEG_DIM, "index value {i} out of range");
            acc * LEG_DIM + i
        });
        self.data[offset]
    }

    /// Renames one leg.
    pub fn relabel(&mut self, from: WireId, to: WireId) -> Result<(), TensorError> {
        let pos = self.position(from).ok_or(TensorError::MissingLabel(from))?;
        if from != to && self.indices.contains(&to) {
            return Err(TensorError::DuplicateLabel(to));
        }
        self.indices[pos] = to;
        Ok(())
    }

    /// Returns the same tensor with its legs reordered to `order`.
    pub fn aligned_to(&self, order: &[WireId]) -> Result<Tensor, TensorError> {
        if order.len() != self.rank() {
            return Err(TensorError::LabelMismatch);
        }
        let perm = order
            .iter()
            .map(|&l| self.position(l).ok_or(TensorError::LabelMismatch))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Tensor {
            indices: order.to_vec(),
            data: permute(&self.data, self.rank(), &perm),
        })
    }

    /// Sums the diagonal over two legs that stand for the same wire.
    pub fn self_trace(&self, first: WireId, second: WireId) -> Result<Tensor, TensorError> {
        let p = self
            .position(first)
            .ok_or(TensorError::MissingLabel(first))?;
        let q = self
            .position(second)
            .ok_or(TensorError::MissingLabel(second))?;
        if p == q {
            return Err(TensorError::DuplicateLabel(first));
        }
        let rest: Vec<usize> = (0..self.rank()).filter(|&i| i != p && i != q).collect();
        let mut perm = rest.clone();
        perm.push(p);
        perm.push(q);
        let moved = permute(&self.data, self.rank(), &perm);
        let out_len = entry_count(rest.len()).expect("smaller than input");
        let block = LEG_DIM * LEG_DIM;
        let data = (0..out_len)
            .map(|o| {
                let base = o * block;
                (0..LEG_DIM).map(|d| moved[base + d * LEG_DIM + d]).sum()
            })
            .collect();
        Ok(Tensor {
            indices: rest.iter().map(|&i| self.indices[i]).collect(),
            data,
        })
    }
}

/// Reorders a dense row-major array so that output axis `j` is input axis `perm[j]`.
fn permute(data: &[Complex64], rank: usize, perm: &[usize]) -> Vec<Complex64> {
    debug_assert_eq!(perm.len(), rank);
    if perm.iter().enumerate().all(|(j, &p)| j == p) {
        return data.to_vec();
    }
    let in_strides: Vec<usize> = (0..rank)
        .map(|i| LEG_DIM.pow((rank - 1 - i) as u32))
        .collect();
    let strides: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut counter = vec![0usize; rank];
    let mut offset = 0usize;
    for _ in 0..data.len() {
        out.push(data[offset]);
        // odometer over output axes, last axis fastest
        for axis in (0..rank).rev() {
            counter[axis] += 1;
            offset += strides[axis];
            if counter[axis] < LEG_DIM {
                break;
            }
            offset -= strides[axis] * LEG_DIM;
            counter[axis] = 0;
        }
    }
    out
}

/// Contracts two tensors over all their shared labels with default options.
pub fn contract(a: &Tensor, b: &Tensor) -> Result<(Tensor, ContractionCost), TensorError> {
    contract_with(a, b, &ContractOptions::default())
}

/// Contracts two tensors over all their shared labels.
///
/// The result carries `a`'s free legs followed by `b`'s free legs, each in
/// their original order. Each output entry is summed over the shared indices
/// in a fixed order by exactly one worker, so results do not depend on the
/// thread count.
pub fn contract_with(
    a: &Tensor,
    b: &Tensor,
    opts: &ContractOptions,
) -> Result<(Tensor, ContractionCost), TensorError> {
    let shared: Vec<WireId> = a
        .indices
        .iter()
        .copied()
        .filter(|l| b.indices.contains(l))
        .collect();
    if shared.is_empty() {
        return Err(TensorError::Disjoint);
    }
    let free_a: Vec<usize> = (0..a.rank())
        .filter(|&i| !shared.contains(&a.indices[i]))
        .collect();
    let free_b: Vec<usize> = (0..b.rank())
        .filter(|&i| !shared.contains(&b.indices[i]))
        .collect();
    let out_rank = free_a.len() + free_b.len();
    if out_rank > opts.rank_cap {
        return Err(TensorError::RankCap {
            rank: out_rank,
            cap: opts.rank_cap,
        });
    }
    let y = shared.len();
    let cost = ContractionCost {
        flops: flops_for(a.rank() + b.rank() - y),
        peak_rank: a.rank().max(b.rank()).max(out_rank),
    };

    let mut perm_a = free_a.clone();
    perm_a.extend(shared.iter().map(|&l| a.position(l).unwrap()));
    let mut perm_b: Vec<usize> = shared.iter().map(|&l| b.position(l).unwrap()).collect();
    perm_b.extend(free_b.iter().copied());
    let lhs = permute(&a.data, a.rank(), &perm_a);
    let rhs = permute(&b.data, b.rank(), &perm_b);

    let rows = LEG_DIM.pow(free_a.len() as u32);
    let inner = LEG_DIM.pow(y as u32);
    let cols = LEG_DIM.pow(free_b.len() as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];

    let workers = if cost.flops >= opts.parallel_threshold {
        opts.threads.max(1).min(out.len())
    } else {
        1
    };
    if workers <= 1 {
        matmul_range(&lhs, &rhs, inner, cols, 0, &mut out);
    } else {
        let chunk = out.len().div_ceil(workers);
        std::thread::scope(|scope| {
            for (w, slice) in out.chunks_mut(chunk).enumerate() {
                let (lhs, rhs) = (&lhs, &rhs);
                scope.spawn(move || matmul_range(lhs, rhs, inner, cols, w * chunk, slice));
            }
        });
    }

    let indices = free_a
        .iter()
        .map(|&i| a.indices[i])
        .chain(free_b.iter().map(|&i| b.indices[i]))
        .collect();
    Ok((Tensor { indices, data: out }, cost))
}

/// Fills `out`, which holds output entries `start..start + out.len()` of the
/// `rows x cols` product `lhs (rows x inner) * rhs (inner x cols)`.
fn matmul_range(
    lhs: &[Complex64],
    rhs: &[Complex64],
    inner: usize,
    cols: usize,
    start: usize,
    out: &mut [Complex64],
) {
    let end = start + out.len();
    let mut pos = start;
    while pos < end {
        let row = pos / cols;
        let col_lo = pos % cols;
        let col_hi = cols.min(col_lo + (end - pos));
        let dst = &mut out[pos - start..pos - start + (col_hi - col_lo)];
        let lhs_row = &lhs[row * inner..(row + 1) * inner];
        for (j, &coef) in lhs_row.iter().enumerate() {
            if coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            let src = &rhs[j * cols + col_lo..j * cols + col_hi];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += coef * s;
            }
        }
        pos += col_hi - col_lo;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(i: usize) -> WireId {
        WireId(i)
    }

    fn identity(a: WireId, b: WireId) -> Tensor {
        let mut data = vec![0.0; 16];
        for i in 0..4 {
            data[i * 4 + i] = 1.0;
        }
        Tensor::from_real(vec![a, b], &data).unwrap()
    }

    fn x_tilde(a: WireId, b: WireId) -> Tensor {
        let mut data = vec![0.0; 16];
        for i in 0..4 {
            data[i * 4 + (3 - i)] = 1.0;
        }
        Tensor::from_real(vec![a, b], &data).unwrap()
    }

    #[test]
    fn construction_checks_length_and_labels() {
        assert!(matches!(
            Tensor::from_real(vec![w(0)], &[1.0, 0.0]),
            Err(TensorError::WrongLength { .. })
        ));
        assert_eq!(
            Tensor::from_real(vec![w(0), w(0)], &[0.0; 16]),
            Err(TensorError::DuplicateLabel(w(0)))
        );
        assert_eq!(Tensor::scalar(Complex64::new(2.0, 0.0)).rank(), 0);
    }

    #[test]
    fn input_against_trace_is_one() {
        let rho = Tensor::from_real(vec![w(0)], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let tr = Tensor::from_real(vec![w(0)], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let (c, cost) = contract(&rho, &tr).unwrap();
        assert_eq!(c.as_scalar(), Some(Complex64::new(1.0, 0.0)));
        assert_eq!(cost.flops, 4);
        assert_eq!(cost.peak_rank, 1);
    }

    #[test]
    fn input_through_x_flips() {
        let rho = Tensor::from_real(vec![w(1)], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let (c, cost) = contract(&rho, &x_tilde(w(1), w(2))).unwrap();
        assert_eq!(c.indices(), &[w(2)]);
        let re: Vec<f64> = c.data().iter().map(|z| z.re).collect();
        assert_eq!(re, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(cost.flops, 16);
    }

    #[test]
    fn identity_is_relabeling() {
        let t = Tensor::new(
            vec![w(2), w(3)],
            (0..16)
                .map(|i| Complex64::new(i as f64, -(i as f64) / 3.0))
                .collect(),
        )
        .unwrap();
        let (c, _) = contract(&identity(w(1), w(2)), &t).unwrap();
        assert_eq!(c.indices(), &[w(1), w(3)]);
        assert_eq!(c.data(), t.data());
    }

    #[test]
    fn disjoint_is_rejected() {
        let a = identity(w(0), w(1));
        let b = identity(w(2), w(3));
        assert_eq!(contract(&a, &b), Err(TensorError::Disjoint));
    }

    #[test]
    fn rank_cap_is_enforced() {
        let a = Tensor::new(vec![w(0), w(1), w(2)], vec![Complex64::new(1.0, 0.0); 64]).unwrap();
        let b = Tensor::new(vec![w(2), w(3), w(4)], vec![Complex64::new(1.0, 0.0); 64]).unwrap();
        let opts = ContractOptions {
            rank_cap: 3,
            ..Default::default()
        };
        assert_eq!(
            contract_with(&a, &b, &opts),
            Err(TensorError::RankCap { rank: 4, cap: 3 })
        );
    }

    #[test]
    fn self_trace_examples() {
        let four = identity(w(0), w(1)).self_trace(w(0), w(1)).unwrap();
        assert_eq!(four.as_scalar(), Some(Complex64::new(4.0, 0.0)));
        let zero = x_tilde(w(0), w(1)).self_trace(w(0), w(1)).unwrap();
        assert_eq!(zero.as_scalar(), Some(Complex64::new(0.0, 0.0)));
        let z = Tensor::from_real(
            vec![w(0), w(1)],
            &[
                1., 0., 0., 0., 0., -1., 0., 0., 0., 0., -1., 0., 0., 0., 0., 1.,
            ],
        )
        .unwrap();
        assert_eq!(
            z.self_trace(w(0), w(1)).unwrap().as_scalar(),
            Some(Complex64::new(0.0, 0.0))
        );
        assert_eq!(
            z.self_trace(w(0), w(9)),
            Err(TensorError::MissingLabel(w(9)))
        );
    }

    #[test]
    fn self_trace_keeps_other_legs() {
        // T[a][b][c] = 100a + 10b + c, trace over a and c
        let data: Vec<f64> = (0..64)
            .map(|i| (100 * (i / 16) + 10 * ((i / 4) % 4) + i % 4) as f64)
            .collect();
        let t = Tensor::from_real(vec![w(0), w(1), w(2)], &data).unwrap();
        let r = t.self_trace(w(0), w(2)).unwrap();
        assert_eq!(r.indices(), &[w(1)]);
        for b in 0..4 {
            let expected: f64 = (0..4).map(|d| (101 * d + 10 * b) as f64).sum();
            assert_eq!(r.data()[b].re, expected);
        }
    }

    #[test]
    fn threaded_result_is_bitwise_identical() {
        let mk = |labels: Vec<WireId>, seed: f64| {
            let n = entry_count(labels.len()).unwrap();
            let data = (0..n)
                .map(|i| Complex64::new((i as f64 * seed).sin(), (i as f64 * 0.37 + seed).cos()))
                .collect();
            Tensor::new(labels, data).unwrap()
        };
        let a = mk(vec![w(0), w(1), w(2), w(3), w(4)], 0.7);
        let b = mk(vec![w(3), w(5), w(1), w(6)], 1.3);
        let serial = ContractOptions {
            threads: 1,
            ..Default::default()
        };
        let (c1, cost) = contract_with(&a, &b, &serial).unwrap();
        for threads in [2, 3, 7] {
            let opts = ContractOptions {
                threads,
                parallel_threshold: 0,
                ..Default::default()
            };
            let (c2, _) = contract_with(&a, &b, &opts).unwrap();
            assert_eq!(c1, c2, "threads = {threads}");
        }
        assert_eq!(cost.flops, flops_for(5 + 4 - 2));
        assert_eq!(cost.peak_rank, 5);
    }

    #[test]
    fn aligned_to_permutes() {
        let data: Vec<f64> = (0..16).map(|i| i as f64).collect();
        let t = Tensor::from_real(vec![w(0), w(1)], &data).unwrap();
        let tt = t.aligned_to(&[w(1), w(0)]).unwrap();
        assert_eq!(tt.get(&[2, 1]), t.get(&[1, 2]));
        assert!(t.aligned_to(&[w(0), w(2)]).is_err());
    }
}
