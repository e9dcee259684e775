//! Best-first enumeration of the largest products `Π_k λ_{j_k,k}` and the
//! mass bookkeeping around it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{self, Write};

use crate::error::{invalid, Error, Result};
use crate::scalar::{fmt_sig17, Real};
use crate::spectra::UnivariateSpectrum;
use crate::sum::Neumaier;

/// A multi-index (1-based) with the log of its product eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEigenvalue<T> {
    pub index: Vec<u32>,
    pub log_value: T,
}

/// `Σ_k ln λ_{j_k,k}`, summed left to right so the value is reproducible
/// from the index alone.
pub fn log_product<T: Real, S: AsRef<UnivariateSpectrum<T>>>(spectra: &[S], index: &[u32]) -> T {
    let mut acc = T::zero();
    for (s, &j) in spectra.iter().zip(index) {
        acc = acc + s.as_ref().log_eigenvalues()[j as usize - 1];
    }
    acc
}

struct Entry<T> {
    log_value: T,
    index: Vec<u32>,
}

impl<T: Real> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Entry<T> {}

impl<T: Real> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Entry<T> {
    // Max-heap order: larger value first, then lexicographically smaller index.
    fn cmp(&self, other: &Self) -> Ordering {
        self.log_value
            .partial_cmp(&other.log_value)
            .expect("NaN log eigenvalue")
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Iterator over all products of the truncated spectra in non-increasing
/// order (ties by lexicographic index).
///
/// Duplicates are avoided with the predecessor rule: coordinate `i` of a
/// popped index is incremented only if every later coordinate equals 1, so
/// each index has exactly one parent (decrement its last non-unit coordinate)
/// and the frontier stays small.
pub struct ProductEnumerator<'a, T> {
    spectra: Vec<&'a UnivariateSpectrum<T>>,
    heap: BinaryHeap<Entry<T>>,
    popped: usize,
}

impl<'a, T: Real> ProductEnumerator<'a, T> {
    pub fn new(spectra: &'a [UnivariateSpectrum<T>]) -> Result<Self> {
        Self::from_refs(spectra.iter().collect())
    }

    pub fn from_refs(spectra: Vec<&'a UnivariateSpectrum<T>>) -> Result<Self> {
        if spectra.is_empty() {
            return invalid("need at least one spectrum");
        }
        if spectra.iter().any(|s| s.is_empty()) {
            return invalid("every spectrum needs at least one eigenvalue");
        }
        let index = vec![1u32; spectra.len()];
        let log_value = log_product(&spectra, &index);
        let mut heap = BinaryHeap::new();
        heap.push(Entry { log_value, index });
        Ok(Self {
            spectra,
            heap,
            popped: 0,
        })
    }

    pub fn frontier_len(&self) -> usize {
        self.heap.len()
    }

    pub fn popped(&self) -> usize {
        self.popped
    }
}

impl<T: Real> Iterator for ProductEnumerator<'_, T> {
    type Item = ProductEigenvalue<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let Entry { log_value, index } = self.heap.pop()?;
        self.popped += 1;
        let d = index.len();
        for i in (0..d).rev() {
            if (index[i] as usize) < self.spectra[i].len() {
                let mut child = index.clone();
                child[i] += 1;
                let lv = log_product(&self.spectra, &child);
                self.heap.push(Entry {
                    log_value: lv,
                    index: child,
                });
            }
            if index[i] != 1 {
                break;
            }
        }
        Some(ProductEigenvalue { index, log_value })
    }
}

/// Number of products available on the truncated grid, saturating.
pub fn grid_size<T: Real, S: AsRef<UnivariateSpectrum<T>>>(spectra: &[S]) -> u128 {
    spectra
        .iter()
        .fold(1u128, |acc, s| acc.saturating_mul(s.as_ref().len() as u128))
}

/// `Σ_k ln Λ(k)`.
pub fn log_trace_product<T: Real, S: AsRef<UnivariateSpectrum<T>>>(spectra: &[S]) -> T {
    spectra
        .iter()
        .fold(T::zero(), |acc, s| acc + s.as_ref().log_trace())
}

/// Bound on the excluded mass as a fraction of the trace product:
/// `1 − Π_k (1 − tail_k / Λ(k))`.
pub fn truncation_loss_fraction<T: Real, S: AsRef<UnivariateSpectrum<T>>>(spectra: &[S]) -> T {
    let mut s = Neumaier::new();
    for sp in spectra {
        s.add((-sp.as_ref().tail_fraction()).ln_1p());
    }
    -s.value().exp_m1()
}

/// Bound on `Π_k Λ(k) − Π_k Σ_{j≤J_k} λ_{j,k}`.
pub fn truncation_loss<T: Real, S: AsRef<UnivariateSpectrum<T>>>(spectra: &[S]) -> T {
    truncation_loss_fraction(spectra) * log_trace_product(spectra).exp()
}

/// The `m` largest products with mass accounting.
#[derive(Debug, Clone)]
pub struct TensorAccount<T> {
    pub enumerated: Vec<ProductEigenvalue<T>>,
    pub log_trace_product: T,
    /// Enumerated mass divided by the trace product.
    pub enumerated_fraction: T,
    /// Truncation loss divided by the trace product.
    pub truncation_loss_fraction: T,
}

impl<T: Real> TensorAccount<T> {
    pub fn trace_product(&self) -> T {
        self.log_trace_product.exp()
    }

    pub fn enumerated_mass(&self) -> T {
        self.enumerated_fraction * self.trace_product()
    }

    pub fn truncation_loss(&self) -> T {
        self.truncation_loss_fraction * self.trace_product()
    }

    /// `traceProduct − enumeratedMass`, as a fraction of the trace product.
    pub fn remaining_fraction(&self) -> T {
        T::one() - self.enumerated_fraction
    }

    /// Writes `rank, j_1..j_d, logValue` rows with a header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let d = self.enumerated.first().map_or(0, |p| p.index.len());
        write!(w, "rank")?;
        for k in 1..=d {
            write!(w, ",j{k}")?;
        }
        writeln!(w, ",logValue")?;
        for (rank, p) in self.enumerated.iter().enumerate() {
            write!(w, "{}", rank + 1)?;
            for j in &p.index {
                write!(w, ",{j}")?;
            }
            writeln!(w, ",{}", fmt_sig17(p.log_value.as_f64()))?;
        }
        Ok(())
    }
}

/// Exactly the `m` largest products, non-increasing.
pub fn top_products<T: Real>(
    spectra: &[UnivariateSpectrum<T>],
    m: usize,
) -> Result<TensorAccount<T>> {
    if m == 0 {
        return invalid("m must be positive");
    }
    let available = grid_size(spectra);
    if m as u128 > available {
        return Err(Error::GridExhausted {
            requested: m as u128,
            available,
        });
    }
    let log_trace = log_trace_product(spectra);
    let enumerated: Vec<_> = ProductEnumerator::new(spectra)?.take(m).collect();
    let fraction = enumerated
        .iter()
        .map(|p| (p.log_value - log_trace).exp())
        .collect::<Neumaier<T>>()
        .value();
    Ok(TensorAccount {
        enumerated,
        log_trace_product: log_trace,
        enumerated_fraction: fraction,
        truncation_loss_fraction: truncation_loss_fraction(spectra),
    })
}
