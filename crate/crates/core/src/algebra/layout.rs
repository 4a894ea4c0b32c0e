//! Tensor-product bookkeeping: which subsystem lives where, and how local
//! operators embed into the composite space.

use crate::algebra::matrix::ComplexMatrix;
use crate::algebra::sparse::SparseOperator;
use crate::error::{CoreError, Result};
use crate::scalar::Scalar;
use std::fmt;
use std::str::FromStr;

/// The subsystems of the hybrid interface.
///
/// `Nv` and `Sc` are the two effective qubits (NV spin, transmon), `Opt` and
/// `Mw` the optical-cavity and microwave-resonator modes. `NvLambda` is the
/// un-eliminated three-level NV used only by the Raman-validation model.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SubsystemLabel {
    Nv,
    Sc,
    Opt,
    Mw,
    NvLambda,
}

impl fmt::Display for SubsystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubsystemLabel::Nv => "nv",
            SubsystemLabel::Sc => "sc",
            SubsystemLabel::Opt => "opt",
            SubsystemLabel::Mw => "mw",
            SubsystemLabel::NvLambda => "nv3",
        };
        f.write_str(s)
    }
}

impl FromStr for SubsystemLabel {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nv" => Ok(SubsystemLabel::Nv),
            "sc" => Ok(SubsystemLabel::Sc),
            "opt" => Ok(SubsystemLabel::Opt),
            "mw" => Ok(SubsystemLabel::Mw),
            "nv3" => Ok(SubsystemLabel::NvLambda),
            other => Err(CoreError::Layout(format!("unknown subsystem label '{other}'"))),
        }
    }
}

/// Ordered list of (label, local dimension) pairs defining the tensor
/// factorization; basis index runs row-major over the factors (the last
/// factor varies fastest).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SystemLayout {
    parts: Vec<(SubsystemLabel, usize)>,
}

impl SystemLayout {
    /// General constructor: labels must be unique, every dimension >= 1.
    pub fn new(parts: Vec<(SubsystemLabel, usize)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(CoreError::Layout("layout needs at least one subsystem".into()));
        }
        for (label, dim) in &parts {
            if *dim < 1 {
                return Err(CoreError::Layout(format!(
                    "subsystem {label} has dimension {dim}, need at least 1"
                )));
            }
        }
        for i in 0..parts.len() {
            for j in i + 1..parts.len() {
                if parts[i].0 == parts[j].0 {
                    return Err(CoreError::Layout(format!(
                        "duplicate subsystem label {}",
                        parts[i].0
                    )));
                }
            }
        }
        Ok(Self { parts })
    }

    /// The canonical four-factor layout [nv:2, sc:2, opt:n_a, mw:n_b].
    pub fn canonical(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a < 2 || n_b < 2 {
            return Err(CoreError::Layout(format!(
                "Fock truncations must be at least 2, got n_a={n_a}, n_b={n_b}"
            )));
        }
        Self::new(vec![
            (SubsystemLabel::Nv, 2),
            (SubsystemLabel::Sc, 2),
            (SubsystemLabel::Opt, n_a),
            (SubsystemLabel::Mw, n_b),
        ])
    }

    /// Layout of the three-level Raman model: [nv3:3, opt:n_cav].
    pub fn lambda(n_cav: usize) -> Result<Self> {
        if n_cav < 2 {
            return Err(CoreError::Layout(format!(
                "cavity truncation must be at least 2, got {n_cav}"
            )));
        }
        Self::new(vec![(SubsystemLabel::NvLambda, 3), (SubsystemLabel::Opt, n_cav)])
    }

    pub fn parts(&self) -> &[(SubsystemLabel, usize)] {
        &self.parts
    }

    /// Product of all local dimensions.
    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|&(_, d)| d).product()
    }

    /// Position of a label in the factor order.
    pub fn position(&self, label: SubsystemLabel) -> Option<usize> {
        self.parts.iter().position(|&(l, _)| l == label)
    }

    /// Local dimension of a label, if present.
    pub fn dim_of(&self, label: SubsystemLabel) -> Option<usize> {
        self.parts
            .iter()
            .find(|&&(l, _)| l == label)
            .map(|&(_, d)| d)
    }

    pub fn has(&self, label: SubsystemLabel) -> bool {
        self.position(label).is_some()
    }

    /// Row-major strides per factor.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.parts.len();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.parts[i + 1].1;
        }
        strides
    }

    /// Local level of factor `pos` inside composite basis index `idx`.
    pub fn level_of(&self, idx: usize, pos: usize) -> usize {
        let strides = self.strides();
        (idx / strides[pos]) % self.parts[pos].1
    }

    /// Embeds a local operator on `target` as identity elsewhere.
    ///
    /// The result is built directly in canonical sparse order; the dense
    /// equivalent is the Kronecker product with identities, which the tests
    /// check against literally.
    pub fn embed<T: Scalar>(
        &self,
        local: &ComplexMatrix<T>,
        target: SubsystemLabel,
    ) -> Result<SparseOperator<T>> {
        self.embed_sparse(&SparseOperator::from_dense(local), target)
    }

    /// Sparse-input variant of [`Self::embed`].
    pub fn embed_sparse<T: Scalar>(
        &self,
        local: &SparseOperator<T>,
        target: SubsystemLabel,
    ) -> Result<SparseOperator<T>> {
        let pos = self.position(target).ok_or_else(|| {
            CoreError::Layout(format!("label {target} not present in layout"))
        })?;
        let d = self.parts[pos].1;
        if local.rows() != d || local.cols() != d {
            return Err(CoreError::DimensionMismatch(format!(
                "operator is {}x{} but subsystem {} has dimension {}",
                local.rows(),
                local.cols(),
                target,
                d
            )));
        }
        let stride = self.strides()[pos];
        let pre: usize = self.parts[..pos].iter().map(|&(_, d)| d).product();
        let post = stride;
        let total = self.total_dim();
        let mut entries = Vec::with_capacity(local.nnz() * pre * post);
        // loop order (outer block, local row-sorted entries, inner offset)
        // emits rows in ascending order, keeping the result canonical
        for a in 0..pre {
            let base = a * d * post;
            for &(i, j, v) in local.entries() {
                let row0 = base + (i as usize) * post;
                let col0 = base + (j as usize) * post;
                for b in 0..post {
                    entries.push(((row0 + b) as u32, (col0 + b) as u32, v));
                }
            }
        }
        // entries from one outer block ascend in row except when the local
        // operator has several entries per row; a final sort keeps it simple
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        Ok(SparseOperator::from_sorted_entries(total, total, entries))
    }

    /// Charge of every composite basis state under integer weights per
    /// subsystem: sum of weight times local level. Labels absent from
    /// `weights` contribute zero.
    pub fn charges(&self, weights: &[(SubsystemLabel, i64)]) -> Vec<i64> {
        let strides = self.strides();
        let total = self.total_dim();
        let mut table = vec![0i64; total];
        for &(label, w) in weights {
            if w == 0 {
                continue;
            }
            if let Some(pos) = self.position(label) {
                let (stride, d) = (strides[pos], self.parts[pos].1);
                for (idx, t) in table.iter_mut().enumerate() {
                    *t += w * ((idx / stride) % d) as i64;
                }
            }
        }
        table
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::kron;
    use crate::algebra::ops::{annihilation, sigma_minus};

    #[test]
    fn canonical_layout_shape() {
        let l = SystemLayout::canonical(3, 4).unwrap();
        assert_eq!(l.total_dim(), 48);
        assert_eq!(l.dim_of(SubsystemLabel::Opt), Some(3));
        assert_eq!(l.strides(), vec![24, 12, 4, 1]);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(SystemLayout::new(vec![
            (SubsystemLabel::Nv, 2),
            (SubsystemLabel::Nv, 2)
        ])
        .is_err());
    }

    #[test]
    fn embed_matches_dense_kron() {
        let l = SystemLayout::canonical(3, 2).unwrap();
        let a = annihilation::<f64>(3).unwrap();
        let emb = l.embed(&a, SubsystemLabel::Opt).unwrap().to_dense();
        let id2 = ComplexMatrix::<f64>::identity(2);
        let expect = kron(&kron(&kron(&id2, &id2), &a), &id2);
        assert_eq!(emb, expect);

        let s = sigma_minus::<f64>();
        let emb_nv = l.embed(&s, SubsystemLabel::Nv).unwrap().to_dense();
        let id3 = ComplexMatrix::<f64>::identity(3);
        let expect_nv = kron(&kron(&kron(&s, &id2), &id3), &id2);
        assert_eq!(emb_nv, expect_nv);
    }

    #[test]
    fn embed_rejects_wrong_shape_and_missing_label() {
        let l = SystemLayout::canonical(2, 2).unwrap();
        let a3 = annihilation::<f64>(3).unwrap();
        assert!(l.embed(&a3, SubsystemLabel::Opt).is_err());
        assert!(l
            .embed(&sigma_minus::<f64>(), SubsystemLabel::NvLambda)
            .is_err());
    }

    #[test]
    fn charges_count_weighted_occupations() {
        let l = SystemLayout::canonical(2, 2).unwrap();
        let charges = l.charges(&[
            (SubsystemLabel::Nv, 1),
            (SubsystemLabel::Sc, -1),
            (SubsystemLabel::Opt, 1),
            (SubsystemLabel::Mw, -1),
        ]);
        // basis index 0 is the global ground state
        assert_eq!(charges[0], 0);
        // |nv=1, sc=0, opt=0, mw=0> sits at stride 8
        assert_eq!(charges[8], 1);
        // |nv=1, sc=1, ...> cancels
        assert_eq!(charges[8 + 4], 0);
        assert_eq!(charges[1], -1); // mw = 1
    }

    #[test]
    fn label_string_roundtrip() {
        for label in [
            SubsystemLabel::Nv,
            SubsystemLabel::Sc,
            SubsystemLabel::Opt,
            SubsystemLabel::Mw,
            SubsystemLabel::NvLambda,
        ] {
            assert_eq!(label.to_string().parse::<SubsystemLabel>().unwrap(), label);
        }
        assert!("cavity".parse::<SubsystemLabel>().is_err());
    }
}
