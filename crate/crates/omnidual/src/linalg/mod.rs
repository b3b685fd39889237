//! Exact matrices and the subspace lattice, shared by the pointwise and symbolic layers.

mod matrix;
mod sample;
mod subspace;

pub use matrix::Matrix;
pub use sample::{sampled_rank, SampledRank, Sampler, DEFAULT_RANGE, DEFAULT_RETRIES};
pub use subspace::{dual_map, image, kernel, preimage, unit, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_scalars::Scalar;
    use proptest::prelude::*;

    fn subspace(ambient: usize) -> impl Strategy<Value = Subspace<Scalar>> {
        prop::collection::vec(prop::collection::vec(-2i64..=2, ambient), 0..=ambient).prop_map(
            move |rows| {
                let rows: Vec<Vec<Scalar>> = rows
                    .into_iter()
                    .map(|r| r.into_iter().map(Scalar::from_int).collect())
                    .collect();
                Subspace::span(ambient, &rows).unwrap()
            },
        )
    }

    fn matrix(r: usize, c: usize) -> impl Strategy<Value = Matrix<Scalar>> {
        prop::collection::vec(-2i64..=2, r * c).prop_map(move |v| Matrix::from_ints(r, c, &v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(80))]

        #[test]
        fn inclusion_exclusion(a in subspace(5), b in subspace(5)) {
            let s = a.sum(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
            // rank oracle for the sum
            prop_assert_eq!(s.dim(), a.basis().vstack(b.basis()).rank());
            prop_assert!(i.is_subspace_of(&a) && i.is_subspace_of(&b));
        }

        #[test]
        fn modular_law(a in subspace(4), b in subspace(4), c in subspace(4)) {
            // if a ⊆ c then a + (b ∩ c) = (a + b) ∩ c
            let a = a.intersect(&c).unwrap();
            let lhs = a.sum(&b.intersect(&c).unwrap()).unwrap();
            let rhs = a.sum(&b).unwrap().intersect(&c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn preimage_of_image(s in subspace(4), m in matrix(5, 4)) {
            let img = s.image(&m).unwrap();
            let pre = preimage(&m, &img).unwrap();
            prop_assert!(s.is_subspace_of(&pre));
            if m.rank() == 4 {
                prop_assert_eq!(pre, s);
            }
        }

        #[test]
        fn bareiss_matches_rref(m in matrix(4, 5)) {
            prop_assert_eq!(m.rank(), m.rank_generic());
        }
    }

    #[test]
    fn injective_preimage_is_exact() {
        let m = Matrix::from_ints(3, 2, &[1, 0, 0, 1, 1, 1]);
        let s = Subspace::span(2, &[vec![Scalar::from_int(1), Scalar::from_int(2)]]).unwrap();
        assert_eq!(preimage(&m, &s.image(&m).unwrap()).unwrap(), s);
    }
}
