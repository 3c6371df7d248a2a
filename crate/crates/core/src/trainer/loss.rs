use super::RankedPair;
use crate::rewriter::{rerank_score, RerankerModel, RewriteError};
use crate::scalar::Scalar;

/// `max(0, -y (s1 - s2) + m)`.
pub fn margin_rank_loss<T: Scalar>(s1: T, s2: T, y: i8, margin: T) -> T {
    let y = T::of(f64::from(y));
    (-y * (s1 - s2) + margin).max(T::zero())
}

/// Sparse weight-space gradient; the bias gradient is identically zero
/// because the bias cancels in `s1 - s2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient<T> {
    /// `(weight index, value)`, sorted by index, no duplicates.
    pub entries: Vec<(usize, T)>,
}

impl<T: Scalar> Gradient<T> {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| *v == T::zero())
    }

    pub fn get(&self, index: usize) -> T {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or_else(|_| T::zero())
    }

    /// `w <- w - lr * g`.
    pub fn apply(&self, model: &mut RerankerModel<T>, lr: T) {
        for &(i, g) in &self.entries {
            model.weights[i] -= lr * g;
        }
    }
}

/// Scores of both pair members and the hinge value at them.
pub fn pair_loss<T: Scalar>(
    pair: &RankedPair<T>,
    model: &RerankerModel<T>,
    margin: T,
) -> Result<(T, T, T), RewriteError> {
    let s1 = rerank_score(model, &pair.a.features)?;
    let s2 = rerank_score(model, &pair.b.features)?;
    Ok((s1, s2, margin_rank_loss(s1, s2, pair.y, margin)))
}

/// Subgradient of the hinge: `-y (φ(a) - φ(b))` while `-y (s1 - s2) + m > 0`,
/// zero otherwise (including exactly at the kink).
pub fn loss_gradient<T: Scalar>(
    pair: &RankedPair<T>,
    model: &RerankerModel<T>,
    margin: T,
) -> Result<Gradient<T>, RewriteError> {
    let (s1, s2, _) = pair_loss(pair, model, margin)?;
    let y = T::of(f64::from(pair.y));
    if -y * (s1 - s2) + margin <= T::zero() {
        return Ok(Gradient {
            entries: Vec::new(),
        });
    }
    let mut entries: Vec<(usize, T)> = pair
        .a
        .features
        .entries()
        .map(|(i, v)| (i, -y * v))
        .chain(pair.b.features.entries().map(|(i, v)| (i, y * v)))
        .collect();
    entries.sort_by_key(|&(i, _)| i);
    let mut merged: Vec<(usize, T)> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match merged.last_mut() {
            Some((j, acc)) if *j == i => *acc += v,
            _ => merged.push((i, v)),
        }
    }
    merged.retain(|(_, v)| *v != T::zero());
    Ok(Gradient { entries: merged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriter::FeatureVector;
    use crate::trainer::PairMember;
    use proptest::prelude::*;

    #[test]
    fn loss_examples() {
        assert_eq!(margin_rank_loss(0.8f64, 0.5, 1, 0.1), 0.0);
        assert!((margin_rank_loss(0.5f64, 0.8, 1, 0.1) - 0.4).abs() < 1e-15);
        assert_eq!(margin_rank_loss(0.5f64, 0.5, 1, 0.1), 0.1);
    }

    fn member(sparse: Vec<(u32, f64)>, scalars: [f64; 3]) -> PairMember<f64> {
        PairMember {
            id: "x".into(),
            text: String::new(),
            alignment: 0.0,
            features: FeatureVector { sparse, scalars },
        }
    }

    fn pair() -> RankedPair<f64> {
        RankedPair {
            a: member(vec![(1, 2.0), (5, 1.0)], [0.5, 0.0, 0.25]),
            b: member(vec![(5, 1.0), (9, 3.0)], [0.25, 0.0, 0.0]),
            y: 1,
            score_gap: 0.1,
        }
    }

    #[test]
    fn gradient_sign_rule() {
        let model = RerankerModel::<f64>::zeros("z");
        let g = loss_gradient(&pair(), &model, 0.1).unwrap();
        // φ(b) - φ(a); the shared bucket 5 cancels.
        assert_eq!(g.get(1), -2.0);
        assert_eq!(g.get(5), 0.0);
        assert_eq!(g.get(9), 3.0);
        assert_eq!(g.get(crate::rewriter::TOKEN_COUNT_INDEX), -0.25);
        assert_eq!(g.get(crate::rewriter::LEXICON_HITS_INDEX), -0.25);
    }

    #[test]
    fn inactive_and_kink_give_zero() {
        let mut model = RerankerModel::<f64>::zeros("z");
        model.weights[1] = 1.0;
        // s1 - s2 = 2 >= m.
        assert!(loss_gradient(&pair(), &model, 0.1).unwrap().is_zero());
        model.weights[1] = 0.05;
        // s1 - s2 = 0.1 = m exactly.
        let (s1, s2, l) = pair_loss(&pair(), &model, 0.1).unwrap();
        assert_eq!((s1 - s2, l), (0.1, 0.0));
        assert!(loss_gradient(&pair(), &model, 0.1).unwrap().is_zero());
    }

    proptest! {
        #[test]
        fn loss_properties(s1 in -5.0f64..5.0, s2 in -5.0f64..5.0, m in 0.0f64..2.0, pos in any::<bool>()) {
            let y = if pos { 1 } else { -1 };
            let l = margin_rank_loss(s1, s2, y, m);
            prop_assert!(l >= 0.0);
            prop_assert_eq!(l == 0.0, f64::from(y) * (s1 - s2) >= m);
            prop_assert_eq!(l, margin_rank_loss(s2, s1, -y, m));
        }

        #[test]
        fn sgd_step_decreases_active_loss(
            wa in proptest::collection::vec(-1.0f64..1.0, 4),
            bias in -1.0f64..1.0,
        ) {
            let mut model = RerankerModel::<f64>::zeros("z");
            for (k, idx) in [1usize, 5, 9, crate::rewriter::HASH_BUCKETS].iter().enumerate() {
                model.weights[*idx] = wa[k];
            }
            model.bias = bias;
            let p = pair();
            let (_, _, before) = pair_loss(&p, &model, 0.1).unwrap();
            prop_assume!(before > 1e-6);
            let g = loss_gradient(&p, &model, 0.1).unwrap();
            g.apply(&mut model, 1e-3);
            let (_, _, after) = pair_loss(&p, &model, 0.1).unwrap();
            prop_assert!(after < before);
        }
    }
}
