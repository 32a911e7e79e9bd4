//! Evaluation metrics for inferred import sets: per-snippet precision,
//! recall, and F1, aggregated two ways. Micro averaging sums true/false
//! positive counts over the corpus before dividing; macro averaging takes
//! the mean of the per-snippet ratios that are defined.
//!
//! A ratio with an empty denominator is undefined, carried as `None`, and
//! never folded into a mean as zero.

pub mod freq;
pub mod wilcoxon;

use serde::{Deserialize, Serialize};

use crate::fqn::ImportSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnippetScore {
    pub id: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Harmonic mean of precision and recall; undefined when either is, zero
/// when both sides are zero.
fn f1_of(precision: Option<f64>, recall: Option<f64>) -> Option<f64> {
    let (p, r) = (precision?, recall?);
    if p + r == 0.0 {
        Some(0.0)
    } else {
        Some(2.0 * p * r / (p + r))
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    if den == 0 {
        None
    } else {
        Some(num as f64 / den as f64)
    }
}

/// Counts exact FQN matches between an inferred and an expected import set.
pub fn score_snippet(id: &str, inferred: &ImportSet, expected: &ImportSet) -> SnippetScore {
    let tp = inferred.intersection(expected).len();
    let fp = inferred.len() - tp;
    let fn_ = expected.len() - tp;
    let precision = ratio(tp, inferred.len());
    let recall = ratio(tp, expected.len());
    SnippetScore {
        id: id.to_string(),
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1: f1_of(precision, recall),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Provenance carried inside a report so a number can be traced back to
/// the run that produced it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub meta: ReportMeta,
    pub scores: Vec<SnippetScore>,
    pub micro: Aggregate,
    #[serde(rename = "macro")]
    pub macro_: Aggregate,
    pub total_tp: usize,
    pub total_fp: usize,
    pub total_fn: usize,
}

fn mean_of_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

pub fn aggregate(scores: Vec<SnippetScore>, meta: ReportMeta) -> EvalReport {
    let total_tp: usize = scores.iter().map(|s| s.tp).sum();
    let total_fp: usize = scores.iter().map(|s| s.fp).sum();
    let total_fn: usize = scores.iter().map(|s| s.fn_).sum();
    let precision = ratio(total_tp, total_tp + total_fp);
    let recall = ratio(total_tp, total_tp + total_fn);
    let micro = Aggregate {
        precision,
        recall,
        f1: f1_of(precision, recall),
    };
    let macro_precision = mean_of_defined(scores.iter().map(|s| s.precision));
    let macro_recall = mean_of_defined(scores.iter().map(|s| s.recall));
    let macro_ = Aggregate {
        precision: macro_precision,
        recall: macro_recall,
        f1: mean_of_defined(scores.iter().map(|s| s.f1)),
    };
    EvalReport {
        meta,
        scores,
        micro,
        macro_,
        total_tp,
        total_fp,
        total_fn,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fqn::Fqn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(fqns: &[&str]) -> ImportSet {
        let mut out = ImportSet::new();
        for f in fqns {
            out.insert(Fqn::parse(f).unwrap());
        }
        out
    }

    #[test]
    fn perfect_match_scores_one() {
        let s = score_snippet("x", &set(&["a.B", "c.D"]), &set(&["a.B", "c.D"]));
        assert_eq!((s.tp, s.fp, s.fn_), (2, 0, 0));
        assert_eq!(s.precision, Some(1.0));
        assert_eq!(s.recall, Some(1.0));
        assert_eq!(s.f1, Some(1.0));
    }

    #[test]
    fn partial_recall_halves() {
        let s = score_snippet("x", &set(&["a.B"]), &set(&["a.B", "c.D"]));
        assert_eq!(s.precision, Some(1.0));
        assert_eq!(s.recall, Some(0.5));
        let f1 = s.f1.unwrap();
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_inferred_leaves_precision_undefined() {
        let s = score_snippet("x", &set(&[]), &set(&["a.B"]));
        assert_eq!(s.precision, None);
        assert_eq!(s.recall, Some(0.0));
        assert_eq!(s.f1, None);
    }

    #[test]
    fn empty_expected_leaves_recall_undefined() {
        let s = score_snippet("x", &set(&["a.B"]), &set(&[]));
        assert_eq!(s.precision, Some(0.0));
        assert_eq!(s.recall, None);
    }

    #[test]
    fn counts_match_brute_force_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let universe: Vec<Fqn> = (0..20)
            .map(|i| Fqn::parse(&format!("p{}.T{}", i % 4, i)).unwrap())
            .collect();
        for _ in 0..1000 {
            let mut inferred = ImportSet::new();
            let mut expected = ImportSet::new();
            for fqn in &universe {
                if rng.gen_bool(0.3) {
                    inferred.insert(fqn.clone());
                }
                if rng.gen_bool(0.3) {
                    expected.insert(fqn.clone());
                }
            }
            let s = score_snippet("r", &inferred, &expected);
            let tp_brute = universe
                .iter()
                .filter(|f| inferred.contains(f) && expected.contains(f))
                .count();
            let fp_brute = universe
                .iter()
                .filter(|f| inferred.contains(f) && !expected.contains(f))
                .count();
            let fn_brute = universe
                .iter()
                .filter(|f| !inferred.contains(f) && expected.contains(f))
                .count();
            assert_eq!((s.tp, s.fp, s.fn_), (tp_brute, fp_brute, fn_brute));
        }
    }

    #[test]
    fn micro_divides_summed_counts() {
        let scores = vec![
            score_snippet("a", &set(&["a.B", "x.Y"]), &set(&["a.B"])),
            score_snippet("b", &set(&["c.D"]), &set(&["c.D", "e.F"])),
        ];
        let report = aggregate(scores, ReportMeta::default());
        assert_eq!((report.total_tp, report.total_fp, report.total_fn), (2, 1, 1));
        let p = report.micro.precision.unwrap();
        let r = report.micro.recall.unwrap();
        let f1 = report.micro.f1.unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert!((r - 2.0 / 3.0).abs() < 1e-12);
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn micro_f1_is_the_harmonic_mean() {
        let scores = vec![
            score_snippet("a", &set(&["a.B"]), &set(&["a.B", "c.D", "e.F"])),
            score_snippet("b", &set(&["x.Y", "z.W"]), &set(&["x.Y"])),
        ];
        let report = aggregate(scores, ReportMeta::default());
        let p = report.micro.precision.unwrap();
        let r = report.micro.recall.unwrap();
        let f1 = report.micro.f1.unwrap();
        assert!((f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_empty_inference_keeps_micro_precision_undefined() {
        let scores = vec![
            score_snippet("a", &set(&[]), &set(&["a.B"])),
            score_snippet("b", &set(&[]), &set(&["c.D"])),
        ];
        let report = aggregate(scores, ReportMeta::default());
        assert_eq!(report.micro.precision, None);
        assert_eq!(report.micro.recall, Some(0.0));
        assert_eq!(report.macro_.precision, None);
        assert_eq!(report.macro_.recall, Some(0.0));
    }

    #[test]
    fn macro_means_skip_undefined_entries() {
        let scores = vec![
            score_snippet("a", &set(&["a.B"]), &set(&["a.B"])),
            score_snippet("b", &set(&[]), &set(&["c.D"])),
        ];
        let report = aggregate(scores, ReportMeta::default());
        assert_eq!(report.macro_.precision, Some(1.0));
        assert_eq!(report.macro_.recall, Some(0.5));
    }

    #[test]
    fn report_round_trips_through_json() {
        let scores = vec![score_snippet("a", &set(&["a.B"]), &set(&["a.B"]))];
        let meta = ReportMeta {
            model: Some("local".into()),
            corpus: Some("demo".into()),
            transform: None,
            seed: Some(7),
        };
        let report = aggregate(scores, meta);
        let json = serde_json::to_string(&report).unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert!(json.contains("\"fn\":0"), "{json}");
        assert!(json.contains("\"macro\":"), "{json}");
    }
}
