//! Image classification records and the visual feature block.

use alloc::string::{String, ToString};

use super::FeatureError;

/// The nine image classes; every class except `Others` is suspicious.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VisualCategory {
    CounterfeitCreditCards,
    CounterfeitMoney,
    CounterfeitPersonalIdentification,
    Cryptocurrency,
    Drugs,
    Pornography,
    Violence,
    Hacking,
    Others,
}

impl VisualCategory {
    pub const ALL: [VisualCategory; 9] = [
        Self::CounterfeitCreditCards,
        Self::CounterfeitMoney,
        Self::CounterfeitPersonalIdentification,
        Self::Cryptocurrency,
        Self::Drugs,
        Self::Pornography,
        Self::Violence,
        Self::Hacking,
        Self::Others,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::CounterfeitCreditCards => "Counterfeit Credit Cards",
            Self::CounterfeitMoney => "Counterfeit Money",
            Self::CounterfeitPersonalIdentification => "Counterfeit Personal Identification",
            Self::Cryptocurrency => "Cryptocurrency",
            Self::Drugs => "Drugs",
            Self::Pornography => "Pornography",
            Self::Violence => "Violence",
            Self::Hacking => "Hacking",
            Self::Others => "Others",
        }
    }

    pub fn is_suspicious(self) -> bool {
        self != Self::Others
    }

    /// Case-insensitive; spaces, `_` and `-` are interchangeable.
    pub fn parse(name: &str) -> Result<Self, FeatureError> {
        let key = |s: &str| -> String {
            s.chars()
                .filter(|c| !matches!(c, ' ' | '_' | '-'))
                .flat_map(char::to_lowercase)
                .collect()
        };
        let wanted = key(name);
        Self::ALL
            .into_iter()
            .find(|c| key(c.name()) == wanted)
            .ok_or_else(|| FeatureError::UnknownVisualCategory(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisualRecord {
    pub domain_id: String,
    pub image_ref: String,
    pub category: VisualCategory,
    confidence: f64,
}

impl VisualRecord {
    pub fn new(
        domain_id: impl Into<String>,
        image_ref: impl Into<String>,
        category: VisualCategory,
        confidence: f64,
    ) -> Result<Self, FeatureError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(FeatureError::ConfidenceOutOfRange(confidence));
        }
        Ok(Self { domain_id: domain_id.into(), image_ref: image_ref.into(), category, confidence })
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn suspicious(&self) -> bool {
        self.category.is_suspicious()
    }
}

/// `[suspicious_count, noise_count, total_count, avg_suspicious_conf,
/// avg_normal_conf, suspicious_majority]`.
pub fn visual_features(records: &[VisualRecord]) -> [f64; 6] {
    let (mut n_sus, mut n_noise, mut c_sus, mut c_noise) = (0usize, 0usize, 0.0, 0.0);
    for r in records {
        if r.suspicious() {
            n_sus += 1;
            c_sus += r.confidence;
        } else {
            n_noise += 1;
            c_noise += r.confidence;
        }
    }
    let mean = |sum: f64, n: usize| if n == 0 { 0.0 } else { sum / n as f64 };
    [
        n_sus as f64,
        n_noise as f64,
        (n_sus + n_noise) as f64,
        mean(c_sus, n_sus),
        mean(c_noise, n_noise),
        if n_sus > n_noise { 1.0 } else { 0.0 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn rec(cat: VisualCategory, conf: f64) -> VisualRecord {
        VisualRecord::new("d", "img", cat, conf).unwrap()
    }

    #[test]
    fn drugs_is_suspicious_others_is_not() {
        assert!(rec(VisualCategory::Drugs, 0.9).suspicious());
        assert!(!rec(VisualCategory::Others, 0.9).suspicious());
        assert_eq!(VisualCategory::ALL.iter().filter(|c| c.is_suspicious()).count(), 8);
    }

    #[test]
    fn parse_is_lenient_on_spelling() {
        assert_eq!(VisualCategory::parse("drugs").unwrap(), VisualCategory::Drugs);
        assert_eq!(
            VisualCategory::parse("counterfeit_credit_cards").unwrap(),
            VisualCategory::CounterfeitCreditCards
        );
        assert!(VisualCategory::parse("Weapons").is_err());
    }

    #[test]
    fn confidence_out_of_range_rejected() {
        assert_eq!(
            VisualRecord::new("d", "i", VisualCategory::Drugs, 1.2),
            Err(FeatureError::ConfidenceOutOfRange(1.2))
        );
        assert!(VisualRecord::new("d", "i", VisualCategory::Drugs, f64::NAN).is_err());
    }

    #[test]
    fn block_values() {
        assert_eq!(visual_features(&[]), [0.0; 6]);
        let rs: Vec<_> = [(VisualCategory::Drugs, 0.8), (VisualCategory::Hacking, 0.6), (VisualCategory::Others, 1.0)]
            .into_iter()
            .map(|(c, p)| rec(c, p))
            .collect();
        let f = visual_features(&rs);
        assert_eq!(f[..3], [2.0, 1.0, 3.0]);
        assert!((f[3] - 0.7).abs() < 1e-12);
        assert_eq!(f[4..], [1.0, 1.0]);
        let tied = [rec(VisualCategory::Drugs, 0.5), rec(VisualCategory::Others, 0.5)];
        assert_eq!(visual_features(&tied)[5], 0.0);
    }
}
