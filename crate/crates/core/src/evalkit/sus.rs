/// Ten questionnaire ratings, each 0..=4, in question order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SusResponse([u8; 10]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SusError {
    #[error("expected 10 ratings, got {0}")]
    WrongCount(usize),
    #[error("rating {value} for question {question} is outside 0..=4")]
    OutOfRange { question: usize, value: i64 },
}

impl SusResponse {
    pub fn new(ratings: &[i64]) -> Result<Self, SusError> {
        if ratings.len() != 10 {
            return Err(SusError::WrongCount(ratings.len()));
        }
        let mut out = [0u8; 10];
        for (i, &r) in ratings.iter().enumerate() {
            if !(0..=4).contains(&r) {
                return Err(SusError::OutOfRange { question: i + 1, value: r });
            }
            out[i] = r as u8;
        }
        Ok(Self(out))
    }

    pub fn ratings(&self) -> &[u8; 10] {
        &self.0
    }
}

/// SUS score in 0..=100. Odd-numbered questions are positively phrased and
/// contribute their rating; even-numbered ones contribute `4 - rating`.
pub fn sus_score(response: &SusResponse) -> f64 {
    let total: u32 =
        response.0.iter().enumerate().map(|(i, &r)| if i % 2 == 0 { r as u32 } else { 4 - r as u32 }).sum();
    2.5 * total as f64
}
