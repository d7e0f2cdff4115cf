use std::fmt;

use super::Session;

/// One broken invariant: which field, and which rule it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Check every session, utterance and survey invariant. Empty result means
/// the session is well formed.
pub fn validate_session(s: &Session) -> Vec<Violation> {
    let mut out = Vec::new();

    if s.session_id.trim().is_empty() {
        out.push(Violation::new("session_id", "must be non-empty"));
    }
    if s.end_time < s.start_time {
        out.push(Violation::new("end_time", "end_time precedes start_time"));
    }
    if s.utterances.is_empty() {
        out.push(Violation::new("utterances", "must be non-empty"));
    }

    for (i, u) in s.utterances.iter().enumerate() {
        if u.text.trim().is_empty() {
            out.push(Violation::new(format!("utterances[{i}].text"), "empty text"));
        }
        // range checks need a well-formed [start, end] interval
        if s.end_time < s.start_time {
            continue;
        }
        if u.timestamp < s.start_time {
            out.push(Violation::new(
                format!("utterances[{i}].timestamp"),
                "precedes start_time",
            ));
        }
        if u.timestamp > s.end_time {
            out.push(Violation::new(
                format!("utterances[{i}].timestamp"),
                "exceeds end_time",
            ));
        }
    }

    if let Some(i) = s
        .utterances
        .windows(2)
        .position(|w| w[1].timestamp < w[0].timestamp)
    {
        out.push(Violation::new(
            "utterances",
            format!("unsorted utterances (index {} precedes index {})", i + 1, i),
        ));
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Disconnect, Speaker, Utterance};
    use chrono::{Duration, TimeZone, Utc};

    fn session(offsets_s: &[i64], end_s: i64) -> Session {
        let t0 = Utc.with_ymd_and_hms(2014, 3, 1, 12, 0, 0).unwrap();
        Session {
            session_id: "s1".into(),
            product_type: "phone".into(),
            agent_id: "a1".into(),
            customer_id: "c1".into(),
            timezone_offset_minutes: -300,
            start_time: t0,
            end_time: t0 + Duration::seconds(end_s),
            disconnected_by: Disconnect::Customer,
            utterances: offsets_s
                .iter()
                .map(|&o| Utterance {
                    speaker: Speaker::Agent,
                    timestamp: t0 + Duration::seconds(o),
                    text: "hello".into(),
                })
                .collect(),
            survey: None,
        }
    }

    #[test]
    fn well_formed_session_has_no_violations() {
        assert!(validate_session(&session(&[0, 10, 20], 60)).is_empty());
    }

    #[test]
    fn end_before_start() {
        let mut s = session(&[0, 10], 60);
        s.end_time = s.start_time - Duration::seconds(1);
        let v = validate_session(&s);
        assert_eq!(
            v,
            vec![Violation::new("end_time", "end_time precedes start_time")]
        );
    }

    #[test]
    fn third_utterance_past_end_names_index_two() {
        let v = validate_session(&session(&[0, 10, 90], 60));
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].field, "utterances[2].timestamp");
        assert_eq!(v[0].rule, "exceeds end_time");
    }

    #[test]
    fn unsorted_and_empty_text() {
        let mut s = session(&[0, 30, 20], 60);
        s.utterances[1].text = "   ".into();
        let v = validate_session(&s);
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].to_string(), "utterances[1].text: empty text");
        assert!(v[1].rule.starts_with("unsorted utterances"));
    }

    #[test]
    fn empty_utterance_list() {
        let v = validate_session(&session(&[], 60));
        assert_eq!(v, vec![Violation::new("utterances", "must be non-empty")]);
    }
}
