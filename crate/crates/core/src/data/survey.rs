//! Survey CSV (`agent,wave,question,raw_answer`) and the mapping of raw
//! answer scales onto the ternary agree / disagree / not-sure scale.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::DataError;
use crate::types::Opinion;

/// Ternary survey answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Answer {
    Agree = 0,
    Disagree = 1,
    NotSure = 2,
}

impl Answer {
    pub const ALL: [Answer; 3] = [Answer::Agree, Answer::Disagree, Answer::NotSure];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Answer> {
        match code {
            0 => Some(Answer::Agree),
            1 => Some(Answer::Disagree),
            2 => Some(Answer::NotSure),
            _ => None,
        }
    }

    pub fn from_opinion(o: Opinion) -> Answer {
        match o {
            Opinion::A => Answer::Agree,
            Opinion::B => Answer::Disagree,
            Opinion::AB => Answer::NotSure,
        }
    }

    pub fn to_opinion(self) -> Opinion {
        match self {
            Answer::Agree => Opinion::A,
            Answer::Disagree => Opinion::B,
            Answer::NotSure => Opinion::AB,
        }
    }
}

/// One survey row before scale mapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSurveyRow {
    pub line: u64,
    pub agent: String,
    pub wave: u32,
    pub question: String,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub agent: String,
    pub wave: u32,
    pub question: String,
    pub answer: Answer,
}

/// Inclusive `[lo, hi]` range of scale points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bucket {
    pub lo: u8,
    pub hi: u8,
}

impl Bucket {
    fn contains(&self, v: u8) -> bool {
        (self.lo..=self.hi).contains(&v)
    }
}

/// How raw answers of one question are read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "snake_case")]
pub enum Scale {
    /// Already `0`, `1` or `2`.
    Ternary,
    /// yes / no / not sure.
    YesNo,
    /// Integer points `1..=points`, bucketed.
    Points { points: u8, agree: Bucket, not_sure: Bucket, disagree: Bucket },
}

impl Scale {
    /// 7-point scale: 1–3 agree, 4 not sure, 5–7 disagree.
    pub fn seven_point() -> Scale {
        Scale::Points {
            points: 7,
            agree: Bucket { lo: 1, hi: 3 },
            not_sure: Bucket { lo: 4, hi: 4 },
            disagree: Bucket { lo: 5, hi: 7 },
        }
    }

    /// Checks that point buckets cover every point exactly once.
    pub fn validate(&self) -> Result<(), String> {
        if let Scale::Points { points, agree, not_sure, disagree } = self {
            for v in 1..=*points {
                let hits = [agree, not_sure, disagree].iter().filter(|b| b.contains(v)).count();
                if hits != 1 {
                    return Err(format!("point {v} falls in {hits} buckets"));
                }
            }
            for b in [agree, not_sure, disagree] {
                if b.lo < 1 || b.hi > *points || b.lo > b.hi {
                    return Err(format!("bucket {}..={} outside 1..={points}", b.lo, b.hi));
                }
            }
        }
        Ok(())
    }

    pub fn map(&self, raw: &str) -> Option<Answer> {
        let raw = raw.trim();
        match self {
            Scale::Ternary => raw.parse::<u8>().ok().and_then(Answer::from_code),
            Scale::YesNo => match raw.to_ascii_lowercase().as_str() {
                "yes" | "agree" => Some(Answer::Agree),
                "no" | "disagree" => Some(Answer::Disagree),
                "not sure" | "not_sure" | "unsure" | "don't know" | "dont know" => Some(Answer::NotSure),
                _ => None,
            },
            Scale::Points { agree, not_sure, disagree, .. } => {
                let v: u8 = raw.parse().ok()?;
                if agree.contains(v) {
                    Some(Answer::Agree)
                } else if not_sure.contains(v) {
                    Some(Answer::NotSure)
                } else if disagree.contains(v) {
                    Some(Answer::Disagree)
                } else {
                    None
                }
            }
        }
    }
}

/// Per-question scales, read from a TOML file such as
///
/// ```toml
/// default = { scale = "ternary" }
///
/// [questions.euthanasia]
/// scale = "yes_no"
///
/// [questions.jobguar]
/// scale = "points"
/// points = 7
/// agree = { lo = 1, hi = 3 }
/// not_sure = { lo = 4, hi = 4 }
/// disagree = { lo = 5, hi = 7 }
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AnswerMapping {
    #[serde(default)]
    pub default: Option<Scale>,
    #[serde(default)]
    pub questions: BTreeMap<String, Scale>,
}

impl AnswerMapping {
    /// Every question already on the ternary scale.
    pub fn ternary() -> Self {
        AnswerMapping { default: Some(Scale::Ternary), questions: BTreeMap::new() }
    }

    pub fn from_toml(text: &str) -> Result<Self, DataError> {
        let mapping: AnswerMapping = toml::from_str(text).map_err(|e| DataError::Mapping(e.to_string()))?;
        mapping.validate()?;
        Ok(mapping)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        for (name, scale) in self.questions.iter().map(|(q, s)| (q.as_str(), s)).chain(self.default.iter().map(|s| ("default", s))) {
            scale.validate().map_err(|e| DataError::Mapping(format!("{name}: {e}")))?;
        }
        Ok(())
    }

    pub fn scale(&self, question: &str) -> Option<&Scale> {
        self.questions.get(question).or(self.default.as_ref())
    }
}

pub fn parse_surveys<R: Read>(source: R) -> Result<Vec<RawSurveyRow>, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() != 4 {
            return Err(DataError::Malformed { line, message: format!("expected 4 fields, found {}", record.len()) });
        }
        let wave = match record[1].parse::<u32>() {
            Ok(w) if w >= 1 => w,
            Err(_) if i == 0 => continue,
            _ => return Err(DataError::Malformed { line, message: format!("invalid wave {:?}", &record[1]) }),
        };
        rows.push(RawSurveyRow {
            line,
            agent: record[0].to_owned(),
            wave,
            question: record[2].to_owned(),
            raw: record[3].to_owned(),
        });
    }
    Ok(rows)
}

/// Maps raw answers to the ternary scale.
pub fn transform_answers(rows: &[RawSurveyRow], mapping: &AnswerMapping) -> Result<Vec<SurveyRecord>, DataError> {
    let mut seen = HashSet::new();
    rows.iter()
        .map(|row| {
            let scale = mapping
                .scale(&row.question)
                .ok_or_else(|| DataError::UnmappedQuestion(row.question.clone()))?;
            let answer = scale.map(&row.raw).ok_or_else(|| DataError::UnmappedAnswer {
                line: row.line,
                question: row.question.clone(),
                raw: row.raw.clone(),
            })?;
            if !seen.insert((row.agent.as_str(), row.wave, row.question.as_str())) {
                return Err(DataError::DuplicateAnswer { line: row.line, agent: row.agent.clone(), wave: row.wave });
            }
            Ok(SurveyRecord { agent: row.agent.clone(), wave: row.wave, question: row.question.clone(), answer })
        })
        .collect()
}

/// Writes records with ternary codes as the raw answer.
pub fn write_surveys<W: Write>(sink: W, records: &[SurveyRecord]) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["agent", "wave", "question", "raw_answer"])?;
    for r in records {
        w.write_record([r.agent.as_str(), &r.wave.to_string(), r.question.as_str(), &r.answer.code().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(agent: &str, wave: u32, q: &str, v: &str) -> RawSurveyRow {
        RawSurveyRow { line: 1, agent: agent.into(), wave, question: q.into(), raw: v.into() }
    }

    #[test]
    fn yes_no_scale() {
        let s = Scale::YesNo;
        assert_eq!(s.map("yes"), Some(Answer::Agree));
        assert_eq!(s.map("No"), Some(Answer::Disagree));
        assert_eq!(s.map("not sure"), Some(Answer::NotSure));
        assert_eq!(s.map("maybe"), None);
    }

    #[test]
    fn seven_point_scale() {
        let s = Scale::seven_point();
        let mapped: Vec<_> = (1..=7).map(|v| s.map(&v.to_string()).unwrap().code()).collect();
        assert_eq!(mapped, vec![0, 0, 0, 2, 1, 1, 1]);
        assert_eq!(s.map("8"), None);
        assert_eq!(s.map("0"), None);
    }

    #[test]
    fn point_buckets_must_partition() {
        let gap = Scale::Points {
            points: 7,
            agree: Bucket { lo: 1, hi: 2 },
            not_sure: Bucket { lo: 4, hi: 4 },
            disagree: Bucket { lo: 5, hi: 7 },
        };
        assert!(gap.validate().is_err());
        assert!(Scale::seven_point().validate().is_ok());
    }

    #[test]
    fn mapping_from_toml() {
        let text = r#"
            [questions.euthanasia]
            scale = "yes_no"

            [questions.jobguar]
            scale = "points"
            points = 7
            agree = { lo = 1, hi = 3 }
            not_sure = { lo = 4, hi = 4 }
            disagree = { lo = 5, hi = 7 }
        "#;
        let m = AnswerMapping::from_toml(text).unwrap();
        assert_eq!(m.scale("jobguar"), Some(&Scale::seven_point()));
        assert_eq!(m.scale("marijuana"), None);
        let rows = vec![raw("1", 1, "euthanasia", "yes"), raw("1", 1, "jobguar", "7"), raw("2", 1, "jobguar", "4")];
        let recs = transform_answers(&rows, &m).unwrap();
        let codes: Vec<_> = recs.iter().map(|r| r.answer.code()).collect();
        assert_eq!(codes, vec![0, 1, 2]);
        assert!(matches!(
            transform_answers(&[raw("1", 1, "marijuana", "yes")], &m),
            Err(DataError::UnmappedQuestion(_))
        ));
    }

    #[test]
    fn unmapped_and_duplicate_answers() {
        let m = AnswerMapping::ternary();
        assert!(matches!(transform_answers(&[raw("1", 1, "q", "5")], &m), Err(DataError::UnmappedAnswer { .. })));
        let dup = vec![raw("1", 1, "q", "0"), raw("1", 1, "q", "1")];
        assert!(matches!(transform_answers(&dup, &m), Err(DataError::DuplicateAnswer { .. })));
    }

    #[test]
    fn csv_round_trip_with_header() {
        let recs = vec![
            SurveyRecord { agent: "a".into(), wave: 1, question: "q".into(), answer: Answer::Agree },
            SurveyRecord { agent: "b".into(), wave: 2, question: "q".into(), answer: Answer::NotSure },
        ];
        let mut buf = Vec::new();
        write_surveys(&mut buf, &recs).unwrap();
        let rows = parse_surveys(buf.as_slice()).unwrap();
        assert_eq!(transform_answers(&rows, &AnswerMapping::ternary()).unwrap(), recs);
        assert_eq!(rows[0].line, 2);
    }
}
