//! Contact-event CSV: `sender,receiver,timestamp`, header optional.
//!
//! Timestamps may be epoch seconds, ISO-8601 date-times or plain hours (the
//! latter selected by a header column named `hours`). Times are converted to
//! hours since the earliest event and rows are sorted stably by time.

use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::{DataError, ParseWarning};
use crate::types::{AgentRegistry, ContactEvent, TimeStamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TimeFormat {
    /// Hours if the header names the column `hours`, else epoch seconds for
    /// numeric values and ISO-8601 otherwise.
    #[default]
    Auto,
    Epoch,
    Iso,
    Hours,
}

/// A parsed, time-sorted event stream.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub events: Vec<ContactEvent>,
    pub agents: AgentRegistry,
    /// Time of the earliest event, in the source unit scaled to hours.
    pub origin_hours: f64,
    pub warnings: Vec<ParseWarning>,
}

fn parse_iso(s: &str) -> Option<f64> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp() as f64 + dt.timestamp_subsec_nanos() as f64 * 1e-9);
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            let utc = dt.and_utc();
            return Some(utc.timestamp() as f64 + utc.timestamp_subsec_nanos() as f64 * 1e-9);
        }
    }
    None
}

/// Timestamp in hours on the source's absolute scale.
fn parse_time(raw: &str, format: TimeFormat) -> Option<f64> {
    let raw = raw.trim();
    let hours = match format {
        TimeFormat::Hours => raw.parse::<f64>().ok(),
        TimeFormat::Epoch => raw.parse::<f64>().ok().map(|s| s / 3600.0),
        TimeFormat::Iso => parse_iso(raw).map(|s| s / 3600.0),
        TimeFormat::Auto => raw.parse::<f64>().ok().or_else(|| parse_iso(raw)).map(|s| s / 3600.0),
    }?;
    hours.is_finite().then_some(hours)
}

pub fn parse_events<R: Read>(source: R, format: TimeFormat) -> Result<EventLog, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);

    let mut format = format;
    let mut rows: Vec<(f64, String, String)> = Vec::new();
    let mut warnings = Vec::new();

    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() != 3 {
            return Err(DataError::Malformed { line, message: format!("expected 3 fields, found {}", record.len()) });
        }
        let (sender, receiver, raw_t) = (&record[0], &record[1], &record[2]);
        let t = match parse_time(raw_t, format) {
            Some(t) => t,
            None if i == 0 => {
                // Header row.
                if format == TimeFormat::Auto && raw_t.eq_ignore_ascii_case("hours") {
                    format = TimeFormat::Hours;
                }
                continue;
            }
            None => return Err(DataError::Timestamp { line, value: raw_t.to_owned() }),
        };
        if sender.is_empty() || receiver.is_empty() {
            return Err(DataError::Malformed { line, message: "empty agent id".into() });
        }
        if sender == receiver {
            warnings.push(ParseWarning { line, message: format!("self-loop for agent {sender:?} dropped") });
            continue;
        }
        rows.push((t, sender.to_owned(), receiver.to_owned()));
    }

    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let origin = rows[0].0;
    // Ids follow first appearance in the sorted stream.
    let mut agents = AgentRegistry::new();
    let events = rows
        .into_iter()
        .map(|(t, s, r)| {
            let t = TimeStamp::new(t - origin).expect("shifted times are non-negative");
            ContactEvent { sender: agents.intern(&s), receiver: agents.intern(&r), t }
        })
        .collect();
    Ok(EventLog { events, agents, origin_hours: origin, warnings })
}

/// Writes events as `sender,receiver,hours`.
pub fn write_events<W: Write>(sink: W, events: &[ContactEvent], agents: &AgentRegistry) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["sender", "receiver", "hours"])?;
    for ev in events {
        w.write_record([agents.label(ev.sender), agents.label(ev.receiver), &ev.t.hours().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn epoch_seconds_to_hours() {
        let log = parse_events("1,2,1300000000\n1,2,1300003600".as_bytes(), TimeFormat::Auto).unwrap();
        let hours: Vec<_> = log.events.iter().map(|e| e.t.hours()).collect();
        assert_eq!(hours, vec![0.0, 1.0]);
        assert_eq!(log.agents.len(), 2);
    }

    #[test]
    fn out_of_order_rows_are_sorted_stably() {
        let src = "sender,receiver,timestamp\na,b,7200\nc,d,0\nb,a,7200\nd,c,3600\n";
        let log = parse_events(src.as_bytes(), TimeFormat::Epoch).unwrap();
        let got: Vec<_> = log
            .events
            .iter()
            .map(|e| (log.agents.label(e.sender).to_owned(), e.t.hours()))
            .collect();
        assert_eq!(got, vec![("c".into(), 0.0), ("d".into(), 1.0), ("a".into(), 2.0), ("b".into(), 2.0)]);
    }

    #[test]
    fn self_loops_are_dropped_with_warning() {
        let log = parse_events("1,2,10\n3,3,20\n2,1,30\n".as_bytes(), TimeFormat::Epoch).unwrap();
        assert_eq!(log.events.len(), 2);
        assert_eq!(log.warnings.len(), 1);
        assert_eq!(log.warnings[0].line, 2);
    }

    #[test]
    fn iso_timestamps() {
        let src = "a,b,2011-09-01T00:00:00Z\nb,a,2011-09-01T01:30:00Z\na,b,2011-09-02 00:00:00\n";
        let log = parse_events(src.as_bytes(), TimeFormat::Auto).unwrap();
        let hours: Vec<_> = log.events.iter().map(|e| e.t.hours()).collect();
        assert_eq!(hours, vec![0.0, 1.5, 24.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_events("".as_bytes(), TimeFormat::Auto), Err(DataError::Empty)));
        assert!(matches!(parse_events("s,r,timestamp\n".as_bytes(), TimeFormat::Auto), Err(DataError::Empty)));
        match parse_events("1,2,10\n1,2,soon\n".as_bytes(), TimeFormat::Auto) {
            Err(DataError::Timestamp { line, value }) => {
                assert_eq!(line, 2);
                assert_eq!(value, "soon");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_events("1,2\n".as_bytes(), TimeFormat::Auto), Err(DataError::Malformed { line: 1, .. })));
    }

    #[test]
    fn hours_header_selects_hours() {
        let log = parse_events("sender,receiver,hours\nx,y,2.5\ny,x,4\n".as_bytes(), TimeFormat::Auto).unwrap();
        assert_eq!(log.origin_hours, 2.5);
        assert_eq!(log.events[1].t.hours(), 1.5);
    }

    proptest! {
        #[test]
        fn parse_write_parse_round_trips(
            rows in proptest::collection::vec((0u8..6, 0u8..6, 0.0f64..5000.0), 1..60)
        ) {
            let mut src = String::from("sender,receiver,hours\n");
            for (s, r, t) in &rows {
                if s != r {
                    src.push_str(&format!("n{s},n{r},{t}\n"));
                }
            }
            prop_assume!(rows.iter().any(|(s, r, _)| s != r));
            let first = parse_events(src.as_bytes(), TimeFormat::Auto).unwrap();
            let mut buf = Vec::new();
            write_events(&mut buf, &first.events, &first.agents).unwrap();
            let second = parse_events(buf.as_slice(), TimeFormat::Auto).unwrap();
            prop_assert_eq!(&first.events, &second.events);
            prop_assert_eq!(&first.agents, &second.agents);
        }
    }
}
