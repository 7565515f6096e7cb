//! Event-log and survey ingestion, answer mapping and survey-seeded
//! initialization.

pub mod events;
pub mod init;
pub mod survey;

use std::collections::BTreeMap;

use thiserror::Error;

pub use events::{parse_events, write_events, EventLog, TimeFormat};
pub use init::{initialize_coding, initialize_ng, InitError, SurveyInit};
pub use survey::{parse_surveys, transform_answers, write_surveys, Answer, AnswerMapping, Scale, SurveyRecord};

use crate::types::{AgentId, AgentRegistry, ContactEvent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("no data rows")]
    Empty,
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: unparseable timestamp {value:?}")]
    Timestamp { line: u64, value: String },
    #[error("no answer scale configured for question {0:?}")]
    UnmappedQuestion(String),
    #[error("line {line}: answer {raw:?} is not on the scale of question {question:?}")]
    UnmappedAnswer { line: u64, question: String, raw: String },
    #[error("line {line}: duplicate answer for agent {agent:?} in wave {wave}")]
    DuplicateAnswer { line: u64, agent: String, wave: u32 },
    #[error("answer mapping: {0}")]
    Mapping(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Answers of one question: `waves[w][agent]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuestionAnswers {
    pub waves: BTreeMap<u32, Vec<Option<Answer>>>,
}

impl QuestionAnswers {
    pub fn wave(&self, wave: u32) -> Option<&[Option<Answer>]> {
        self.waves.get(&wave).map(Vec::as_slice)
    }
}

/// Events and surveys over one shared agent registry.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub agents: AgentRegistry,
    pub events: Vec<ContactEvent>,
    pub questions: BTreeMap<String, QuestionAnswers>,
}

impl Dataset {
    /// Survey agents get the lowest ids, in order of first appearance in
    /// `records`; agents seen only in events follow in event-log order.
    pub fn assemble(log: &EventLog, records: &[SurveyRecord]) -> Dataset {
        let mut agents = AgentRegistry::new();
        for r in records {
            agents.intern(&r.agent);
        }
        let remap: Vec<AgentId> = log.agents.ids().map(|id| agents.intern(log.agents.label(id))).collect();
        let events = log
            .events
            .iter()
            .map(|e| ContactEvent { sender: remap[e.sender.index()], receiver: remap[e.receiver.index()], t: e.t })
            .collect();
        let n = agents.len();
        let mut questions: BTreeMap<String, QuestionAnswers> = BTreeMap::new();
        for r in records {
            let id = agents.get(&r.agent).expect("interned above");
            questions
                .entry(r.question.clone())
                .or_default()
                .waves
                .entry(r.wave)
                .or_insert_with(|| vec![None; n])[id.index()] = Some(r.answer);
        }
        Dataset { agents, events, questions }
    }

    /// Survey-free dataset over the event log's own agents.
    pub fn from_events(log: &EventLog) -> Dataset {
        Dataset { agents: log.agents.clone(), events: log.events.clone(), questions: BTreeMap::new() }
    }

    pub fn question(&self, q: &str) -> Option<&QuestionAnswers> {
        self.questions.get(q)
    }
}
