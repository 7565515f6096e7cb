use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coding_sim::coding::{CodingState, OpinionVector};
use coding_sim::data::{Answer, Dataset, SurveyRecord};
use coding_sim::engine::{run_once, InitialState, ModelKind, SimConfig};
use coding_sim::eval::{sweep_questions, EvaluationReport, ExportFormat, GammaScope, Scope, SweepConfig};
use coding_sim::rng::{EventRng, KeyedDraws};
use coding_sim::synth::{generate_events, SynthSpec, Topology};
use coding_sim::types::{AgentId, AgentRegistry, ContactEvent, Gamma, MemoryParams, TimeStamp, Token};

fn ts(h: f64) -> TimeStamp {
    TimeStamp::new(h).unwrap()
}

/// Weight of a channel at `t` recomputed from its initial value and every
/// reinforcement time, without any stored intermediate state.
fn from_history(initial: f64, hits: &[f64], t: f64, p: &MemoryParams) -> f64 {
    let decay = |w: f64, dt: f64| {
        let d = w * (-p.lambda * dt).exp();
        if d < p.theta {
            0.0
        } else {
            d
        }
    };
    let mut w = initial;
    let mut last = 0.0;
    for &h in hits {
        let d = decay(w, h - last);
        w = if d < p.theta { p.mu } else { p.mu + d * (1.0 - p.mu) };
        last = h;
    }
    decay(w, t - last)
}

#[test]
fn coding_snapshots_match_per_channel_histories() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 15u32;
    let mut t = 0.0;
    let events: Vec<ContactEvent> = (0..3000)
        .map(|_| {
            t += rng.random_range(0.0..1.5);
            let s = rng.random_range(0..n);
            let r = (s + rng.random_range(1..n)) % n;
            ContactEvent::new(AgentId(s), AgentId(r), ts(t)).unwrap()
        })
        .collect();
    let init: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))).collect();
    let params = MemoryParams::default();
    let gamma = Gamma::new(0.25).unwrap();
    let mut config = SimConfig::new(ModelKind::Coding, gamma, 3);
    config.snapshot_times = (1..=10).map(|k| ts(t * k as f64 / 10.0)).collect();
    let state = CodingState::new(init.iter().map(|&(a, b)| OpinionVector::new(a, b, TimeStamp::ZERO)).collect());
    let traj = run_once(&events, &InitialState::Coding(state.clone()), &config, 0).unwrap();

    // Record which channel each contact reinforced.
    let mut hits: HashMap<(u32, Token), Vec<f64>> = HashMap::new();
    let mut replay = state;
    let mut draws = KeyedDraws::new(3, 0);
    for (i, ev) in events.iter().enumerate() {
        let token = draws.with_event(i, |r| replay.apply_event(ev, gamma, &params, r)).unwrap();
        hits.entry((ev.receiver.0, token)).or_default().push(ev.t.hours());
    }

    for (k, snap_t) in config.snapshot_times.iter().enumerate() {
        for agent in 0..n {
            for (token, initial) in [(Token::A, init[agent as usize].0), (Token::B, init[agent as usize].1)] {
                let all = hits.get(&(agent, token)).map(Vec::as_slice).unwrap_or(&[]);
                let upto: Vec<f64> = all.iter().copied().take_while(|&h| h <= snap_t.hours()).collect();
                let expected = from_history(initial, &upto, snap_t.hours(), &params);
                let (a, b) = traj.latent[k][agent as usize];
                let got = if token == Token::A { a } else { b };
                assert!((got - expected).abs() <= 1e-12, "snapshot {k} agent {agent} {token:?}: {got} vs {expected}");
            }
        }
    }
}

fn six_question_dataset() -> (Dataset, Vec<TimeStamp>) {
    let spec = SynthSpec { n_agents: 12, topology: Topology::Complete, rate_per_day: 0.1, horizon_days: 20.0, seed: 4 };
    let events = generate_events(&spec).unwrap();
    let agents = AgentRegistry::numbered(12);
    let mut csv = Vec::new();
    coding_sim::data::write_events(&mut csv, &events, &agents).unwrap();
    let log = coding_sim::data::parse_events(csv.as_slice(), Default::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut records = Vec::new();
    for q in ["euthanasia", "fssocsec", "fswelfare", "jobguar", "marijuana", "toomucheqrights"] {
        for wave in 1..=3 {
            for a in 0..12 {
                records.push(SurveyRecord {
                    agent: a.to_string(),
                    wave,
                    question: q.into(),
                    answer: Answer::from_code(rng.random_range(0..3)).unwrap(),
                });
            }
        }
    }
    (Dataset::assemble(&log, &records), vec![ts(0.0), ts(200.0), ts(400.0)])
}

#[test]
fn six_questions_by_nine_gammas() {
    let (ds, waves) = six_question_dataset();
    let mut config = SweepConfig::new(1, waves);
    config.repetitions = 2;
    let questions: Vec<String> = ds.questions.keys().cloned().collect();
    let report = sweep_questions(&ds, &questions, &config).unwrap();
    let aggregate = |m: ModelKind| report.rows.iter().filter(|r| r.model == m && r.wave == Scope::Aggregate).count();
    assert_eq!(aggregate(ModelKind::Coding), 54);
    assert_eq!(aggregate(ModelKind::NamingGame), 6);
    // Per question: (baseline + 9 gammas) x (2 waves + aggregate + pooled).
    assert_eq!(report.rows.len(), 6 * 10 * 4);
    assert_eq!(report.best_gamma(GammaScope::Aggregate).len(), 6);
    assert_eq!(report.best_gamma(GammaScope::PerWave).len(), 12);

    // Baseline is identical whatever the grid.
    let mut narrow = config.clone();
    narrow.gammas = vec![0.5];
    let other = sweep_questions(&ds, &questions, &narrow).unwrap();
    let ng = |r: &EvaluationReport| r.rows.iter().filter(|x| x.model == ModelKind::NamingGame).cloned().collect::<Vec<_>>();
    assert_eq!(ng(&report), ng(&other));

    for fmt in [ExportFormat::Csv, ExportFormat::Json] {
        let mut a = Vec::new();
        report.write(&mut a, fmt).unwrap();
        let mut b = Vec::new();
        sweep_questions(&ds, &questions, &config).unwrap().write(&mut b, fmt).unwrap();
        assert_eq!(a, b);
        assert_eq!(EvaluationReport::read(a.as_slice(), fmt).unwrap(), report);
    }
}

#[test]
fn agents_without_seed_answer_relay_but_are_not_scored() {
    let log = coding_sim::data::parse_events("x,a,0\na,b,3600\nb,x,7200\n".as_bytes(), Default::default()).unwrap();
    let records: Vec<SurveyRecord> = [("a", 1, 0), ("b", 1, 1), ("a", 2, 0), ("b", 2, 1), ("x", 2, 2)]
        .into_iter()
        .map(|(a, w, c)| SurveyRecord { agent: a.into(), wave: w, question: "q".into(), answer: Answer::from_code(c).unwrap() })
        .collect();
    let ds = Dataset::assemble(&log, &records);
    assert_eq!(coding_sim::eval::sweep::scored_population(&ds, "q"), BTreeMap::from([(2, 2)]));
    let mut config = SweepConfig::new(0, vec![ts(0.0), ts(3.0)]);
    config.repetitions = 2;
    let report = coding_sim::eval::sweep_gamma(&ds, "q", &config).unwrap();
    assert!(report.rows.iter().all(|r| (0.0..=1.0).contains(&r.mean_f1)));
}
