//! LLM story generation and single-number creativity rating over any
//! chat-completions endpoint.

pub mod mock;
pub mod transport;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::{AuthorKind, Corpus, RaterScore, Story};
pub use transport::{
    send_with_retry, ChatRequest, ChatTransport, HttpTransport, Message, RequestLog, TransportError,
};

#[derive(Debug, thiserror::Error)]
pub enum RaterError {
    #[error("invalid rater config: {0}")]
    Config(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error("corpus error: {0}")]
    Corpus(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RaterConfig {
    pub endpoint_url: String,
    pub model_name: String,
    /// Unset means the endpoint default.
    pub temperature: Option<f64>,
    pub api_key_env_var: String,
    pub max_retries: u32,
    pub request_timeout_secs: u64,
    pub judges: usize,
    pub max_in_flight: usize,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
    /// Seeds the per-participant prompt order.
    pub seed: u64,
}

impl Default for RaterConfig {
    fn default() -> Self {
        RaterConfig {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_name: "gpt-3.5-turbo".into(),
            temperature: None,
            api_key_env_var: "OPENAI_API_KEY".into(),
            max_retries: 3,
            request_timeout_secs: 60,
            judges: 4,
            max_in_flight: 4,
            backoff_base_ms: 500,
            backoff_max_ms: 30_000,
            seed: 0,
        }
    }
}

impl RaterConfig {
    pub fn validate(&self) -> Result<(), RaterError> {
        if self.judges == 0 {
            return Err(RaterError::Config("judges must be at least 1".into()));
        }
        if self.max_in_flight == 0 {
            return Err(RaterError::Config("max_in_flight must be at least 1".into()));
        }
        if self.endpoint_url.is_empty() || self.model_name.is_empty() {
            return Err(RaterError::Config("endpoint_url and model_name are required".into()));
        }
        if let Some(t) = self.temperature {
            if !t.is_finite() || t < 0.0 {
                return Err(RaterError::Config(format!("temperature {t} out of range")));
            }
        }
        Ok(())
    }

    fn request(&self, messages: Vec<Message>) -> ChatRequest {
        ChatRequest { model: self.model_name.clone(), messages, temperature: self.temperature }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptTemplates {
    pub generation_instructions: String,
    pub instruction_check: String,
    pub practice: String,
    pub main_intro: String,
    /// `{k}`, `{a}`, `{b}`, `{c}` are substituted per prompt.
    pub prompt_line: String,
    pub rating_instructions: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            generation_instructions: "Please read these instructions carefully as we will ask you comprehension questions about them before you can begin the task. You are required to write seven very short stories. You will be given 3 words, and you must write a story that is 4 to 6 sentences long and that includes all 3 words. Try to use your imagination and be creative when writing your story. After you have completed the story, the next three words will be given to you and you will write a new distinct story. You will also need to write one practice story before starting the actual task. Are you ready to receive the comprehension questions?".into(),
            instruction_check: "What is expected of you as a response to the three words? You will write one sentence for each creative story: true or false?".into(),
            practice: "Now please do a practice run with the following three words: pencil - paper - write".into(),
            main_intro: "You're ready to begin the main task now.".into(),
            prompt_line: "Prompt {k} - Your three words are: {a} - {b} - {c}".into(),
            rating_instructions: "In this task, participants were shown 3 words, and were asked to write a short story that included all 3 words. They were told to be imaginative and creative when writing their stories. You will be shown one story. Give it a rating for creativity from 1 (very uncreative) to 5 (very creative). Try not to focus too much on the length of the story, or how good the English is, but consider the overall creativity of the story. You may wish to consider how creatively the 3 words were used, how emotive, descriptive, or humorous the story was, and how much it \"came alive\". Scale: 1: Very Uncreative, 2: Uncreative, 3: Undecided, 4: Creative, 5: Very Creative. Answer with a single integer from 1 to 5 and nothing else. Do not explain your rating.".into(),
        }
    }
}

impl PromptTemplates {
    pub fn validate(&self) -> Result<(), RaterError> {
        if !self.generation_instructions.split(|c: char| !c.is_alphanumeric()).any(|w| w == "distinct") {
            return Err(RaterError::Config("generation instructions must contain the word \"distinct\"".into()));
        }
        let r = &self.rating_instructions;
        if !(r.contains('1') && r.contains('5') && r.to_lowercase().contains("single")) {
            return Err(RaterError::Config("rating instructions must demand a single integer from 1 to 5".into()));
        }
        Ok(())
    }

    pub fn prompt_message(&self, k: usize, words: &[String; 3]) -> String {
        self.prompt_line
            .replace("{k}", &k.to_string())
            .replace("{a}", &words[0])
            .replace("{b}", &words[1])
            .replace("{c}", &words[2])
    }
}

/// The seven three-word prompts of the story-writing task.
pub const DEFAULT_PROMPTS: [[&str; 3]; 7] = [
    ["stamp", "letter", "send"],
    ["gloom", "payment", "exist"],
    ["organ", "empire", "comply"],
    ["statement", "stealth", "detect"],
    ["belief", "faith", "sing"],
    ["petrol", "diesel", "pump"],
    ["year", "week", "embark"],
];

pub fn default_prompts() -> Vec<[String; 3]> {
    DEFAULT_PROMPTS.iter().map(|t| t.map(str::to_string)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParsedRating {
    Strict(u8),
    /// Accepted from a reply with extra prose.
    Lenient(u8),
    Invalid,
}

/// A bare integer first; otherwise the unique integer in 1..=5 among the
/// reply's digit runs.
pub fn parse_rating(reply: &str) -> ParsedRating {
    let t = reply.trim();
    let t = t.strip_suffix('.').unwrap_or(t).trim();
    if let Ok(v) = t.parse::<u8>() {
        if (1..=5).contains(&v) {
            return ParsedRating::Strict(v);
        }
        return ParsedRating::Invalid;
    }
    let mut found: Option<u8> = None;
    for run in reply.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()) {
        if let Ok(v) = run.parse::<u8>() {
            if (1..=5).contains(&v) {
                match found {
                    Some(prev) if prev != v => return ParsedRating::Invalid,
                    _ => found = Some(v),
                }
            }
        }
    }
    found.map_or(ParsedRating::Invalid, ParsedRating::Lenient)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingFailure {
    pub story_id: String,
    pub judge: usize,
    pub attempts: u32,
    pub last_reply: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingWarning {
    pub story_id: String,
    pub judge: usize,
    pub reply: String,
    pub score: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RatingOutcome {
    Score { score: u8, warning: Option<RatingWarning> },
    Failure(RatingFailure),
}

pub struct Rater<'a> {
    pub config: &'a RaterConfig,
    pub templates: &'a PromptTemplates,
    pub transport: &'a dyn ChatTransport,
    pub log: &'a RequestLog,
}

impl Rater<'_> {
    /// One judge rates one story. Each attempt is a new two-message
    /// conversation; unparseable replies are retried up to `max_retries`.
    pub fn rate_story(&self, story: &Story, judge: usize) -> RatingOutcome {
        let ctx = json!({"op": "rate", "story_id": story.id, "judge": judge});
        let mut last_reply = None;
        let mut attempts = 0;
        for _ in 0..=self.config.max_retries {
            attempts += 1;
            let req = self.config.request(vec![
                Message::system(self.templates.rating_instructions.clone()),
                Message::user(story.text.clone()),
            ]);
            match send_with_retry(self.transport, &req, self.config, self.log, &ctx) {
                Ok(reply) => match parse_rating(&reply) {
                    ParsedRating::Strict(score) => return RatingOutcome::Score { score, warning: None },
                    ParsedRating::Lenient(score) => {
                        log::warn!("story {} judge {judge}: lenient rating parse of {reply:?}", story.id);
                        let warning = RatingWarning { story_id: story.id.clone(), judge, reply, score };
                        return RatingOutcome::Score { score, warning: Some(warning) };
                    }
                    ParsedRating::Invalid => last_reply = Some(reply),
                },
                Err(e) => {
                    return RatingOutcome::Failure(RatingFailure {
                        story_id: story.id.clone(),
                        judge,
                        attempts,
                        last_reply,
                        error: Some(e.to_string()),
                    })
                }
            }
        }
        RatingOutcome::Failure(RatingFailure { story_id: story.id.clone(), judge, attempts, last_reply, error: None })
    }

    /// Every judge rates every story. Scores are appended as
    /// `llm-judge-<k>`; failed ratings leave the story without that score.
    pub fn rate_corpus(&self, corpus: Corpus) -> Result<RatingRun, RaterError> {
        self.config.validate()?;
        let stories = corpus.into_stories();
        let judges = self.config.judges;
        let jobs = stories.len() * judges;
        let next = AtomicUsize::new(0);
        let sink: Mutex<Vec<(usize, usize, RatingOutcome)>> = Mutex::new(Vec::with_capacity(jobs));
        let workers = self.config.max_in_flight.min(jobs.max(1));
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let j = next.fetch_add(1, Ordering::SeqCst);
                    if j >= jobs {
                        break;
                    }
                    let (si, judge) = (j / judges, j % judges + 1);
                    let out = self.rate_story(&stories[si], judge);
                    sink.lock().expect("sink").push((si, judge, out));
                });
            }
        });
        let mut results = sink.into_inner().expect("sink");
        results.sort_by_key(|r| (r.0, r.1));

        let mut stories = stories;
        let mut failures = Vec::new();
        let mut warnings = Vec::new();
        for (si, judge, out) in results {
            match out {
                RatingOutcome::Score { score, warning } => {
                    let rs = RaterScore::new(format!("llm-judge-{judge}"), score).map_err(RaterError::Corpus)?;
                    stories[si].ratings.push(rs);
                    warnings.extend(warning);
                }
                RatingOutcome::Failure(f) => failures.push(f),
            }
        }
        let corpus = Corpus::new(stories).map_err(|e| RaterError::Corpus(e.to_string()))?;
        Ok(RatingRun { corpus, failures, warnings })
    }

    /// One fresh conversation per simulated participant: instructions,
    /// comprehension check, practice story, then every triplet in a
    /// per-participant shuffled order.
    pub fn generate_stories(&self, prompts: &[[String; 3]], participants: usize) -> Result<GenerationRun, RaterError> {
        self.config.validate()?;
        self.templates.validate()?;
        if prompts.is_empty() && participants > 0 {
            return Err(RaterError::Config("no prompts given".into()));
        }
        let next = AtomicUsize::new(0);
        let sink: Mutex<Vec<(usize, Result<ParticipantRun, TransportError>)>> = Mutex::new(Vec::new());
        let workers = self.config.max_in_flight.min(participants.max(1));
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let p = next.fetch_add(1, Ordering::SeqCst);
                    if p >= participants {
                        break;
                    }
                    let out = self.participant(prompts, p + 1);
                    sink.lock().expect("sink").push((p, out));
                });
            }
        });
        let mut results = sink.into_inner().expect("sink");
        results.sort_by_key(|r| r.0);
        let mut stories = Vec::new();
        let mut gaps = Vec::new();
        for (_, r) in results {
            let r = r?;
            stories.extend(r.stories);
            gaps.extend(r.gaps);
        }
        let corpus = Corpus::new(stories).map_err(|e| RaterError::Corpus(e.to_string()))?;
        Ok(GenerationRun { corpus, gaps })
    }

    /// Participant order for `participant` (1-based): indices into `prompts`.
    pub fn prompt_order(&self, n_prompts: usize, participant: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(participant as u64);
        let mut order: Vec<usize> = (0..n_prompts).collect();
        order.shuffle(&mut rng);
        order
    }

    fn turn(&self, messages: &mut Vec<Message>, user: String, ctx: &serde_json::Value) -> Result<Option<String>, TransportError> {
        messages.push(Message::user(user));
        for _ in 0..=self.config.max_retries {
            let reply = send_with_retry(self.transport, &self.config.request(messages.clone()), self.config, self.log, ctx)?;
            if !reply.trim().is_empty() {
                messages.push(Message::assistant(reply.clone()));
                return Ok(Some(reply));
            }
        }
        messages.pop();
        Ok(None)
    }

    fn participant(&self, prompts: &[[String; 3]], p: usize) -> Result<ParticipantRun, TransportError> {
        let t = self.templates;
        let mut messages = Vec::new();
        let ctx = |stage: &str| json!({"op": "generate", "participant": p, "stage": stage});
        self.turn(&mut messages, t.generation_instructions.clone(), &ctx("instructions"))?;
        self.turn(&mut messages, t.instruction_check.clone(), &ctx("check"))?;
        self.turn(&mut messages, t.practice.clone(), &ctx("practice"))?;
        let mut run = ParticipantRun::default();
        for (pos, &i) in self.prompt_order(prompts.len(), p).iter().enumerate() {
            let line = t.prompt_message(pos + 1, &prompts[i]);
            let user = if pos == 0 { format!("{} {line}", t.main_intro) } else { line };
            let id = format!("llm-p{p:03}-{}", i + 1);
            match self.turn(&mut messages, user, &ctx(&id))? {
                Some(text) => run.stories.push(Story {
                    id,
                    author_kind: AuthorKind::Llm,
                    prompt: prompts[i].clone(),
                    text: text.trim().to_string(),
                    ratings: Vec::new(),
                }),
                None => run.gaps.push(GenerationGap { participant: p, story_id: id, prompt: prompts[i].clone() }),
            }
        }
        Ok(run)
    }
}

#[derive(Default)]
struct ParticipantRun {
    stories: Vec<Story>,
    gaps: Vec<GenerationGap>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationGap {
    pub participant: usize,
    pub story_id: String,
    pub prompt: [String; 3],
}

#[derive(Debug)]
pub struct RatingRun {
    pub corpus: Corpus,
    pub failures: Vec<RatingFailure>,
    pub warnings: Vec<RatingWarning>,
}

#[derive(Debug)]
pub struct GenerationRun {
    pub corpus: Corpus,
    pub gaps: Vec<GenerationGap>,
}

#[cfg(test)]
mod tests {
    use super::mock::{MockResponse, MockServer};
    use super::*;
    use std::sync::atomic::AtomicU32;
    use std::sync::Arc;

    fn cfg(url: String) -> RaterConfig {
        RaterConfig { endpoint_url: url, model_name: "mock".into(), backoff_base_ms: 1, backoff_max_ms: 2, ..Default::default() }
    }

    fn story(id: &str, text: &str) -> Story {
        Story {
            id: id.into(),
            author_kind: AuthorKind::Human,
            prompt: ["stamp", "letter", "send"].map(String::from),
            text: text.into(),
            ratings: Vec::new(),
        }
    }

    fn with_rater<R>(cfg: &RaterConfig, f: impl FnOnce(&Rater) -> R) -> R {
        let templates = PromptTemplates::default();
        let transport = HttpTransport::from_config(cfg).unwrap();
        let log = RequestLog::disabled();
        f(&Rater { config: cfg, templates: &templates, transport: &transport, log: &log })
    }

    #[test]
    fn parse_cases() {
        assert_eq!(parse_rating("4"), ParsedRating::Strict(4));
        assert_eq!(parse_rating(" 5.\n"), ParsedRating::Strict(5));
        assert_eq!(parse_rating("I'd rate this 3 because it is fun"), ParsedRating::Lenient(3));
        assert_eq!(parse_rating("3 out of 10"), ParsedRating::Lenient(3));
        assert_eq!(parse_rating("creative!"), ParsedRating::Invalid);
        assert_eq!(parse_rating("between 3 and 4"), ParsedRating::Invalid);
        assert_eq!(parse_rating("7"), ParsedRating::Invalid);
        assert_eq!(parse_rating("0"), ParsedRating::Invalid);
    }

    #[test]
    fn default_templates_are_valid() {
        PromptTemplates::default().validate().unwrap();
        let mut t = PromptTemplates::default();
        t.generation_instructions = t.generation_instructions.replace("distinct", "new");
        assert!(t.validate().is_err());
        assert!(RaterConfig { judges: 0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn request_body_shape() {
        let req = RaterConfig::default().request(vec![Message::user("hi")]);
        let v = serde_json::to_value(&req).unwrap();
        assert_eq!(v, json!({"model": "gpt-3.5-turbo", "messages": [{"role": "user", "content": "hi"}]}));
        let req = RaterConfig { temperature: Some(0.7), ..Default::default() }.request(vec![]);
        assert_eq!(serde_json::to_value(&req).unwrap()["temperature"], json!(0.7));
    }

    #[test]
    fn strict_and_lenient_replies() {
        let server = MockServer::start(|req| {
            let text = &req.messages[1].content;
            MockResponse::reply(if text.contains("plain") { "4" } else { "I'd rate this 3 because it is vivid." })
        })
        .unwrap();
        let c = cfg(server.url());
        with_rater(&c, |r| {
            assert_eq!(r.rate_story(&story("a", "plain story"), 1), RatingOutcome::Score { score: 4, warning: None });
            match r.rate_story(&story("b", "wordy story"), 2) {
                RatingOutcome::Score { score: 3, warning: Some(w) } => assert_eq!(w.judge, 2),
                other => panic!("{other:?}"),
            }
        });
    }

    #[test]
    fn invalid_replies_become_failure() {
        let server = MockServer::start(|_| MockResponse::reply("creative!")).unwrap();
        let c = cfg(server.url());
        let out = with_rater(&c, |r| r.rate_story(&story("a", "text"), 1));
        match out {
            RatingOutcome::Failure(f) => {
                assert_eq!(f.attempts, c.max_retries + 1);
                assert_eq!(f.last_reply.as_deref(), Some("creative!"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(server.requests().len(), c.max_retries as usize + 1);
    }

    #[test]
    fn rate_limited_requests_are_retried() {
        let hits = Arc::new(AtomicU32::new(0));
        let h = hits.clone();
        let server = MockServer::start(move |_| {
            if h.fetch_add(1, Ordering::SeqCst) < 2 {
                MockResponse::status(429)
            } else {
                MockResponse::reply("2")
            }
        })
        .unwrap();
        let c = cfg(server.url());
        let out = with_rater(&c, |r| r.rate_story(&story("a", "text"), 1));
        assert_eq!(out, RatingOutcome::Score { score: 2, warning: None });
        assert_eq!(hits.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let server = MockServer::start(|_| MockResponse::status(401)).unwrap();
        let c = cfg(server.url());
        let out = with_rater(&c, |r| r.rate_story(&story("a", "text"), 1));
        match out {
            RatingOutcome::Failure(f) => assert!(f.error.unwrap().contains("401")),
            other => panic!("{other:?}"),
        }
        assert_eq!(server.requests().len(), 1);
    }

    #[test]
    fn corpus_rating_matches_table() {
        // Story "s<i>" is rated i % 5 + 1 by every judge.
        let server = MockServer::start(|req| {
            let text = &req.messages[1].content;
            let i: usize = text.trim_start_matches("story ").parse().unwrap();
            MockResponse::reply(&(i % 5 + 1).to_string())
        })
        .unwrap();
        let c = cfg(server.url());
        let corpus = Corpus::new((0..3).map(|i| story(&format!("s{i}"), &format!("story {i}"))).collect()).unwrap();
        let run = with_rater(&c, |r| r.rate_corpus(corpus)).unwrap();
        assert!(run.failures.is_empty());
        let total: usize = run.corpus.iter().map(|s| s.ratings.len()).sum();
        assert_eq!(total, 12);
        for (i, s) in run.corpus.iter().enumerate() {
            let ids: Vec<&str> = s.ratings.iter().map(|r| r.rater_id.as_str()).collect();
            assert_eq!(ids, ["llm-judge-1", "llm-judge-2", "llm-judge-3", "llm-judge-4"]);
            assert!(s.ratings.iter().all(|r| r.score as usize == i % 5 + 1));
        }
        let reqs = server.requests();
        assert_eq!(reqs.len(), 12);
        assert!(reqs.iter().all(|r| r.messages.len() == 2 && r.messages[0].role == "system" && r.messages[1].role == "user"));
    }

    #[test]
    fn generation_protocol() {
        let server = MockServer::start(|req| {
            let last = &req.messages.last().unwrap().content;
            MockResponse::reply(&format!("Story for: {last}"))
        })
        .unwrap();
        let c = RaterConfig { seed: 9, ..cfg(server.url()) };
        let prompts = default_prompts();
        let run = with_rater(&c, |r| r.generate_stories(&prompts, 3)).unwrap();
        assert!(run.gaps.is_empty());
        assert_eq!(run.corpus.stories().len(), 21);
        assert!(run.corpus.iter().all(|s| s.author_kind == AuthorKind::Llm && s.ratings.is_empty()));
        for s in run.corpus.iter() {
            let k: usize = s.id.rsplit('-').next().unwrap().parse().unwrap();
            assert_eq!(s.prompt, prompts[k - 1]);
            assert!(s.text.contains(&format!("{} - {} - {}", s.prompt[0], s.prompt[1], s.prompt[2])));
        }
        // 3 setup turns + 7 prompts per participant, each a growing conversation.
        let reqs = server.requests();
        assert_eq!(reqs.len(), 30);
        let firsts = reqs.iter().filter(|r| r.messages.len() == 1).count();
        assert_eq!(firsts, 3);
        assert!(reqs.iter().all(|r| r.messages[0].content.contains("distinct")));
        let again = with_rater(&c, |r| r.generate_stories(&prompts, 3)).unwrap();
        assert_eq!(again.corpus, run.corpus);
    }

    #[test]
    fn empty_completions_become_gaps() {
        let server = MockServer::start(|req| {
            let last = &req.messages.last().unwrap().content;
            MockResponse::reply(if last.contains("petrol") { "  " } else { "A story." })
        })
        .unwrap();
        let c = cfg(server.url());
        let run = with_rater(&c, |r| r.generate_stories(&default_prompts(), 2)).unwrap();
        assert_eq!(run.corpus.stories().len(), 12);
        assert_eq!(run.gaps.len(), 2);
        assert!(run.gaps.iter().all(|g| g.story_id.ends_with("-6")));
    }

    #[test]
    fn zero_participants() {
        let c = cfg("http://127.0.0.1:9/unused".into());
        let run = with_rater(&c, |r| r.generate_stories(&default_prompts(), 0)).unwrap();
        assert!(run.corpus.stories().is_empty());
    }
}
