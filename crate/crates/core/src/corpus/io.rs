//! Canonical JSONL reader/writer and a permissive XML reader.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use quick_xml::events::{BytesStart, Event};
use serde::{Deserialize, Serialize};

use super::{
    validate_session, Corpus, Disconnect, Provenance, Rating, Session, Speaker, SurveyResult, Timestamp,
    Utterance,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    SessionXml,
    SessionJsonl,
}

impl InputFormat {
    /// `.xml` files are read as XML, anything else as JSONL.
    pub fn from_path(path: &Path) -> InputFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("xml") => InputFormat::SessionXml,
            _ => InputFormat::SessionJsonl,
        }
    }
}

/// A session dropped during ingest. `position` is the 1-based line number
/// for JSONL and the 1-based `<session>` ordinal for XML.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedSession {
    pub position: usize,
    pub session_id: Option<String>,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub skipped: Vec<SkippedSession>,
}

impl ParseReport {
    pub fn is_clean(&self) -> bool {
        self.skipped.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub corpus: Corpus,
    pub report: ParseReport,
}

#[derive(Debug, Serialize, Deserialize)]
struct SessionRecord {
    session_id: String,
    product: String,
    agent_id: String,
    customer_id: String,
    tz_offset_min: i32,
    start: String,
    end: String,
    disconnected_by: String,
    utterances: Vec<UtteranceRecord>,
    survey: Option<SurveyRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct UtteranceRecord {
    who: String,
    t: String,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct SurveyRecord {
    overall: u8,
    #[serde(default)]
    prefer_chat: Option<bool>,
    #[serde(default)]
    knowledge: Option<u8>,
    #[serde(default)]
    reason: Option<String>,
}

pub fn parse_sessions<R: Read>(input: R, format: InputFormat) -> Result<Parsed> {
    let mut builder = CorpusBuilder::default();
    match format {
        InputFormat::SessionJsonl => read_jsonl(BufReader::new(input), &mut builder)?,
        InputFormat::SessionXml => read_xml(BufReader::new(input), &mut builder)?,
    }
    Ok(builder.finish())
}

pub fn read_corpus_file(path: &Path) -> Result<Parsed> {
    let file = File::open(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    parse_sessions(file, InputFormat::from_path(path))
}

/// Write one canonical JSON object per session, in corpus order.
pub fn write_jsonl<W: Write>(mut out: W, corpus: &Corpus) -> Result<()> {
    for s in &corpus.sessions {
        serde_json::to_writer(&mut out, &SessionRecord::from(s))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Default)]
struct CorpusBuilder {
    sessions: Vec<Session>,
    seen: HashSet<String>,
    report: ParseReport,
}

impl CorpusBuilder {
    fn accept(&mut self, position: usize, parsed: std::result::Result<Session, Skip>) {
        let skip = match parsed {
            Ok(session) => {
                let violations = validate_session(&session);
                if !violations.is_empty() {
                    Skip {
                        session_id: Some(session.session_id),
                        reasons: violations.iter().map(ToString::to_string).collect(),
                    }
                } else if !self.seen.insert(session.session_id.clone()) {
                    Skip {
                        session_id: Some(session.session_id),
                        reasons: vec!["duplicate session_id".into()],
                    }
                } else {
                    self.sessions.push(session);
                    return;
                }
            }
            Err(skip) => skip,
        };
        self.report.skipped.push(SkippedSession {
            position,
            session_id: skip.session_id,
            reasons: skip.reasons,
        });
    }

    fn finish(self) -> Parsed {
        Parsed {
            corpus: Corpus::new(self.sessions, Provenance::Ingested),
            report: self.report,
        }
    }
}

struct Skip {
    session_id: Option<String>,
    reasons: Vec<String>,
}

impl Skip {
    fn new(session_id: Option<String>, reason: impl Into<String>) -> Self {
        Skip {
            session_id,
            reasons: vec![reason.into()],
        }
    }
}

fn read_jsonl<R: BufRead>(reader: R, builder: &mut CorpusBuilder) -> Result<()> {
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Ingest(format!("line {}: {e}", idx + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match serde_json::from_str::<SessionRecord>(&line) {
            Ok(record) => record.into_session(),
            Err(e) => {
                let id = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("session_id")?.as_str().map(str::to_owned));
                Err(Skip::new(id, format!("schema: {e}")))
            }
        };
        builder.accept(idx + 1, parsed);
    }
    Ok(())
}

fn parse_time(field: &str, raw: &str) -> std::result::Result<Timestamp, String> {
    DateTime::parse_from_rfc3339(raw.trim())
        .map(|t| truncate_millis(t.with_timezone(&Utc)))
        .map_err(|e| format!("{field}: invalid RFC 3339 timestamp {raw:?} ({e})"))
}

fn truncate_millis(t: Timestamp) -> Timestamp {
    DateTime::from_timestamp_millis(t.timestamp_millis()).unwrap_or(t)
}

fn format_time(t: &Timestamp) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn parse_speaker(raw: &str) -> Option<Speaker> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "c" | "customer" => Some(Speaker::Customer),
        "a" | "agent" => Some(Speaker::Agent),
        _ => None,
    }
}

impl SessionRecord {
    fn into_session(self) -> std::result::Result<Session, Skip> {
        let id = Some(self.session_id.clone());
        let mut reasons = Vec::new();
        let start = parse_time("start", &self.start).map_err(|r| reasons.push(r)).ok();
        let end = parse_time("end", &self.end).map_err(|r| reasons.push(r)).ok();
        let disconnected_by = Disconnect::parse(&self.disconnected_by).unwrap_or_else(|| {
            reasons.push(format!(
                "disconnected_by: unknown value {:?}",
                self.disconnected_by
            ));
            Disconnect::Unknown
        });

        let mut utterances = Vec::with_capacity(self.utterances.len());
        for (i, u) in self.utterances.into_iter().enumerate() {
            let speaker = parse_speaker(&u.who);
            if speaker.is_none() {
                reasons.push(format!(
                    "utterances[{i}].who: expected \"C\" or \"A\", got {:?}",
                    u.who
                ));
            }
            let ts = parse_time(&format!("utterances[{i}].t"), &u.t)
                .map_err(|r| reasons.push(r))
                .ok();
            if let (Some(speaker), Some(timestamp)) = (speaker, ts) {
                utterances.push(Utterance {
                    speaker,
                    timestamp,
                    text: u.text,
                });
            }
        }

        let survey = match self.survey {
            None => None,
            Some(sv) => match survey_from_parts(sv.overall, sv.prefer_chat, sv.knowledge, sv.reason) {
                Ok(s) => Some(s),
                Err(r) => {
                    reasons.push(r);
                    None
                }
            },
        };

        match (start, end) {
            (Some(start_time), Some(end_time)) if reasons.is_empty() => Ok(Session {
                session_id: self.session_id,
                product_type: self.product,
                agent_id: self.agent_id,
                customer_id: self.customer_id,
                timezone_offset_minutes: self.tz_offset_min,
                start_time,
                end_time,
                disconnected_by,
                utterances,
                survey,
            }),
            _ => Err(Skip {
                session_id: id,
                reasons,
            }),
        }
    }
}

fn survey_from_parts(
    overall: u8,
    prefer_chat: Option<bool>,
    knowledge: Option<u8>,
    reason: Option<String>,
) -> std::result::Result<SurveyResult, String> {
    let overall_satisfaction =
        Rating::from_score(overall).ok_or_else(|| format!("survey.overall: expected 1-5, got {overall}"))?;
    let knowledge_rating = match knowledge {
        None => None,
        Some(k) => {
            Some(Rating::from_score(k).ok_or_else(|| format!("survey.knowledge: expected 1-5, got {k}"))?)
        }
    };
    Ok(SurveyResult {
        overall_satisfaction,
        prefer_chat,
        knowledge_rating,
        dissatisfaction_reason: reason,
    })
}

impl From<&Session> for SessionRecord {
    fn from(s: &Session) -> Self {
        SessionRecord {
            session_id: s.session_id.clone(),
            product: s.product_type.clone(),
            agent_id: s.agent_id.clone(),
            customer_id: s.customer_id.clone(),
            tz_offset_min: s.timezone_offset_minutes,
            start: format_time(&s.start_time),
            end: format_time(&s.end_time),
            disconnected_by: s.disconnected_by.as_str().to_owned(),
            utterances: s
                .utterances
                .iter()
                .map(|u| UtteranceRecord {
                    who: match u.speaker {
                        Speaker::Customer => "C".into(),
                        Speaker::Agent => "A".into(),
                    },
                    t: format_time(&u.timestamp),
                    text: u.text.clone(),
                })
                .collect(),
            survey: s.survey.as_ref().map(|sv| SurveyRecord {
                overall: sv.overall_satisfaction.score(),
                prefer_chat: sv.prefer_chat,
                knowledge: sv.knowledge_rating.map(Rating::score),
                reason: sv.dissatisfaction_reason.clone(),
            }),
        }
    }
}

// --- XML -------------------------------------------------------------------

/// Minimal element tree; names are lowercased on read.
#[derive(Debug, Default)]
struct Node {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
    text: String,
}

impl Node {
    fn from_start(e: &BytesStart<'_>) -> Result<Node> {
        let name = String::from_utf8_lossy(e.name().as_ref()).to_ascii_lowercase();
        let mut attrs = Vec::new();
        for a in e.attributes() {
            let a = a.map_err(|err| Error::Ingest(format!("xml attribute: {err}")))?;
            let key = String::from_utf8_lossy(a.key.as_ref()).to_ascii_lowercase();
            let value = a
                .unescape_value()
                .map_err(|err| Error::Ingest(format!("xml attribute {key}: {err}")))?
                .into_owned();
            attrs.push((key, value));
        }
        Ok(Node {
            name,
            attrs,
            ..Node::default()
        })
    }

    fn child(&self, name: &str) -> Option<&Node> {
        self.children.iter().find(|c| c.name == name)
    }

    /// A field given either as an attribute or as a child element's text.
    fn field(&self, name: &str) -> Option<String> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.clone())
            .or_else(|| self.child(name).map(|c| c.text.clone()))
    }
}

fn parse_tree<R: BufRead>(input: R) -> Result<Node> {
    let mut reader = quick_xml::Reader::from_reader(input);
    let mut buf = Vec::new();
    let mut stack = vec![Node::default()];
    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| Error::Ingest(format!("xml at byte {}: {e}", reader.buffer_position())))?;
        match event {
            Event::Start(e) => stack.push(Node::from_start(&e)?),
            Event::Empty(e) => {
                let node = Node::from_start(&e)?;
                stack.last_mut().expect("root").children.push(node);
            }
            Event::End(_) => {
                let node = stack.pop().expect("balanced");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(node),
                    None => return Err(Error::Ingest("xml: unbalanced end tag".into())),
                }
            }
            Event::Text(t) => {
                let text = t
                    .unescape()
                    .map_err(|e| Error::Ingest(format!("xml text: {e}")))?;
                stack.last_mut().expect("root").text.push_str(&text);
            }
            Event::CData(t) => {
                let bytes = t.into_inner();
                stack
                    .last_mut()
                    .expect("root")
                    .text
                    .push_str(&String::from_utf8_lossy(&bytes));
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if stack.len() != 1 {
        return Err(Error::Ingest("xml: unexpected end of document".into()));
    }
    Ok(stack.pop().expect("root"))
}

fn read_xml<R: BufRead>(input: R, builder: &mut CorpusBuilder) -> Result<()> {
    let doc = parse_tree(input)?;
    let root = doc
        .child("sessions")
        .ok_or_else(|| Error::Ingest("xml: missing <sessions> root element".into()))?;
    for (idx, node) in root.children.iter().filter(|c| c.name == "session").enumerate() {
        builder.accept(idx + 1, session_from_xml(node));
    }
    Ok(())
}

fn session_from_xml(node: &Node) -> std::result::Result<Session, Skip> {
    let id = node.field("session_id");
    let missing = |name: &str| Skip::new(id.clone(), format!("{name}: missing"));
    let required = |name: &str| node.field(name).ok_or_else(|| missing(name));

    let utterance_nodes: Vec<&Node> = match node.child("utterances") {
        Some(list) => list.children.iter().collect(),
        None => node
            .children
            .iter()
            .filter(|c| c.name == "utterance" || c.name == "u")
            .collect(),
    };

    let survey = match node.child("survey") {
        Some(sv) if sv.field("overall").is_some() => {
            let overall = parse_num::<u8>(sv, "overall").map_err(|r| Skip::new(id.clone(), r))?;
            let prefer_chat = match sv.field("prefer_chat") {
                None => None,
                Some(v) => Some(parse_bool(&v).ok_or_else(|| {
                    Skip::new(id.clone(), format!("survey.prefer_chat: not a boolean {v:?}"))
                })?),
            };
            let knowledge = match sv.field("knowledge") {
                None => None,
                Some(_) => Some(parse_num::<u8>(sv, "knowledge").map_err(|r| Skip::new(id.clone(), r))?),
            };
            let reason = sv.field("reason").filter(|r| !r.trim().is_empty());
            Some(SurveyRecord {
                overall,
                prefer_chat,
                knowledge,
                reason,
            })
        }
        _ => None,
    };

    let record = SessionRecord {
        session_id: required("session_id")?,
        product: node.field("product").unwrap_or_default(),
        agent_id: node.field("agent_id").unwrap_or_default(),
        customer_id: node.field("customer_id").unwrap_or_default(),
        tz_offset_min: match node.field("tz_offset_min") {
            None => 0,
            Some(_) => parse_num::<i32>(node, "tz_offset_min").map_err(|r| Skip::new(id.clone(), r))?,
        },
        start: required("start")?,
        end: required("end")?,
        disconnected_by: node.field("disconnected_by").unwrap_or_default(),
        utterances: utterance_nodes
            .into_iter()
            .map(|u| UtteranceRecord {
                who: u.field("who").unwrap_or_default(),
                t: u.field("t").unwrap_or_default(),
                text: u.field("text").unwrap_or_else(|| u.text.clone()),
            })
            .collect(),
        survey,
    };
    record.into_session()
}

fn parse_num<T: std::str::FromStr>(node: &Node, name: &str) -> std::result::Result<T, String> {
    let raw = node.field(name).unwrap_or_default();
    raw.trim()
        .parse()
        .map_err(|_| format!("{name}: not a number {raw:?}"))
}

fn parse_bool(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"{"session_id":"s1","product":"Galaxy S3","agent_id":"a7","customer_id":"c9","tz_offset_min":-300,"start":"2014-05-01T10:00:00.000Z","end":"2014-05-01T10:05:00.000Z","disconnected_by":"customer","utterances":[{"who":"A","t":"2014-05-01T10:00:01.000Z","text":"Hi, how may I help you today?"},{"who":"C","t":"2014-05-01T10:00:30.000Z","text":"my screen is cracked"},{"who":"A","t":"2014-05-01T10:01:00.000Z","text":"Sorry to hear that."},{"who":"C","t":"2014-05-01T10:04:00.000Z","text":"thanks"}],"survey":{"overall":5,"prefer_chat":true,"knowledge":5,"reason":null}}"#;

    fn parse(text: &str) -> Parsed {
        parse_sessions(text.as_bytes(), InputFormat::SessionJsonl).unwrap()
    }

    #[test]
    fn single_session_jsonl() {
        let p = parse(ONE);
        assert!(p.report.is_clean());
        assert_eq!(p.corpus.len(), 1);
        let s = &p.corpus.sessions[0];
        assert_eq!(s.utterances.len(), 4);
        assert_eq!(s.rating(), Some(Rating::VerySatisfied));
        assert_eq!(s.utterances[1].speaker, Speaker::Customer);
        assert_eq!(s.timezone_offset_minutes, -300);
    }

    #[test]
    fn unsorted_utterances_are_skipped() {
        let bad = ONE.replace("10:04:00.000Z", "10:00:10.000Z");
        let p = parse(&bad);
        assert_eq!(p.corpus.len(), 0);
        assert_eq!(p.report.skipped.len(), 1);
        let skip = &p.report.skipped[0];
        assert_eq!(skip.position, 1);
        assert!(
            skip.reasons.iter().any(|r| r.contains("unsorted utterances")),
            "{skip:?}"
        );
    }

    #[test]
    fn empty_text_skips_only_that_session() {
        let s2 = ONE.replace("\"s1\"", "\"s2\"").replace("\"thanks\"", "\"\"");
        let s3 = ONE.replace("\"s1\"", "\"s3\"");
        let p = parse(&format!("{ONE}\n{s2}\n{s3}\n"));
        assert_eq!(p.corpus.len(), 2);
        assert_eq!(p.report.skipped.len(), 1);
        assert_eq!(p.report.skipped[0].position, 2);
        assert_eq!(p.report.skipped[0].session_id.as_deref(), Some("s2"));
    }

    #[test]
    fn garbage_line_and_duplicates_are_skips_not_errors() {
        let p = parse(&format!("{ONE}\nnot json\n{ONE}\n"));
        assert_eq!(p.corpus.len(), 1);
        let reasons: Vec<_> = p.report.skipped.iter().map(|s| s.reasons[0].as_str()).collect();
        assert!(reasons[0].starts_with("schema"));
        assert_eq!(reasons[1], "duplicate session_id");
    }

    #[test]
    fn jsonl_round_trip() {
        let p = parse(ONE);
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &p.corpus).unwrap();
        let again = parse(std::str::from_utf8(&buf).unwrap());
        assert_eq!(again.corpus.sessions, p.corpus.sessions);
    }

    #[test]
    fn unreadable_stream_is_fatal() {
        let bytes: &[u8] = &[0xff, 0xfe, b'\n'];
        assert!(matches!(
            parse_sessions(bytes, InputFormat::SessionJsonl),
            Err(Error::Ingest(_))
        ));
    }

    #[test]
    fn xml_reader_accepts_attributes_and_elements_case_insensitively() {
        let xml = r#"<?xml version="1.0"?>
<Sessions>
  <Session session_id="x1" tz_offset_min="-360">
    <Product>Galaxy S4</Product>
    <agent_id>a1</agent_id>
    <customer_id>c1</customer_id>
    <Start>2014-05-01T10:00:00Z</Start>
    <End>2014-05-01T10:10:00Z</End>
    <disconnected_by>Agent</disconnected_by>
    <Utterances>
      <Utterance who="A" t="2014-05-01T10:00:00Z">Hi &amp; welcome</Utterance>
      <Utterance who="C" t="2014-05-01T10:01:00Z"><![CDATA[my phone <broke>]]></Utterance>
    </Utterances>
    <Survey overall="2" prefer_chat="false"/>
  </Session>
  <session session_id="x2" start="2014-05-01T10:00:00Z" end="2014-05-01T09:00:00Z">
    <utterance who="C" t="2014-05-01T10:00:00Z">hello</utterance>
  </session>
</Sessions>"#;
        let p = parse_sessions(xml.as_bytes(), InputFormat::SessionXml).unwrap();
        assert_eq!(p.corpus.len(), 1);
        let s = &p.corpus.sessions[0];
        assert_eq!(s.product_type, "Galaxy S4");
        assert_eq!(s.timezone_offset_minutes, -360);
        assert_eq!(s.disconnected_by, Disconnect::Agent);
        assert_eq!(s.utterances[0].text, "Hi & welcome");
        assert_eq!(s.utterances[1].text, "my phone <broke>");
        let sv = s.survey.as_ref().unwrap();
        assert_eq!(sv.overall_satisfaction, Rating::Dissatisfied);
        assert_eq!(sv.prefer_chat, Some(false));
        assert_eq!(p.report.skipped.len(), 1);
        assert_eq!(p.report.skipped[0].position, 2);
    }

    #[test]
    fn malformed_xml_is_fatal() {
        let r = parse_sessions("<sessions><session>".as_bytes(), InputFormat::SessionXml);
        assert!(r.is_err());
    }
}
