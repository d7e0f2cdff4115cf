//! Parse sessions from JSONL and XML, including one malformed record.

use chatmine::corpus::{corpus_stats, parse_sessions, write_jsonl, InputFormat};

const JSONL: &str = r#"{"session_id":"s1","product":"Galaxy S3","agent_id":"a7","customer_id":"c9","tz_offset_min":-300,"start":"2014-05-01T10:00:00.000Z","end":"2014-05-01T10:05:00.000Z","disconnected_by":"customer","utterances":[{"who":"A","t":"2014-05-01T10:00:01.000Z","text":"Hi, how may I help you today?"},{"who":"C","t":"2014-05-01T10:00:30.000Z","text":"my screen is cracked"},{"who":"A","t":"2014-05-01T10:01:00.000Z","text":"Sorry to hear that."},{"who":"C","t":"2014-05-01T10:04:00.000Z","text":"thanks"}],"survey":{"overall":5,"prefer_chat":true,"knowledge":5,"reason":null}}
{"session_id":"s2","product":"Galaxy S4","agent_id":"a1","customer_id":"c2","tz_offset_min":0,"start":"2014-05-01T11:00:00.000Z","end":"2014-05-01T10:00:00.000Z","disconnected_by":"agent","utterances":[],"survey":null}
"#;

const XML: &str = r#"<?xml version="1.0"?>
<sessions>
  <session session_id="x1" tz_offset_min="-360">
    <product>Galaxy S4</product>
    <agent_id>a1</agent_id>
    <customer_id>c1</customer_id>
    <start>2014-05-01T10:00:00Z</start>
    <end>2014-05-01T10:10:00Z</end>
    <disconnected_by>agent</disconnected_by>
    <utterances>
      <utterance who="A" t="2014-05-01T10:00:00Z">Hi, welcome to support</utterance>
      <utterance who="C" t="2014-05-01T10:01:00Z">my phone will not charge</utterance>
    </utterances>
    <survey overall="2" prefer_chat="false"/>
  </session>
</sessions>
"#;

fn main() -> chatmine::Result<()> {
    let jsonl = parse_sessions(JSONL.as_bytes(), InputFormat::SessionJsonl)?;
    println!("jsonl: {} sessions kept", jsonl.corpus.len());
    for skip in &jsonl.report.skipped {
        println!(
            "  skipped line {} ({:?}): {}",
            skip.position,
            skip.session_id,
            skip.reasons.join("; ")
        );
    }

    let xml = parse_sessions(XML.as_bytes(), InputFormat::SessionXml)?;
    let s = &xml.corpus.sessions[0];
    println!(
        "xml: {} with {} utterances, {:.1} min, rating {:?}",
        s.session_id,
        s.utterances.len(),
        s.duration_minutes(),
        s.rating()
    );

    let stats = corpus_stats(&jsonl.corpus);
    println!("survey response rate {:.2}", stats.survey_response_rate);

    let mut out = Vec::new();
    write_jsonl(&mut out, &xml.corpus)?;
    print!("canonical form:\n{}", String::from_utf8_lossy(&out));
    Ok(())
}
