//! Drives the text-completion planner from canned replies, including a
//! malformed one that triggers a retry, and writes the exchange to an audit log.

use emac::planner::{parse_plan, ReplayTransport, WireClient, WireConfig};

fn main() -> emac::Result<()> {
    let replies = vec![
        "I am not sure what to do.".to_string(),
        "> think: find the spraybottle, then put it on the toilet.\n\
         > step 1: go to cabinet 2\n\
         > step 2: open cabinet 2\n\
         > step 3: take spraybottle 2 from cabinet 2\n\
         > step 4: go to toilet 1\n\
         > step 5: put spraybottle 2 in/on toilet 1\n"
            .to_string(),
    ];
    let audit = std::env::temp_dir().join("emac-wire-replay.jsonl");
    let _ = std::fs::remove_file(&audit);
    let client = WireClient::new(
        Box::new(ReplayTransport::new(replies)),
        WireConfig { audit_path: Some(audit.clone()), ..WireConfig::default() },
    );
    let answer = client.request_plan("Your task is to: put some spraybottle on toilet.", false);
    println!("malformed replies: {}", answer.malformed);
    let plan = answer.plan?;
    for line in &plan.rationale {
        println!("think: {line}");
    }
    for (i, s) in plan.surface_forms().iter().enumerate() {
        println!("step {}: {s}", i + 1);
    }
    let logged = std::fs::read_to_string(&audit)?.lines().count();
    println!("{logged} exchanges logged to {}", audit.display());
    assert!(parse_plan("nothing useful", false).is_none());
    Ok(())
}
