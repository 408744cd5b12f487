//! Prints the bathroom walkthrough: a scripted plan that misses the closed
//! cabinet, the failed take, and the replanned sequence.

fn main() {
    print!("{}", emac::harness::bathroom_transcript());
}
