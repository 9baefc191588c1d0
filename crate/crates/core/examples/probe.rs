use girthforge::process::{batch_run, GirthSpec, ProcessConfig};
fn main() {
    let template = ProcessConfig::new(100_000, 3, GirthSpec::FromRate(0.7), 0);
    let seeds: Vec<u64> = (0..1000).collect();
    let records = batch_run(&template, &seeds, 0).unwrap();
    let sat = records.iter().filter(|r| r.saturated).count();
    let late = records.iter().filter(|r| !r.saturated && r.t_freeze >= 49_990).count();
    let early = records.iter().filter(|r| !r.saturated && r.t_freeze < 49_990).count();
    println!("saturated {}/1000  late-freezes {}  early-freezes {}", sat, late, early);
    for r in records.iter().filter(|r| !r.saturated) {
        println!("  seed {} t_freeze {}", r.seed, r.t_freeze);
    }
}
