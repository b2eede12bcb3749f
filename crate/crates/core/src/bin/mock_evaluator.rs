//! Test double for the external evaluator protocol: `f = (x1, 1 - x1)`.
//! Flags inject the failure modes the optimizer has to survive.

use std::io::{self, BufRead, Write};
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

#[derive(Parser)]
#[command(about = "Line-protocol evaluator computing f = (x1, 1 - x1)")]
struct Args {
    /// Decision dimension reported in the handshake.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Objective count reported in the handshake.
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    /// Objective values actually sent per reply.
    #[arg(long)]
    reply_objectives: Option<usize>,
    /// Delay before every reply, in milliseconds.
    #[arg(long, default_value_t = 0)]
    sleep_ms: u64,
    /// Answer garbage from this evaluation on (1-based count).
    #[arg(long)]
    garbage_from: Option<usize>,
    /// Exit without replying on this evaluation (1-based count).
    #[arg(long)]
    exit_on: Option<usize>,
    #[arg(long, default_value_t = 3)]
    exit_code: u8,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    let mut seen = 0;
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("HELLO") => {
                let _ = writeln!(out, "READY {} {}", args.objectives, args.dim);
            }
            Some("EVAL") => {
                seen += 1;
                let index = fields.next().unwrap_or("0").to_owned();
                let x: Vec<f64> = fields.filter_map(|v| v.parse().ok()).collect();
                if args.exit_on == Some(seen) {
                    return ExitCode::from(args.exit_code);
                }
                if args.sleep_ms > 0 {
                    std::thread::sleep(Duration::from_millis(args.sleep_ms));
                }
                if args.garbage_from.is_some_and(|g| seen >= g) {
                    let _ = writeln!(out, "OBJ {index} not-a-number");
                } else {
                    let x1 = x.first().copied().unwrap_or(0.0);
                    let f = [x1, 1.0 - x1];
                    let k = args.reply_objectives.unwrap_or(args.objectives);
                    let values: Vec<String> = (0..k).map(|i| f.get(i).copied().unwrap_or(0.0).to_string()).collect();
                    let _ = writeln!(out, "OBJ {index} {}", values.join(" "));
                }
            }
            Some("BYE") | None => break,
            Some(_) => {
                let _ = writeln!(out, "ERR unknown command");
            }
        }
        let _ = out.flush();
    }
    ExitCode::SUCCESS
}
