//! Prints the LP text dump of one model: `dump_models <family> <d> <sign>`.

use qcvol::models::{build, LpFamily};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [family, d, sign] = args.as_slice() else {
        eprintln!("usage: dump_models reduced|dual-reduced|symmetric|final-dual <d> negative|positive");
        std::process::exit(2);
    };
    let family = match family.as_str() {
        "reduced" => LpFamily::ReducedLp,
        "dual-reduced" => LpFamily::DualReduced,
        "symmetric" => LpFamily::SymmetricLp,
        "final-dual" => LpFamily::FinalDual,
        other => {
            eprintln!("unknown family {other}");
            std::process::exit(2);
        }
    };
    let model = build(family, d.parse().expect("dimension"), sign.parse().expect("sign")).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    print!("{}", model.dump());
}
