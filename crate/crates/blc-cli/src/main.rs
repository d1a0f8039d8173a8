use std::io::{self, Write};
use std::panic::{self, AssertUnwindSafe};
use std::process;

fn main() {
    let mut out = io::BufWriter::new(io::stdout().lock());
    let mut err = io::stderr().lock();
    // 0 = success, 1 = user error, 2 = internal error (a panic)
    let code = panic::catch_unwind(AssertUnwindSafe(|| {
        blc_cli::run(std::env::args_os(), &mut out, &mut err)
    }))
    .unwrap_or(2);
    let _ = out.flush();
    process::exit(code);
}
