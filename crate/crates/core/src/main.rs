use std::io::{self, Write};

/// Stdout that ends the process quietly when the reader goes away (`| head`).
struct Stdout(io::StdoutLock<'static>);

impl Write for Stdout {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.write(buf).map_err(quiet_pipe)
    }
    fn flush(&mut self) -> io::Result<()> {
        self.0.flush().map_err(quiet_pipe)
    }
}

fn quiet_pipe(e: io::Error) -> io::Error {
    if e.kind() == io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    e
}

fn main() {
    let mut out = Stdout(io::stdout().lock());
    let code = sijections::cli::run(std::env::args_os(), &mut out);
    let _ = out.flush();
    std::process::exit(code);
}
