fn main() {
    // Die silently on a closed pipe (e.g. `... | head`) instead of
    // panicking; Rust ignores SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(simplicial_codes::cli::main());
}
