fn main() {
    // Die quietly when stdout is a closed pipe (e.g. `cablekin stats | head`)
    // instead of panicking in the print machinery.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(cablekin::cli::run());
}
