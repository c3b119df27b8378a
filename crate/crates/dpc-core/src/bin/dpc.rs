//! Command-line driver for the dirty-paper coding toolkit.

fn main() {
    std::process::exit(dpc_core::cli::run_from_env());
}
