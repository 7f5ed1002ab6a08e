fn main() {
    std::process::exit(hetnet_wpt_cli::main_with(std::env::args_os()));
}
