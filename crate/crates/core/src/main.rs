fn main() {
    std::process::exit(dglift::cli::main_entry());
}
