fn main() {
    std::process::exit(kerovlab::cli::run());
}
