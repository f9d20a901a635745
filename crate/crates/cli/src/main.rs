fn main() {
    let code = heislift::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
