fn main() {
    std::process::exit(mcts_vo::cli::main());
}
