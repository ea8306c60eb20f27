#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "fexec/battleship.hpp"
#include "fexec/cli.hpp"
#include "fexec/service.hpp"

namespace {

fexec::battleship::Game load_game(const std::string& board1, const std::string& board2) {
  std::string t1, t2;
  if (!fexec::cli::read_file(board1, t1)) throw fexec::battleship::InvalidBoard("cannot read " + board1);
  if (!fexec::cli::read_file(board2, t2)) throw fexec::battleship::InvalidBoard("cannot read " + board2);
  return fexec::battleship::Game(fexec::battleship::parse_board(t1), fexec::battleship::parse_board(t2));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fexec: faceted-execution interpreter for a small Scheme"};
  app.require_subcommand(1);

  bool trace = false;
  bool print_store = false;
  std::size_t max_labels = 3;
  std::string mutate = "none";

  std::string file;
  auto* run = app.add_subcommand("run", "Evaluate a program and print its bare expressions");
  run->add_option("file", file, "Program file")->required();
  run->add_flag("--trace", trace, "Print each evaluation rule to stderr");
  run->add_flag("--print-store", print_store, "Dump the store after running");

  auto* repl = app.add_subcommand("repl", "Interactive session");
  repl->add_flag("--trace", trace, "Start with rule tracing on");

  std::vector<std::string> paths;
  bool json = false;
  auto* check = app.add_subcommand("check", "Run the projection-equivalence oracle over files or directories");
  check->add_option("paths", paths, "Program files or directories of *.rkts")->required();
  check->add_option("--max-labels", max_labels, "Largest label count to enumerate")->capture_default_str();
  check->add_flag("--json", json, "Machine-readable summary");

  for (auto* sub : {run, check})
    sub->add_option("--mutate", mutate, "Faceted evaluator variant for mutation testing")
        ->check(CLI::IsMember({"none", "raw-set", "raw-box", "raw-box-set"}))
        ->capture_default_str();

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string board1, board2;
  auto* serve = app.add_subcommand("serve", "Host the Battleship game over HTTP");
  serve->add_option("--port", port, "Port to listen on")->capture_default_str();
  serve->add_option("--host", host, "Address to bind")->capture_default_str();
  serve->add_option("--board1", board1, "Player 1 board: whitespace-separated x y pairs")->required();
  serve->add_option("--board2", board2, "Player 2 board")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : fexec::cli::kUsageError;
  }

  fexec::EvalOptions eval;
  eval.raw_set_writes = mutate == "raw-set" || mutate == "raw-box-set";
  eval.raw_box_writes = mutate == "raw-box" || mutate == "raw-box-set";

  if (*run) {
    fexec::cli::RunOptions opts;
    opts.trace = trace;
    opts.print_store = print_store;
    opts.eval = eval;
    return fexec::cli::run_file(file, std::cout, std::cerr, opts);
  }
  if (*repl) {
    fexec::cli::RunOptions opts;
    opts.trace = trace;
    return fexec::cli::repl(std::cin, std::cout, std::cerr, opts);
  }
  if (*check) {
    fexec::cli::CheckOptions opts;
    opts.oracle.max_labels = max_labels;
    opts.oracle.faceted = eval;
    opts.json = json;
    return fexec::cli::check_paths(paths, std::cout, std::cerr, opts);
  }

  try {
    auto game = load_game(board1, board2);
    httplib::Server server;
    fexec::service::install_routes(server, game);
    std::cerr << "listening on http://" << host << ":" << port << "\n";
    if (!server.listen(host, port)) {
      std::cerr << "cannot listen on " << host << ":" << port << "\n";
      return fexec::cli::kLanguageError;
    }
  } catch (const fexec::battleship::GameError& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return fexec::cli::kUsageError;
  }
  return 0;
}
