#pragma once

// Command implementations behind the `fexec` binary. Each takes its streams
// explicitly and returns the process exit status, so tests can drive them
// in-process.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fexec/evaluator.hpp"
#include "fexec/oracle.hpp"
#include "fexec/print.hpp"
#include "fexec/reader.hpp"

namespace fexec::cli {

constexpr int kOk = 0;
constexpr int kLanguageError = 1;
constexpr int kUsageError = 2;  // syntax errors, missing files, bad flags

struct RunOptions {
  bool trace = false;
  bool print_store = false;
  EvalOptions eval;
};

inline bool read_file(const std::filesystem::path& p, std::string& out) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::stringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

inline void print_store(const Store& store, std::ostream& out) {
  for (Address a = 0; a < store.size(); ++a) out << "#" << a << " = " << print(store.at(a)) << "\n";
}

inline int run_source(const std::string& text, std::ostream& out, std::ostream& err, const RunOptions& opts = {}) {
  Program program;
  try {
    program = parse_program(text);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kUsageError;
  }
  Interpreter interp(opts.eval);
  interp.set_output(&out);
  if (opts.trace) interp.set_trace([&err](const std::string& line) { err << line << "\n"; });
  int status = kOk;
  try {
    for (const auto& form : program.forms) {
      auto v = interp.run_form(form);
      if (v && !v->is(Kind::Void)) out << print(*v) << "\n";
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    status = kLanguageError;
  }
  if (opts.print_store) print_store(interp.store(), out);
  return status;
}

inline int run_file(const std::string& path, std::ostream& out, std::ostream& err, const RunOptions& opts = {}) {
  std::string text;
  if (!read_file(path, text)) {
    err << "cannot read " << path << "\n";
    return kUsageError;
  }
  return run_source(text, out, err, opts);
}

/// Interactive loop: one form at a time against a persistent environment
/// and store. Lines starting with ':' are meta-commands.
inline int repl(std::istream& in, std::ostream& out, std::ostream& err, RunOptions opts = {}) {
  Reader reader;
  Interpreter interp(opts.eval);
  interp.set_output(&out);
  auto apply_trace = [&] {
    if (opts.trace)
      interp.set_trace([&err](const std::string& line) { err << line << "\n"; });
    else
      interp.set_trace(nullptr);
  };
  apply_trace();

  std::string pending;
  std::string line;
  out << "> " << std::flush;
  while (std::getline(in, line)) {
    if (pending.empty()) {
      std::string cmd = line;
      cmd.erase(0, cmd.find_first_not_of(" \t"));
      cmd.erase(cmd.find_last_not_of(" \t\r") + 1);
      if (!cmd.empty() && cmd[0] == ':') {
        if (cmd == ":quit" || cmd == ":q") return kOk;
        if (cmd == ":trace on" || cmd == ":trace off") {
          opts.trace = cmd == ":trace on";
          apply_trace();
        } else {
          err << "unknown command " << cmd << " (try :trace on, :trace off, :quit)\n";
        }
        out << "> " << std::flush;
        continue;
      }
    }
    pending += line + "\n";
    if (needs_more_input(pending)) continue;
    try {
      for (const auto& form : reader.parse(pending).forms) {
        auto v = interp.run_form(form);
        if (v && !v->is(Kind::Void)) out << print(*v) << "\n";
      }
    } catch (const Error& e) {
      err << e.what() << "\n";
    }
    pending.clear();
    out << "> " << std::flush;
  }
  return kOk;
}

struct CheckOptions {
  OracleOptions oracle;
  bool json = false;
};

/// Expands directories to their *.rkts files, sorted. Returns false if any
/// path does not exist.
inline bool collect_programs(const std::vector<std::string>& paths, std::vector<std::filesystem::path>& files,
                             std::ostream& err) {
  namespace fs = std::filesystem;
  bool ok = true;
  for (const auto& p : paths) {
    std::error_code ec;
    if (fs::is_directory(p, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".rkts") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p, ec)) {
      files.emplace_back(p);
    } else {
      err << "no such file or directory: " << p << "\n";
      ok = false;
    }
  }
  return ok;
}

/// Runs the projection-equivalence oracle over every program. Exit 0 iff
/// nothing failed; unsafe programs are reported as skipped.
inline int check_paths(const std::vector<std::string>& paths, std::ostream& out, std::ostream& err,
                       const CheckOptions& opts = {}) {
  std::vector<std::filesystem::path> files;
  if (!collect_programs(paths, files, err)) return kUsageError;

  int passed = 0, failed = 0, skipped = 0, broken = 0;
  nlohmann::json results = nlohmann::json::array();
  for (const auto& f : files) {
    const std::string id = f.string();
    std::string text;
    if (!read_file(f, text)) {
      err << "cannot read " << id << "\n";
      ++broken;
      continue;
    }
    try {
      OracleReport r = check_projection_equivalence(parse_program(text), id, opts.oracle);
      (r.pass ? passed : failed)++;
      if (opts.json)
        results.push_back(r.json());
      else
        out << r.text();
    } catch (const NotOracleSafe& e) {
      ++skipped;
      if (opts.json)
        results.push_back({{"program", id}, {"skipped", true}, {"reason", e.message()}});
      else
        out << "SKIP " << id << ": " << e.message() << "\n";
    } catch (const SyntaxError& e) {
      ++broken;
      err << id << ": " << e.what() << "\n";
    }
  }
  if (opts.json) {
    out << nlohmann::json{{"results", results},
                          {"passed", passed},
                          {"failed", failed},
                          {"skipped", skipped},
                          {"errors", broken}}
               .dump(2)
        << "\n";
  } else {
    out << passed << " passed, " << failed << " failed, " << skipped << " skipped";
    if (broken) out << ", " << broken << " unreadable";
    out << "\n";
  }
  if (broken) return kUsageError;
  return failed ? kLanguageError : kOk;
}

}  // namespace fexec::cli
