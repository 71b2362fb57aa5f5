#pragma once
// Runs the CLI binary as a subprocess, offline, with a scratch HOME.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cli {

struct Result {
  int code = -1;
  std::string out;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// args are split on spaces; @DATA@ and @TMP@ are substituted first
inline Result run(const std::string& args, const std::string& scratch, bool offline_flag = true) {
  std::string a = args;
  for (auto [key, val] : std::vector<std::pair<std::string, std::string>>{{"@DATA@", ACYC_DATA_DIR}, {"@TMP@", scratch}})
    for (size_t pos; (pos = a.find(key)) != std::string::npos;) a.replace(pos, key.size(), val);
  std::string cmd = "env -u CONFIG_PATH -u OFFLINE -u XDG_CACHE_HOME HOME=" + shell_quote(scratch) + " " +
                    shell_quote(ACYC_CLI_PATH) + (offline_flag ? " --offline --json" : " --json");
  std::istringstream is(a);
  for (std::string tok; is >> tok;) cmd += " " + shell_quote(tok);
  cmd += " 2>/dev/null";
  Result r;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  std::array<char, 4096> buf;
  for (size_t n; (n = fread(buf.data(), 1, buf.size(), f)) > 0;) r.out.append(buf.data(), n);
  int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

struct Case {
  int expected;
  std::string args;
};

inline std::vector<Case> suite() {
  std::ifstream in(std::string(ACYC_TEST_DIR) + "/cli_suite.txt");
  std::vector<Case> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    out.push_back({std::stoi(line.substr(0, tab)), line.substr(tab + 1)});
  }
  return out;
}

inline std::string scratch_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("acyc-" + tag + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace cli
