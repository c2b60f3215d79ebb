#ifndef CAUSAL_CPD_CLI_SUPPORT_HPP
#define CAUSAL_CPD_CLI_SUPPORT_HPP

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace ccpd::fixtures {

struct CliResult {
  int code = -1;
  std::string out;
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

/// Runs the CLI binary with `args`; stderr goes to `stderr_file` when given.
inline CliResult run_cli(const std::vector<std::string>& args, const std::string& stderr_file = "/dev/null") {
  std::string cmd = shell_quote(CCPD_CLI_PATH);
  for (const auto& a : args) cmd += " " + shell_quote(a);
  cmd += " 2>" + shell_quote(stderr_file);
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Contents of every regular file under `dir`, keyed by relative path,
/// leaving out manifests and timing files.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (name.find("manifest") != std::string::npos || name == "timing.json") continue;
    out[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace ccpd::fixtures

#endif  // CAUSAL_CPD_CLI_SUPPORT_HPP
