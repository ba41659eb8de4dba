// idamp_cli run <config.json> | scan <config.json> | report <dir>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "idamp/idamp.h"

int main(int argc, char** argv) {
  CLI::App app{"inviscid damping experiments"};
  app.require_subcommand(1);
  std::string config, dir, tasks;

  auto* run = app.add_subcommand("run", "run every task listed in the config");
  run->add_option("config", config, "config JSON")->required();
  run->add_option("--tasks", tasks, "comma separated task override");
  auto* scan = app.add_subcommand("scan", "run only the spectrum scan of the config");
  scan->add_option("config", config, "config JSON")->required();
  auto* report = app.add_subcommand("report", "verify and summarize a run directory");
  report->add_option("dir", dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  int exit_code = 0;
  if (*run || *scan) {
    const char* over = *scan ? "scan" : (tasks.empty() ? nullptr : tasks.c_str());
    int rc = idamp_run(config.c_str(), over, &exit_code);
    if (rc != 0) {
      std::fprintf(stderr, "error: %s\n", idamp_last_error());
      return 4;
    }
    if (exit_code == 2 || exit_code == 4) std::fprintf(stderr, "error: %s\n", idamp_last_error());
    else std::printf("%s\n", exit_code == 0 ? "all checks passed" : "acceptance checks failed");
    return exit_code;
  }
  size_t needed = 0;
  int rc = idamp_report(dir.c_str(), nullptr, 0, &needed, &exit_code);
  if (rc != 0) {
    std::fprintf(stderr, "error: %s\n", idamp_last_error());
    return 4;
  }
  std::vector<char> buf(needed);
  idamp_report(dir.c_str(), buf.data(), buf.size(), &needed, &exit_code);
  std::fputs(buf.data(), stdout);
  return exit_code;
}
