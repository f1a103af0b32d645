#include <cstdio>
#include <string>
#include <vector>

#include "cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return rainbench::cli::run(rainbench::cli::parse_cli(args));
  } catch (const rainbench::cli::UsageError& e) {
    std::fputs(e.what(), e.exit_code() == 0 ? stdout : stderr);
    std::fputc('\n', e.exit_code() == 0 ? stdout : stderr);
    return e.exit_code();
  }
}
