#include <fstream>
#include <iostream>

#include "cfbell/workbench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    std::cout << "usage: cfbell <command> [--config FILE] [--n N] [--d D] [--family F]\n"
                 "              [--state S] [--phases P] [--seed S] [--starts K] [--tol T]\n"
                 "              [--threads T] [--out FILE] [--format json|csv] [--no-timestamp]\n"
                 "commands:";
    for (const auto& c : cfbell::kCommands) std::cout << ' ' << c;
    std::cout << '\n';
    return args.empty() ? 1 : 0;
  }

  cfbell::RunSpec spec;
  try {
    spec = cfbell::parse_runspec(args);
  } catch (const cfbell::ParseError& e) {
    std::cerr << "cfbell: " << e.what() << '\n';
    return 1;
  }

  const auto outcome = cfbell::run(spec);
  if (spec.out.empty()) {
    std::cout << outcome.body;
  } else {
    std::ofstream out(spec.out, std::ios::binary);
    if (!out) {
      std::cerr << "cfbell: cannot write '" << spec.out << "'\n";
      return 2;
    }
    out << outcome.body;
  }
  if (outcome.exit_status != 0) std::cerr << "cfbell: " << spec.command << " failed\n";
  return outcome.exit_status;
}
