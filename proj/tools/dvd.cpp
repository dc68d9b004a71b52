#include <iostream>
#include <string>
#include <vector>

#include "dvd/exp.hpp"

int main(int argc, char** argv) {
    const std::string usage =
        "usage: dvd <run|sweep|oracle|report> [flags]\n"
        "  run     execute one experiment across seeds\n"
        "  sweep   cross-product sweep over one axis\n"
        "  oracle  run the theory oracles, emit a JSON verdict\n"
        "  report  aggregate a directory of JSONL runs\n";
    if (argc < 2) {
        std::cerr << usage;
        return 2;
    }
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    if (cmd == "run") return dvd::cli_run(args);
    if (cmd == "sweep") return dvd::cli_sweep(args);
    if (cmd == "oracle") return dvd::cli_oracle(args);
    if (cmd == "report") return dvd::cli_report(args);
    if (cmd == "-h" || cmd == "--help") {
        std::cout << usage;
        return 0;
    }
    std::cerr << "unknown command '" << cmd << "'\n" << usage;
    return 2;
}
