#include <string>
#include <vector>

#include "defaultgap/experiments.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return defaultgap::run_cli(std::move(args));
}
