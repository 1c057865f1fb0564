#include <string>
#include <vector>

#include "mixfactor/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mixfactor::run_main(args);
}
