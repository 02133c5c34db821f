#include <vector>

#include "rlscape/cli.hpp"

int main(int argc, char** argv) {
    return rlscape::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
