#include "maxev/cli.hpp"

int main(int argc, char** argv) {
    return maxev::cli::run(argc, argv);
}
