#include "canm/cli.hpp"

int main(int argc, char** argv)
{
    return canm::cli::run_cli(argc, argv);
}
