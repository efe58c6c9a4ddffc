#include "cldtc/cli.hpp"

int main(int argc, char** argv)
{
    return cldtc::run_cli(argc, argv);
}
