#include "yahil/cli.hpp"

int main(int argc, char** argv)
{
    return yahil::run(argc, argv);
}
