#include "v2xsim/cli_app.hpp"

int
main(int argc, char** argv)
{
    return v2xsim::CliMain(argc, argv);
}
