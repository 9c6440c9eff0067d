#include "specweave/bench.hpp"

int
main(int argc, char** argv)
{
  return specweave::cli_main(argc, argv);
}
