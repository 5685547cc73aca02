#include "kcport/cli.hpp"

int main(int argc, char** argv)
{
  return kcport::cli::run(argc, argv);
}
