#include "apichain/cli.hpp"

int main(int argc, char** argv) {
  return apichain::cli::run(argc, argv);
}
