#include "ddsc/cli.hpp"

int main(int argc, char** argv) {
  return ddsc::cli_main({argv + 1, argv + argc});
}
