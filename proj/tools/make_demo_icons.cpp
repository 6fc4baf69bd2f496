// Regenerates resources/icons from the built-in demo drawings.
#include <iostream>

#include "actbench/screenparse.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_demo_icons <output-dir>\n";
    return 2;
  }
  const auto library = actbench::screenparse::demo_icon_library();
  actbench::screenparse::save_icon_library(library, argv[1]);
  std::cout << "wrote " << library.size() << " icons to " << argv[1] << "\n";
  return 0;
}
