// Writes the two-class synthetic image dataset used by the examples and tests.

#include <iostream>

#include "CLI11.hpp"
#include "ensemble/error.hpp"
#include "ensemble/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic two-class image dataset"};
  ensemble::SyntheticSpec spec;
  std::string dir;
  app.add_option("dir", dir, "Output directory")->required();
  app.add_option("--negatives", spec.negatives, "Images labeled -1");
  app.add_option("--positives", spec.positives, "Images labeled +1");
  app.add_option("--side", spec.side, "Image side in pixels");
  app.add_option("--seed", spec.seed, "Generator seed");
  CLI11_PARSE(app, argc, argv);
  try {
    std::cout << ensemble::write_synthetic_dataset(dir, spec).string() << "\n";
  } catch (const ensemble::Error& e) {
    std::cerr << "make_synthetic: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
