// Writes one of the built-in synthetic typing tasks to a directory.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nfetc/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic entity typing task."};
  std::string preset, dir;
  app.add_option("preset", preset, "overfit, overly_specific or out_of_context")
      ->required()
      ->check(CLI::IsMember({"overfit", "overly_specific", "out_of_context"}));
  app.add_option("dir", dir, "output directory")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const nfetc::SyntheticOptions options = preset == "overfit"         ? nfetc::overfit_options()
                                            : preset == "overly_specific" ? nfetc::overly_specific_options()
                                                                          : nfetc::out_of_context_options();
    nfetc::write_task(nfetc::make_synthetic(options), dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
