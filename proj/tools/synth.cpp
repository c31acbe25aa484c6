// pdm_synth: writes C-MAPSS-format surrogate training files
// (train_FD001.txt .. train_FD004.txt) for running the pipeline without the
// real data.

#include "CLI11.hpp"

#include <iostream>

#include "pdm/cmapss.hpp"
#include "pdm/format.hpp"
#include "pdm/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate surrogate C-MAPSS training files"};
  std::string dir = ".";
  std::uint64_t seed = 1;
  std::size_t engines = 0;
  app.add_option("-o,--output-dir", dir, "directory for train_FD00x.txt")->capture_default_str();
  app.add_option("--seed", seed, "base seed; subset i uses seed + i")->capture_default_str();
  app.add_option("--engines", engines, "engines per subset (0 = profile default)");
  CLI11_PARSE(app, argc, argv);

  try {
    const pdm::SubsetLabel labels[] = {pdm::SubsetLabel::FD001, pdm::SubsetLabel::FD002, pdm::SubsetLabel::FD003,
                                       pdm::SubsetLabel::FD004};
    for (std::size_t i = 0; i < 4; ++i) {
      auto spec = pdm::cmapss_like_spec(labels[i]);
      if (engines > 0) spec.engines = engines;
      const auto fleet = pdm::generate_fleet(spec, seed + i);
      const std::string name = "train_" + std::string(pdm::to_string(labels[i])) + ".txt";
      pdm::write_file_atomic(std::filesystem::path(dir) / name, pdm::serialize_measurements(fleet));
      std::cout << name << ": " << fleet.size() << " engines\n";
    }
  } catch (const pdm::Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  }
  return 0;
}
