// hft_synth: writes the synthetic train/validation/test corpora.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hft/error.hpp"
#include "hft/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic fake-news corpus"};
  std::string kind = "separable";
  std::string out;
  hft::SyntheticOptions options;
  app.add_option("--kind", kind, "separable | noisy | complementary");
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--seed", options.seed, "Generator seed");
  app.add_option("--train", options.train, "Training examples");
  app.add_option("--validation", options.validation, "Validation examples");
  app.add_option("--test", options.test, "Test examples");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = hft::make_synthetic(hft::parse_synthetic_kind(kind), options);
    std::filesystem::create_directories(out);
    auto write = [&](const char* name, const auto& rows) {
      std::ofstream f(std::filesystem::path(out) / name, std::ios::binary);
      hft::write_dataset(f, rows);
    };
    write("train.tsv", corpus.train);
    write("validation.tsv", corpus.validation);
    write("test.tsv", corpus.test);
  } catch (const hft::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
