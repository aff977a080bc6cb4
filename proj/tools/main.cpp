#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "roomac/pipeline.hpp"

namespace fs = std::filesystem;
using namespace roomac;

namespace {

// Pairs explicit --labels with paths, defaulting to file stems.
std::vector<pipeline::IrEntry> label_entries(const std::vector<std::string>& paths,
                                             const std::vector<std::string>& labels) {
  if (!labels.empty() && labels.size() != paths.size())
    throw CLI::ValidationError("--labels must match the number of input files");
  std::vector<pipeline::IrEntry> entries;
  for (std::size_t i = 0; i < paths.size(); ++i)
    entries.push_back({labels.empty() ? fs::path(paths[i]).stem().string() : labels[i], paths[i]});
  return entries;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roomac - room acoustics analysis: auralization, feature extraction, "
               "nonmetric MDS and rank correlation"};
  app.require_subcommand(1);

  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (0 = hardware default)");

  // --- run ---
  auto* run = app.add_subcommand("run", "Run the full pipeline from a config or manifest");
  std::string run_config, run_out;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  run->add_option("--config", run_config, "Pipeline config JSON (or a previous manifest.json)")
      ->required();
  run->add_option("--output-dir", run_out, "Output directory")->required();
  run->add_option("--seed", run_seed, "Override the MDS seed")->each([&](const std::string&) {
    run_seed_set = true;
  });

  // --- synth-corpus ---
  auto* synth = app.add_subcommand("synth-corpus", "Generate a synthetic test corpus");
  std::string synth_out;
  pipeline::CorpusParams corpus;
  synth->add_option("--output-dir", synth_out, "Corpus directory")->required();
  synth->add_option("--seed", corpus.seed, "Corpus seed");
  synth->add_option("--items", corpus.items, "Number of impulse responses");
  synth->add_option("--subjects", corpus.subjects, "Number of simulated subjects");

  // --- analyze-ir ---
  auto* analyze = app.add_subcommand("analyze-ir", "RT30/RT20/EDT table and decay curves");
  std::vector<std::string> analyze_irs, analyze_labels;
  std::string analyze_out;
  analyze->add_option("--ir", analyze_irs, "IR WAV files")->required()->expected(-1);
  analyze->add_option("--labels", analyze_labels, "Labels (default: file stems)")->expected(-1);
  analyze->add_option("--output-dir", analyze_out, "Output directory")->required();

  // --- convolve ---
  auto* conv = app.add_subcommand("convolve", "Convolve a dry signal with impulse responses");
  std::string conv_dry, conv_out;
  std::vector<std::string> conv_irs, conv_labels;
  conv->add_option("--dry", conv_dry, "Dry mono WAV")->required();
  conv->add_option("--ir", conv_irs, "IR WAV files")->required()->expected(-1);
  conv->add_option("--labels", conv_labels, "Labels (default: file stems)")->expected(-1);
  conv->add_option("--output-dir", conv_out, "Output directory for <label>.wav")->required();

  // --- features ---
  auto* feat = app.add_subcommand("features", "Feature table from auralized stimuli and IRs");
  std::vector<std::string> feat_stimuli, feat_irs, feat_labels;
  std::string feat_csv, feat_decay;
  feat->add_option("--stimulus", feat_stimuli, "Auralized WAV files")->required()->expected(-1);
  feat->add_option("--ir", feat_irs, "Matching IR WAV files")->required()->expected(-1);
  feat->add_option("--labels", feat_labels, "Labels (default: file stems)")->expected(-1);
  feat->add_option("--out-csv", feat_csv, "Feature table CSV path")->required();
  feat->add_option("--decay-dir", feat_decay, "Directory for decay-curve CSVs");

  // --- mds ---
  auto* mds_cmd = app.add_subcommand("mds", "Nonmetric MDS of a ratings CSV");
  std::string mds_ratings, mds_out;
  pipeline::MdsParams mds_params;
  std::string mds_ties = "primary";
  mds_cmd->add_option("--ratings", mds_ratings, "Ratings CSV")->required();
  mds_cmd->add_option("--output-dir", mds_out, "Output directory")->required();
  mds_cmd->add_option("--max-dimension", mds_params.max_dimension, "Sweep dimensions 1..d");
  mds_cmd->add_option("--restarts", mds_params.restarts, "Random restarts");
  mds_cmd->add_option("--seed", mds_params.seed, "Random seed");
  mds_cmd->add_option("--ties", mds_ties, "Tie policy: primary|secondary");

  // --- correlate ---
  auto* corr = app.add_subcommand("correlate", "Kendall tau-b of MDS dimensions vs features");
  std::string corr_coords, corr_features, corr_diag, corr_prefix;
  corr->add_option("--coords", corr_coords, "Coordinates CSV from the mds stage")->required();
  corr->add_option("--features", corr_features, "Feature table CSV")->required();
  corr->add_option("--diagnostics", corr_diag, "Diagnostics JSON from the mds stage");
  corr->add_option("--out-prefix", corr_prefix, "Output prefix (.csv/.json appended)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = pipeline::load_config(run_config);
      if (run_seed_set) config.mds.seed = run_seed;
      pipeline::run_pipeline(config, run_out, jobs);
      std::cout << "pipeline complete: " << run_out << "\n";
    } else if (*synth) {
      pipeline::synth_corpus(synth_out, corpus);
      std::cout << "corpus written: " << synth_out << "\n";
    } else if (*analyze) {
      const auto entries = label_entries(analyze_irs, analyze_labels);
      pipeline::stage_analyze_ir(entries, (fs::path(analyze_out) / "ir_table.csv").string(),
                                 (fs::path(analyze_out) / "decay").string());
      std::cout << "wrote " << (fs::path(analyze_out) / "ir_table.csv").string() << "\n";
    } else if (*conv) {
      const auto entries = label_entries(conv_irs, conv_labels);
      const auto written = pipeline::stage_convolve(conv_dry, entries, conv_out);
      std::cout << "wrote " << written.size() << " stimuli to " << conv_out << "\n";
    } else if (*feat) {
      if (feat_stimuli.size() != feat_irs.size())
        throw CLI::ValidationError("--stimulus and --ir must list the same number of files");
      const auto stimuli = label_entries(feat_stimuli, feat_labels);
      const auto irs = label_entries(feat_irs, feat_labels);
      pipeline::FeatureParams params;
      pipeline::stage_features(stimuli, irs, params, jobs, feat_csv, feat_decay);
      std::cout << "wrote " << feat_csv << "\n";
    } else if (*mds_cmd) {
      if (mds_ties == "primary")
        mds_params.ties = mds::TiePolicy::Primary;
      else if (mds_ties == "secondary")
        mds_params.ties = mds::TiePolicy::Secondary;
      else
        throw CLI::ValidationError("--ties must be primary or secondary");
      pipeline::stage_mds(mds_ratings, mds_params, jobs, mds_out);
      std::cout << "wrote MDS results to " << mds_out << "\n";
    } else if (*corr) {
      pipeline::stage_correlate(corr_coords, corr_features, corr_diag, corr_prefix + ".csv",
                                corr_prefix + ".json");
      std::cout << "wrote " << corr_prefix << ".csv\n";
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
