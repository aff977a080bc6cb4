#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roomac/complexity.hpp"
#include "roomac/mds.hpp"
#include "roomac/psychoacoustics.hpp"
#include "roomac/signal.hpp"

namespace roomac::pipeline {

struct FeatureParams {
  double full_scale_db = 94.0;     // SPL mapped to digital full scale
  double partial_threshold = 1e-4;
  std::size_t max_partials = 256;
  bool loudness_literal = false;
  psycho::NeighborSet tonality_neighbors = psycho::NeighborSet::AsPrinted;
  complexity::StftConfig echo_stft;
  complexity::EmbeddingConfig embedding;
};

struct MdsParams {
  int max_dimension = 6;
  int restarts = 20;
  std::uint64_t seed = 1;
  mds::TiePolicy ties = mds::TiePolicy::Primary;
};

struct IrEntry {
  std::string label;
  std::string path;
};

struct PipelineConfig {
  std::string dry_path;
  std::string ratings_path;
  std::vector<IrEntry> irs;
  FeatureParams features;
  MdsParams mds;

  // Throws if referenced files are missing or labels collide.
  void validate() const;
};

// Round-trippable JSON form. Relative paths in the file are resolved against
// its directory; `path` may also point at a previous run's manifest, whose
// embedded config is then loaded.
PipelineConfig load_config(const std::string& path);
std::string config_to_json(const PipelineConfig& config);

// One feature-table row: stimulus-side features from the auralized signal
// (channel-averaged), decay times from the IR.
psycho::FeatureVector compute_feature_row(const Signal& stimulus, const ImpulseResponse& ir,
                                          const FeatureParams& params);

// --- stage functions (each reads/writes files; subcommands and run_pipeline
// share these, so staged execution equals the one-shot pipeline) ---

// Convolves the dry signal with every IR; writes <label>.wav into out_dir.
std::vector<std::string> stage_convolve(const std::string& dry_path,
                                        const std::vector<IrEntry>& irs,
                                        const std::string& out_dir);

// Feature table for stimulus/IR pairs matched by label; writes the CSV and
// per-channel decay curves (decay_dir may be empty to skip).
void stage_features(const std::vector<IrEntry>& stimuli, const std::vector<IrEntry>& irs,
                    const FeatureParams& params, int jobs, const std::string& features_csv,
                    const std::string& decay_dir);

// Decay analysis only: ir_table.csv (label,RT30,RT20,EDT) plus decay curves.
void stage_analyze_ir(const std::vector<IrEntry>& irs, const std::string& table_csv,
                      const std::string& decay_dir);

// Dimension sweep plus per-dimension coordinates/diagnostics files.
void stage_mds(const std::string& ratings_path, const MdsParams& params, int jobs,
               const std::string& out_dir);

// Correlates a coordinates CSV with a feature CSV; writes long-form CSV and a
// JSON bundle (diagnostics_json may be empty).
void stage_correlate(const std::string& coords_csv, const std::string& features_csv,
                     const std::string& diagnostics_json, const std::string& out_csv,
                     const std::string& out_json);

// Full pipeline: convolve -> features -> mds -> correlate, then a manifest
// with every parameter and seed needed for an exact rerun. Stage errors abort
// with the stage name; the manifest flags partial outputs.
void run_pipeline(const PipelineConfig& config, const std::string& output_dir, int jobs = 0);

struct CorpusParams {
  std::uint64_t seed = 7;
  int items = 9;
  int subjects = 11;
  int sample_rate = 48000;
};

// Self-contained synthetic corpus: dry signal, binaural IRs, simulated
// ratings and a ready-to-run config.json.
void synth_corpus(const std::string& output_dir, const CorpusParams& params = {});

// Coordinates CSV helpers shared by stage_mds / stage_correlate.
std::string embedding_to_coords_csv(const mds::Embedding& embedding);
mds::Embedding embedding_from_coords_csv(const std::string& text);

}  // namespace roomac::pipeline
