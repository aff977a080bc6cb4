#include "roomac/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "roomac/audio_io.hpp"
#include "roomac/room_acoustics.hpp"
#include "roomac/stats.hpp"
#include "util.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace roomac::pipeline {

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void PipelineConfig::validate() const {
  if (dry_path.empty() || !fs::exists(dry_path))
    throw std::invalid_argument("dry signal not found: " + dry_path);
  if (ratings_path.empty() || !fs::exists(ratings_path))
    throw std::invalid_argument("ratings file not found: " + ratings_path);
  if (irs.empty()) throw std::invalid_argument("no impulse responses configured");
  std::map<std::string, int> seen;
  for (const auto& ir : irs) {
    if (ir.label.empty()) throw std::invalid_argument("IR with empty label");
    if (++seen[ir.label] > 1) throw std::invalid_argument("duplicate IR label: " + ir.label);
    if (!fs::exists(ir.path)) throw std::invalid_argument("IR file not found: " + ir.path);
  }
  const int n = static_cast<int>(irs.size());
  if (mds.max_dimension < 1 || mds.max_dimension > n - 1)
    throw std::invalid_argument("mds.max_dimension must be in [1, items-1]");
  if (mds.restarts < 0) throw std::invalid_argument("mds.restarts must be >= 0");
}

// ---------------------------------------------------------------------------
// Config JSON.

namespace {

std::string resolve_path(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal().string();
  return (base / path).lexically_normal().string();
}

PipelineConfig config_from_json(const ordered_json& j, const fs::path& base) {
  PipelineConfig c;
  c.dry_path = resolve_path(base, j.at("dry").get<std::string>());
  c.ratings_path = resolve_path(base, j.at("ratings").get<std::string>());
  for (const auto& ir : j.at("irs"))
    c.irs.push_back({ir.at("label").get<std::string>(),
                     resolve_path(base, ir.at("path").get<std::string>())});

  if (j.contains("features")) {
    const auto& f = j["features"];
    c.features.full_scale_db = f.value("full_scale_db", c.features.full_scale_db);
    c.features.partial_threshold = f.value("partial_threshold", c.features.partial_threshold);
    c.features.max_partials = f.value("max_partials", c.features.max_partials);
    c.features.loudness_literal = f.value("loudness_literal", c.features.loudness_literal);
    const std::string neighbors = f.value("tonality_neighbors", std::string("as_printed"));
    if (neighbors == "as_printed")
      c.features.tonality_neighbors = psycho::NeighborSet::AsPrinted;
    else if (neighbors == "symmetric")
      c.features.tonality_neighbors = psycho::NeighborSet::Symmetric;
    else
      throw std::invalid_argument("tonality_neighbors must be as_printed or symmetric");
    c.features.echo_stft.window_len = f.value("echo_window", c.features.echo_stft.window_len);
    c.features.echo_stft.hop = f.value("echo_hop", c.features.echo_stft.hop);
    if (f.contains("embedding")) {
      const auto& e = f["embedding"];
      c.features.embedding.delay = e.value("delay", c.features.embedding.delay);
      c.features.embedding.depth = e.value("depth", c.features.embedding.depth);
      c.features.embedding.max_points = e.value("max_points", c.features.embedding.max_points);
      c.features.embedding.q_lo = e.value("q_lo", c.features.embedding.q_lo);
      c.features.embedding.q_hi = e.value("q_hi", c.features.embedding.q_hi);
    }
  }
  if (j.contains("mds")) {
    const auto& m = j["mds"];
    c.mds.max_dimension = m.value("max_dimension", c.mds.max_dimension);
    c.mds.restarts = m.value("restarts", c.mds.restarts);
    c.mds.seed = m.value("seed", c.mds.seed);
    const std::string ties = m.value("ties", std::string("primary"));
    if (ties == "primary")
      c.mds.ties = mds::TiePolicy::Primary;
    else if (ties == "secondary")
      c.mds.ties = mds::TiePolicy::Secondary;
    else
      throw std::invalid_argument("mds.ties must be primary or secondary");
  }
  return c;
}

ordered_json config_json(const PipelineConfig& c) {
  ordered_json irs = ordered_json::array();
  for (const auto& ir : c.irs) irs.push_back({{"label", ir.label}, {"path", ir.path}});
  return ordered_json{
      {"dry", c.dry_path},
      {"ratings", c.ratings_path},
      {"irs", irs},
      {"features",
       {{"full_scale_db", c.features.full_scale_db},
        {"partial_threshold", c.features.partial_threshold},
        {"max_partials", c.features.max_partials},
        {"loudness_literal", c.features.loudness_literal},
        {"tonality_neighbors",
         c.features.tonality_neighbors == psycho::NeighborSet::AsPrinted ? "as_printed"
                                                                         : "symmetric"},
        {"echo_window", c.features.echo_stft.window_len},
        {"echo_hop", c.features.echo_stft.hop},
        {"embedding",
         {{"delay", c.features.embedding.delay},
          {"depth", c.features.embedding.depth},
          {"max_points", c.features.embedding.max_points},
          {"q_lo", c.features.embedding.q_lo},
          {"q_hi", c.features.embedding.q_hi}}}}},
      {"mds",
       {{"max_dimension", c.mds.max_dimension},
        {"restarts", c.mds.restarts},
        {"seed", c.mds.seed},
        {"ties", c.mds.ties == mds::TiePolicy::Primary ? "primary" : "secondary"}}}};
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
  const auto j = ordered_json::parse(read_text_file(path));
  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  // A manifest from a previous run embeds the resolved config.
  if (j.contains("config")) return config_from_json(j["config"], base);
  return config_from_json(j, base);
}

std::string config_to_json(const PipelineConfig& config) { return config_json(config).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Feature extraction.

psycho::FeatureVector compute_feature_row(const Signal& stimulus, const ImpulseResponse& ir,
                                          const FeatureParams& params) {
  stimulus.validate();
  psycho::FeatureVector row;
  row.stimulus = ir.label;

  psycho::LoudnessConfig loudness_cfg;
  loudness_cfg.amplitude_ref = std::pow(10.0, -params.full_scale_db / 20.0);
  loudness_cfg.literal_mean_outside_root = params.loudness_literal;
  row.loudness_db = psycho::loudness(stimulus, loudness_cfg);

  psycho::TonalityConfig tonality_cfg;
  tonality_cfg.neighbors = params.tonality_neighbors;
  tonality_cfg.full_scale_db = params.full_scale_db;

  const double channels = static_cast<double>(stimulus.channel_count());
  for (const auto& ch : stimulus.channels) {
    const Signal mono = make_mono(ch, stimulus.sample_rate);
    const auto spectrum = spectral::magnitude_spectrum(mono);
    row.centroid_hz += psycho::spectral_centroid(spectrum) / channels;
    row.sharpness_acum +=
        psycho::sharpness(spectral::bark_band_levels(spectrum, params.full_scale_db)) / channels;
    row.roughness_hb += psycho::roughness_hb(spectral::extract_partials(
                            spectrum, params.partial_threshold, params.max_partials)) /
                        channels;
    row.tonality_tu += psycho::tonality(spectrum, tonality_cfg) / channels;
    row.roughness_sottek += psycho::roughness_sottek(mono) / channels;
    row.fluctuation += psycho::fluctuation_strength(mono) / channels;
    row.echo_density += complexity::echo_density(mono, params.echo_stft) / channels;
    row.correlation_dim += complexity::correlation_dimension(mono, params.embedding) / channels;
  }

  const auto decay = room::ir_decay_times(ir);
  row.rt30_s = decay.rt30;
  row.rt20_s = decay.rt20;
  row.edt_s = decay.edt;
  return row;
}

// ---------------------------------------------------------------------------
// Stages.

std::vector<std::string> stage_convolve(const std::string& dry_path,
                                        const std::vector<IrEntry>& irs,
                                        const std::string& out_dir) {
  const Signal dry_raw = audio::read_wav(dry_path);
  const Signal dry = dry_raw.is_mono() ? dry_raw : dry_raw.to_mono();
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& entry : irs) {
    ImpulseResponse ir{audio::read_wav(entry.path), entry.label};
    const Signal wet = audio::convolve(dry, ir);
    const std::string path = (fs::path(out_dir) / (entry.label + ".wav")).string();
    audio::write_wav(wet, path);
    written.push_back(path);
  }
  return written;
}

namespace {

void write_decay_curves(const IrEntry& entry, const Signal& ir_signal,
                        const std::string& decay_dir) {
  for (int c = 0; c < ir_signal.channel_count(); ++c) {
    const auto curve =
        room::schroeder_decay(make_mono(ir_signal.channels[static_cast<std::size_t>(c)],
                                        ir_signal.sample_rate));
    const std::string path =
        (fs::path(decay_dir) / (entry.label + "_ch" + std::to_string(c + 1) + ".csv")).string();
    write_text_file(path, room::decay_to_csv(curve));
  }
}

}  // namespace

void stage_features(const std::vector<IrEntry>& stimuli, const std::vector<IrEntry>& irs,
                    const FeatureParams& params, int jobs, const std::string& features_csv,
                    const std::string& decay_dir) {
  if (stimuli.size() != irs.size())
    throw std::invalid_argument("stimulus and IR lists must have equal length");
  std::map<std::string, std::string> ir_by_label;
  for (const auto& ir : irs) ir_by_label[ir.label] = ir.path;

  psycho::FeatureTable table;
  table.rows.resize(stimuli.size());
  util::parallel_for(stimuli.size(), jobs, [&](std::size_t i) {
    const auto& stim = stimuli[i];
    auto it = ir_by_label.find(stim.label);
    if (it == ir_by_label.end())
      throw std::invalid_argument("no IR matches stimulus label: " + stim.label);
    const Signal stimulus = audio::read_wav(stim.path);
    ImpulseResponse ir{audio::read_wav(it->second), stim.label};
    table.rows[i] = compute_feature_row(stimulus, ir, params);
  });

  write_text_file(features_csv, psycho::feature_table_to_csv(table));
  if (!decay_dir.empty()) {
    for (const auto& entry : irs)
      write_decay_curves(entry, audio::read_wav(ir_by_label[entry.label]), decay_dir);
  }
}

void stage_analyze_ir(const std::vector<IrEntry>& irs, const std::string& table_csv,
                      const std::string& decay_dir) {
  std::string csv = "stimulus,RT30,RT20,EDT\n";
  for (const auto& entry : irs) {
    ImpulseResponse ir{audio::read_wav(entry.path), entry.label};
    const auto t = room::ir_decay_times(ir);
    csv += entry.label + ',' + util::format_double(t.rt30) + ',' + util::format_double(t.rt20) +
           ',' + util::format_double(t.edt) + '\n';
    if (!decay_dir.empty()) write_decay_curves(entry, ir.signal, decay_dir);
  }
  write_text_file(table_csv, csv);
}

std::string embedding_to_coords_csv(const mds::Embedding& embedding) {
  std::string out = "item";
  for (int k = 0; k < embedding.dimension; ++k) out += ",dim" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t i = 0; i < embedding.items.size(); ++i) {
    out += embedding.items[i];
    for (int k = 0; k < embedding.dimension; ++k) {
      out += ',';
      out += util::format_double(embedding.coords[i][static_cast<std::size_t>(k)]);
    }
    out += '\n';
  }
  return out;
}

mds::Embedding embedding_from_coords_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty coordinates CSV");
  std::istringstream header(line);
  std::string field;
  std::vector<std::string> columns;
  while (std::getline(header, field, ',')) columns.push_back(field);
  if (columns.empty() || columns[0] != "item")
    throw std::invalid_argument("unexpected coordinates CSV header: " + line);

  mds::Embedding e;
  e.dimension = static_cast<int>(columns.size()) - 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != columns.size())
      throw std::invalid_argument("malformed coordinates row: " + line);
    e.items.push_back(fields[0]);
    std::vector<double> coords;
    for (std::size_t k = 1; k < fields.size(); ++k) coords.push_back(util::parse_double(fields[k]));
    e.coords.push_back(std::move(coords));
  }
  return e;
}

void stage_mds(const std::string& ratings_path, const MdsParams& params, int jobs,
               const std::string& out_dir) {
  const auto ratings = mds::ratings_from_csv(read_text_file(ratings_path));
  mds::FitOptions options;
  options.restarts = params.restarts;
  options.seed = params.seed;
  options.ties = params.ties;
  options.jobs = jobs;

  std::string sweep = "dimension,aggregate_stress1,mean_rsq,fit\n";
  for (int d = 1; d <= params.max_dimension; ++d) {
    const auto e = mds::fit_mds(ratings, d, options);
    sweep += std::to_string(d) + ',' + util::format_double(e.aggregate_stress1) + ',' +
             util::format_double(e.mean_rsq) + ',' + mds::classify_stress(e.aggregate_stress1) +
             '\n';
    write_text_file((fs::path(out_dir) / ("coords_d" + std::to_string(d) + ".csv")).string(),
                    embedding_to_coords_csv(e));
    ordered_json diag{{"dimension", e.dimension},
                      {"items", e.items},
                      {"per_subject_stress1", e.per_subject_stress1},
                      {"aggregate_stress1", e.aggregate_stress1},
                      {"per_subject_rsq", e.per_subject_rsq},
                      {"mean_rsq", e.mean_rsq},
                      {"fit", mds::classify_stress(e.aggregate_stress1)}};
    write_text_file((fs::path(out_dir) / ("diagnostics_d" + std::to_string(d) + ".json")).string(),
                    diag.dump(2) + "\n");
  }
  write_text_file((fs::path(out_dir) / "sweep.csv").string(), sweep);
}

void stage_correlate(const std::string& coords_csv, const std::string& features_csv,
                     const std::string& diagnostics_json, const std::string& out_csv,
                     const std::string& out_json) {
  const auto embedding = embedding_from_coords_csv(read_text_file(coords_csv));
  const auto features = psycho::feature_table_from_csv(read_text_file(features_csv));
  const auto matrix = stats::correlation_matrix(embedding, features);
  write_text_file(out_csv, stats::correlation_to_csv(matrix));

  ordered_json cells = ordered_json::array();
  for (std::size_t r = 0; r < matrix.cells.size(); ++r)
    for (std::size_t c = 0; c < matrix.cells[r].size(); ++c)
      cells.push_back({{"dimension", matrix.row_labels[r]},
                       {"feature", matrix.column_labels[c]},
                       {"tau_b", matrix.cells[r][c].tau_b},
                       {"p_value", matrix.cells[r][c].p_value},
                       {"n", matrix.cells[r][c].n}});
  ordered_json j{{"note",
                  "MDS axis signs are arbitrary; interpret |tau_b|, the sign only fixes the "
                  "orientation of the reported solution"},
                 {"cells", cells}};
  if (!diagnostics_json.empty()) {
    const auto diag = ordered_json::parse(read_text_file(diagnostics_json));
    j["aggregate_stress1"] = diag.at("aggregate_stress1");
    j["fit"] = diag.at("fit");
  }
  write_text_file(out_json, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Full pipeline.

void run_pipeline(const PipelineConfig& config, const std::string& output_dir, int jobs) {
  config.validate();
  fs::create_directories(output_dir);
  const fs::path out(output_dir);

  ordered_json stages = ordered_json::array();
  auto relative = [&](const std::string& p) {
    return fs::path(p).lexically_relative(out).generic_string();
  };
  auto write_manifest = [&](const std::string& status, const std::string& failed_stage,
                            const std::string& message) {
    ordered_json manifest{{"tool", "roomac"},
                          {"version", kToolVersion},
                          {"status", status},
                          {"config", config_json(config)},
                          {"stages", stages}};
    if (!failed_stage.empty())
      manifest["error"] = ordered_json{{"stage", failed_stage}, {"message", message}};
    write_text_file((out / "manifest.json").string(), manifest.dump(2) + "\n");
  };

  std::string current_stage;
  try {
    current_stage = "convolve";
    const auto stimulus_paths = stage_convolve(config.dry_path, config.irs,
                                               (out / "stimuli").string());
    std::vector<IrEntry> stimuli;
    ordered_json convolve_outputs = ordered_json::array();
    for (std::size_t i = 0; i < config.irs.size(); ++i) {
      stimuli.push_back({config.irs[i].label, stimulus_paths[i]});
      convolve_outputs.push_back(relative(stimulus_paths[i]));
    }
    stages.push_back({{"name", "convolve"}, {"status", "ok"}, {"outputs", convolve_outputs}});

    current_stage = "features";
    const std::string features_csv = (out / "features.csv").string();
    stage_features(stimuli, config.irs, config.features, jobs, features_csv,
                   (out / "decay").string());
    stages.push_back({{"name", "features"},
                      {"status", "ok"},
                      {"outputs", {"features.csv", "decay/"}}});

    current_stage = "mds";
    stage_mds(config.ratings_path, config.mds, jobs, (out / "mds").string());
    stages.push_back({{"name", "mds"}, {"status", "ok"}, {"outputs", {"mds/"}}});

    current_stage = "correlate";
    ordered_json corr_outputs = ordered_json::array();
    for (int d = 1; d <= config.mds.max_dimension; ++d) {
      const std::string tag = "_d" + std::to_string(d);
      stage_correlate((out / "mds" / ("coords" + tag + ".csv")).string(), features_csv,
                      (out / "mds" / ("diagnostics" + tag + ".json")).string(),
                      (out / "correlation" / ("correlation" + tag + ".csv")).string(),
                      (out / "correlation" / ("correlation" + tag + ".json")).string());
      corr_outputs.push_back("correlation/correlation" + tag + ".csv");
    }
    stages.push_back({{"name", "correlate"}, {"status", "ok"}, {"outputs", corr_outputs}});
  } catch (const std::exception& ex) {
    stages.push_back({{"name", current_stage}, {"status", "failed"}});
    write_manifest("failed", current_stage, ex.what());
    throw std::runtime_error("[" + current_stage + "] " + ex.what());
  }

  write_manifest("ok", "", "");
}

// ---------------------------------------------------------------------------
// Synthetic corpus.

namespace {

// Short plucked phrase: a few decaying harmonic tones with distinct onsets.
Signal synth_dry_phrase(int sample_rate, std::uint64_t seed) {
  const double duration = 2.0;
  const std::size_t n = static_cast<std::size_t>(duration * sample_rate);
  std::vector<double> out(n, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> detune(-0.002, 0.002);

  const double onsets[4] = {0.0, 0.5, 1.0, 1.5};
  const double fundamentals[4] = {220.0, 293.66, 329.63, 246.94};
  for (int note = 0; note < 4; ++note) {
    const std::size_t start = static_cast<std::size_t>(onsets[note] * sample_rate);
    const double f0 = fundamentals[note] * (1.0 + detune(rng));
    for (int h = 1; h <= 8; ++h) {
      const double amp = 0.25 / h;
      const double w = 2.0 * std::numbers::pi * f0 * h / sample_rate;
      if (f0 * h > 0.45 * sample_rate) break;
      for (std::size_t i = start; i < n; ++i) {
        const double t = static_cast<double>(i - start) / sample_rate;
        out[i] += amp * std::exp(-t / 0.35) * std::sin(w * static_cast<double>(i - start));
      }
    }
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  for (double& v : out) v *= 0.6 / peak;
  return make_mono(std::move(out), sample_rate);
}

}  // namespace

void synth_corpus(const std::string& output_dir, const CorpusParams& params) {
  if (params.items < 4) throw std::invalid_argument("corpus needs at least 4 items");
  if (params.subjects < 1) throw std::invalid_argument("corpus needs at least 1 subject");
  const fs::path out(output_dir);
  fs::create_directories(out / "ir");

  const Signal dry = synth_dry_phrase(params.sample_rate, util::derive_seed(params.seed, 1));
  audio::write_wav(dry, (out / "dry.wav").string());

  // Three venue groups with distinct base decay, three positions each.
  std::vector<IrEntry> irs;
  std::vector<std::array<double, 2>> latent;  // drives the simulated ratings
  std::mt19937_64 rng(util::derive_seed(params.seed, 2));
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  const char venue_names[3] = {'A', 'B', 'C'};
  const double venue_t60[3] = {0.9, 1.3, 1.9};
  for (int i = 0; i < params.items; ++i) {
    const int venue = i % 3;
    const int position = i / 3 + 1;
    const double t60 = venue_t60[venue] * (1.0 + jitter(rng));
    const double direct = 0.35 + 0.2 * jitter(rng) + 0.08 * position;
    const std::string label = std::string(1, venue_names[venue]) + std::to_string(position);

    ImpulseResponse ir = audio::synth_exponential_ir(
        t60, 1.25 * t60, params.sample_rate, util::derive_seed(params.seed, 3, static_cast<std::uint64_t>(i)), 2,
        label);
    // Direct sound plus a couple of early reflections on top of the tail.
    for (auto& ch : ir.signal.channels) {
      for (double& v : ch) v *= 0.05;
      ch[0] += direct;
      const std::size_t r1 = static_cast<std::size_t>(0.008 * params.sample_rate);
      const std::size_t r2 = static_cast<std::size_t>(0.019 * params.sample_rate);
      if (r1 < ch.size()) ch[r1] += 0.4 * direct;
      if (r2 < ch.size()) ch[r2] += 0.25 * direct;
    }
    audio::write_wav(ir.signal, (out / "ir" / (label + ".wav")).string());
    irs.push_back({label, (out / "ir" / (label + ".wav")).string()});
    latent.push_back({t60, direct});
  }

  // Simulated ratings: distances in the latent plane plus per-subject noise,
  // binned onto the 7-point scale.
  mds::RatingSet ratings;
  for (const auto& ir : irs) ratings.items.push_back(ir.label);
  const std::size_t n = ratings.items.size();
  std::vector<double> true_dist(n * (n - 1) / 2);
  {
    double t_lo = 1e9, t_hi = -1e9, d_lo = 1e9, d_hi = -1e9;
    for (const auto& l : latent) {
      t_lo = std::min(t_lo, l[0]);
      t_hi = std::max(t_hi, l[0]);
      d_lo = std::min(d_lo, l[1]);
      d_hi = std::max(d_hi, l[1]);
    }
    std::size_t p = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++p) {
        const double dt = (latent[i][0] - latent[j][0]) / std::max(t_hi - t_lo, 1e-9);
        const double dd = (latent[i][1] - latent[j][1]) / std::max(d_hi - d_lo, 1e-9);
        true_dist[p] = std::sqrt(dt * dt + dd * dd);
      }
  }
  std::mt19937_64 subject_rng(util::derive_seed(params.seed, 4));
  std::normal_distribution<double> noise(0.0, 0.12);
  for (int s = 0; s < params.subjects; ++s) {
    std::vector<double> noisy(true_dist.size());
    for (std::size_t p = 0; p < noisy.size(); ++p)
      noisy[p] = true_dist[p] * (1.0 + noise(subject_rng)) + 0.02 * noise(subject_rng);
    const auto [lo_it, hi_it] = std::minmax_element(noisy.begin(), noisy.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> likert(noisy.size());
    for (std::size_t p = 0; p < noisy.size(); ++p) {
      const double u = (noisy[p] - lo) / std::max(hi - lo, 1e-12);
      likert[p] = 1.0 + std::floor(std::min(u * 7.0, 6.999));
    }
    ratings.subjects.push_back(std::move(likert));
  }
  write_text_file((out / "ratings.csv").string(), mds::ratings_to_csv(ratings));

  PipelineConfig config;
  config.dry_path = (out / "dry.wav").string();
  config.ratings_path = (out / "ratings.csv").string();
  config.irs = irs;
  config.mds.max_dimension = std::min(6, params.items - 1);
  config.mds.seed = params.seed;
  // Keep the config relocatable: reference corpus files relative to it.
  ordered_json j = config_json(config);
  j["dry"] = "dry.wav";
  j["ratings"] = "ratings.csv";
  for (std::size_t i = 0; i < config.irs.size(); ++i)
    j["irs"][i]["path"] = "ir/" + config.irs[i].label + ".wav";
  write_text_file((out / "config.json").string(), j.dump(2) + "\n");
}

}  // namespace roomac::pipeline
