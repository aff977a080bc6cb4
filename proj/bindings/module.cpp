#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "roomac/audio_io.hpp"
#include "roomac/complexity.hpp"
#include "roomac/mds.hpp"
#include "roomac/pipeline.hpp"
#include "roomac/psychoacoustics.hpp"
#include "roomac/room_acoustics.hpp"
#include "roomac/signal.hpp"
#include "roomac/spectral.hpp"
#include "roomac/stats.hpp"

namespace py = pybind11;
using namespace roomac;

namespace {

std::vector<std::vector<double>> channels_from_array(const py::array_t<double>& a) {
  const auto buf = a.request();
  std::vector<std::vector<double>> channels;
  const double* data = static_cast<const double*>(buf.ptr);
  if (buf.ndim == 1) {
    channels.emplace_back(data, data + buf.shape[0]);
  } else if (buf.ndim == 2) {
    for (py::ssize_t c = 0; c < buf.shape[0]; ++c) {
      std::vector<double> ch(static_cast<std::size_t>(buf.shape[1]));
      for (py::ssize_t i = 0; i < buf.shape[1]; ++i)
        ch[static_cast<std::size_t>(i)] =
            data[c * (buf.strides[0] / sizeof(double)) + i * (buf.strides[1] / sizeof(double))];
      channels.push_back(std::move(ch));
    }
  } else {
    throw std::invalid_argument("samples must be a 1-d or 2-d array");
  }
  return channels;
}

py::array_t<double> array_from_channels(const std::vector<std::vector<double>>& channels) {
  const py::ssize_t rows = static_cast<py::ssize_t>(channels.size());
  const py::ssize_t cols = rows ? static_cast<py::ssize_t>(channels.front().size()) : 0;
  py::array_t<double> out({rows, cols});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t c = 0; c < rows; ++c)
    for (py::ssize_t i = 0; i < cols; ++i)
      view(c, i) = channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)];
  return out;
}

py::array_t<double> array_from_vector(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> array_from_matrix(const std::vector<std::vector<double>>& m) {
  return array_from_channels(m);
}

spectral::PartialList partials_from_array(const py::array_t<double>& a) {
  const auto buf = a.request();
  if (buf.ndim != 2 || buf.shape[1] != 2)
    throw std::invalid_argument("partials must be an (n, 2) array of (freq, amp)");
  spectral::PartialList partials;
  auto view = a.unchecked<2>();
  for (py::ssize_t i = 0; i < buf.shape[0]; ++i) partials.push_back({view(i, 0), view(i, 1)});
  return partials;
}

psycho::NeighborSet neighbor_set(const std::string& name) {
  if (name == "as_printed") return psycho::NeighborSet::AsPrinted;
  if (name == "symmetric") return psycho::NeighborSet::Symmetric;
  throw std::invalid_argument("neighbors must be 'as_printed' or 'symmetric'");
}

mds::TiePolicy tie_policy(const std::string& name) {
  if (name == "primary") return mds::TiePolicy::Primary;
  if (name == "secondary") return mds::TiePolicy::Secondary;
  throw std::invalid_argument("ties must be 'primary' or 'secondary'");
}

}  // namespace

PYBIND11_MODULE(_roomac, m) {
  m.doc() = "Room acoustics analysis: auralization, psychoacoustic features, "
            "nonmetric MDS and rank correlation";

  py::class_<Signal>(m, "Signal")
      .def(py::init([](const py::array_t<double>& samples, int sample_rate) {
             Signal s(channels_from_array(samples), sample_rate);
             s.validate();
             return s;
           }),
           py::arg("samples"), py::arg("sample_rate"))
      .def_property_readonly("samples", [](const Signal& s) { return array_from_channels(s.channels); })
      .def_readonly("sample_rate", &Signal::sample_rate)
      .def_property_readonly("channels", &Signal::channel_count)
      .def("__len__", &Signal::length)
      .def_property_readonly("duration", &Signal::duration)
      .def("to_mono", &Signal::to_mono);

  py::class_<ImpulseResponse>(m, "ImpulseResponse")
      .def(py::init([](const Signal& signal, const std::string& label) {
             return ImpulseResponse{signal, label};
           }),
           py::arg("signal"), py::arg("label") = "ir")
      .def_readonly("signal", &ImpulseResponse::signal)
      .def_readonly("label", &ImpulseResponse::label);

  py::class_<spectral::Spectrum>(m, "Spectrum")
      .def_property_readonly("freqs",
                             [](const spectral::Spectrum& s) { return array_from_vector(s.freqs); })
      .def_property_readonly("mags",
                             [](const spectral::Spectrum& s) { return array_from_vector(s.mags); });

  py::class_<spectral::Spectrogram>(m, "Spectrogram")
      .def_property_readonly(
          "freqs", [](const spectral::Spectrogram& s) { return array_from_vector(s.freqs); })
      .def_property_readonly(
          "mags", [](const spectral::Spectrogram& s) { return array_from_matrix(s.mags); })
      .def_property_readonly(
          "phases", [](const spectral::Spectrogram& s) { return array_from_matrix(s.phases); })
      .def_readonly("hop_seconds", &spectral::Spectrogram::hop_seconds)
      .def_readonly("window_len", &spectral::Spectrogram::window_len);

  py::class_<spectral::BarkBands>(m, "BarkBands")
      .def_property_readonly("levels",
                             [](const spectral::BarkBands& b) {
                               return array_from_vector(
                                   std::vector<double>(b.levels.begin(), b.levels.end()));
                             })
      .def_property_readonly("energies", [](const spectral::BarkBands& b) {
        return array_from_vector(std::vector<double>(b.energies.begin(), b.energies.end()));
      });

  py::class_<room::DecayCurve>(m, "DecayCurve")
      .def_property_readonly("times",
                             [](const room::DecayCurve& c) { return array_from_vector(c.times); })
      .def_property_readonly("level_db", [](const room::DecayCurve& c) {
        return array_from_vector(c.level_db);
      });

  py::class_<psycho::FeatureVector>(m, "FeatureVector")
      .def_readonly("stimulus", &psycho::FeatureVector::stimulus)
      .def_readonly("N", &psycho::FeatureVector::loudness_db)
      .def_readonly("S", &psycho::FeatureVector::sharpness_acum)
      .def_readonly("R_S", &psycho::FeatureVector::roughness_sottek)
      .def_readonly("R_B", &psycho::FeatureVector::roughness_hb)
      .def_readonly("F", &psycho::FeatureVector::fluctuation)
      .def_readonly("K", &psycho::FeatureVector::tonality_tu)
      .def_readonly("C", &psycho::FeatureVector::centroid_hz)
      .def_readonly("RT30", &psycho::FeatureVector::rt30_s)
      .def_readonly("RT20", &psycho::FeatureVector::rt20_s)
      .def_readonly("EDT", &psycho::FeatureVector::edt_s)
      .def_readonly("E", &psycho::FeatureVector::echo_density)
      .def_readonly("D", &psycho::FeatureVector::correlation_dim);

  py::class_<mds::RatingSet>(m, "RatingSet")
      .def(py::init([](const std::vector<std::string>& items,
                       const std::vector<std::vector<double>>& subjects) {
             mds::RatingSet rs;
             rs.items = items;
             rs.subjects = subjects;
             rs.validate();
             return rs;
           }),
           py::arg("items"), py::arg("subjects"),
           "subjects: per subject, n(n-1)/2 upper-triangular ratings in [1, 7]")
      .def_readonly("items", &mds::RatingSet::items)
      .def_readonly("subjects", &mds::RatingSet::subjects);

  py::class_<mds::Embedding>(m, "Embedding")
      .def_property_readonly("coords",
                             [](const mds::Embedding& e) { return array_from_matrix(e.coords); })
      .def_readonly("items", &mds::Embedding::items)
      .def_readonly("dimension", &mds::Embedding::dimension)
      .def_readonly("per_subject_stress1", &mds::Embedding::per_subject_stress1)
      .def_readonly("aggregate_stress1", &mds::Embedding::aggregate_stress1)
      .def_readonly("per_subject_rsq", &mds::Embedding::per_subject_rsq)
      .def_readonly("mean_rsq", &mds::Embedding::mean_rsq);

  py::class_<stats::CorrelationCell>(m, "CorrelationCell")
      .def_readonly("tau_b", &stats::CorrelationCell::tau_b)
      .def_readonly("p_value", &stats::CorrelationCell::p_value)
      .def_readonly("n", &stats::CorrelationCell::n);

  // audio_io
  m.def("read_wav", &audio::read_wav, py::arg("path"));
  m.def("write_wav", &audio::write_wav, py::arg("signal"), py::arg("path"));
  m.def("convolve", &audio::convolve, py::arg("dry"), py::arg("ir"));
  m.def("synth_exponential_ir", &audio::synth_exponential_ir, py::arg("t60"), py::arg("duration"),
        py::arg("sample_rate"), py::arg("seed"), py::arg("channels") = 1,
        py::arg("label") = "synthetic");
  m.def("synth_tone", &audio::synth_tone, py::arg("freq_hz"), py::arg("duration"),
        py::arg("sample_rate"), py::arg("amplitude") = 1.0, py::arg("phase") = 0.0);
  m.def("synth_am_tone", &audio::synth_am_tone, py::arg("carrier_hz"), py::arg("mod_hz"),
        py::arg("mod_depth"), py::arg("duration"), py::arg("sample_rate"), py::arg("amplitude"));
  m.def("synth_white_noise", &audio::synth_white_noise, py::arg("duration"),
        py::arg("sample_rate"), py::arg("seed"), py::arg("amplitude") = 1.0);
  m.def("amplitude_for_db_spl", &audio::amplitude_for_db_spl, py::arg("db_spl"),
        py::arg("full_scale_db") = 94.0);

  // spectral
  m.def("magnitude_spectrum", &spectral::magnitude_spectrum, py::arg("signal"));
  m.def("stft", &spectral::stft, py::arg("signal"), py::arg("window_len"), py::arg("hop"));
  m.def(
      "extract_partials",
      [](const spectral::Spectrum& s, double threshold_rel, std::size_t max_partials) {
        const auto partials = spectral::extract_partials(s, threshold_rel, max_partials);
        py::array_t<double> out({static_cast<py::ssize_t>(partials.size()), py::ssize_t(2)});
        auto view = out.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(partials.size()); ++i) {
          view(i, 0) = partials[static_cast<std::size_t>(i)].freq;
          view(i, 1) = partials[static_cast<std::size_t>(i)].amp;
        }
        return out;
      },
      py::arg("spectrum"), py::arg("threshold_rel") = 1e-4, py::arg("max_partials") = 256);
  m.def("bark_band_levels", &spectral::bark_band_levels, py::arg("spectrum"),
        py::arg("full_scale_db") = spectral::kFullScaleDb);

  // psychoacoustics
  m.def("spectral_centroid", &psycho::spectral_centroid, py::arg("spectrum"));
  m.def(
      "roughness_hb",
      [](const py::array_t<double>& partials) {
        return psycho::roughness_hb(partials_from_array(partials));
      },
      py::arg("partials"), "partials: (n, 2) array of (freq_hz, amplitude)");
  m.def("sharpness", &psycho::sharpness, py::arg("bands"));
  m.def(
      "loudness",
      [](const Signal& s, double amplitude_ref, bool literal) {
        psycho::LoudnessConfig cfg;
        cfg.amplitude_ref = amplitude_ref;
        cfg.literal_mean_outside_root = literal;
        return psycho::loudness(s, cfg);
      },
      py::arg("signal"), py::arg("amplitude_ref") = psycho::kDefaultAmplitudeRef,
      py::arg("literal") = false);
  m.def("roughness_sottek", &psycho::roughness_sottek, py::arg("signal"));
  m.def("fluctuation_strength", &psycho::fluctuation_strength, py::arg("signal"));
  m.def(
      "tonality",
      [](const spectral::Spectrum& s, const std::string& neighbors, double full_scale_db) {
        psycho::TonalityConfig cfg;
        cfg.neighbors = neighbor_set(neighbors);
        cfg.full_scale_db = full_scale_db;
        return psycho::tonality(s, cfg);
      },
      py::arg("spectrum"), py::arg("neighbors") = "as_printed",
      py::arg("full_scale_db") = spectral::kFullScaleDb);

  // room acoustics
  m.def("schroeder_decay", &room::schroeder_decay, py::arg("ir"));
  m.def("decay_time", &room::decay_time, py::arg("curve"), py::arg("start_db"), py::arg("end_db"),
        py::arg("extrapolate_to") = -60.0);
  m.def("rt20", &room::rt20, py::arg("curve"));
  m.def("rt30", &room::rt30, py::arg("curve"));
  m.def("edt", &room::edt, py::arg("curve"));
  m.def(
      "ir_decay_times",
      [](const ImpulseResponse& ir) {
        const auto t = room::ir_decay_times(ir);
        return py::make_tuple(t.rt30, t.rt20, t.edt);
      },
      py::arg("ir"), "Returns (RT30, RT20, EDT), channel-averaged");

  // complexity
  m.def(
      "correlation_dimension",
      [](const Signal& s, int delay, int depth, std::size_t max_points, double q_lo, double q_hi) {
        complexity::EmbeddingConfig cfg;
        cfg.delay = delay;
        cfg.depth = depth;
        cfg.max_points = max_points;
        cfg.q_lo = q_lo;
        cfg.q_hi = q_hi;
        return complexity::correlation_dimension(s, cfg);
      },
      py::arg("signal"), py::arg("delay") = 0, py::arg("depth") = 10,
      py::arg("max_points") = 5000, py::arg("q_lo") = 0.05, py::arg("q_hi") = 0.5);
  m.def(
      "echo_density",
      [](const Signal& s, int window_len, int hop) {
        return complexity::echo_density(s, {window_len, hop});
      },
      py::arg("signal"), py::arg("window_len") = 1024, py::arg("hop") = 512);

  // mds
  m.def(
      "monotone_regression",
      [](const std::vector<double>& dissimilarities, const std::vector<double>& distances,
         const std::string& ties) {
        return array_from_vector(
            mds::monotone_regression(dissimilarities, distances, tie_policy(ties)));
      },
      py::arg("dissimilarities"), py::arg("distances"), py::arg("ties") = "primary");
  m.def(
      "fit_mds",
      [](const mds::RatingSet& ratings, int dimension, int restarts, std::uint64_t seed,
         const std::string& ties, int jobs) {
        mds::FitOptions options;
        options.restarts = restarts;
        options.seed = seed;
        options.ties = tie_policy(ties);
        options.jobs = jobs;
        return mds::fit_mds(ratings, dimension, options);
      },
      py::arg("ratings"), py::arg("dimension"), py::arg("restarts") = 20, py::arg("seed") = 1,
      py::arg("ties") = "primary", py::arg("jobs") = 1);
  m.def(
      "dimension_sweep",
      [](const mds::RatingSet& ratings, int d_max, int restarts, std::uint64_t seed,
         const std::string& ties, int jobs) {
        mds::FitOptions options;
        options.restarts = restarts;
        options.seed = seed;
        options.ties = tie_policy(ties);
        options.jobs = jobs;
        py::list rows;
        for (const auto& row : mds::dimension_sweep(ratings, d_max, options))
          rows.append(py::dict(py::arg("dimension") = row.dimension,
                               py::arg("aggregate_stress1") = row.aggregate_stress1,
                               py::arg("mean_rsq") = row.mean_rsq));
        return rows;
      },
      py::arg("ratings"), py::arg("d_max"), py::arg("restarts") = 20, py::arg("seed") = 1,
      py::arg("ties") = "primary", py::arg("jobs") = 1);
  m.def("classify_stress", &mds::classify_stress, py::arg("stress1"));
  m.def(
      "load_ratings_csv",
      [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open: " + path);
        std::ostringstream text;
        text << in.rdbuf();
        return mds::ratings_from_csv(text.str());
      },
      py::arg("path"));

  // stats
  m.def(
      "kendall_tau_b",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        return stats::kendall_tau_b(x, y);
      },
      py::arg("x"), py::arg("y"));

  // pipeline
  m.def("compute_feature_row", &pipeline::compute_feature_row, py::arg("stimulus"), py::arg("ir"),
        py::arg("params") = pipeline::FeatureParams{});
  m.def(
      "run_pipeline",
      [](const std::string& config_path, const std::string& output_dir, int jobs) {
        pipeline::run_pipeline(pipeline::load_config(config_path), output_dir, jobs);
      },
      py::arg("config_path"), py::arg("output_dir"), py::arg("jobs") = 0);
  m.def(
      "synth_corpus",
      [](const std::string& output_dir, std::uint64_t seed, int items, int subjects) {
        pipeline::CorpusParams params;
        params.seed = seed;
        params.items = items;
        params.subjects = subjects;
        pipeline::synth_corpus(output_dir, params);
      },
      py::arg("output_dir"), py::arg("seed") = 7, py::arg("items") = 9, py::arg("subjects") = 11);

  py::class_<pipeline::FeatureParams>(m, "FeatureParams").def(py::init<>());
}
