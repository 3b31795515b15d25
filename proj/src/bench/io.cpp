#include "phlb/bench/io.hpp"

#include "phlb/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace phlb::io {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'H', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

template <class T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
}

template <class T>
void put(std::ostream& out, T v) {
  const T le = to_little_endian(v);
  out.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    fail(ErrorCode::format, "read_matrix: truncated file");
  }
  return to_little_endian(v);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "nan" || t == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    fail(ErrorCode::format, "expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    fail(ErrorCode::format, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::string require(const Metadata& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) fail(ErrorCode::format, "metadata key '" + key + "' missing");
  return it->second;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  return in;
}

std::string join_doubles(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v(i));
  }
  return out;
}

Vector parse_doubles(const std::string& text) {
  const auto items = split(text, ',');
  Vector v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_double(items[i]);
  return v;
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  return fs::path(prefix.string() + suffix);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  constexpr auto limit = static_cast<Eigen::Index>(std::numeric_limits<std::uint32_t>::max());
  if (m.rows() > limit || m.cols() > limit) fail(ErrorCode::format, "write_matrix: matrix too large");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
  }
  if (!out) fail(ErrorCode::io, "write_matrix: write failed");
}

Matrix read_matrix(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    fail(ErrorCode::format, "read_matrix: bad magic bytes");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) fail(ErrorCode::format, "read_matrix: unsupported version " + std::to_string(version));
  const auto rows = get<std::uint32_t>(in);
  const auto cols = get<std::uint32_t>(in);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get<double>(in);
  }
  return m;
}

void write_matrix(const fs::path& path, const Matrix& m) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  write_matrix(out, m);
}

Matrix read_matrix(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  return read_matrix(in);
}

fs::path sidecar_path(const fs::path& matrix_path) { return with_suffix(matrix_path, ".meta"); }

void write_metadata(const fs::path& path, const Metadata& meta) {
  auto out = open_out(path);
  for (const auto& [key, value] : meta) {
    if (key.find_first_of(":\n") != std::string::npos || value.find('\n') != std::string::npos) {
      fail(ErrorCode::format, "write_metadata: key or value contains a reserved character");
    }
    out << key << ": " << value << '\n';
  }
}

Metadata read_metadata(const fs::path& path) {
  auto in = open_in(path);
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail(ErrorCode::format, "read_metadata: line without ':' in " + path.string());
    meta[trim(line.substr(0, colon))] = trim(line.substr(colon + 1));
  }
  return meta;
}

std::string join_labels(const std::vector<std::string>& labels) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].find_first_of(",\n") != std::string::npos) {
      fail(ErrorCode::format, "channel label '" + labels[i] + "' contains ',' or a newline");
    }
    if (i) out += ',';
    out += labels[i];
  }
  return out;
}

std::vector<std::string> split_labels(const std::string& text) { return split(text, ','); }

void write_recording(const fs::path& path, const TimeSeriesMatrix& x, Metadata extra) {
  write_matrix(path, x.data());
  extra["kind"] = "recording";
  extra["sample_rate_hz"] = format_double(x.sample_rate_hz());
  extra["channel_labels"] = join_labels(x.channel_labels());
  write_metadata(sidecar_path(path), extra);
}

TimeSeriesMatrix read_recording(const fs::path& path) {
  Matrix data = read_matrix(path);
  const Metadata meta = read_metadata(sidecar_path(path));
  return TimeSeriesMatrix(std::move(data), parse_double(require(meta, "sample_rate_hz")),
                          split_labels(require(meta, "channel_labels")));
}

void write_lead_field(const fs::path& path, const source::LeadField& a) {
  write_matrix(path, a.matrix());
  write_metadata(sidecar_path(path), {{"kind", "lead_field"},
                                      {"channel_labels", join_labels(a.channel_labels())},
                                      {"n_sources", std::to_string(a.n_sources())}});
}

source::LeadField read_lead_field(const fs::path& path) {
  Matrix a = read_matrix(path);
  const Metadata meta = read_metadata(sidecar_path(path));
  if (meta.contains("n_sources") &&
      static_cast<Eigen::Index>(parse_uint(meta.at("n_sources"))) != a.cols()) {
    fail(ErrorCode::format, "read_lead_field: n_sources disagrees with the matrix");
  }
  return source::LeadField(std::move(a), split_labels(require(meta, "channel_labels")));
}

void write_dataset(const fs::path& prefix, const labeling::LabeledDataset& ds) {
  const auto& ep = ds.epochs;
  Matrix flat(static_cast<Eigen::Index>(ep.size()) * ep.n_channels, ep.length);
  for (std::size_t e = 0; e < ep.size(); ++e) {
    flat.middleRows(static_cast<Eigen::Index>(e) * ep.n_channels, ep.n_channels) = ep.epochs[e];
  }
  const fs::path matrix_path = with_suffix(prefix, ".epochs.phlb");
  write_matrix(matrix_path, flat);

  Metadata meta{{"kind", "dataset"},
                {"sample_rate_hz", format_double(ep.sample_rate_hz)},
                {"window_s", format_double(ep.window_s)},
                {"n_epochs", std::to_string(ep.size())},
                {"n_channels", std::to_string(ep.n_channels)},
                {"epoch_length", std::to_string(ep.length)},
                {"band_low_hz", format_double(ds.band.low_hz)},
                {"band_high_hz", format_double(ds.band.high_hz)},
                {"source_projection", ds.source.projection},
                {"source_index", std::to_string(ds.source.index)},
                {"source_relative_power", format_double(ds.source.relative_power)}};
  if (ds.ground_truth_pattern) meta["ground_truth_pattern"] = join_doubles(*ds.ground_truth_pattern);
  write_metadata(sidecar_path(matrix_path), meta);

  auto out = open_out(with_suffix(prefix, ".labels.csv"));
  out << "epoch_index,label,good,start_sample\n";
  for (std::size_t e = 0; e < ds.size(); ++e) {
    out << e << ',' << format_double(ds.labels[e]) << ',' << (ds.good[e] ? 1 : 0) << ','
        << ep.starts[e] << '\n';
  }
}

labeling::LabeledDataset read_dataset(const fs::path& prefix) {
  const fs::path matrix_path = with_suffix(prefix, ".epochs.phlb");
  const Matrix flat = read_matrix(matrix_path);
  const Metadata meta = read_metadata(sidecar_path(matrix_path));

  labeling::LabeledDataset ds;
  auto& ep = ds.epochs;
  ep.sample_rate_hz = parse_double(require(meta, "sample_rate_hz"));
  ep.window_s = parse_double(require(meta, "window_s"));
  ep.n_channels = static_cast<Eigen::Index>(parse_uint(require(meta, "n_channels")));
  ep.length = static_cast<Eigen::Index>(parse_uint(require(meta, "epoch_length")));
  const auto n_epochs = static_cast<Eigen::Index>(parse_uint(require(meta, "n_epochs")));
  if (flat.rows() != n_epochs * ep.n_channels || (n_epochs > 0 && flat.cols() != ep.length)) {
    fail(ErrorCode::format, "read_dataset: epoch matrix shape disagrees with metadata");
  }
  for (Eigen::Index e = 0; e < n_epochs; ++e) {
    ep.epochs.push_back(flat.middleRows(e * ep.n_channels, ep.n_channels));
  }
  ds.band = {parse_double(require(meta, "band_low_hz")), parse_double(require(meta, "band_high_hz"))};
  ds.source.projection = require(meta, "source_projection");
  ds.source.index = std::stol(require(meta, "source_index"));
  ds.source.relative_power = parse_double(require(meta, "source_relative_power"));
  if (meta.contains("ground_truth_pattern")) ds.ground_truth_pattern = parse_doubles(meta.at("ground_truth_pattern"));

  auto in = open_in(with_suffix(prefix, ".labels.csv"));
  std::string line;
  std::getline(in, line);
  if (trim(line) != "epoch_index,label,good,start_sample") {
    fail(ErrorCode::format, "read_dataset: unexpected labels header");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) fail(ErrorCode::format, "read_dataset: bad labels row '" + line + "'");
    if (parse_uint(f[0]) != ds.labels.size()) fail(ErrorCode::format, "read_dataset: epoch_index out of order");
    ds.labels.push_back(parse_double(f[1]));
    ds.good.push_back(parse_uint(f[2]) != 0);
    ep.starts.push_back(static_cast<Eigen::Index>(parse_uint(f[3])));
  }
  if (static_cast<Eigen::Index>(ds.labels.size()) != n_epochs) {
    fail(ErrorCode::format, "read_dataset: label count disagrees with epoch count");
  }
  return ds;
}

void write_model(const fs::path& path, const spoc::SpocModel& model) {
  auto out = open_out(path);
  out << "field,index,value\n";
  out << "eigenvalue,0," << format_double(model.eigenvalue) << '\n';
  out << "band_low_hz,0," << format_double(model.band.low_hz) << '\n';
  out << "band_high_hz,0," << format_double(model.band.high_hz) << '\n';
  for (Eigen::Index i = 0; i < model.w.size(); ++i) out << "w," << i << ',' << format_double(model.w(i)) << '\n';
  for (Eigen::Index i = 0; i < model.pattern.size(); ++i) {
    out << "pattern," << i << ',' << format_double(model.pattern(i)) << '\n';
  }
}

spoc::SpocModel read_model(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  if (trim(line) != "field,index,value") fail(ErrorCode::format, "read_model: unexpected header");
  spoc::SpocModel model;
  std::vector<double> w;
  std::vector<double> pattern;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) fail(ErrorCode::format, "read_model: bad row '" + line + "'");
    const double v = parse_double(f[2]);
    const auto idx = parse_uint(f[1]);
    if (f[0] == "eigenvalue") {
      model.eigenvalue = v;
    } else if (f[0] == "band_low_hz") {
      model.band.low_hz = v;
    } else if (f[0] == "band_high_hz") {
      model.band.high_hz = v;
    } else if (f[0] == "w" || f[0] == "pattern") {
      auto& dst = f[0] == "w" ? w : pattern;
      if (idx != dst.size()) fail(ErrorCode::format, "read_model: indices out of order");
      dst.push_back(v);
    } else {
      fail(ErrorCode::format, "read_model: unknown field '" + f[0] + "'");
    }
  }
  if (w.empty() || w.size() != pattern.size()) fail(ErrorCode::format, "read_model: w and pattern sizes differ");
  model.w = Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
  model.pattern = Eigen::Map<Vector>(pattern.data(), static_cast<Eigen::Index>(pattern.size()));
  return model;
}

std::string format_result_rows(const bench::SweepResult& r) {
  std::ostringstream out;
  const std::string prefix = std::to_string(r.config_id) + ',' + std::to_string(r.point.n_epochs) + ',' +
                             format_double(r.point.xi) + ',' + format_double(r.point.rel_power) + ',';
  const std::string seed = std::to_string(r.seed);
  for (const auto& f : r.folds) {
    out << prefix << f.fold << ',' << format_double(f.rho) << ','
        << format_double(f.alpha_rad.value_or(std::numeric_limits<double>::quiet_NaN())) << ',' << seed
        << '\n';
  }
  out << prefix << "mean," << format_double(r.mean_rho) << ',' << format_double(r.mean_alpha_rad) << ','
      << seed << '\n';
  return out.str();
}

std::vector<bench::SweepResult> parse_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kResultsHeader) {
    fail(ErrorCode::format, "results: unexpected header");
  }
  std::vector<bench::SweepResult> out;
  std::map<std::size_t, std::size_t> slot;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) fail(ErrorCode::format, "results: bad row '" + line + "'");
    const auto id = static_cast<std::size_t>(parse_uint(f[0]));
    auto [it, inserted] = slot.emplace(id, out.size());
    if (inserted) {
      bench::SweepResult r;
      r.config_id = id;
      r.point = {static_cast<std::size_t>(parse_uint(f[1])), parse_double(f[2]), parse_double(f[3])};
      r.seed = parse_uint(f[7]);
      out.push_back(r);
    }
    auto& r = out[it->second];
    const double rho = parse_double(f[5]);
    const double alpha = parse_double(f[6]);
    if (f[4] == "mean") {
      r.mean_rho = rho;
      r.mean_alpha_rad = alpha;
    } else {
      bench::FoldResult fr;
      fr.fold = static_cast<std::size_t>(parse_uint(f[4]));
      fr.rho = rho;
      if (!std::isnan(alpha)) fr.alpha_rad = alpha;
      r.folds.push_back(fr);
    }
  }
  return out;
}

std::vector<bench::SweepResult> read_results(const fs::path& path) {
  auto in = open_in(path);
  return parse_results(in);
}

namespace {

template <class T, class Parse>
std::vector<T> parse_list(const std::string& text, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) fail(ErrorCode::invalid_config, "empty list item in '" + text + "'");
    out.push_back(static_cast<T>(parse(item)));
  }
  return out;
}

Band parse_band(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorCode::invalid_config, "band must be LOW:HIGH, got '" + text + "'");
  return {parse_double(text.substr(0, colon)), parse_double(text.substr(colon + 1))};
}

}  // namespace

bench::SweepConfig parse_config(std::istream& in) {
  bench::SweepConfig c;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::invalid_config, "config: expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) fail(ErrorCode::invalid_config, "config: duplicate key '" + key + "'");
    try {
      if (key == "n_epochs_grid") {
        c.n_epochs_grid = parse_list<std::size_t>(value, parse_uint);
      } else if (key == "xi_grid") {
        c.xi_grid = parse_list<double>(value, parse_double);
      } else if (key == "source_power_quantiles") {
        c.source_power_quantiles = parse_list<double>(value, parse_double);
      } else if (key == "evaluation_budget") {
        c.evaluation_budget = parse_uint(value);
      } else if (key == "k_folds") {
        c.k_folds = parse_uint(value);
      } else if (key == "seed") {
        c.seed = parse_uint(value);
      } else if (key == "projection_kind") {
        c.projection_kind = bench::parse_projection_kind(value);
      } else if (key == "shrinkage") {
        c.shrinkage = parse_double(value);
      } else if (key == "mne_lambda") {
        c.mne_lambda = parse_double(value);
      } else if (key == "ica_components") {
        c.ica_components = static_cast<Eigen::Index>(parse_uint(value));
      } else if (key == "subsample") {
        if (value == "first") {
          c.subsample = bench::SubsampleMode::first;
        } else if (value == "random") {
          c.subsample = bench::SubsampleMode::random;
        } else {
          fail(ErrorCode::invalid_config, "subsample must be 'first' or 'random'");
        }
      } else if (key == "band") {
        c.pipeline.band = parse_band(value);
      } else if (key == "window_s") {
        c.pipeline.window_s = parse_double(value);
      } else if (key == "p2p_uv") {
        c.pipeline.p2p_threshold = parse_double(value) * 1e-6;
      } else if (key == "threads") {
        c.threads = parse_uint(value);
      } else {
        fail(ErrorCode::invalid_config, "config: unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::invalid_config) throw;
      fail(ErrorCode::invalid_config, "config: bad value for '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

bench::SweepConfig read_config(const fs::path& path) {
  auto in = open_in(path);
  return parse_config(in);
}

std::string format_config(const bench::SweepConfig& c) {
  auto list = [](const auto& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>) {
        out += format_double(v[i]);
      } else {
        out += std::to_string(v[i]);
      }
    }
    return out;
  };
  std::ostringstream out;
  out << "n_epochs_grid = " << list(c.n_epochs_grid) << '\n'
      << "xi_grid = " << list(c.xi_grid) << '\n'
      << "source_power_quantiles = " << list(c.source_power_quantiles) << '\n'
      << "evaluation_budget = " << c.evaluation_budget << '\n'
      << "k_folds = " << c.k_folds << '\n'
      << "seed = " << c.seed << '\n'
      << "projection_kind = " << bench::to_string(c.projection_kind) << '\n'
      << "shrinkage = " << format_double(c.shrinkage) << '\n'
      << "mne_lambda = " << format_double(c.mne_lambda) << '\n'
      << "ica_components = " << c.ica_components << '\n'
      << "subsample = " << (c.subsample == bench::SubsampleMode::first ? "first" : "random") << '\n'
      << "band = " << format_double(c.pipeline.band.low_hz) << ':' << format_double(c.pipeline.band.high_hz) << '\n'
      << "window_s = " << format_double(c.pipeline.window_s) << '\n'
      << "p2p_uv = " << format_double(c.pipeline.p2p_threshold * 1e6) << '\n'
      << "threads = " << c.threads << '\n';
  return out.str();
}

}  // namespace phlb::io
